#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "helimag/grid.hpp"
#include "support.hpp"

using namespace helimag;
using helimag::testing::interior_max_error;
using helimag::testing::observed_orders;
using helimag::testing::random_field;
using Catch::Approx;

namespace {

MaterialParams dmi_params() {
    MaterialParams p;
    p.ell_ex = 0.3;
    p.kappa = 0.2;
    return p;
}

double max_abs(const VectorField& u) {
    double m = 0.0;
    for (const auto& v : u.values()) m = std::max(m, norm(v));
    return m;
}

}  // namespace

TEST_CASE("grid geometry and indexing") {
    Grid g({2.0, 1.0, 0.5}, {4, 5, 2});
    CHECK(g.size() == 40);
    CHECK(g.spacing()[0] == 2.0 / 4);
    CHECK(g.spacing()[1] == 1.0 / 5);
    CHECK(g.volume() == Approx(1.0));
    for (std::size_t c = 0; c < g.size(); ++c) {
        const auto ijk = g.coords(c);
        CHECK(g.index(ijk[0], ijk[1], ijk[2]) == c);
    }
    CHECK(g.center(0).x == Approx(0.25));
    CHECK(g.stride(Axis::y) == 4);
    CHECK_THROWS_AS(Grid({1.0, 1.0, 1.0}, {0, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(Grid({-1.0, 1.0, 1.0}, {1, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(axis_from_index(0), std::invalid_argument);
    CHECK_THROWS_AS(axis_from_index(4), std::invalid_argument);
    CHECK(axis_from_index(3) == Axis::z);
}

TEST_CASE("magnetization fields enforce the unit sphere") {
    Grid g({1.0, 1.0, 1.0}, {3, 3, 3});
    CHECK_THROWS_AS(MagnetizationField(VectorField(g, {0, 0, 2})), std::invalid_argument);
    CHECK_THROWS_AS(MagnetizationField::project(VectorField(g)), std::domain_error);
    const auto m = testing::random_unit_field(g, 3);
    CHECK(max_norm_deviation(m) < 1e-15);
    CHECK(l2_norm(VectorField(g, {0, 0, 1})) == Approx(1.0));
}

TEST_CASE("inner product is symmetric and checks grids") {
    Grid g({1.0, 2.0, 1.0}, {4, 3, 2});
    const auto u = random_field(g, 1), v = random_field(g, 2);
    CHECK(inner_product(u, v) == Approx(inner_product(v, u)).epsilon(1e-15));
    CHECK(inner_product(u, u) >= 0.0);
    CHECK_THROWS_AS(inner_product(u, VectorField(Grid({1, 1, 1}, {2, 2, 2}))), std::invalid_argument);
}

TEST_CASE("partial derivative examples") {
    Grid g({1.0, 1.0, 1.0}, {8, 6, 5});
    CHECK(max_abs(partial_derivative(VectorField(g, {0, 0, 1}), Axis::x)) == 0.0);

    const auto lin = sample(g, [](const Vec3& x) { return Vec3{x.x, 0, 0}; });
    const auto d = partial_derivative(lin, Axis::x);
    CHECK(interior_max_error(d, VectorField(g, {1, 0, 0}), 1) < 1e-13);

    Grid thin({1.0, 1.0, 1.0}, {4, 4, 1});
    CHECK_THROWS_AS(partial_derivative(VectorField(thin), Axis::z), std::invalid_argument);
}

TEST_CASE("central differences converge at second order") {
    std::vector<double> errors;
    for (int n : {16, 32, 64}) {
        Grid g({2.0, 1.0, 1.0}, {n, 1, 1});
        const auto u = sample(g, [](const Vec3& x) { return Vec3{std::sin(x.x), 0, 0}; });
        const auto exact = sample(g, [](const Vec3& x) { return Vec3{std::cos(x.x), 0, 0}; });
        errors.push_back(interior_max_error(partial_derivative(u, Axis::x), exact, 1));
    }
    for (double p : observed_orders(errors)) CHECK(p > 1.9);
}

TEST_CASE("ghost rule examples") {
    const Vec3 g = ghost_value({0, 0, 1}, {1, 0, 0}, 0.1, 2.0);
    CHECK(g.x == Approx(0.0).margin(1e-15));
    CHECK(g.y == Approx(-0.2));
    CHECK(g.z == Approx(1.0));
    CHECK(ghost_value({1, 0, 0}, {1, 0, 0}, 0.1, 2.0) == Vec3{1, 0, 0});
    CHECK(ghost_value({0.6, 0, 0.8}, {0, 0, -1}, 0.1, 0.0) == Vec3{0.6, 0, 0.8});

    MaterialParams p;
    p.ell_ex = 1.0;
    p.kappa = 0.0;
    Grid grid({1, 1, 1}, {3, 3, 3});
    const auto m = testing::random_unit_field(grid, 7);
    const auto layer = fill_ghost_llg(m, p);
    for (int f = 0; f < 6; ++f) {
        REQUIRE(layer.faces[f].size() == 9);
        for (std::size_t q = 0; q < 9; ++q) CHECK(layer.faces[f][q] == m[layer.adjacent[f][q]]);
    }
}

TEST_CASE("boundary helical flux vanishes after ghost fill") {
    const auto p = dmi_params();
    Grid g({1.0, 1.0, 0.5}, {6, 6, 3});
    const auto m = testing::random_unit_field(g, 11);
    CHECK(max_boundary_helical_flux(m, p) < 1e-12);
}

TEST_CASE("helical partial examples") {
    auto p = dmi_params();
    Grid g({1.0, 1.0, 1.0}, {5, 5, 5});
    const auto d = helical_partial(VectorField(g, {0, 0, 1}), Axis::x, p);
    CHECK(interior_max_error(d, VectorField(g, {0, p.kappa / p.ell_ex, 0}), 1) < 1e-14);

    MaterialParams plain = p;
    plain.kappa = 0.0;
    const auto u = random_field(g, 5);
    const auto lhs = helical_partial(u, Axis::y, plain);
    const auto rhs = plain.ell_ex * partial_derivative(u, Axis::y);
    CHECK(interior_max_error(lhs, rhs, 0) < 1e-14);

    std::vector<double> errors;
    const double q = 2.0;
    for (int n : {16, 32, 64}) {
        Grid gh({1.0, 1.0, 1.0}, {n, 1, 1});
        const auto helix = sample(gh, [&](const Vec3& x) { return Vec3{std::cos(q * x.x), std::sin(q * x.x), 0}; });
        const auto exact = sample(gh, [&](const Vec3& x) {
            const Vec3 uu{std::cos(q * x.x), std::sin(q * x.x), 0};
            return p.ell_ex * q * Vec3{-std::sin(q * x.x), std::cos(q * x.x), 0} +
                   p.helical_shift() * cross(uu, Vec3{1, 0, 0});
        });
        errors.push_back(interior_max_error(helical_partial(helix, Axis::x, p), exact, 1));
    }
    for (double o : observed_orders(errors)) CHECK(o > 1.9);
}

TEST_CASE("helical laplacian of a constant field") {
    const auto p = dmi_params();
    Grid g({1.0, 1.0, 1.0}, {6, 6, 6});
    const Vec3 u0 = normalize(Vec3{1, 2, 3});
    Vec3 expansion{};
    for (int i = 0; i < 3; ++i) expansion += cross(cross(u0, unit_vector(i)), unit_vector(i));
    CHECK(norm(expansion + 2.0 * u0) < 1e-15);

    const auto lap = helical_laplacian(VectorField(g, u0), p);
    const double c = p.helical_shift();
    CHECK(interior_max_error(lap, VectorField(g, -2.0 * c * c * u0), 2) < 1e-12);
}

TEST_CASE("plain laplacian of a quadratic") {
    MaterialParams p;
    p.ell_ex = 0.5;
    Grid g({1.0, 1.0, 1.0}, {10, 5, 5});
    const auto u = sample(g, [](const Vec3& x) { return Vec3{x.x * x.x, 0, 0}; });
    const auto lap = helical_laplacian(u, p);
    CHECK(interior_max_error(lap, VectorField(g, {2 * p.ell_ex * p.ell_ex, 0, 0}), 2) < 1e-11);
}

TEST_CASE("helical laplacian matches the composed operator away from the boundary") {
    const auto p = dmi_params();
    Grid g({1.0, 1.0, 1.0}, {7, 6, 5});
    const auto u = random_field(g, 21);
    VectorField composed(g);
    for (int i = 0; i < 3; ++i) {
        const Axis a = static_cast<Axis>(i);
        composed += helical_partial(helical_partial(u, a, p), a, p);
    }
    CHECK(interior_max_error(helical_laplacian(u, p), composed, 2) < 1e-11);
}

TEST_CASE("discrete summation by parts holds to rounding") {
    const auto p = dmi_params();
    Grid g({1.0, 0.8, 0.5}, {6, 5, 4});
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto u = random_field(g, 100 + seed), v = random_field(g, 200 + seed);
        const double lhs = inner_product(helical_gradient(u, p), helical_gradient(v, p));
        const double rhs = -inner_product(u, helical_laplacian(v, p));
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("adjoints are exact transposes") {
    const auto p = dmi_params();
    Grid g({1.0, 1.0, 1.0}, {5, 4, 3});
    const auto u = random_field(g, 31), v = random_field(g, 32);
    for (int i = 0; i < 3; ++i) {
        const Axis a = static_cast<Axis>(i);
        const GhostRule robin{p.robin_coefficient()};
        CHECK(inner_product(partial_derivative(u, a, robin), v) ==
              Approx(inner_product(u, partial_derivative_adjoint(v, a, robin))).epsilon(1e-13));
        CHECK(inner_product(helical_partial(u, a, p), v) ==
              Approx(inner_product(u, helical_partial_adjoint(v, a, p))).epsilon(1e-13));
    }
    CHECK(inner_product(curl(u), v) == Approx(inner_product(u, curl_adjoint(v))).epsilon(1e-13));
}

TEST_CASE("curl examples") {
    Grid g({1.0, 1.0, 1.0}, {6, 6, 6});
    CHECK(max_abs(curl(VectorField(g, {0.3, 0.4, 0.5}))) < 1e-14);
    const auto u = sample(g, [](const Vec3& x) { return Vec3{0, 0, x.x}; });
    CHECK(interior_max_error(curl(u), VectorField(g, {0, -1, 0}), 1) < 1e-12);

    std::vector<double> errors;
    const double q = 3.0;
    for (int n : {16, 32, 64}) {
        Grid gh({1.0, 1.0, 1.0}, {1, 1, n});
        const auto helix = sample(gh, [&](const Vec3& x) { return Vec3{std::cos(q * x.z), std::sin(q * x.z), 0}; });
        const auto exact = sample(gh, [&](const Vec3& x) { return Vec3{-q * std::cos(q * x.z), -q * std::sin(q * x.z), 0}; });
        errors.push_back(interior_max_error(curl(helix), exact, 1));
    }
    for (double o : observed_orders(errors)) CHECK(o > 1.9);
}

TEST_CASE("operators are linear") {
    const auto p = dmi_params();
    Grid g({1.0, 1.0, 1.0}, {4, 4, 4});
    const auto u = random_field(g, 41), v = random_field(g, 42);
    const double a = 0.7, b = -1.3;
    const auto combo = a * u + b * v;
    const auto lhs = helical_laplacian(combo, p);
    const auto rhs = a * helical_laplacian(u, p) + b * helical_laplacian(v, p);
    CHECK(interior_max_error(lhs, rhs, 0) < 1e-11);
    const auto lc = curl(combo), rc = a * curl(u) + b * curl(v);
    CHECK(interior_max_error(lc, rc, 0) < 1e-12);
}

TEST_CASE("leibniz rule residual decreases under refinement") {
    const auto p = dmi_params();
    std::vector<double> residuals;
    for (int n : {8, 16, 32}) {
        Grid g({1.0, 1.0, 1.0}, {n, n, 2});
        const auto u = sample(g, [](const Vec3& x) { return Vec3{std::sin(x.x), std::cos(x.y), x.x * x.y}; });
        const auto v = sample(g, [](const Vec3& x) { return Vec3{x.y, std::exp(-x.x), std::sin(x.x + x.y)}; });
        const auto guv = helical_gradient(cross(u, v), p);
        const auto gu = helical_gradient(u, p), gv = helical_gradient(v, p);
        double r2 = 0.0;
        for (int i = 0; i < 3; ++i) {
            const auto diff = guv.components[i] - cross(gu.components[i], v) - cross(u, gv.components[i]);
            r2 += inner_product(diff, diff);
        }
        residuals.push_back(std::sqrt(r2));
    }
    for (double o : observed_orders(residuals)) CHECK(o >= 1.0);
}

TEST_CASE("collapsed axes contribute only the helical shift") {
    const auto p = dmi_params();
    Grid g({1.0, 1.0, 0.1}, {4, 4, 1});
    const Vec3 u0{0, 0, 1};
    const auto grad = helical_gradient(VectorField(g, u0), p);
    for (const auto& v : grad.components[2].values()) CHECK(norm(v) < 1e-15);
    const VectorField shift(g, p.helical_shift() * cross(u0, Vec3{1, 0, 0}));
    CHECK(interior_max_error(grad.components[0], shift, 1) < 1e-14);
}
