#include <catch_amalgamated.hpp>

#include <cmath>

#include "helimag/uniqueness.hpp"
#include "support.hpp"

using namespace helimag;
using Catch::Approx;
using helimag::testing::random_field;
using helimag::testing::random_unit_field;

namespace {

MaterialParams lab_params() {
    MaterialParams p;
    p.ell_ex = 0.15;
    p.kappa = 0.1;
    p.alpha = 1.0;
    p.enable_aniso = true;
    return p;
}

std::vector<double> uniform_times(int n, double dt) {
    std::vector<double> t;
    for (int k = 0; k < n; ++k) t.push_back(k * dt);
    return t;
}

}  // namespace

TEST_CASE("psi operator examples") {
    Grid g({1, 1, 1}, {3, 3, 3});
    MaterialParams p;
    p.alpha = 0.4;
    const VectorField u(g, {0, 0, 1}), rate(g, {1, 2, 3});
    const auto out = psi_apply(u, rate, p);
    for (std::size_t c = 0; c < g.size(); ++c) CHECK(norm(out[c] - Vec3{0.4, 0.8, 1.2}) < 1e-15);

    p.enable_aniso = true;
    const auto aniso = psi_apply(u, VectorField(g), p);
    for (std::size_t c = 0; c < g.size(); ++c) CHECK(norm(aniso[c] - Vec3{0, 0, -2}) < 1e-15);
}

TEST_CASE("psi form pairs with psi operator") {
    Grid g({1.0, 0.8, 0.5}, {5, 4, 3});
    auto p = lab_params();
    p.enable_demag = true;
    const auto t = build_demag_tensor(g);
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto u1 = random_field(g, 10 + s), r1 = random_field(g, 20 + s), u2 = random_field(g, 30 + s);
        const double form = psi_form(u1, r1, u2, p, &t);
        CHECK(form == Approx(inner_product(psi_apply(u1, r1, p, &t), u2)).epsilon(1e-11));
        CHECK(psi_form(u1, r1, VectorField(g), p, &t) == 0.0);
        // the static part is symmetric
        const VectorField zero(g);
        CHECK(psi_form(u1, zero, u2, p, &t) == Approx(psi_form(u2, zero, u1, p, &t)).epsilon(1e-11));
    }
}

TEST_CASE("psi operator is linear") {
    Grid g({1.0, 1.0, 0.5}, {4, 4, 2});
    const auto p = lab_params();
    const auto a = random_field(g, 1), b = random_field(g, 2), ra = random_field(g, 3), rb = random_field(g, 4);
    const auto lhs = psi_apply(a + 2.5 * b, ra + 2.5 * rb, p);
    const auto rhs = psi_apply(a, ra, p) + 2.5 * psi_apply(b, rb, p);
    CHECK(l2_norm(lhs - rhs) <= 1e-12 * l2_norm(lhs));
}

TEST_CASE("gronwall report examples") {
    const auto r = gronwall_report(1.0, 0.0, 0.0, 0.5);
    CHECK(r.C_left == Approx(0.5));
    CHECK(r.C_right == 0.0);
    CHECK(std::isinf(r.T_star));

    const auto q = gronwall_report(1.0, 2.0, 1.0, 0.5);
    CHECK(q.C_right == Approx(2.0 * 1.0 + 1.5 * 4.0));
    CHECK(q.T_star == Approx(std::sqrt(0.5 / 8.0)));

    CHECK(gronwall_report(1.0, 1.0, 1.0, 1.0).T_star == 0.0);
    CHECK(gronwall_report(1.0, 1.0, 1.0, 1.0 - 1e-9).T_star < 1e-4);
    CHECK_THROWS_AS(gronwall_report(1.0, 1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("optimal delta beats an audit grid") {
    for (double alpha : {0.1, 0.5, 1.0, 3.0})
        for (double cpi : {0.5, 2.0})
            for (double cpsi : {0.1, 5.0}) {
                const double d = optimal_delta(alpha, cpi, cpsi);
                const double upper = 2 * alpha / (alpha + 1);
                REQUIRE(d > 0.0);
                REQUIRE(d < upper);
                const double best = gronwall_report(alpha, cpi, cpsi, d).T_star;
                for (int i = 1; i < 100; ++i)
                    CHECK(gronwall_report(alpha, cpi, cpsi, upper * i / 100.0).T_star <= best * (1 + 1e-9));
            }
    CHECK(optimal_delta(1.0, 0.0, 0.0) == Approx(0.5));
}

TEST_CASE("poincare harness closed forms") {
    Grid g({1, 1, 1}, {2, 2, 1});
    const auto v = random_field(g, 7);
    const auto times = uniform_times(201, 0.005);
    std::vector<VectorField> linear;
    for (double t : times) linear.push_back(t * v);
    const auto r = poincare_check(times, linear);
    CHECK(r.holds);
    CHECK(r.lhs.back() / r.rhs.back() == Approx(1.0 / 3.0).epsilon(1e-4));

    std::vector<VectorField> zero(times.size(), VectorField(g));
    const auto z = poincare_check(times, zero);
    CHECK(z.holds);
    CHECK(z.min_slack == 0.0);

    std::vector<VectorField> shifted;
    for (double t : times) shifted.push_back(v + t * v);
    CHECK_THROWS_AS(poincare_check(times, shifted), std::invalid_argument);

    std::vector<VectorField> wave;
    for (double t : times) wave.push_back(std::sin(5 * t) * v);
    CHECK(poincare_check(times, wave).holds);
}

TEST_CASE("gronwall harness closed forms") {
    const auto times = uniform_times(101, 0.01);
    std::vector<double> zero(times.size(), 0.0);
    CHECK(gronwall_check(times, zero, 2.0, 0.0));
    CHECK(gronwall_conclusion(zero, 0.0));

    // e^t - 1 satisfies u <= C int u only when C is large enough near t = 0
    std::vector<double> growth;
    for (double t : times) growth.push_back(std::exp(t) - 1.0);
    CHECK_FALSE(gronwall_check(times, growth, 0.5, 0.0));
    CHECK_FALSE(gronwall_conclusion(growth, 1e-12));

    std::vector<double> late(times.size(), 0.0);
    late.back() = 1e-3;
    CHECK_FALSE(gronwall_check(times, late, 10.0, 0.0));

    std::vector<double> negative(times.size(), 0.0);
    negative[3] = -1.0;
    CHECK_THROWS_AS(gronwall_check(times, negative, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("perturbation field is tangent and unit") {
    Grid g({1.0, 1.0, 0.25}, {6, 6, 2});
    const auto m0 = random_unit_field(g, 11);
    const auto p = perturbation_field(m0, 3);
    for (std::size_t c = 0; c < g.size(); ++c) {
        CHECK(std::abs(dot(p[c], m0[c])) < 1e-14);
        CHECK(norm(p[c]) == Approx(1.0).epsilon(1e-14));
    }
    const auto q = perturbation_field(m0, 3);
    CHECK(l2_norm(p - q) == 0.0);
}

TEST_CASE("identical starts stay identical") {
    Grid g({1.0, 1.0, 0.25}, {6, 6, 2});
    const auto p = lab_params();
    const auto m0 = MagnetizationField::project(
        sample(g, [](const Vec3& x) { return Vec3{std::cos(2 * x.x), std::sin(2 * x.x), 0.5 + 0.5 * x.y}; }));
    const auto f = AppliedField::constant({0, 0, 0.5});
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 0.1;
    const auto r = strong_strong_experiment(m0, 0.0, f, p, cfg);
    CHECK(r.max_w == 0.0);
    CHECK(r.gronwall.C_left > 0.0);
    CHECK(r.gronwall.T_star > 0.0);
    for (double s : r.slack) CHECK(s == 0.0);
    CHECK(poincare_check(r.diff).holds);
}

TEST_CASE("strong-strong difference scales with the perturbation") {
    Grid g({1.0, 1.0, 0.25}, {6, 6, 2});
    const auto p = lab_params();
    const auto m0 = MagnetizationField::project(
        sample(g, [](const Vec3& x) { return Vec3{std::cos(2 * x.x), std::sin(2 * x.x), 0.5 + 0.5 * x.y}; }));
    const auto f = AppliedField::constant({0, 0, 0.5});
    SolverConfig cfg;
    cfg.dt = 0.005;
    cfg.t_end = 0.1;
    const auto sweep = epsilon_sweep(m0, {1e-2, 1e-3, 1e-4}, f, p, cfg);
    REQUIRE(sweep.runs.size() == 3);
    CHECK(sweep.horizon > 0.0);
    CHECK(sweep.max_variation < 0.2);
    for (const auto& run : sweep.runs) {
        std::vector<VectorField> shifted;
        for (const auto& w : run.diff.w) shifted.push_back(w - run.diff.w[0]);
        CHECK(poincare_check(run.diff.times, shifted).holds);
        for (std::size_t k = 1; k < run.diff.w_dot_sq_integral.size(); ++k)
            CHECK(run.diff.w_dot_sq_integral[k] >= run.diff.w_dot_sq_integral[k - 1]);
    }
    CHECK_THROWS_AS(epsilon_sweep(m0, {0.0}, f, p, cfg), std::invalid_argument);
}

TEST_CASE("weak-strong estimate of a scheme against itself") {
    Grid g({1.0, 1.0, 0.25}, {4, 4, 2});
    const auto p = lab_params();
    const auto m0 = random_unit_field(g, 17);
    const auto f = AppliedField::constant({0, 0, 0.5});
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 0.1;
    const auto traj = simulate(m0, f, p, cfg);
    const auto level = weak_strong_estimate(traj, traj, f);
    CHECK(level.w_final == 0.0);
    for (double gap : level.gap) CHECK(gap == 0.0);
}

TEST_CASE("weak-strong agreement in the macrospin limit") {
    Grid g({1, 1, 1}, {1, 1, 1});
    MaterialParams p;
    p.alpha = 0.1;
    SolverConfig cfg;
    cfg.dt = 0.02;
    cfg.t_end = 1.0;
    const auto rep = weak_strong_experiment(
        g, [](const Vec3&) { return Vec3{1.0, 0.0, 0.3}; }, AppliedField::constant({0, 0, 2.0}), p, cfg, 3);
    REQUIRE(rep.levels.size() == 3);
    REQUIRE(rep.orders.size() == 2);
    CHECK(rep.levels[1].cells[0] == 2);
    CHECK(rep.levels[2].dt == Approx(0.005));
    for (double o : rep.orders) CHECK(o > 1.0);
}
