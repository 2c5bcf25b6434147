#include "helimag/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace helimag {

Axis axis_from_index(int one_based) {
    if (one_based < 1 || one_based > 3)
        throw std::invalid_argument("axis must be in {1,2,3}, got " + std::to_string(one_based));
    return static_cast<Axis>(one_based - 1);
}

Grid::Grid(std::array<double, 3> extents, std::array<int, 3> cells) : extents_(extents), cells_(cells) {
    for (int i = 0; i < 3; ++i) {
        if (!(extents[i] > 0.0) || !std::isfinite(extents[i]))
            throw std::invalid_argument("grid extents must be positive and finite");
        if (cells[i] < 1) throw std::invalid_argument("grid cell counts must be >= 1");
        spacing_[i] = extents[i] / cells[i];
    }
    size_ = static_cast<std::size_t>(cells[0]) * static_cast<std::size_t>(cells[1]) *
            static_cast<std::size_t>(cells[2]);
}

std::array<int, 3> Grid::coords(std::size_t c) const {
    const auto nx = static_cast<std::size_t>(cells_[0]);
    const auto ny = static_cast<std::size_t>(cells_[1]);
    return {static_cast<int>(c % nx), static_cast<int>((c / nx) % ny), static_cast<int>(c / (nx * ny))};
}

Vec3 Grid::center(std::size_t c) const {
    const auto ijk = coords(c);
    return {(ijk[0] + 0.5) * spacing_[0], (ijk[1] + 0.5) * spacing_[1], (ijk[2] + 0.5) * spacing_[2]};
}

std::size_t Grid::stride(Axis a) const {
    switch (a) {
        case Axis::x: return 1;
        case Axis::y: return static_cast<std::size_t>(cells_[0]);
        case Axis::z: return static_cast<std::size_t>(cells_[0]) * static_cast<std::size_t>(cells_[1]);
    }
    return 1;
}

// ---------------------------------------------------------------------------

VectorField::VectorField(Grid grid, Vec3 fill) : grid_(std::move(grid)), values_(grid_.size(), fill) {}

VectorField::VectorField(Grid grid, std::vector<Vec3> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw std::invalid_argument("VectorField: value count does not match grid cell count");
}

void require_same_grid(const VectorField& a, const VectorField& b, const char* what) {
    if (!(a.grid() == b.grid())) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

VectorField& VectorField::operator+=(const VectorField& o) {
    require_same_grid(*this, o, "VectorField +=");
    for (std::size_t c = 0; c < values_.size(); ++c) values_[c] += o.values_[c];
    return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
    require_same_grid(*this, o, "VectorField -=");
    for (std::size_t c = 0; c < values_.size(); ++c) values_[c] -= o.values_[c];
    return *this;
}

VectorField& VectorField::operator*=(double s) {
    for (auto& v : values_) v *= s;
    return *this;
}

VectorField& VectorField::axpy(double s, const VectorField& o) {
    require_same_grid(*this, o, "VectorField axpy");
    for (std::size_t c = 0; c < values_.size(); ++c) values_[c] += s * o.values_[c];
    return *this;
}

bool VectorField::all_finite() const {
    for (const auto& v : values_)
        if (!is_finite(v)) return false;
    return true;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }

VectorField cross(const VectorField& a, const VectorField& b) {
    require_same_grid(a, b, "cross");
    VectorField out(a.grid());
    for (std::size_t c = 0; c < a.size(); ++c) out[c] = cross(a[c], b[c]);
    return out;
}

VectorField cross(const VectorField& a, const Vec3& b) {
    VectorField out(a.grid());
    for (std::size_t c = 0; c < a.size(); ++c) out[c] = cross(a[c], b);
    return out;
}

VectorField sample(const Grid& grid, const std::function<Vec3(const Vec3&)>& fn) {
    VectorField out(grid);
    for (std::size_t c = 0; c < grid.size(); ++c) out[c] = fn(grid.center(c));
    return out;
}

// ---------------------------------------------------------------------------

MagnetizationField::MagnetizationField(VectorField field, double tolerance) : field_(std::move(field)) {
    for (std::size_t c = 0; c < field_.size(); ++c) {
        if (!is_finite(field_[c]) || std::abs(norm(field_[c]) - 1.0) > tolerance)
            throw std::invalid_argument("magnetization violates |m| = 1 at cell " + std::to_string(c));
    }
}

MagnetizationField MagnetizationField::project(const VectorField& field) {
    VectorField out(field.grid());
    for (std::size_t c = 0; c < field.size(); ++c) {
        const double n = norm(field[c]);
        if (!(n > 0.0) || !std::isfinite(n))
            throw std::domain_error("cannot project zero or non-finite vector onto the sphere at cell " +
                                    std::to_string(c));
        out[c] = field[c] / n;
    }
    return MagnetizationField(std::move(out), 1e-14);
}

double max_norm_deviation(const VectorField& u) {
    double worst = 0.0;
    for (const auto& v : u.values()) worst = std::max(worst, std::abs(norm(v) - 1.0));
    return worst;
}

// ---------------------------------------------------------------------------

GhostRule llg_ghost_rule(const MaterialParams& params) {
    if (!(params.ell_ex > 0.0)) throw std::invalid_argument("ell_ex > 0 violated");
    return GhostRule{params.robin_coefficient()};
}

Vec3 ghost_value(const Vec3& u_in, const Vec3& outward_normal, double h, double robin) {
    return u_in - (h * robin) * cross(u_in, outward_normal);
}

Vec3 face_normal(int face) {
    const Vec3 e = unit_vector(face / 2);
    return face % 2 == 0 ? -e : e;
}

GhostLayer fill_ghost_llg(const VectorField& m, const MaterialParams& params) {
    const GhostRule rule = llg_ghost_rule(params);
    const Grid& g = m.grid();
    GhostLayer layer;
    for (std::size_t c = 0; c < g.size(); ++c) {
        const auto ijk = g.coords(c);
        for (int a = 0; a < 3; ++a) {
            const double h = g.spacing()[a];
            if (ijk[a] == 0) {
                layer.faces[2 * a].push_back(ghost_value(m[c], face_normal(2 * a), h, rule.robin));
                layer.adjacent[2 * a].push_back(c);
            }
            if (ijk[a] == g.cells()[a] - 1) {
                layer.faces[2 * a + 1].push_back(ghost_value(m[c], face_normal(2 * a + 1), h, rule.robin));
                layer.adjacent[2 * a + 1].push_back(c);
            }
        }
    }
    return layer;
}

namespace {

// Central difference with ghosts; zero on a collapsed axis.
VectorField diff(const VectorField& u, Axis axis, double robin) {
    const Grid& g = u.grid();
    VectorField out(g);
    const int a = index_of(axis);
    const int n = g.cells()[a];
    if (n < 2) return out;
    const double h = g.spacing()[a];
    const std::size_t s = g.stride(axis);
    const Vec3 e = unit_vector(a);
    const double inv2h = 0.5 / h;
    for (std::size_t c = 0; c < g.size(); ++c) {
        const int p = g.coords(c)[a];
        const Vec3 lo = p > 0 ? u[c - s] : ghost_value(u[c], -e, h, robin);
        const Vec3 hi = p < n - 1 ? u[c + s] : ghost_value(u[c], e, h, robin);
        out[c] = (hi - lo) * inv2h;
    }
    return out;
}

// Exact transpose of diff: -d_N v plus boundary-cell corrections.
VectorField diff_transpose(const VectorField& v, Axis axis, double robin) {
    const Grid& g = v.grid();
    VectorField out(g);
    const int a = index_of(axis);
    const int n = g.cells()[a];
    if (n < 2) return out;
    const double h = g.spacing()[a];
    const std::size_t s = g.stride(axis);
    const Vec3 e = unit_vector(a);
    const double inv2h = 0.5 / h;
    for (std::size_t c = 0; c < g.size(); ++c) {
        const int p = g.coords(c)[a];
        const Vec3 lo = p > 0 ? v[c - s] : v[c];
        const Vec3 hi = p < n - 1 ? v[c + s] : v[c];
        Vec3 r = (lo - hi) * inv2h;
        if (p == 0) r += (-1.0 / h) * v[c] + (0.5 * robin) * cross(v[c], e);
        if (p == n - 1) r += (1.0 / h) * v[c] + (0.5 * robin) * cross(v[c], e);
        out[c] = r;
    }
    return out;
}

void require_cells(const Grid& g, Axis axis, int minimum) {
    if (g.cells(axis) < minimum)
        throw std::invalid_argument("grid too small along axis " + std::to_string(index_of(axis) + 1) + ": need >= " +
                                    std::to_string(minimum) + " cells");
}

VectorField helical_apply(const VectorField& u, Axis axis, const MaterialParams& params) {
    const GhostRule rule = llg_ghost_rule(params);
    VectorField out = diff(u, axis, rule.robin);
    out *= params.ell_ex;
    const double shift = params.helical_shift();
    const Vec3 e = unit_vector(index_of(axis));
    for (std::size_t c = 0; c < u.size(); ++c) out[c] += shift * cross(u[c], e);
    return out;
}

VectorField helical_apply_adjoint(const VectorField& v, Axis axis, const MaterialParams& params) {
    const GhostRule rule = llg_ghost_rule(params);
    VectorField out = diff_transpose(v, axis, rule.robin);
    out *= params.ell_ex;
    const double shift = params.helical_shift();
    const Vec3 e = unit_vector(index_of(axis));
    for (std::size_t c = 0; c < v.size(); ++c) out[c] -= shift * cross(v[c], e);
    return out;
}

constexpr std::array<Axis, 3> all_axes{Axis::x, Axis::y, Axis::z};

}  // namespace

VectorField partial_derivative(const VectorField& u, Axis axis, GhostRule ghost) {
    require_cells(u.grid(), axis, 2);
    return diff(u, axis, ghost.robin);
}

VectorField partial_derivative_adjoint(const VectorField& v, Axis axis, GhostRule ghost) {
    require_cells(v.grid(), axis, 2);
    return diff_transpose(v, axis, ghost.robin);
}

VectorField helical_partial(const VectorField& u, Axis axis, const MaterialParams& params) {
    require_cells(u.grid(), axis, 2);
    return helical_apply(u, axis, params);
}

VectorField helical_partial_adjoint(const VectorField& v, Axis axis, const MaterialParams& params) {
    require_cells(v.grid(), axis, 2);
    return helical_apply_adjoint(v, axis, params);
}

HelicalGradient helical_gradient(const VectorField& u, const MaterialParams& params) {
    return HelicalGradient{{helical_apply(u, Axis::x, params), helical_apply(u, Axis::y, params),
                            helical_apply(u, Axis::z, params)}};
}

VectorField helical_laplacian(const VectorField& u, const MaterialParams& params) {
    VectorField out(u.grid());
    for (Axis a : all_axes) out -= helical_apply_adjoint(helical_apply(u, a, params), a, params);
    return out;
}

VectorField curl(const VectorField& u, GhostRule ghost) {
    VectorField out(u.grid());
    for (Axis a : all_axes) {
        const VectorField d = diff(u, a, ghost.robin);
        const Vec3 e = unit_vector(index_of(a));
        for (std::size_t c = 0; c < u.size(); ++c) out[c] += cross(e, d[c]);
    }
    return out;
}

VectorField curl_adjoint(const VectorField& v, GhostRule ghost) {
    VectorField out(v.grid());
    for (Axis a : all_axes) {
        const Vec3 e = unit_vector(index_of(a));
        VectorField ev(v.grid());
        for (std::size_t c = 0; c < v.size(); ++c) ev[c] = cross(e, v[c]);
        out -= diff_transpose(ev, a, ghost.robin);
    }
    return out;
}

VectorField laplacian(const VectorField& u, GhostRule ghost) {
    VectorField out(u.grid());
    for (Axis a : all_axes) out -= diff_transpose(diff(u, a, ghost.robin), a, ghost.robin);
    return out;
}

double inner_product(const VectorField& u, const VectorField& v) {
    require_same_grid(u, v, "inner_product");
    double sum = 0.0;
    for (std::size_t c = 0; c < u.size(); ++c) sum += dot(u[c], v[c]);
    return sum * u.grid().cell_volume();
}

double l2_norm(const VectorField& u) { return std::sqrt(inner_product(u, u)); }

double inner_product(const HelicalGradient& a, const HelicalGradient& b) {
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) sum += inner_product(a.components[i], b.components[i]);
    return sum;
}

double l2_norm_squared(const HelicalGradient& g) { return inner_product(g, g); }

double max_boundary_helical_flux(const VectorField& u, const MaterialParams& params) {
    const GhostLayer layer = fill_ghost_llg(u, params);
    const Grid& g = u.grid();
    double worst = 0.0;
    for (int face = 0; face < 6; ++face) {
        const double h = g.spacing()[face / 2];
        const Vec3 n = face_normal(face);
        for (std::size_t k = 0; k < layer.faces[face].size(); ++k) {
            const Vec3& in = u[layer.adjacent[face][k]];
            const Vec3 dn = (layer.faces[face][k] - in) / h;
            const Vec3 flux = params.ell_ex * dn + params.helical_shift() * cross(in, n);
            worst = std::max(worst, norm(flux));
        }
    }
    return worst;
}

}  // namespace helimag
