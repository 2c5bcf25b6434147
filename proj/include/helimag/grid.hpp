#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "helimag/params.hpp"
#include "helimag/vec3.hpp"

namespace helimag {

enum class Axis { x = 0, y = 1, z = 2 };

/// Maps the 1-based coordinate index {1,2,3} to an Axis; throws otherwise.
Axis axis_from_index(int one_based);

constexpr int index_of(Axis a) { return static_cast<int>(a); }

/// Cell-centered uniform discretization of the box [0,L1]x[0,L2]x[0,L3].
class Grid {
public:
    Grid(std::array<double, 3> extents, std::array<int, 3> cells);

    const std::array<double, 3>& extents() const { return extents_; }
    const std::array<int, 3>& cells() const { return cells_; }
    const std::array<double, 3>& spacing() const { return spacing_; }

    double spacing(Axis a) const { return spacing_[index_of(a)]; }
    int cells(Axis a) const { return cells_[index_of(a)]; }

    std::size_t size() const { return size_; }
    double cell_volume() const { return spacing_[0] * spacing_[1] * spacing_[2]; }
    double volume() const { return extents_[0] * extents_[1] * extents_[2]; }

    /// Linear index, x fastest.
    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(cells_[0]) *
                   (static_cast<std::size_t>(j) + static_cast<std::size_t>(cells_[1]) * static_cast<std::size_t>(k));
    }
    std::array<int, 3> coords(std::size_t c) const;
    Vec3 center(std::size_t c) const;

    /// Index distance between neighbours along an axis.
    std::size_t stride(Axis a) const;

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::array<double, 3> extents_;
    std::array<int, 3> cells_;
    std::array<double, 3> spacing_;
    std::size_t size_;
};

/// One R^3 value per cell.
class VectorField {
public:
    explicit VectorField(Grid grid, Vec3 fill = {});
    VectorField(Grid grid, std::vector<Vec3> values);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    const Vec3& operator[](std::size_t c) const { return values_[c]; }
    Vec3& operator[](std::size_t c) { return values_[c]; }

    std::span<const Vec3> values() const { return values_; }
    std::span<Vec3> values() { return values_; }

    VectorField& operator+=(const VectorField& o);
    VectorField& operator-=(const VectorField& o);
    VectorField& operator*=(double s);

    /// this += s * o
    VectorField& axpy(double s, const VectorField& o);

    bool all_finite() const;

private:
    Grid grid_;
    std::vector<Vec3> values_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);

/// Cellwise cross product.
VectorField cross(const VectorField& a, const VectorField& b);
VectorField cross(const VectorField& a, const Vec3& b);

/// Samples a closed-form field at the cell centers.
VectorField sample(const Grid& grid, const std::function<Vec3(const Vec3&)>& fn);

/// Throws std::invalid_argument if the grids differ.
void require_same_grid(const VectorField& a, const VectorField& b, const char* what);

/// A VectorField whose cell values lie on the unit sphere.
class MagnetizationField {
public:
    static constexpr double default_tolerance = 1e-12;

    /// Validates |m| = 1 in every cell.
    explicit MagnetizationField(VectorField field, double tolerance = default_tolerance);

    /// Cellwise m / |m|; throws std::domain_error on a zero vector.
    static MagnetizationField project(const VectorField& field);

    const VectorField& field() const { return field_; }
    operator const VectorField&() const { return field_; }
    const Grid& grid() const { return field_.grid(); }
    const Vec3& operator[](std::size_t c) const { return field_[c]; }
    std::size_t size() const { return field_.size(); }

private:
    VectorField field_;
};

/// max_c | |u[c]| - 1 |
double max_norm_deviation(const VectorField& u);

/// Ghost-cell policy for one difference operator. With robin = 0 the
/// ghost equals the adjacent value (homogeneous Neumann).
struct GhostRule {
    double robin{0.0};  ///< kappa / ell_ex^2 for the LLG boundary condition
};

GhostRule llg_ghost_rule(const MaterialParams& params);

/// Ghost value behind a boundary face with outward normal n:
///   u_g = u_in - h * robin * (u_in x n)
Vec3 ghost_value(const Vec3& u_in, const Vec3& outward_normal, double h, double robin);

/// Ghost values on all six faces. Face order: -x, +x, -y, +y, -z, +z;
/// each face stores one value per adjacent boundary cell, in grid order.
struct GhostLayer {
    std::array<std::vector<Vec3>, 6> faces;
    std::array<std::vector<std::size_t>, 6> adjacent;  ///< boundary cell index per ghost
};

Vec3 face_normal(int face);

GhostLayer fill_ghost_llg(const VectorField& m, const MaterialParams& params);

/// Central difference along an axis; boundary cells use the ghost rule.
/// Requires at least 2 cells along the axis.
VectorField partial_derivative(const VectorField& u, Axis axis, GhostRule ghost = {});

/// Transpose of partial_derivative with respect to the cell inner product.
VectorField partial_derivative_adjoint(const VectorField& v, Axis axis, GhostRule ghost = {});

/// ell_ex * d_i u + (kappa / ell_ex) * (u x e_i), with the LLG ghost rule.
VectorField helical_partial(const VectorField& u, Axis axis, const MaterialParams& params);

/// Discrete adjoint of helical_partial. Equals -helical_partial away from
/// the boundary layer.
VectorField helical_partial_adjoint(const VectorField& v, Axis axis, const MaterialParams& params);

/// The three partial helical derivatives.
struct HelicalGradient {
    std::array<VectorField, 3> components;
};

/// Axes with a single cell are treated as collapsed (no variation); their
/// component reduces to (kappa / ell_ex) * (u x e_i).
HelicalGradient helical_gradient(const VectorField& u, const MaterialParams& params);

/// Helical Laplacian -sum_i (d_i^h)^* d_i^h u. Coincides with the composition
/// sum_i d_i^h d_i^h u on cells at least two away from the boundary and is the
/// exact variational derivative of 1/2 |grad_h u|^2, so discrete summation by
/// parts holds to rounding. Collapsed axes follow helical_gradient.
VectorField helical_laplacian(const VectorField& u, const MaterialParams& params);

/// curl u = sum_i e_i x d_i u with the given ghost rule; collapsed axes skipped.
VectorField curl(const VectorField& u, GhostRule ghost = {});
VectorField curl_adjoint(const VectorField& v, GhostRule ghost = {});

/// -sum_i d_i^T d_i u; collapsed axes skipped.
VectorField laplacian(const VectorField& u, GhostRule ghost = {});

/// Midpoint-rule L2 inner product and norm.
double inner_product(const VectorField& u, const VectorField& v);
double l2_norm(const VectorField& u);
double inner_product(const HelicalGradient& a, const HelicalGradient& b);
double l2_norm_squared(const HelicalGradient& g);

/// Largest |ell_ex d_n u + (kappa/ell_ex) u x n| over all boundary faces,
/// with the normal derivative taken from ghost and adjacent cell values.
double max_boundary_helical_flux(const VectorField& u, const MaterialParams& params);

}  // namespace helimag
