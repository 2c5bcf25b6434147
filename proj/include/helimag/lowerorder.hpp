#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "helimag/grid.hpp"
#include "helimag/params.hpp"

namespace helimag {

/// Uniaxial anisotropy contribution 2 * strength * (m.e) e, cellwise.
VectorField anisotropy_op(const VectorField& m, const MaterialParams& params);

/// Cell-averaged demagnetizing kernel K = -N (Newell et al.), indexed by the
/// cell offset between target and source. h_s = sum K(c - c') m(c').
class DemagTensor {
public:
    /// Tensor components in the order xx, yy, zz, xy, xz, yz.
    using Entry = std::array<double, 6>;

    DemagTensor(Grid grid, std::vector<Entry> octant);

    const Grid& grid() const { return grid_; }

    /// Kernel at integer offset (may be negative), |offset_i| < cells_i.
    Entry at(int dx, int dy, int dz) const;

    /// Entries for offsets 0 <= d_i < cells_i, x fastest.
    const std::vector<Entry>& octant() const { return octant_; }

    /// Apply the 3x3 block at an offset to a vector.
    static Vec3 apply(const Entry& k, const Vec3& v) {
        return {k[0] * v.x + k[3] * v.y + k[4] * v.z, k[3] * v.x + k[1] * v.y + k[5] * v.z,
                k[4] * v.x + k[5] * v.y + k[2] * v.z};
    }

private:
    friend VectorField stray_field(const VectorField& m, const DemagTensor& tensor);

    Grid grid_;
    std::vector<Entry> octant_;
    std::array<int, 3> span_;   // 2n-1 per axis
    std::vector<Entry> full_;   // all offsets, parity applied
};

/// Newell demag factors for a source cell of size (dx,dy,dz) seen from a
/// target cell of the same size displaced by (x,y,z). Positive convention
/// (self term of a cube gives 1/3 on the diagonal).
double newell_nxx(double x, double y, double z, double dx, double dy, double dz);
double newell_nxy(double x, double y, double z, double dx, double dy, double dz);
double self_demag_nxx(double dx, double dy, double dz);

DemagTensor build_demag_tensor(const Grid& grid);

/// Direct O(N^2) convolution.
VectorField stray_field(const VectorField& m, const DemagTensor& tensor);

/// Sum of the enabled lower-order contributions. Throws if demag is enabled
/// but no tensor is supplied.
VectorField pi_op(const VectorField& m, const MaterialParams& params, const DemagTensor* tensor = nullptr);

/// Power-iteration estimate of the discrete L2 operator norm of pi_op.
double estimate_pi_norm(const MaterialParams& params, const DemagTensor* tensor, const Grid& grid);

/// Binary cache: "HMDT", u32 version, f64 extents[3], u32 cells[3], then the
/// octant entries (6 f64 each, x-fastest offsets), all little-endian.
void save_demag_tensor(const DemagTensor& tensor, const std::filesystem::path& path);
DemagTensor load_demag_tensor(const std::filesystem::path& path);

/// Returns the cached tensor when the file matches the grid signature,
/// otherwise builds it and writes the cache.
DemagTensor load_or_build_demag_tensor(const Grid& grid, const std::filesystem::path& path);

/// Time-dependent external field f(x, t) with its time derivative.
class AppliedField {
public:
    using Fn = std::function<Vec3(const Vec3& x, double t)>;

    static AppliedField zero();
    static AppliedField constant(Vec3 value);
    /// f(t) = start + t * rate
    static AppliedField ramp(Vec3 start, Vec3 rate);
    /// f(t) = bias + amplitude * (cos wt, sin wt, 0)
    static AppliedField rotating(Vec3 bias, double amplitude, double omega);
    static AppliedField closed_form(Fn value, Fn rate);
    /// Piecewise-linear in time between samples; d/dt from centered
    /// differences at the samples, interpolated linearly.
    static AppliedField tabulated(std::vector<double> times, std::vector<VectorField> samples);

    VectorField at(const Grid& grid, double t) const;
    VectorField rate(const Grid& grid, double t) const;

    /// True when the field does not depend on time.
    bool is_static() const { return static_; }

private:
    AppliedField() = default;

    Fn value_;
    Fn rate_;
    bool static_{false};
    std::vector<double> times_;
    std::vector<VectorField> samples_;
    std::vector<VectorField> sample_rates_;
};

}  // namespace helimag
