#include "helimag/lowerorder.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "helimag/parallel.hpp"

namespace helimag {

VectorField anisotropy_op(const VectorField& m, const MaterialParams& params) {
    const Vec3 e = params.aniso_axis;
    if (std::abs(norm(e) - 1.0) > 1e-12) throw std::invalid_argument("anisotropy axis must be a unit vector");
    VectorField out(m.grid());
    const double s = 2.0 * params.aniso_strength;
    for (std::size_t c = 0; c < m.size(); ++c) out[c] = (s * dot(m[c], e)) * e;
    return out;
}

// ---------------------------------------------------------------------------
// Newell, Williams, Dunlop (1993) cell-averaged demag coefficients. The
// special-case handling follows the OOMMF implementation.

namespace {

double newell_f(double x, double y, double z) {
    x = std::abs(x);
    y = std::abs(y);
    z = std::abs(z);
    const double xsq = x * x, ysq = y * y, zsq = z * z;
    const double rsq = xsq + ysq + zsq;
    if (rsq <= 0.0) return 0.0;
    const double r = std::sqrt(rsq);

    double sum = 0.0;
    if (z > 0.0) {
        sum += 2 * (2 * xsq - ysq - zsq) * r;
        if (const double t = x * y * z; t > 0.0) sum += -12 * t * std::atan2(y * z, x * r);
        if (const double t = xsq + zsq; y > 0.0 && t > 0.0) sum += 3 * y * (zsq - xsq) * std::log1p(2 * y * (y + r) / t);
        if (const double t = xsq + ysq; t > 0.0) sum += 3 * z * (ysq - xsq) * std::log1p(2 * z * (z + r) / t);
    } else if (x == y) {
        const double k = 2 * std::numbers::sqrt2 - 6 * std::log(1 + std::numbers::sqrt2);
        sum += k * xsq * x;
    } else {
        sum += 2 * (2 * xsq - ysq) * r;
        if (y > 0.0 && x > 0.0) sum += -3 * y * xsq * std::log1p(2 * y * (y + r) / (x * x));
    }
    return sum / 12.0;
}

double newell_g(double x, double y, double z) {
    double sign = 1.0;
    if (x < 0.0) sign = -sign;
    if (y < 0.0) sign = -sign;
    x = std::abs(x);
    y = std::abs(y);
    z = std::abs(z);
    const double xsq = x * x, ysq = y * y, zsq = z * z;
    const double rsq = xsq + ysq + zsq;
    if (rsq <= 0.0) return 0.0;
    const double r = std::sqrt(rsq);

    double sum = -2 * x * y * r;
    if (z > 0.0) {
        sum += -z * zsq * std::atan2(x * y, z * r);
        sum += -3 * z * ysq * std::atan2(x * z, y * r);
        sum += -3 * z * xsq * std::atan2(y * z, x * r);
        if (const double t = xsq + ysq; t > 0.0) sum += 3 * x * y * z * std::log1p(2 * z * (z + r) / t);
        if (const double t = ysq + zsq; t > 0.0) sum += 0.5 * y * (3 * zsq - ysq) * std::log1p(2 * x * (x + r) / t);
        if (const double t = xsq + zsq; t > 0.0) sum += 0.5 * x * (3 * zsq - xsq) * std::log1p(2 * y * (y + r) / t);
    } else {
        if (y > 0.0) sum += -0.5 * y * ysq * std::log1p(2 * x * (x + r) / (y * y));
        if (x > 0.0) sum += -0.5 * x * xsq * std::log1p(2 * y * (y + r) / (x * x));
    }
    return sign * sum / 6.0;
}

// 27-point second difference of a kernel function over the cell size.
template <class F>
double collapsed_sum(F&& fn, double x, double y, double z, double dx, double dy, double dz) {
    double sum = 0.0;
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j)
            for (int k = -1; k <= 1; ++k) {
                const int zeros = (i == 0) + (j == 0) + (k == 0);
                // weights: corner -1, edge 2, face -4, center 8
                static constexpr double w[4] = {-1.0, 2.0, -4.0, 8.0};
                sum += w[zeros] * fn(x + i * dx, y + j * dy, z + k * dz);
            }
    return sum;
}

}  // namespace

double self_demag_nxx(double x, double y, double z) {
    if (x <= 0.0 || y <= 0.0 || z <= 0.0) return 0.0;
    if (x == y && y == z) return 1.0 / 3.0;

    const double xsq = x * x, ysq = y * y, zsq = z * z;
    const double R = std::sqrt(xsq + ysq + zsq);
    const double Rxy = std::sqrt(xsq + ysq);
    const double Rxz = std::sqrt(xsq + zsq);
    const double Ryz = std::sqrt(ysq + zsq);

    double sum = 2 * x * y * z *
                 ((x / (x + Rxy) + (2 * xsq + ysq + zsq) / (R * Rxy + x * Rxz)) / (x + Rxz) +
                  (x / (x + Rxz) + (2 * xsq + ysq + zsq) / (R * Rxz + x * Rxy)) / (x + Rxy)) /
                 ((x + R) * (Rxy + Rxz + R));
    sum += -1 * x * y * z *
           ((y / (y + Rxy) + (2 * ysq + xsq + zsq) / (R * Rxy + y * Ryz)) / (y + Ryz) +
            (y / (y + Ryz) + (2 * ysq + xsq + zsq) / (R * Ryz + y * Rxy)) / (y + Rxy)) /
           ((y + R) * (Rxy + Ryz + R));
    sum += -1 * x * y * z *
           ((z / (z + Rxz) + (2 * zsq + xsq + ysq) / (R * Rxz + z * Ryz)) / (z + Ryz) +
            (z / (z + Ryz) + (2 * zsq + xsq + ysq) / (R * Ryz + z * Rxz)) / (z + Rxz)) /
           ((z + R) * (Rxz + Ryz + R));

    sum += 6 * std::atan(y * z / (x * R));

    const double p4 = -y * z * z * (1 / (x + Rxz) + y / (Rxy * Rxz + x * R)) / (Rxz * (y + Rxy));
    sum += p4 > -0.5 ? 3 * x * std::log1p(p4) / z : 3 * x * std::log(x * (y + R) / (Rxz * (y + Rxy))) / z;

    const double p5 = -y * y * z * (1 / (x + Rxy) + z / (Rxy * Rxz + x * R)) / (Rxy * (z + Rxz));
    sum += p5 > -0.5 ? 3 * x * std::log1p(p5) / y : 3 * x * std::log(x * (z + R) / (Rxy * (z + Rxz))) / y;

    const double p6 = -x * x * z * (1 / (y + Rxy) + z / (Rxy * Ryz + y * R)) / (Rxy * (z + Ryz));
    sum += p6 > -0.5 ? -3 * y * std::log1p(p6) / x : -3 * y * std::log(y * (z + R) / (Rxy * (z + Ryz))) / x;

    const double p7 = -x * x * y * (1 / (z + Rxz) + y / (Rxz * Ryz + z * R)) / (Rxz * (y + Ryz));
    sum += p7 > -0.5 ? -3 * z * std::log1p(p7) / x : -3 * z * std::log(z * (y + R) / (Rxz * (y + Ryz))) / x;

    return sum / (3 * std::numbers::pi);
}

double newell_nxx(double x, double y, double z, double dx, double dy, double dz) {
    if (x == 0.0 && y == 0.0 && z == 0.0) return self_demag_nxx(dx, dy, dz);
    return collapsed_sum(newell_f, x, y, z, dx, dy, dz) / (4 * std::numbers::pi * dx * dy * dz);
}

double newell_nxy(double x, double y, double z, double dx, double dy, double dz) {
    if (x == 0.0 || y == 0.0) return 0.0;
    return collapsed_sum(newell_g, x, y, z, dx, dy, dz) / (4 * std::numbers::pi * dx * dy * dz);
}

// ---------------------------------------------------------------------------

DemagTensor::DemagTensor(Grid grid, std::vector<Entry> octant) : grid_(std::move(grid)), octant_(std::move(octant)) {
    const auto& n = grid_.cells();
    if (octant_.size() != grid_.size()) throw std::invalid_argument("DemagTensor: octant size does not match grid");
    span_ = {2 * n[0] - 1, 2 * n[1] - 1, 2 * n[2] - 1};
    full_.resize(static_cast<std::size_t>(span_[0]) * span_[1] * span_[2]);
    for (int k = -(n[2] - 1); k < n[2]; ++k)
        for (int j = -(n[1] - 1); j < n[1]; ++j)
            for (int i = -(n[0] - 1); i < n[0]; ++i) {
                const std::size_t dst = static_cast<std::size_t>(i + n[0] - 1) +
                                        static_cast<std::size_t>(span_[0]) *
                                            (static_cast<std::size_t>(j + n[1] - 1) +
                                             static_cast<std::size_t>(span_[1]) * static_cast<std::size_t>(k + n[2] - 1));
                full_[dst] = at(i, j, k);
            }
}

DemagTensor::Entry DemagTensor::at(int dx, int dy, int dz) const {
    const auto& n = grid_.cells();
    const int ax = std::abs(dx), ay = std::abs(dy), az = std::abs(dz);
    if (ax >= n[0] || ay >= n[1] || az >= n[2]) throw std::out_of_range("DemagTensor offset out of range");
    Entry e = octant_[grid_.index(ax, ay, az)];
    const double sx = dx < 0 ? -1.0 : 1.0, sy = dy < 0 ? -1.0 : 1.0, sz = dz < 0 ? -1.0 : 1.0;
    e[3] *= sx * sy;
    e[4] *= sx * sz;
    e[5] *= sy * sz;
    return e;
}

DemagTensor build_demag_tensor(const Grid& grid) {
    const auto& h = grid.spacing();
    std::vector<DemagTensor::Entry> octant(grid.size());
    parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
            const auto ijk = grid.coords(c);
            const double x = ijk[0] * h[0], y = ijk[1] * h[1], z = ijk[2] * h[2];
            const double nxx = newell_nxx(x, y, z, h[0], h[1], h[2]);
            const double nyy = newell_nxx(y, x, z, h[1], h[0], h[2]);
            const double nzz = newell_nxx(z, y, x, h[2], h[1], h[0]);
            const double nxy = newell_nxy(x, y, z, h[0], h[1], h[2]);
            const double nxz = newell_nxy(x, z, y, h[0], h[2], h[1]);
            const double nyz = newell_nxy(y, z, x, h[1], h[2], h[0]);
            octant[c] = {-nxx, -nyy, -nzz, -nxy, -nxz, -nyz};
        }
    }, 1);
    return DemagTensor(grid, std::move(octant));
}

VectorField stray_field(const VectorField& m, const DemagTensor& tensor) {
    if (!(m.grid() == tensor.grid())) throw std::invalid_argument("stray_field: grid mismatch");
    const Grid& g = m.grid();
    const auto& n = g.cells();
    const auto& span = tensor.span_;
    VectorField out(g);
    parallel_for(g.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            const auto tc = g.coords(t);
            Vec3 acc{};
            std::size_t s = 0;
            for (int k = 0; k < n[2]; ++k)
                for (int j = 0; j < n[1]; ++j) {
                    const std::size_t row = static_cast<std::size_t>(span[0]) *
                                            (static_cast<std::size_t>(tc[1] - j + n[1] - 1) +
                                             static_cast<std::size_t>(span[1]) * static_cast<std::size_t>(tc[2] - k + n[2] - 1));
                    for (int i = 0; i < n[0]; ++i, ++s) {
                        const auto& e = tensor.full_[row + static_cast<std::size_t>(tc[0] - i + n[0] - 1)];
                        acc += DemagTensor::apply(e, m[s]);
                    }
                }
            out[t] = acc;
        }
    }, 16);
    return out;
}

VectorField pi_op(const VectorField& m, const MaterialParams& params, const DemagTensor* tensor) {
    VectorField out(m.grid());
    if (params.enable_aniso) out += anisotropy_op(m, params);
    if (params.enable_demag) {
        if (tensor == nullptr) throw std::invalid_argument("pi_op: demag enabled but no tensor supplied");
        out += stray_field(m, *tensor);
    }
    return out;
}

double estimate_pi_norm(const MaterialParams& params, const DemagTensor* tensor, const Grid& grid) {
    if (!params.enable_aniso && !params.enable_demag) return 0.0;
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> gauss;
    VectorField u(grid);
    for (auto& v : u.values()) v = {gauss(rng), gauss(rng), gauss(rng)};
    u *= 1.0 / l2_norm(u);

    double estimate = 0.0;
    constexpr int min_iterations = 30;
    constexpr int max_iterations = 5000;
    for (int it = 0; it < max_iterations; ++it) {
        VectorField pu = pi_op(u, params, tensor);
        const double image = l2_norm(pu);
        estimate = std::max(estimate, image);
        if (image == 0.0) break;
        const double rayleigh = inner_product(u, pu);
        VectorField residual = pu;
        residual.axpy(-rayleigh, u);
        u = std::move(pu);
        u *= 1.0 / image;
        if (it + 1 >= min_iterations && l2_norm(residual) < 1e-10 * image) break;
    }
    return estimate;
}

// ---------------------------------------------------------------------------

namespace {

constexpr char tensor_magic[4] = {'H', 'M', 'D', 'T'};
constexpr std::uint32_t tensor_version = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) os.put(static_cast<char>((v >> (8 * b)) & 0xFFu));
}
void put_f64(std::ostream& os, double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    for (int b = 0; b < 8; ++b) os.put(static_cast<char>((v >> (8 * b)) & 0xFFu));
}
std::uint64_t get_bytes(std::istream& is, int count) {
    std::uint64_t v = 0;
    for (int b = 0; b < count; ++b) {
        const int ch = is.get();
        if (ch == std::char_traits<char>::eof()) throw std::runtime_error("demag cache: unexpected end of file");
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(ch)) << (8 * b);
    }
    return v;
}
double get_f64(std::istream& is) { return std::bit_cast<double>(get_bytes(is, 8)); }

}  // namespace

void save_demag_tensor(const DemagTensor& tensor, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write demag cache " + path.string());
    os.write(tensor_magic, 4);
    put_u32(os, tensor_version);
    const Grid& g = tensor.grid();
    for (double e : g.extents()) put_f64(os, e);
    for (int n : g.cells()) put_u32(os, static_cast<std::uint32_t>(n));
    for (const auto& entry : tensor.octant())
        for (double v : entry) put_f64(os, v);
    if (!os) throw std::runtime_error("failed writing demag cache " + path.string());
}

DemagTensor load_demag_tensor(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open demag cache " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != std::string(tensor_magic, 4))
        throw std::runtime_error("demag cache: bad magic bytes");
    if (get_bytes(is, 4) != tensor_version) throw std::runtime_error("demag cache: unsupported version");
    std::array<double, 3> extents{};
    std::array<int, 3> cells{};
    for (auto& e : extents) e = get_f64(is);
    for (auto& n : cells) n = static_cast<int>(get_bytes(is, 4));
    Grid grid(extents, cells);
    std::vector<DemagTensor::Entry> octant(grid.size());
    for (auto& entry : octant)
        for (auto& v : entry) v = get_f64(is);
    return DemagTensor(grid, std::move(octant));
}

DemagTensor load_or_build_demag_tensor(const Grid& grid, const std::filesystem::path& path) {
    if (std::filesystem::exists(path)) {
        try {
            DemagTensor cached = load_demag_tensor(path);
            if (cached.grid() == grid) return cached;
        } catch (const std::runtime_error&) {
            // stale or corrupt cache; rebuild below
        }
    }
    DemagTensor built = build_demag_tensor(grid);
    save_demag_tensor(built, path);
    return built;
}

// ---------------------------------------------------------------------------

AppliedField AppliedField::zero() { return constant({}); }

AppliedField AppliedField::constant(Vec3 value) {
    AppliedField f;
    f.value_ = [value](const Vec3&, double) { return value; };
    f.rate_ = [](const Vec3&, double) { return Vec3{}; };
    f.static_ = true;
    return f;
}

AppliedField AppliedField::ramp(Vec3 start, Vec3 rate) {
    AppliedField f;
    f.value_ = [start, rate](const Vec3&, double t) { return start + t * rate; };
    f.rate_ = [rate](const Vec3&, double) { return rate; };
    f.static_ = rate == Vec3{};
    return f;
}

AppliedField AppliedField::rotating(Vec3 bias, double amplitude, double omega) {
    AppliedField f;
    f.value_ = [=](const Vec3&, double t) {
        return bias + amplitude * Vec3{std::cos(omega * t), std::sin(omega * t), 0.0};
    };
    f.rate_ = [=](const Vec3&, double t) {
        return amplitude * omega * Vec3{-std::sin(omega * t), std::cos(omega * t), 0.0};
    };
    f.static_ = amplitude == 0.0 || omega == 0.0;
    return f;
}

AppliedField AppliedField::closed_form(Fn value, Fn rate) {
    AppliedField f;
    f.value_ = std::move(value);
    f.rate_ = std::move(rate);
    return f;
}

AppliedField AppliedField::tabulated(std::vector<double> times, std::vector<VectorField> samples) {
    if (times.size() != samples.size() || times.empty())
        throw std::invalid_argument("tabulated field: need matching, non-empty times and samples");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) throw std::invalid_argument("tabulated field: times must strictly increase");
        require_same_grid(samples[i], samples[0], "tabulated field");
    }
    for (const auto& s : samples)
        if (!s.all_finite()) throw std::invalid_argument("tabulated field: non-finite sample");
    AppliedField f;
    const std::size_t n = times.size();
    for (std::size_t i = 0; i < n; ++i) {
        VectorField r(samples[0].grid());
        if (n > 1) {
            const std::size_t lo = i == 0 ? 0 : i - 1;
            const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
            r = samples[hi] - samples[lo];
            r *= 1.0 / (times[hi] - times[lo]);
        }
        f.sample_rates_.push_back(std::move(r));
    }
    f.times_ = std::move(times);
    f.samples_ = std::move(samples);
    f.static_ = n == 1;
    return f;
}

namespace {

VectorField interpolate(const std::vector<double>& times, const std::vector<VectorField>& data, double t) {
    if (t <= times.front()) return data.front();
    if (t >= times.back()) return data.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - times.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - times[lo]) / (times[hi] - times[lo]);
    VectorField out = data[lo];
    out *= 1.0 - w;
    out.axpy(w, data[hi]);
    return out;
}

}  // namespace

VectorField AppliedField::at(const Grid& grid, double t) const {
    if (!samples_.empty()) {
        if (!(samples_.front().grid() == grid)) throw std::invalid_argument("tabulated field: grid mismatch");
        return interpolate(times_, samples_, t);
    }
    VectorField out(grid);
    for (std::size_t c = 0; c < grid.size(); ++c) out[c] = value_(grid.center(c), t);
    return out;
}

VectorField AppliedField::rate(const Grid& grid, double t) const {
    if (!samples_.empty()) {
        if (!(samples_.front().grid() == grid)) throw std::invalid_argument("tabulated field: grid mismatch");
        return interpolate(times_, sample_rates_, t);
    }
    VectorField out(grid);
    for (std::size_t c = 0; c < grid.size(); ++c) out[c] = rate_(grid.center(c), t);
    return out;
}

}  // namespace helimag
