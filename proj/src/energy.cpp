#include "helimag/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace helimag {

namespace {

double shift_constant(const Grid& g, const MaterialParams& p) {
    const double c = p.helical_shift();
    return c * c * g.volume();
}

double lower_order_energy(const VectorField& m, const MaterialParams& p, const DemagTensor* tensor) {
    if (!p.enable_aniso && !p.enable_demag) return 0.0;
    return -0.5 * inner_product(m, pi_op(m, p, tensor));
}

}  // namespace

EnergyBreakdown energy(const MagnetizationField& m, const VectorField& f, const MaterialParams& params,
                       const DemagTensor* tensor) {
    require_same_grid(m, f, "energy");
    const GhostRule robin = llg_ghost_rule(params);
    EnergyBreakdown e;
    e.exchange = -0.5 * params.ell_ex * params.ell_ex * inner_product(m, laplacian(m, robin));
    e.dmi = params.kappa * inner_product(m, curl(m, robin));
    e.lower_order = lower_order_energy(m, params, tensor);
    e.applied = -inner_product(m, f);
    e.total = e.exchange + e.dmi + e.lower_order + e.applied;
    e.helical_total = 0.5 * l2_norm_squared(helical_gradient(m, params)) + e.lower_order + e.applied;
    e.shift = shift_constant(m.grid(), params);
    return e;
}

double helical_energy(const VectorField& m, const VectorField& f, const MaterialParams& params,
                      const DemagTensor* tensor) {
    require_same_grid(m, f, "helical_energy");
    return 0.5 * l2_norm_squared(helical_gradient(m, params)) + lower_order_energy(m, params, tensor) -
           inner_product(m, f);
}

double helicity_identity_gap(const MagnetizationField& m, const MaterialParams& params) {
    const GhostRule robin = llg_ghost_rule(params);
    const double lhs = 0.5 * l2_norm_squared(helical_gradient(m, params));
    const double rhs = -0.5 * params.ell_ex * params.ell_ex * inner_product(m, laplacian(m, robin)) +
                       params.kappa * inner_product(m, curl(m, robin)) + shift_constant(m.grid(), params);
    return std::abs(lhs - rhs);
}

VectorField effective_field(const VectorField& m, const VectorField& f, const MaterialParams& params,
                            const DemagTensor* tensor) {
    require_same_grid(m, f, "effective_field");
    VectorField h = helical_laplacian(m, params);
    if (params.enable_aniso || params.enable_demag) h += pi_op(m, params, tensor);
    h += f;
    return h;
}

VectorField classical_effective_field(const VectorField& m, const VectorField& f, const MaterialParams& params,
                                      const DemagTensor* tensor) {
    require_same_grid(m, f, "classical_effective_field");
    const GhostRule robin = llg_ghost_rule(params);
    VectorField h = params.ell_ex * params.ell_ex * laplacian(m, robin);
    if (params.kappa != 0.0) {
        h.axpy(-params.kappa, curl(m, robin));
        h.axpy(-params.kappa, curl_adjoint(m, robin));
    }
    if (params.enable_aniso || params.enable_demag) h += pi_op(m, params, tensor);
    h += f;
    return h;
}

std::vector<VectorField> time_derivatives(const std::vector<double>& t, const std::vector<VectorField>& s) {
    const std::size_t n = s.size();
    if (n < 2 || t.size() != n) throw std::invalid_argument("time derivatives need at least two samples");
    std::vector<VectorField> out;
    out.reserve(n);
    if (n == 2) {
        VectorField d = s[1] - s[0];
        d *= 1.0 / (t[1] - t[0]);
        out.push_back(d);
        out.push_back(d);
        return out;
    }
    {
        VectorField d = -3.0 * s[0];
        d.axpy(4.0, s[1]);
        d.axpy(-1.0, s[2]);
        d *= 1.0 / (t[2] - t[0]);
        out.push_back(std::move(d));
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        VectorField d = s[k + 1] - s[k - 1];
        d *= 1.0 / (t[k + 1] - t[k - 1]);
        out.push_back(std::move(d));
    }
    {
        VectorField d = 3.0 * s[n - 1];
        d.axpy(-4.0, s[n - 2]);
        d.axpy(1.0, s[n - 3]);
        d *= 1.0 / (t[n - 1] - t[n - 3]);
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<VectorField> time_derivatives(const Trajectory& traj) {
    std::vector<VectorField> samples;
    samples.reserve(traj.size());
    for (const auto& m : traj.states) samples.push_back(m.field());
    return time_derivatives(traj.times, samples);
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& times, const std::vector<double>& values) {
    if (times.size() != values.size()) throw std::invalid_argument("cumulative_trapezoid: size mismatch");
    std::vector<double> out(values.size(), 0.0);
    for (std::size_t k = 1; k < values.size(); ++k)
        out[k] = out[k - 1] + 0.5 * (times[k] - times[k - 1]) * (values[k - 1] + values[k]);
    return out;
}

DissipationRecord dissipation(const Trajectory& traj, const AppliedField& f) {
    if (traj.size() < 2) throw std::invalid_argument("dissipation needs at least two snapshots");
    const auto rates = time_derivatives(traj);
    const Grid& g = traj.grid();
    const double alpha = traj.params.alpha;
    const std::size_t n = traj.size();
    std::vector<double> damp_integrand(n), force_integrand(n);
    for (std::size_t k = 0; k < n; ++k) {
        damp_integrand[k] = alpha * inner_product(rates[k], rates[k]);
        force_integrand[k] = f.is_static() ? 0.0 : inner_product(f.rate(g, traj.times[k]), traj.states[k]);
    }
    DissipationRecord rec;
    rec.times = traj.times;
    rec.damping = cumulative_trapezoid(traj.times, damp_integrand);
    rec.forcing = cumulative_trapezoid(traj.times, force_integrand);
    rec.total.resize(n);
    for (std::size_t k = 0; k < n; ++k) rec.total[k] = rec.damping[k] + rec.forcing[k];
    return rec;
}

std::vector<double> energy_law_residual(const Trajectory& traj, const AppliedField& f, const DemagTensor* tensor) {
    const auto d = dissipation(traj, f);
    const Grid& g = traj.grid();
    const double e0 = helical_energy(traj.states[0], f.at(g, traj.times[0]), traj.params, tensor);
    std::vector<double> r(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k)
        r[k] = helical_energy(traj.states[k], f.at(g, traj.times[k]), traj.params, tensor) + d.total[k] - e0;
    return r;
}

std::vector<double> conservation_residual(const Trajectory& traj, const AppliedField& f, const DemagTensor* tensor) {
    if (traj.size() < 3) throw std::invalid_argument("conservation residual needs at least three snapshots");
    const auto rates = time_derivatives(traj);
    const Grid& g = traj.grid();
    const double alpha = traj.params.alpha;
    std::vector<double> out;
    for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
        const VectorField h = effective_field(traj.states[k], f.at(g, traj.times[k]), traj.params, tensor);
        double sum = 0.0;
        for (std::size_t c = 0; c < g.size(); ++c) {
            const Vec3& v = rates[k][c];
            const double s = dot(v, alpha * v - h[c]);
            sum += s * s;
        }
        out.push_back(std::sqrt(sum * g.cell_volume()));
    }
    return out;
}

std::vector<VectorField> default_test_basis(const Grid& grid) {
    std::vector<VectorField> basis;
    for (int mono = 0; mono < 4; ++mono)
        for (int i = 0; i < 3; ++i)
            basis.push_back(sample(grid, [mono, i](const Vec3& x) {
                const double w = mono == 0 ? 1.0 : x[mono - 1];
                return w * unit_vector(i);
            }));
    return basis;
}

double energy_derivative(const VectorField& m, const VectorField& phi, const VectorField& f,
                         const MaterialParams& params, const DemagTensor* tensor) {
    require_same_grid(m, phi, "energy_derivative");
    const GhostRule robin = llg_ghost_rule(params);
    double d = -params.ell_ex * params.ell_ex * inner_product(m, laplacian(phi, robin));
    if (params.kappa != 0.0)
        d += params.kappa * (inner_product(m, curl(phi, robin)) + inner_product(phi, curl(m, robin)));
    if (params.enable_aniso || params.enable_demag) d -= inner_product(pi_op(m, params, tensor), phi);
    d -= inner_product(f, phi);
    return d;
}

double weak_form_residual(const Trajectory& traj, const AppliedField& f, const std::vector<VectorField>& test_fields,
                          const DemagTensor* tensor) {
    if (test_fields.empty()) throw std::invalid_argument("weak_form_residual: empty test set");
    const auto rates = time_derivatives(traj);
    const Grid& g = traj.grid();
    const double alpha = traj.params.alpha;
    const std::size_t n = traj.size();
    std::vector<VectorField> forcing;
    forcing.reserve(n);
    for (std::size_t k = 0; k < n; ++k) forcing.push_back(f.at(g, traj.times[k]));

    double worst = 0.0;
    for (const auto& phi : test_fields) {
        require_same_grid(phi, traj.states[0], "weak_form_residual");
        std::vector<double> integrand(n);
        for (std::size_t k = 0; k < n; ++k) {
            const VectorField& m = traj.states[k];
            const VectorField psi = cross(phi, m);
            integrand[k] = inner_product(rates[k], phi) - alpha * inner_product(rates[k], psi) -
                           energy_derivative(m, psi, forcing[k], traj.params, tensor);
        }
        double integral = 0.0;
        for (std::size_t k = 1; k < n; ++k)
            integral += 0.5 * (traj.times[k] - traj.times[k - 1]) * (integrand[k - 1] + integrand[k]);
        worst = std::max(worst, std::abs(integral));
    }
    return worst;
}

}  // namespace helimag
