#include "helimag/uniqueness.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace helimag {

VectorField psi_apply(const VectorField& u, const VectorField& u_dot, const MaterialParams& params,
                      const DemagTensor* tensor) {
    require_same_grid(u, u_dot, "psi_apply");
    VectorField out = params.alpha * u_dot;
    out -= helical_laplacian(u, params);
    if (params.enable_aniso || params.enable_demag) out -= pi_op(u, params, tensor);
    return out;
}

double psi_form(const VectorField& u1, const VectorField& u1_dot, const VectorField& u2, const MaterialParams& params,
                const DemagTensor* tensor) {
    require_same_grid(u1, u2, "psi_form");
    double v = params.alpha * inner_product(u1_dot, u2) +
               inner_product(helical_gradient(u1, params), helical_gradient(u2, params));
    if (params.enable_aniso || params.enable_demag) v -= inner_product(pi_op(u1, params, tensor), u2);
    return v;
}

GronwallReport gronwall_report(double alpha, double C_pi, double C_psi, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("delta > 0 violated");
    GronwallReport r;
    r.alpha = alpha;
    r.C_pi = C_pi;
    r.C_psi = C_psi;
    r.delta = delta;
    r.C_left = alpha - (alpha * delta + delta) / 2;
    r.C_right = (alpha / (2 * delta) + 1) * C_psi * C_psi + (0.5 + 1 / (2 * delta)) * C_pi * C_pi;
    if (r.C_left <= 0.0)
        r.T_star = 0.0;
    else if (r.C_right == 0.0)
        r.T_star = std::numeric_limits<double>::infinity();
    else
        r.T_star = std::sqrt(r.C_left / r.C_right);
    return r;
}

double optimal_delta(double alpha, double C_pi, double C_psi) {
    const double upper = 2 * alpha / (alpha + 1);
    if (C_pi == 0.0 && C_psi == 0.0) return upper / 2;
    auto objective = [&](double d) { return gronwall_report(alpha, C_pi, C_psi, d).T_star; };
    const double phi = (std::sqrt(5.0) - 1) / 2;
    double a = 0.0, b = upper;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = objective(x1), f2 = objective(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-14 * upper; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = objective(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = objective(x1);
        }
    }
    return 0.5 * (a + b);
}

namespace {

double max_cell_norm(const VectorField& u) {
    double m = 0.0;
    for (const auto& v : u.values()) m = std::max(m, norm(v));
    return m;
}

double max_gradient_norm(const VectorField& u) {
    const Grid& g = u.grid();
    std::vector<double> frob(g.size(), 0.0);
    for (int i = 0; i < 3; ++i) {
        if (g.cells()[i] < 2) continue;
        const auto d = partial_derivative(u, static_cast<Axis>(i));
        for (std::size_t c = 0; c < g.size(); ++c) frob[c] += norm2(d[c]);
    }
    double m = 0.0;
    for (double v : frob) m = std::max(m, std::sqrt(v));
    return m;
}

}  // namespace

double psi_bound(const Trajectory& traj, const AppliedField& f, const DemagTensor* tensor) {
    if (traj.size() == 0) throw std::invalid_argument("psi_bound: empty trajectory");
    if (traj.size() == 1) {
        const VectorField zero(traj.grid());
        VectorField g = psi_apply(traj.states[0], zero, traj.params, tensor) - f.at(traj.grid(), traj.times[0]);
        return max_cell_norm(g) + max_gradient_norm(g);
    }
    const auto rates = time_derivatives(traj);
    double bound = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        VectorField g = psi_apply(traj.states[k], rates[k], traj.params, tensor);
        g -= f.at(traj.grid(), traj.times[k]);
        bound = std::max(bound, max_cell_norm(g) + max_gradient_norm(g));
    }
    return bound;
}

GronwallReport gronwall_constants(const Trajectory& traj1, const AppliedField& f, std::optional<double> delta,
                                  const DemagTensor* tensor) {
    if (traj1.size() == 0) throw std::invalid_argument("gronwall_constants: empty trajectory");
    const double alpha = traj1.params.alpha;
    const double c_pi = estimate_pi_norm(traj1.params, tensor, traj1.grid());
    const double c_psi = psi_bound(traj1, f, tensor);
    const double d = delta ? *delta : optimal_delta(alpha, c_pi, c_psi);
    return gronwall_report(alpha, c_pi, c_psi, d);
}

DifferenceDiagnostics difference_diagnostics(const Trajectory& m1, const Trajectory& m2) {
    if (m1.size() != m2.size() || m1.size() == 0) throw std::invalid_argument("difference: trajectory lengths differ");
    if (!(m1.grid() == m2.grid())) throw std::invalid_argument("difference: grids differ");
    DifferenceDiagnostics d;
    d.times = m1.times;
    for (std::size_t k = 0; k < m1.size(); ++k) {
        if (std::abs(m1.times[k] - m2.times[k]) > 1e-12 * std::max(1.0, std::abs(m1.times[k])))
            throw std::invalid_argument("difference: time stamps differ");
        d.w.push_back(m2.states[k].field() - m1.states[k].field());
    }
    const MaterialParams& p = m1.params;
    std::vector<double> wdot_sq(m1.size(), 0.0);
    if (m1.size() >= 2) {
        d.w_dot = time_derivatives(d.times, d.w);
        for (std::size_t k = 0; k < m1.size(); ++k) wdot_sq[k] = inner_product(d.w_dot[k], d.w_dot[k]);
    } else {
        d.w_dot.push_back(VectorField(m1.grid()));
    }
    for (std::size_t k = 0; k < m1.size(); ++k) {
        d.w_norm.push_back(l2_norm(d.w[k]));
        d.grad_w_sq.push_back(l2_norm_squared(helical_gradient(d.w[k], p)));
    }
    d.w_dot_sq_integral = cumulative_trapezoid(d.times, wdot_sq);
    return d;
}

VectorField perturbation_field(const MagnetizationField& m0, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    VectorField p(m0.grid());
    for (std::size_t c = 0; c < m0.size(); ++c) {
        Vec3 v;
        double n = 0.0;
        do {
            v = {gauss(rng), gauss(rng), gauss(rng)};
            v -= dot(v, m0[c]) * m0[c];
            n = norm(v);
        } while (n < 1e-3);
        p[c] = v / n;
    }
    return p;
}

StrongStrongReport strong_strong_experiment(const MagnetizationField& m0, double eps, const AppliedField& f,
                                            const MaterialParams& params, const SolverConfig& config,
                                            const DemagTensor* tensor, std::uint64_t seed) {
    if (!(eps >= 0.0)) throw std::invalid_argument("eps >= 0 violated");
    SolverConfig cfg = config;
    cfg.scheme = Scheme::implicit_midpoint;
    StrongStrongReport r;
    r.eps = eps;
    r.m1 = simulate(m0, f, params, cfg, tensor);
    if (eps > 0.0) {
        VectorField start = m0.field();
        start.axpy(eps, perturbation_field(m0, seed));
        r.m2 = simulate(MagnetizationField::project(start), f, params, cfg, tensor);
    } else {
        r.m2 = simulate(m0, f, params, cfg, tensor);
    }
    r.diff = difference_diagnostics(r.m1, r.m2);
    r.gronwall = gronwall_constants(r.m1, f, std::nullopt, tensor);
    r.max_w = *std::max_element(r.diff.w_norm.begin(), r.diff.w_norm.end());

    std::vector<double> w_sq;
    for (double v : r.diff.w_norm) w_sq.push_back(v * v);
    const auto grad_int = cumulative_trapezoid(r.diff.times, r.diff.grad_w_sq);
    const auto w_int = cumulative_trapezoid(r.diff.times, w_sq);
    const double horizon = std::min(cfg.t_end, r.gronwall.T_star);
    for (std::size_t k = 0; k < r.diff.times.size(); ++k) {
        if (r.diff.times[k] > horizon) break;
        const double lhs = r.gronwall.C_left * r.diff.w_dot_sq_integral[k] + 0.5 * r.diff.grad_w_sq[k];
        const double rhs = 0.5 * r.diff.grad_w_sq[0] + 0.5 * grad_int[k] + r.gronwall.C_right * w_int[k];
        r.slack.push_back(rhs - lhs);
        r.slack_scale.push_back(std::max({std::abs(lhs), std::abs(rhs), 1e-300}));
    }
    return r;
}

EpsilonSweep epsilon_sweep(const MagnetizationField& m0, const std::vector<double>& eps_values, const AppliedField& f,
                           const MaterialParams& params, const SolverConfig& config, const DemagTensor* tensor,
                           std::uint64_t seed) {
    EpsilonSweep s;
    for (double eps : eps_values) {
        if (!(eps > 0.0)) throw std::invalid_argument("epsilon sweep needs positive eps values");
        s.runs.push_back(strong_strong_experiment(m0, eps, f, params, config, tensor, seed));
    }
    if (s.runs.empty()) return s;
    s.horizon = std::min(config.t_end, 0.5 * s.runs.front().gronwall.T_star);
    const auto& times = s.runs.front().diff.times;
    for (std::size_t k = 0; k < times.size() && times[k] <= s.horizon; ++k) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const auto& run : s.runs) {
            const double ratio = run.diff.w_norm[k] / run.eps;
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        if (hi > 0.0) s.max_variation = std::max(s.max_variation, (hi - lo) / hi);
    }
    return s;
}

WeakStrongLevel weak_strong_estimate(const Trajectory& m1, const Trajectory& m2, const AppliedField& f,
                                     const DemagTensor* tensor) {
    WeakStrongLevel level;
    level.cells = m1.grid().cells();
    level.dt = m1.times.size() > 1 ? m1.times[1] - m1.times[0] : 0.0;
    level.diff = difference_diagnostics(m1, m2);
    const auto& d = level.diff;
    const Grid& g = m1.grid();
    const MaterialParams& p = m1.params;
    const std::size_t n = d.times.size();
    level.w_final = d.w_norm.back();

    const auto m1_dot = n >= 2 ? time_derivatives(m1) : std::vector<VectorField>{VectorField(g)};
    std::vector<double> psi_term(n), force_term(n), damp_term(n);
    std::vector<VectorField> forcing;
    for (std::size_t k = 0; k < n; ++k) {
        forcing.push_back(f.at(g, d.times[k]));
        VectorField target = psi_apply(m1.states[k], m1_dot[k], p, tensor);
        target -= forcing[k];
        psi_term[k] = psi_form(d.w[k], d.w_dot[k], cross(d.w[k], target), p, tensor);
        force_term[k] = f.is_static() ? 0.0 : inner_product(f.rate(g, d.times[k]), d.w[k]);
        damp_term[k] = p.alpha * inner_product(d.w_dot[k], d.w_dot[k]);
    }
    const auto psi_int = cumulative_trapezoid(d.times, psi_term);
    const auto force_int = cumulative_trapezoid(d.times, force_term);
    const auto damp_int = cumulative_trapezoid(d.times, damp_term);
    for (std::size_t k = 0; k < n; ++k) {
        const double lhs = helical_energy(d.w[k], forcing[k], p, tensor) + damp_int[k] + force_int[k];
        const double rhs = psi_int[k] - inner_product(forcing[k], d.w[k]) + force_int[k];
        level.lhs.push_back(lhs);
        level.rhs.push_back(rhs);
        level.gap.push_back(rhs - lhs);
    }
    return level;
}

WeakStrongReport weak_strong_experiment(const Grid& base, const std::function<Vec3(const Vec3&)>& m0,
                                        const AppliedField& f, const MaterialParams& params,
                                        const SolverConfig& config, int levels) {
    if (levels < 1) throw std::invalid_argument("levels >= 1 violated");
    WeakStrongReport report;
    for (int l = 0; l < levels; ++l) {
        const int factor = 1 << l;
        const auto& n = base.cells();
        Grid grid(base.extents(), {n[0] * factor, n[1] * factor, n[2] * factor});
        SolverConfig cfg = config;
        cfg.dt = config.dt / factor;
        cfg.stride = config.stride * factor;
        std::optional<DemagTensor> tensor;
        if (params.enable_demag) tensor = build_demag_tensor(grid);
        const DemagTensor* tp = tensor ? &*tensor : nullptr;
        const auto start = MagnetizationField::project(sample(grid, m0));
        cfg.scheme = Scheme::implicit_midpoint;
        const Trajectory strong = simulate(start, f, params, cfg, tp);
        cfg.scheme = Scheme::projected_heun;
        const Trajectory weak = simulate(start, f, params, cfg, tp);
        report.levels.push_back(weak_strong_estimate(strong, weak, f, tp));
        report.levels.back().dt = cfg.dt;
    }
    for (std::size_t l = 1; l < report.levels.size(); ++l)
        report.orders.push_back(std::log2(report.levels[l - 1].w_final / report.levels[l].w_final));
    return report;
}

PoincareReport poincare_check(const std::vector<double>& times, const std::vector<VectorField>& u, double rel_tol) {
    if (u.empty() || times.size() != u.size()) throw std::invalid_argument("poincare_check: bad samples");
    double umax = 0.0;
    for (const auto& v : u) umax = std::max(umax, l2_norm(v));
    if (l2_norm(u[0]) > 1e-12 * umax)
        throw std::invalid_argument("poincare_check: difference does not vanish at t = 0");
    PoincareReport r;
    if (u.size() < 2) {
        r.lhs = {0.0};
        r.rhs = {0.0};
        return r;
    }
    const auto rates = time_derivatives(times, u);
    std::vector<double> u_sq, rate_sq;
    for (std::size_t k = 0; k < u.size(); ++k) {
        u_sq.push_back(inner_product(u[k], u[k]));
        rate_sq.push_back(inner_product(rates[k], rates[k]));
    }
    const auto lhs = cumulative_trapezoid(times, u_sq);
    const auto rhs_int = cumulative_trapezoid(times, rate_sq);
    r.min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double t = times[k] - times[0];
        const double rhs = t * t * rhs_int[k];
        r.lhs.push_back(lhs[k]);
        r.rhs.push_back(rhs);
        const double slack = rhs - lhs[k];
        r.min_slack = std::min(r.min_slack, slack);
        if (slack < -rel_tol * std::max({lhs[k], rhs, 1e-300})) r.holds = false;
    }
    return r;
}

PoincareReport poincare_check(const DifferenceDiagnostics& diff, double rel_tol) {
    return poincare_check(diff.times, diff.w, rel_tol);
}

bool gronwall_check(const std::vector<double>& times, const std::vector<double>& u, double C, double atol) {
    for (double v : u)
        if (v < 0.0) throw std::invalid_argument("gronwall_check: negative entry");
    const auto integral = cumulative_trapezoid(times, u);
    for (std::size_t k = 0; k < u.size(); ++k)
        if (u[k] > C * integral[k] + atol) return false;
    return true;
}

bool gronwall_conclusion(const std::vector<double>& u, double atol) {
    return std::all_of(u.begin(), u.end(), [atol](double v) { return v <= atol; });
}

}  // namespace helimag
