#include "helimag/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace helimag {

std::string to_string(Scheme s) {
    return s == Scheme::projected_heun ? "projected_heun" : "implicit_midpoint";
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "projected_heun" || name == "heun") return Scheme::projected_heun;
    if (name == "implicit_midpoint" || name == "midpoint") return Scheme::implicit_midpoint;
    throw std::invalid_argument("unknown scheme '" + name + "'");
}

void SolverConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt > 0 violated");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end >= 0 violated");
    if (t_end > 0.0 && dt > t_end) throw std::invalid_argument("dt <= t_end violated");
    if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance > 0 violated");
    if (max_iterations < 1) throw std::invalid_argument("max_iterations >= 1 violated");
    if (stride < 1) throw std::invalid_argument("stride >= 1 violated");
    const long n = steps();
    if (n > 0 && n % stride != 0) throw std::invalid_argument("stride must divide the number of steps");
}

long SolverConfig::steps() const {
    const double ratio = t_end / dt;
    const long n = std::llround(ratio);
    if (std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio))
        throw std::invalid_argument("t_end must be an integer multiple of dt");
    return n;
}

VectorField gilbert_velocity(const VectorField& m, const VectorField& h, double alpha) {
    require_same_grid(m, h, "gilbert_velocity");
    VectorField v(m.grid());
    for (std::size_t c = 0; c < m.size(); ++c) {
        const Vec3 mh = cross(m[c], h[c]);
        v[c] = -(mh + alpha * cross(m[c], mh)) / (1.0 + alpha * alpha * norm2(m[c]));
    }
    return v;
}

VectorField llg_rhs(const MagnetizationField& m, const VectorField& f_t, const MaterialParams& params,
                    const DemagTensor* tensor) {
    return gilbert_velocity(m, effective_field(m, f_t, params, tensor), params.alpha);
}

double gilbert_residual(const MagnetizationField& m, const VectorField& mdot, const VectorField& f_t,
                        const MaterialParams& params, const DemagTensor* tensor) {
    const VectorField h = effective_field(m, f_t, params, tensor);
    VectorField r = mdot;
    r.axpy(-params.alpha, cross(m, mdot));
    r += cross(m, h);
    return l2_norm(r);
}

namespace {

MagnetizationField normalize_checked(const VectorField& u) {
    for (const auto& v : u.values())
        if (!(norm(v) > 1e-12)) throw std::domain_error("projection of a vanishing vector (dt too large?)");
    return MagnetizationField::project(u);
}

double max_distance(const VectorField& a, const VectorField& b) {
    double d = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) d = std::max(d, norm(a[c] - b[c]));
    return d;
}

}  // namespace

MagnetizationField step_projected_heun(const MagnetizationField& m, double t, const SolverConfig& config,
                                       const StepContext& ctx, StepDiagnostics* diag) {
    const Grid& g = m.grid();
    const double dt = config.dt;
    const VectorField k1 = llg_rhs(m, ctx.field.at(g, t), ctx.params, ctx.tensor);
    VectorField predictor = m.field();
    predictor.axpy(dt, k1);
    const VectorField k2 = gilbert_velocity(
        predictor, effective_field(predictor, ctx.field.at(g, t + dt), ctx.params, ctx.tensor), ctx.params.alpha);
    VectorField next = m.field();
    next.axpy(0.5 * dt, k1);
    next.axpy(0.5 * dt, k2);
    if (diag) *diag = {1, 0.0};
    return normalize_checked(next);
}

MagnetizationField step_implicit_midpoint(const MagnetizationField& m, double t, const SolverConfig& config,
                                          const StepContext& ctx, StepDiagnostics* diag) {
    const Grid& g = m.grid();
    const double dt = config.dt;
    const VectorField f_mid = ctx.field.at(g, t + 0.5 * dt);

    auto update = [&](const VectorField& next) {
        VectorField mid = m.field() + next;
        mid *= 0.5;
        VectorField out = m.field();
        out.axpy(dt, gilbert_velocity(mid, effective_field(mid, f_mid, ctx.params, ctx.tensor), ctx.params.alpha));
        return out;
    };

    VectorField current = m.field();
    double change = 0.0;
    for (int it = 1; it <= config.max_iterations; ++it) {
        VectorField next = update(current);
        if (!next.all_finite()) break;
        change = max_distance(next, current);
        current = std::move(next);
        if (change < config.tolerance) {
            if (diag) *diag = {it, change};
            return MagnetizationField(std::move(current), std::max(1e-10, 10.0 * config.tolerance));
        }
    }
    throw ConvergenceError("implicit midpoint fixed point did not converge (last change " + std::to_string(change) +
                           "); reduce dt");
}

Trajectory simulate(const MagnetizationField& m0, const AppliedField& f, const MaterialParams& params,
                    const SolverConfig& config, const DemagTensor* tensor) {
    params.validate();
    config.validate();
    if (params.enable_demag && tensor == nullptr) throw std::invalid_argument("simulate: demag enabled without tensor");
    const long n = config.steps();
    Trajectory traj;
    traj.params = params;
    traj.times.push_back(0.0);
    traj.states.push_back(m0);
    const StepContext ctx{params, f, tensor};
    MagnetizationField m = m0;
    for (long step = 0; step < n; ++step) {
        const double t = static_cast<double>(step) * config.dt;
        StepDiagnostics diag;
        try {
            m = config.scheme == Scheme::implicit_midpoint ? step_implicit_midpoint(m, t, config, ctx, &diag)
                                                           : step_projected_heun(m, t, config, ctx, &diag);
        } catch (const ConvergenceError& e) {
            throw ConvergenceError("step " + std::to_string(step) + ": " + e.what());
        } catch (const std::domain_error& e) {
            throw std::domain_error("step " + std::to_string(step) + ": " + e.what());
        }
        traj.diagnostics.push_back(diag);
        if ((step + 1) % config.stride == 0) {
            traj.times.push_back(static_cast<double>(step + 1) * config.dt);
            traj.states.push_back(m);
        }
    }
    return traj;
}

Vec3 macrospin_solution(const Vec3& m0, double field_z, double alpha, double t) {
    const double theta0 = std::acos(std::clamp(m0.z / norm(m0), -1.0, 1.0));
    const double phi0 = std::atan2(m0.y, m0.x);
    const double scale = 1.0 / (1.0 + alpha * alpha);
    const double theta = 2.0 * std::atan(std::tan(0.5 * theta0) * std::exp(-alpha * field_z * t * scale));
    const double phi = phi0 + field_z * t * scale;
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

}  // namespace helimag
