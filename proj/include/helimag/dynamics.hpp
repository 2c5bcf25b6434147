#pragma once

#include <string>

#include "helimag/energy.hpp"
#include "helimag/errors.hpp"
#include "helimag/grid.hpp"
#include "helimag/lowerorder.hpp"
#include "helimag/trajectory.hpp"

namespace helimag {

// Landau-Lifshitz form. Crossing the Gilbert equation
//   dm/dt = alpha m x dm/dt - m x H
// with m and using m . dm/dt = 0, |m| = 1 gives
//   m x dm/dt = -alpha dm/dt - m x (m x H),
// and substituting back:
//   dm/dt = -(m x H + alpha m x (m x H)) / (1 + alpha^2).

enum class Scheme { projected_heun, implicit_midpoint };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

struct SolverConfig {
    double dt{0.01};
    double t_end{1.0};
    Scheme scheme{Scheme::implicit_midpoint};
    double tolerance{1e-12};  ///< fixed-point tolerance, L-infinity
    int max_iterations{200};
    int stride{1};            ///< store every stride-th step

    /// Throws std::invalid_argument on violated constraints.
    void validate() const;
    /// Number of steps t_end / dt; throws unless it is an integer.
    long steps() const;

    friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

/// Solves v = alpha m x v - m x H exactly for any m:
///   v = -(m x H + alpha m x (m x H)) / (1 + alpha^2 |m|^2).
/// For unit m this is the Landau-Lifshitz right-hand side.
VectorField gilbert_velocity(const VectorField& m, const VectorField& h, double alpha);

/// Landau-Lifshitz right-hand side with H = effective_field(m, f_t).
VectorField llg_rhs(const MagnetizationField& m, const VectorField& f_t, const MaterialParams& params,
                    const DemagTensor* tensor = nullptr);

/// || mdot - alpha m x mdot + m x H ||.
double gilbert_residual(const MagnetizationField& m, const VectorField& mdot, const VectorField& f_t,
                        const MaterialParams& params, const DemagTensor* tensor = nullptr);

/// Everything a step needs besides the state.
struct StepContext {
    const MaterialParams& params;
    const AppliedField& field;
    const DemagTensor* tensor{nullptr};
};

/// Heun predictor-corrector on llg_rhs, then cellwise normalization.
/// Throws std::domain_error if an intermediate vector vanishes.
MagnetizationField step_projected_heun(const MagnetizationField& m, double t, const SolverConfig& config,
                                       const StepContext& ctx, StepDiagnostics* diag = nullptr);

/// Implicit midpoint rule m+ = m + dt v(m_mid, t + dt/2), solved by fixed-point
/// iteration; no projection. Throws ConvergenceError after max_iterations.
MagnetizationField step_implicit_midpoint(const MagnetizationField& m, double t, const SolverConfig& config,
                                          const StepContext& ctx, StepDiagnostics* diag = nullptr);

/// Integrates from t = 0 to t_end, storing every stride-th state plus m0.
Trajectory simulate(const MagnetizationField& m0, const AppliedField& f, const MaterialParams& params,
                    const SolverConfig& config, const DemagTensor* tensor = nullptr);

/// Closed-form single-spin solution under a constant field (0, 0, H):
///   tan(theta/2) = tan(theta0/2) exp(-alpha H t / (1 + alpha^2)),
///   phi = phi0 + H t / (1 + alpha^2).
Vec3 macrospin_solution(const Vec3& m0, double field_z, double alpha, double t);

}  // namespace helimag
