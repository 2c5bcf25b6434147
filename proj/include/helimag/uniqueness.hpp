#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "helimag/dynamics.hpp"
#include "helimag/energy.hpp"

namespace helimag {

/// Psi[u] = alpha du/dt - Delta_h u - pi(u)
VectorField psi_apply(const VectorField& u, const VectorField& u_dot, const MaterialParams& params,
                      const DemagTensor* tensor = nullptr);

/// psi[u1, u2] = alpha <du1/dt, u2> + <grad_h u1, grad_h u2> - <pi(u1), u2>
double psi_form(const VectorField& u1, const VectorField& u1_dot, const VectorField& u2, const MaterialParams& params,
                const DemagTensor* tensor = nullptr);

/// Constants of the strong-strong Gronwall argument.
struct GronwallReport {
    double alpha{0.0};
    double C_pi{0.0};
    double C_psi{0.0};
    double delta{0.0};
    double C_left{0.0};   ///< alpha - (alpha delta + delta) / 2
    double C_right{0.0};  ///< (alpha/(2 delta) + 1) C_psi^2 + (1/2 + 1/(2 delta)) C_pi^2
    double T_star{0.0};   ///< sqrt(C_left / C_right); +inf if C_right = 0; 0 if C_left <= 0
};

/// Assembles the report from its inputs.
GronwallReport gronwall_report(double alpha, double C_pi, double C_psi, double delta);

/// Golden-section maximizer of T_star over delta in (0, 2 alpha / (alpha + 1)).
double optimal_delta(double alpha, double C_pi, double C_psi);

/// max over snapshots of max_c |Psi[m1] - f| + max_c |grad(Psi[m1] - f)|,
/// gradient by central differences with mirrored ghosts.
double psi_bound(const Trajectory& traj, const AppliedField& f, const DemagTensor* tensor = nullptr);

/// C_pi from estimate_pi_norm, C_psi from psi_bound; delta optimized unless given.
GronwallReport gronwall_constants(const Trajectory& traj1, const AppliedField& f,
                                  std::optional<double> delta = std::nullopt, const DemagTensor* tensor = nullptr);

/// Samples of w = m2 - m1 and the norms used by the estimates.
struct DifferenceDiagnostics {
    std::vector<double> times;
    std::vector<VectorField> w;
    std::vector<VectorField> w_dot;
    std::vector<double> w_norm;            ///< |w|
    std::vector<double> grad_w_sq;         ///< |grad_h w|^2
    std::vector<double> w_dot_sq_integral; ///< int_0^t |dw/dt|^2, nondecreasing
};

/// Requires both trajectories on the same grid and time stamps.
DifferenceDiagnostics difference_diagnostics(const Trajectory& m1, const Trajectory& m2);

/// Seeded random field tangent to m0, normalized cellwise.
VectorField perturbation_field(const MagnetizationField& m0, std::uint64_t seed);

struct StrongStrongReport {
    double eps{0.0};
    Trajectory m1;
    Trajectory m2;
    DifferenceDiagnostics diff;
    GronwallReport gronwall;
    /// integrated estimate at each sample with t <= min(T_end, T_star):
    ///   slack = [1/2 |grad_h w(0)|^2 + 1/2 int |grad_h w|^2 + C_right int |w|^2]
    ///         - [C_left int |dw/dt|^2 + 1/2 |grad_h w(t)|^2]
    std::vector<double> slack;
    std::vector<double> slack_scale;  ///< magnitude of the larger side, per sample
    double max_w{0.0};
};

/// Two implicit-midpoint runs from m0 and normalize(m0 + eps p).
StrongStrongReport strong_strong_experiment(const MagnetizationField& m0, double eps, const AppliedField& f,
                                            const MaterialParams& params, const SolverConfig& config,
                                            const DemagTensor* tensor = nullptr, std::uint64_t seed = 1);

struct EpsilonSweep {
    std::vector<StrongStrongReport> runs;
    double horizon{0.0};        ///< T_star / 2 (or t_end if smaller)
    double max_variation{0.0};  ///< max over t <= horizon of (max - min) / max of |w(t)| / eps
};

EpsilonSweep epsilon_sweep(const MagnetizationField& m0, const std::vector<double>& eps_values, const AppliedField& f,
                           const MaterialParams& params, const SolverConfig& config,
                           const DemagTensor* tensor = nullptr, std::uint64_t seed = 1);

/// One resolution level of the weak-strong comparison.
struct WeakStrongLevel {
    std::array<int, 3> cells{};
    double dt{0.0};  ///< time step (sample spacing when built by weak_strong_estimate)
    double w_final{0.0};  ///< |w(T)|
    DifferenceDiagnostics diff;
    /// Discrete evaluation of
    ///   E_h[w, f] + D[w, f] <= int psi[w, w x (Psi[m1] - f)] - <f, w> + int <df/dt, w>;
    /// gap = rhs - lhs (reported, not asserted)
    std::vector<double> lhs;
    std::vector<double> rhs;
    std::vector<double> gap;
};

struct WeakStrongReport {
    std::vector<WeakStrongLevel> levels;
    std::vector<double> orders;  ///< log2 of successive |w(T)| ratios
};

/// m1 = implicit midpoint (strong surrogate), m2 = projected Heun, at
/// (h, dt), (h/2, dt/2), ... for the requested number of levels. The initial
/// state is sampled from m0 on each grid.
WeakStrongReport weak_strong_experiment(const Grid& base, const std::function<Vec3(const Vec3&)>& m0,
                                        const AppliedField& f, const MaterialParams& params,
                                        const SolverConfig& config, int levels = 3);

/// Evaluates the weak-strong estimate for an existing pair (m1 strong).
WeakStrongLevel weak_strong_estimate(const Trajectory& m1, const Trajectory& m2, const AppliedField& f,
                                     const DemagTensor* tensor = nullptr);

/// int_0^t |u|^2 <= t^2 int_0^t |du/dt|^2 at every sample.
struct PoincareReport {
    std::vector<double> lhs;
    std::vector<double> rhs;
    double min_slack{0.0};
    bool holds{true};
};

/// Throws std::invalid_argument if u(0) is not zero (to 1e-12 relative to max |u|).
PoincareReport poincare_check(const std::vector<double>& times, const std::vector<VectorField>& u,
                              double rel_tol = 1e-8);
PoincareReport poincare_check(const DifferenceDiagnostics& diff, double rel_tol = 1e-8);

/// Hypothesis of the Gronwall lemma: u(t_k) <= C int_0^{t_k} u + atol at every
/// sample. Throws on negative entries.
bool gronwall_check(const std::vector<double>& times, const std::vector<double>& u, double C, double atol);

/// Conclusion of the Gronwall lemma: max u <= atol.
bool gronwall_conclusion(const std::vector<double>& u, double atol);

}  // namespace helimag
