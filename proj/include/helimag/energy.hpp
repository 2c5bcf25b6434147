#pragma once

#include <vector>

#include "helimag/grid.hpp"
#include "helimag/lowerorder.hpp"
#include "helimag/params.hpp"
#include "helimag/trajectory.hpp"

namespace helimag {

/// Energy terms of a state, midpoint quadrature throughout.
///
///   exchange = (ell_ex^2 / 2) |grad m|^2
///   dmi      = kappa <m, curl m>
///   lower    = -(1/2) <m, pi(m)>
///   applied  = -<m, f>
///
/// Gradients and curls use the LLG ghost rule. helical_total is the shifted
/// energy (1/2)|grad_h m|^2 + lower + applied and equals total + shift for
/// unit fields (Sum_i |m x e_i|^2 = 2).
struct EnergyBreakdown {
    double exchange{0.0};
    double dmi{0.0};
    double lower_order{0.0};
    double applied{0.0};
    double total{0.0};
    double helical_total{0.0};
    double shift{0.0};  ///< kappa^2 / ell_ex^2 * |Omega|
};

EnergyBreakdown energy(const MagnetizationField& m, const VectorField& f, const MaterialParams& params,
                       const DemagTensor* tensor = nullptr);

/// Shifted energy E_h of an arbitrary (not necessarily unit) field.
double helical_energy(const VectorField& m, const VectorField& f, const MaterialParams& params,
                      const DemagTensor* tensor = nullptr);

/// | (1/2)|grad_h m|^2 - (exchange + dmi + kappa^2/ell_ex^2 |Omega|) |
double helicity_identity_gap(const MagnetizationField& m, const MaterialParams& params);

/// H = Delta_h m + pi(m) + f, the negative gradient of helical_energy.
/// Differs from classical_effective_field by -2 (kappa/ell_ex)^2 m.
VectorField effective_field(const VectorField& m, const VectorField& f, const MaterialParams& params,
                            const DemagTensor* tensor = nullptr);

/// ell_ex^2 Delta m - kappa (curl + curl^T) m + pi(m) + f, the negative
/// gradient of the unshifted discrete energy.
VectorField classical_effective_field(const VectorField& m, const VectorField& f, const MaterialParams& params,
                                      const DemagTensor* tensor = nullptr);

/// Cumulative dissipation D(t_k) = int alpha |dm/dt|^2 + int <df/dt, m>.
struct DissipationRecord {
    std::vector<double> times;
    std::vector<double> damping;
    std::vector<double> forcing;
    std::vector<double> total;
};

DissipationRecord dissipation(const Trajectory& traj, const AppliedField& f);

/// r(t_k) = E_h[m(t_k), f(t_k)] + D(t_k) - E_h[m_0, f(0)].
std::vector<double> energy_law_residual(const Trajectory& traj, const AppliedField& f,
                                        const DemagTensor* tensor = nullptr);

/// L2 norm of dm/dt . (alpha dm/dt - H) at the interior samples t_1 .. t_{n-2}.
std::vector<double> conservation_residual(const Trajectory& traj, const AppliedField& f,
                                          const DemagTensor* tensor = nullptr);

/// Test fields x^a y^b z^c e_i with a + b + c <= 1 (12 fields).
std::vector<VectorField> default_test_basis(const Grid& grid);

/// max over test fields phi of
///   | int <dm/dt, phi> - int ( alpha <dm/dt, phi x m> + dE[m, f](phi x m) ) |
/// with dE in gradient form and trapezoidal time quadrature.
double weak_form_residual(const Trajectory& traj, const AppliedField& f, const std::vector<VectorField>& test_fields,
                          const DemagTensor* tensor = nullptr);

/// Gradient form of the energy derivative:
///   ell_ex^2 <grad m, grad phi> + kappa (<m, curl phi> + <phi, curl m>) - <pi(m), phi> - <f, phi>
double energy_derivative(const VectorField& m, const VectorField& phi, const VectorField& f,
                         const MaterialParams& params, const DemagTensor* tensor = nullptr);

}  // namespace helimag
