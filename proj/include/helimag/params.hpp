#pragma once

#include "helimag/vec3.hpp"

namespace helimag {

/// Material and model constants, dimensionless.
struct MaterialParams {
    double ell_ex{1.0};          ///< exchange length, > 0
    double kappa{0.0};           ///< DMI strength
    double alpha{0.1};           ///< Gilbert damping, > 0
    Vec3 aniso_axis{0, 0, 1};    ///< easy axis, unit when anisotropy is enabled
    double aniso_strength{1.0};  ///< multiplier on 2 (m.e) e, >= 0
    bool enable_aniso{false};
    bool enable_demag{false};

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;

    /// kappa / ell_ex, the zeroth-order coefficient of the helical derivative.
    double helical_shift() const { return kappa / ell_ex; }

    /// kappa / ell_ex^2, the Robin coefficient of the boundary condition.
    double robin_coefficient() const { return kappa / (ell_ex * ell_ex); }

    friend bool operator==(const MaterialParams&, const MaterialParams&) = default;
};

}  // namespace helimag
