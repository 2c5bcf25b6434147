#include "helimag/params.hpp"

#include <cmath>
#include <stdexcept>

namespace helimag {

void MaterialParams::validate() const {
    if (!(ell_ex > 0.0) || !std::isfinite(ell_ex)) throw std::invalid_argument("ell_ex > 0 violated");
    if (!std::isfinite(kappa)) throw std::invalid_argument("kappa must be finite");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha > 0 violated");
    if (!(aniso_strength >= 0.0) || !std::isfinite(aniso_strength))
        throw std::invalid_argument("aniso_strength >= 0 violated");
    if (enable_aniso && std::abs(norm(aniso_axis) - 1.0) > 1e-12)
        throw std::invalid_argument("|aniso_axis| = 1 violated");
}

}  // namespace helimag
