#pragma once

#include <vector>

#include "helimag/grid.hpp"
#include "helimag/params.hpp"

namespace helimag {

/// Per-step solver diagnostics.
struct StepDiagnostics {
    int iterations{0};       ///< fixed-point iterations (1 for explicit steps)
    double residual{0.0};    ///< final successive-iterate L-infinity distance
};

/// Sampled solution m(t_k); times are uniform.
struct Trajectory {
    MaterialParams params;
    std::vector<double> times;
    std::vector<MagnetizationField> states;
    std::vector<StepDiagnostics> diagnostics;  ///< one entry per integrator step

    std::size_t size() const { return states.size(); }
    const Grid& grid() const { return states.front().grid(); }
};

/// Time derivative at each sample: centered differences inside, one-sided
/// second-order differences at the ends (first order with two samples).
std::vector<VectorField> time_derivatives(const Trajectory& traj);
std::vector<VectorField> time_derivatives(const std::vector<double>& times, const std::vector<VectorField>& samples);

/// Cumulative trapezoidal integral of a sampled scalar, starting at zero.
std::vector<double> cumulative_trapezoid(const std::vector<double>& times, const std::vector<double>& values);

}  // namespace helimag
