#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "helimag/grid.hpp"

namespace helimag::testing {

inline VectorField random_field(const Grid& grid, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    VectorField u(grid);
    for (auto& v : u.values()) v = {uni(rng), uni(rng), uni(rng)};
    return u;
}

inline MagnetizationField random_unit_field(const Grid& grid, std::uint64_t seed) {
    return MagnetizationField::project(random_field(grid, seed));
}

/// log2 of successive error ratios.
inline std::vector<double> observed_orders(const std::vector<double>& errors) {
    std::vector<double> out;
    for (std::size_t i = 1; i < errors.size(); ++i) out.push_back(std::log2(errors[i - 1] / errors[i]));
    return out;
}

/// Max over cells whose index is at least `margin` from every face along
/// non-collapsed axes.
inline double interior_max_error(const VectorField& a, const VectorField& b, int margin) {
    const Grid& g = a.grid();
    double worst = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c) {
        const auto ijk = g.coords(c);
        bool inner = true;
        for (int d = 0; d < 3; ++d)
            if (g.cells()[d] > 1 && (ijk[d] < margin || ijk[d] >= g.cells()[d] - margin)) inner = false;
        if (inner) worst = std::max(worst, norm(a[c] - b[c]));
    }
    return worst;
}

}  // namespace helimag::testing
