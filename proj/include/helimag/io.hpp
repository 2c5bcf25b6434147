#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "helimag/dynamics.hpp"
#include "helimag/energy.hpp"

namespace helimag {

/// Initial magnetization. Only the members of the active kind are used.
struct InitialCondition {
    enum class Kind { uniform, helix, skyrmion_seed, file };
    Kind kind{Kind::uniform};
    Vec3 direction{0, 0, 1};   ///< uniform
    Axis axis{Axis::z};        ///< helix: propagation axis
    double wavenumber{0.0};    ///< helix
    Vec3 center{0.5, 0.5, 0};  ///< skyrmion_seed: core position (x, y used)
    double radius{0.25};       ///< skyrmion_seed
    std::filesystem::path file;

    friend bool operator==(const InitialCondition&, const InitialCondition&) = default;
};

struct FieldSpec {
    enum class Kind { zero, constant, ramp, rotating };
    Kind kind{Kind::zero};
    Vec3 value{};           ///< constant value, ramp start, rotating bias
    Vec3 rate{};            ///< ramp
    double amplitude{0.0};  ///< rotating
    double omega{0.0};      ///< rotating

    AppliedField build() const;

    friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

struct OutputSpec {
    std::filesystem::path directory{"out"};
    bool snapshots{true};

    friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

/// Settings of the lab subcommands.
struct LabSpec {
    double eps{1e-3};
    std::vector<double> sweep;  ///< epsilon sweep for strong-strong; empty means eps only
    int levels{3};              ///< weak-strong refinement levels
    std::uint64_t seed{1};

    friend bool operator==(const LabSpec&, const LabSpec&) = default;
};

/// Tolerances of the verify subcommand.
struct VerifySpec {
    double norm_tol{1e-10};    ///< max ||m| - 1|
    double energy_tol{1e-6};   ///< r(t) <= energy_tol * max(|E_h[m0]|, 1)
    double weak_tol{1e-4};     ///< weak_form_residual over the default test basis
    double initial_tol{1e-12}; ///< max |m(0) - m0|

    friend bool operator==(const VerifySpec&, const VerifySpec&) = default;
};

struct RunConfig {
    std::array<double, 3> extents{1, 1, 1};
    std::array<int, 3> cells{1, 1, 1};
    MaterialParams params;
    std::optional<std::filesystem::path> demag_cache;
    InitialCondition initial;
    FieldSpec field;
    SolverConfig solver;
    OutputSpec output;
    LabSpec lab;
    VerifySpec verify;

    Grid grid() const;
    /// Pointwise initial profile; throws ConfigError for file initial data.
    std::function<Vec3(const Vec3&)> initial_profile() const;
    MagnetizationField initial_state() const;
    /// Tensor for the configured grid when demag is enabled.
    std::optional<DemagTensor> demag_tensor() const;

    /// Throws ConfigError on violated constraints.
    void validate() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Sectioned key = value text, '#' comments. Relative file paths resolve
/// against base_dir. Throws ConfigError carrying the offending line.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(format_config(c)) == c.
std::string format_config(const RunConfig& config);

/// Shortest text that reads back to the same double.
std::string format_double(double v);
/// Whole-string parse; throws std::invalid_argument.
double parse_double(std::string_view text);

/// Largest ||m| - 1| accepted when reading a snapshot; values are kept as read.
inline constexpr double snapshot_norm_tolerance = 1e-6;

std::string format_snapshot(const MagnetizationField& m);
/// Throws std::runtime_error on a malformed header, a count mismatch or
/// vectors off the unit sphere.
MagnetizationField parse_snapshot(std::string_view text);
void write_snapshot(const MagnetizationField& m, const std::filesystem::path& path);
MagnetizationField read_snapshot(const std::filesystem::path& path);

/// One row of the energy series.
struct SeriesRecord {
    double t{0.0};
    double E_ex{0.0};
    double E_dmi{0.0};
    double E_lo{0.0};
    double E_appl{0.0};
    double E_total{0.0};
    double E_helical{0.0};
    double D_alpha{0.0};
    double D_f{0.0};
    double residual{0.0};  ///< energy law residual r(t)

    friend bool operator==(const SeriesRecord&, const SeriesRecord&) = default;
};

inline constexpr std::string_view series_header = "t,E_ex,E_dmi,E_lo,E_appl,E_total,E_helical,D_alpha,D_f,residual";

std::vector<SeriesRecord> energy_series(const Trajectory& traj, const AppliedField& f,
                                        const DemagTensor* tensor = nullptr);
void write_series(const std::vector<SeriesRecord>& records, const std::filesystem::path& path);
std::vector<SeriesRecord> read_series(const std::filesystem::path& path);

/// Writes snapshot_NNNNNN.dat files and manifest.csv (index,t,file).
void write_trajectory(const Trajectory& traj, const std::filesystem::path& dir);
/// Reads a directory written by write_trajectory.
Trajectory read_trajectory(const std::filesystem::path& dir, const MaterialParams& params);

}  // namespace helimag
