#include "helimag/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "helimag/errors.hpp"
#include "helimag/io.hpp"
#include "helimag/uniqueness.hpp"

namespace helimag {

namespace {

struct Overrides {
    std::optional<double> dt;
    std::optional<std::string> cells;
    std::optional<std::string> scheme;
    std::optional<double> eps;
    std::optional<std::string> out;
};

void add_overrides(CLI::App* app, Overrides& o) {
    app->add_option("--dt", o.dt, "time step");
    app->add_option("--cells", o.cells, "cell counts, e.g. 16x16x4");
    app->add_option("--scheme", o.scheme, "implicit_midpoint or projected_heun");
    app->add_option("--eps", o.eps, "perturbation size for strong-strong");
    app->add_option("--out", o.out, "output directory");
}

std::array<int, 3> parse_cells(const std::string& s) {
    std::array<int, 3> cells{};
    std::string t = s;
    std::replace(t.begin(), t.end(), 'x', ' ');
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream in(t);
    for (int d = 0; d < 3; ++d)
        if (!(in >> cells[d]) || cells[d] < 1) throw ConfigError("--cells expects three positive integers, got '" + s + "'");
    std::string rest;
    if (in >> rest) throw ConfigError("--cells expects three positive integers, got '" + s + "'");
    return cells;
}

RunConfig load_with_overrides(const std::string& path, const Overrides& o) {
    RunConfig c = load_config(path);
    if (o.dt) c.solver.dt = *o.dt;
    if (o.cells) c.cells = parse_cells(*o.cells);
    if (o.scheme) {
        try {
            c.solver.scheme = scheme_from_string(*o.scheme);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("--scheme: ") + e.what());
        }
    }
    if (o.eps) {
        c.lab.eps = *o.eps;
        c.lab.sweep.clear();
    }
    if (o.out) c.output.directory = *o.out;
    c.validate();
    return c;
}

const DemagTensor* pointer(const std::optional<DemagTensor>& t) { return t ? &*t : nullptr; }

class Checklist {
public:
    explicit Checklist(std::ostream& out) : out_(out) {}

    void record(const std::string& name, bool ok, const std::string& detail) {
        out_ << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
        if (!ok) failed_.push_back(name);
    }

    int finish(std::ostream& err) const {
        if (failed_.empty()) return exit_success;
        err << "failed:";
        for (const auto& f : failed_) err << " " << f;
        err << "\n";
        return exit_check_failed;
    }

private:
    std::ostream& out_;
    std::vector<std::string> failed_;
};

std::string sci(double v) {
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << v;
    return s.str();
}

int command_run(const RunConfig& c, std::ostream& out) {
    const auto tensor = c.demag_tensor();
    const auto f = c.field.build();
    const auto traj = simulate(c.initial_state(), f, c.params, c.solver, pointer(tensor));
    const auto& dir = c.output.directory;
    std::filesystem::create_directories(dir);
    if (c.output.snapshots) write_trajectory(traj, dir);
    std::ofstream(dir / "config.ini") << format_config(c);
    const auto series = energy_series(traj, f, pointer(tensor));
    write_series(series, dir / "series.csv");
    out << "run: " << traj.size() << " samples, t = " << traj.times.back() << ", E_helical = " << series.back().E_helical
        << ", written to " << dir.string() << "\n";
    return exit_success;
}

int command_verify(const RunConfig& c, const std::string& traj_dir, std::ostream& out, std::ostream& err) {
    Checklist checks(out);
    Trajectory traj;
    try {
        traj = read_trajectory(traj_dir, c.params);
    } catch (const std::exception& e) {
        checks.record("trajectory", false, e.what());
        return checks.finish(err);
    }
    if (!(traj.grid() == c.grid())) {
        checks.record("trajectory", false, "grid does not match the configuration");
        return checks.finish(err);
    }
    const auto tensor = c.demag_tensor();
    const auto f = c.field.build();

    const VectorField dm0 = traj.states.front().field() - c.initial_state().field();
    double init_err = 0.0;
    for (const auto& v : dm0.values()) init_err = std::max(init_err, norm(v));
    checks.record("initial-data", init_err <= c.verify.initial_tol, "max |m(0) - m0| = " + sci(init_err));

    bool ordered = traj.times.front() == 0.0;
    for (std::size_t k = 1; k < traj.size(); ++k) ordered = ordered && traj.times[k] > traj.times[k - 1];
    const double t_last = traj.times.back();
    const bool reaches = std::abs(t_last - c.solver.t_end) <= 1e-9 * std::max(1.0, c.solver.t_end);
    checks.record("time-horizon", ordered && reaches,
                  "samples on [0, " + format_double(t_last) + "], t_end = " + format_double(c.solver.t_end));

    double drift = 0.0;
    for (const auto& m : traj.states) drift = std::max(drift, max_norm_deviation(m));
    checks.record("unit-norm", drift <= c.verify.norm_tol, "max ||m| - 1| = " + sci(drift));

    if (traj.size() < 2) {
        checks.record("weak-form", false, "needs at least two snapshots");
        checks.record("energy-inequality", false, "needs at least two snapshots");
        return checks.finish(err);
    }
    const double weak = weak_form_residual(traj, f, default_test_basis(traj.grid()), pointer(tensor));
    checks.record("weak-form", weak <= c.verify.weak_tol, "residual = " + sci(weak));

    const auto r = energy_law_residual(traj, f, pointer(tensor));
    const double e0 = helical_energy(traj.states.front(), f.at(traj.grid(), traj.times.front()), c.params, pointer(tensor));
    const double worst = *std::max_element(r.begin(), r.end());
    const double bound = c.verify.energy_tol * std::max(std::abs(e0), 1.0);
    checks.record("energy-inequality", worst <= bound, "max r(t) = " + sci(worst) + ", bound " + sci(bound));
    return checks.finish(err);
}

int command_strong_strong(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto tensor = c.demag_tensor();
    const auto f = c.field.build();
    const auto m0 = c.initial_state();
    const std::vector<double> eps = c.lab.sweep.empty() ? std::vector<double>{c.lab.eps} : c.lab.sweep;
    Checklist checks(out);
    std::vector<StrongStrongReport> runs;
    for (double e : eps) runs.push_back(strong_strong_experiment(m0, e, f, c.params, c.solver, pointer(tensor), c.lab.seed));
    const auto& g = runs.front().gronwall;
    out << "gronwall: C_pi = " << g.C_pi << ", C_psi = " << g.C_psi << ", delta = " << g.delta << ", C_left = " << g.C_left
        << ", C_right = " << g.C_right << ", T_star = " << g.T_star << "\n";
    for (const auto& run : runs) {
        const std::string tag = "eps=" + format_double(run.eps);
        out << tag << ": max |w| = " << sci(run.max_w) << ", |w(T)| = " << sci(run.diff.w_norm.back()) << "\n";
        if (run.eps == 0.0) checks.record(tag + " identical-start", run.max_w <= 1e-10, "max |w| = " + sci(run.max_w));
        double worst = 0.0;
        for (std::size_t k = 0; k < run.slack.size(); ++k) worst = std::min(worst, run.slack[k] / run.slack_scale[k]);
        checks.record(tag + " gronwall-estimate", worst >= -1e-8, "min relative slack = " + sci(worst));
        std::vector<VectorField> shifted;
        for (const auto& w : run.diff.w) shifted.push_back(w - run.diff.w.front());
        const auto p = poincare_check(run.diff.times, shifted);
        checks.record(tag + " poincare", p.holds, "min slack = " + sci(p.min_slack));
    }
    if (runs.size() >= 2 && runs.front().eps > 0.0) {
        double variation = 0.0;
        const double horizon = std::min(c.solver.t_end, 0.5 * runs.front().gronwall.T_star);
        const auto& times = runs.front().diff.times;
        for (std::size_t k = 0; k < times.size() && times[k] <= horizon; ++k) {
            double lo = INFINITY, hi = 0.0;
            for (const auto& run : runs) {
                lo = std::min(lo, run.diff.w_norm[k] / run.eps);
                hi = std::max(hi, run.diff.w_norm[k] / run.eps);
            }
            if (hi > 0.0) variation = std::max(variation, (hi - lo) / hi);
        }
        checks.record("eps-linearity", variation <= 0.2,
                      "max variation of |w|/eps on [0, " + format_double(horizon) + "] = " + sci(variation));
    }
    return checks.finish(err);
}

int command_weak_strong(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto rep = weak_strong_experiment(c.grid(), c.initial_profile(), c.field.build(), c.params, c.solver, c.lab.levels);
    Checklist checks(out);
    for (const auto& l : rep.levels) {
        const double min_gap = *std::min_element(l.gap.begin(), l.gap.end());
        out << "cells " << l.cells[0] << "x" << l.cells[1] << "x" << l.cells[2] << ", dt = " << l.dt
            << ": |w(T)| = " << sci(l.w_final) << ", min estimate gap = " << sci(min_gap) << "\n";
        const auto p = poincare_check(l.diff);
        checks.record("poincare " + std::to_string(l.cells[0]), p.holds, "min slack = " + sci(p.min_slack));
    }
    for (std::size_t i = 0; i < rep.orders.size(); ++i)
        checks.record("refinement " + std::to_string(i + 1), rep.orders[i] >= 1.0, "order = " + format_double(rep.orders[i]));
    return checks.finish(err);
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"helimag: helical micromagnetics on uniform grids"};
    app.require_subcommand(1);
    Overrides o;
    std::string config, traj_dir;

    auto* run = app.add_subcommand("run", "simulate and write snapshots and the energy series");
    run->add_option("config", config, "configuration file")->required();
    add_overrides(run, o);

    auto* verify = app.add_subcommand("verify", "check a stored trajectory against the solution axioms");
    verify->add_option("config", config, "configuration file")->required();
    verify->add_option("trajectory", traj_dir, "trajectory directory")->required();
    add_overrides(verify, o);

    auto* lab = app.add_subcommand("lab", "uniqueness experiments");
    lab->require_subcommand(1);
    auto* ss = lab->add_subcommand("strong-strong", "perturbed implicit-midpoint runs");
    ss->add_option("config", config, "configuration file")->required();
    add_overrides(ss, o);
    auto* ws = lab->add_subcommand("weak-strong", "projected Heun against implicit midpoint under refinement");
    ws->add_option("config", config, "configuration file")->required();
    add_overrides(ws, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_success : exit_usage;
    }

    try {
        const RunConfig c = load_with_overrides(config, o);
        if (run->parsed()) return command_run(c, out);
        if (verify->parsed()) return command_verify(c, traj_dir, out, err);
        if (ss->parsed()) return command_strong_strong(c, out, err);
        return command_weak_strong(c, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_runtime;
    }
}

int cli_main(int argc, const char* const* argv) { return cli_main(argc, argv, std::cout, std::cerr); }

}  // namespace helimag
