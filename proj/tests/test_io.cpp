#include <catch_amalgamated.hpp>

#include <unistd.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "helimag/cli.hpp"
#include "helimag/errors.hpp"
#include "helimag/io.hpp"
#include "support.hpp"

using namespace helimag;
using helimag::testing::random_unit_field;
namespace fs = std::filesystem;

namespace {

constexpr const char* minimal_config = R"(
[grid]
extents = 1 1 1
cells = 1 1 1
[material]
ell_ex = 1
[initial]
type = uniform
[solver]
scheme = midpoint
)";

constexpr const char* small_run = R"(# small film
[grid]
extents = 1 1 0.5
cells = 4 4 2
[material]
ell_ex = 0.2
kappa = 0.1
alpha = 1
anisotropy = true
[initial]
type = helix
axis = x
wavenumber = 2
[field]
type = constant
value = 0 0 0.5
[solver]
scheme = implicit_midpoint
dt = 0.005
t_end = 0.2
[lab]
sweep = 1e-2 1e-3
)";

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() / ("helimag_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string config_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult cli(std::vector<std::string> args) {
    args.insert(args.begin(), "helimag");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

}  // namespace

TEST_CASE("doubles round-trip through text") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 10000; ++i) {
        double v;
        do {
            v = std::bit_cast<double>(rng());
        } while (!std::isfinite(v));
        CHECK(same_bits(parse_double(format_double(v)), v));
    }
    for (double v : {0.0, -0.0, 1.0, 0.1, 5e-324, 1.7976931348623157e308})
        CHECK(same_bits(parse_double(format_double(v)), v));
    CHECK(format_double(1.0) == "1");
    CHECK(parse_double("+2.5") == 2.5);
    CHECK_THROWS_AS(parse_double("1.0x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_double(""), std::invalid_argument);
}

TEST_CASE("minimal config parses with defaults") {
    const auto c = parse_config(minimal_config);
    CHECK(c.solver.scheme == Scheme::implicit_midpoint);
    CHECK(c.initial.kind == InitialCondition::Kind::uniform);
    CHECK(c.field.kind == FieldSpec::Kind::zero);
    CHECK(c.grid().size() == 1);
    CHECK(c.initial_state()[0] == Vec3{0, 0, 1});
}

TEST_CASE("config errors carry line numbers") {
    const std::string zero_ell = std::string(minimal_config).replace(std::string(minimal_config).find("ell_ex = 1"), 10, "ell_ex = 0");
    const auto msg = config_error(zero_ell);
    CHECK(msg.find("ell_ex > 0") != std::string::npos);
    CHECK(msg.find("line 5") != std::string::npos);

    const auto dup = config_error(std::string(minimal_config) + "dt = 0.1\ndt = 0.2\n");
    CHECK(dup.find("duplicate key 'dt'") != std::string::npos);
    CHECK(dup.find("lines 11 and 12") != std::string::npos);

    CHECK(config_error(std::string(minimal_config) + "colour = red\n").find("unknown key 'colour'") != std::string::npos);
    CHECK(config_error(std::string(minimal_config) + "[extras]\n").find("unknown section") != std::string::npos);
    CHECK(config_error("[grid]\nextents = 1 1 1\ncells = 1 1 1\n").find("missing section [material]") != std::string::npos);
    CHECK(config_error(std::string(minimal_config) + "dt = fast\n").find("line 11") != std::string::npos);
    CHECK(config_error(std::string(minimal_config) + "dt = 0.3\nt_end = 1\n").find("integer multiple") != std::string::npos);
    std::string short_extents = minimal_config;
    short_extents.replace(short_extents.find("extents = 1 1 1"), 15, "extents = 1 1");
    CHECK(config_error(short_extents).find("line 3: expected three numbers") != std::string::npos);
    CHECK(config_error("stray = 1\n").find("outside of any section") != std::string::npos);
    CHECK(config_error(std::string(minimal_config) + "[grid]\n").find("duplicate section") != std::string::npos);
}

TEST_CASE("config round-trips through its canonical form") {
    auto c = parse_config(small_run);
    CHECK(parse_config(format_config(c)) == c);

    c.params.alpha = 0.1 + 0.2;
    c.params.enable_demag = true;
    c.field = FieldSpec{FieldSpec::Kind::rotating, {0.1, 0, 1.0 / 3}, {}, 0.25, 2.0 / 7};
    c.initial = InitialCondition{};
    c.initial.kind = InitialCondition::Kind::skyrmion_seed;
    c.initial.center = {0.3, 0.7, 0};
    c.initial.radius = 0.2;
    c.lab.seed = 42;
    c.verify.weak_tol = 3e-5;
    c.output.snapshots = false;
    const std::string text = format_config(c);
    const auto back = parse_config(text);
    CHECK(back == c);
    CHECK(format_config(back) == text);
}

TEST_CASE("initial conditions") {
    auto c = parse_config(small_run);
    const auto m = c.initial_state();
    for (std::size_t k = 0; k < m.size(); ++k) {
        const Vec3 x = m.grid().center(k);
        CHECK(norm(m[k] - Vec3{0, std::cos(2 * x.x), std::sin(2 * x.x)}) < 1e-15);
    }
    c.initial.kind = InitialCondition::Kind::skyrmion_seed;
    c.initial.center = {0.5, 0.5, 0};
    c.initial.radius = 0.4;
    const auto s = c.initial_state();
    double zmin = 1.0;
    for (std::size_t k = 0; k < s.size(); ++k) zmin = std::min(zmin, s[k].z);
    CHECK(zmin < 0.0);
    CHECK(s[0].z == Catch::Approx(1.0));
}

TEST_CASE("file initial data") {
    TempDir tmp;
    const auto m = random_unit_field(Grid({1, 1, 1}, {2, 2, 1}), 3);
    write_snapshot(m, tmp.path / "start.dat");
    const std::string text =
        "[grid]\nextents = 1 1 1\ncells = 2 2 1\n[material]\n[initial]\ntype = file\npath = start.dat\n[solver]\nscheme = heun\n";
    spit(tmp.path / "run.ini", text);
    const auto c = load_config(tmp.path / "run.ini");
    CHECK(c.initial.file == tmp.path / "start.dat");
    const auto back = c.initial_state();
    for (std::size_t k = 0; k < m.size(); ++k) CHECK(back[k] == m[k]);
    CHECK_THROWS_AS(c.initial_profile(), ConfigError);

    spit(tmp.path / "missing.ini", std::string(text).replace(text.find("start.dat"), 9, "other.dat"));
    try {
        load_config(tmp.path / "missing.ini");
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("does not exist") != std::string::npos);
    }
}

TEST_CASE("snapshot round-trip is bit exact") {
    const Grid g({1.0, 0.7, 0.3}, {5, 3, 2});
    const auto m = random_unit_field(g, 9);
    const auto back = parse_snapshot(format_snapshot(m));
    REQUIRE(back.grid() == g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(same_bits(back[k].x, m[k].x));
        CHECK(same_bits(back[k].y, m[k].y));
        CHECK(same_bits(back[k].z, m[k].z));
    }
    CHECK(format_snapshot(back) == format_snapshot(m));
}

TEST_CASE("snapshot format details") {
    const MagnetizationField up(VectorField(Grid({1, 1, 1}, {1, 1, 1}), {0, 0, 1}));
    const std::string text = format_snapshot(up);
    CHECK(text.rfind("helimag snapshot v1\n", 0) == 0);
    CHECK(text.substr(text.size() - 7) == "\n0 0 1\n");

    const auto m = random_unit_field(Grid({1, 1, 1}, {2, 2, 2}), 1);
    std::string truncated = format_snapshot(m);
    truncated.erase(truncated.rfind('\n', truncated.size() - 2) + 1);
    try {
        parse_snapshot(truncated);
        FAIL("expected a dimension error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("dimension mismatch") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_snapshot("vtk 2\n"), std::runtime_error);
    std::string wrong_count = format_snapshot(m);
    wrong_count.replace(wrong_count.find("POINT_DATA 8"), 12, "POINT_DATA 9");
    CHECK_THROWS_AS(parse_snapshot(wrong_count), std::runtime_error);
}

TEST_CASE("series and trajectory files") {
    TempDir tmp;
    const auto c = parse_config(small_run);
    const auto f = c.field.build();
    const auto traj = simulate(c.initial_state(), f, c.params, c.solver);
    const auto series = energy_series(traj, f);
    REQUIRE(series.size() == traj.size());
    write_series(series, tmp.path / "series.csv");
    const std::string text = slurp(tmp.path / "series.csv");
    CHECK(text.substr(0, text.find('\n')) == series_header);
    const auto back = read_series(tmp.path / "series.csv");
    REQUIRE(back.size() == series.size());
    for (std::size_t k = 0; k < series.size(); ++k) CHECK(back[k] == series[k]);
    CHECK(series[0].residual == 0.0);
    CHECK(series.back().D_alpha > 0.0);

    write_trajectory(traj, tmp.path / "traj");
    const auto loaded = read_trajectory(tmp.path / "traj", c.params);
    REQUIRE(loaded.size() == traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        CHECK(same_bits(loaded.times[k], traj.times[k]));
        for (std::size_t i = 0; i < traj.grid().size(); ++i) CHECK(loaded.states[k][i] == traj.states[k][i]);
    }
}

TEST_CASE("command line exit codes") {
    TempDir tmp;
    spit(tmp.path / "run.ini", small_run);
    const std::string cfg = (tmp.path / "run.ini").string();
    const std::string out = (tmp.path / "out").string();

    const auto run = cli({"run", cfg, "--out", out});
    REQUIRE(run.code == exit_success);
    CHECK(fs::exists(tmp.path / "out" / "series.csv"));
    CHECK(fs::exists(tmp.path / "out" / "manifest.csv"));
    CHECK(fs::exists(tmp.path / "out" / "snapshot_000040.dat"));

    const auto ok = cli({"verify", cfg, out});
    CHECK(ok.code == exit_success);
    CHECK(ok.out.find("FAIL") == std::string::npos);

    // rerun is byte-identical
    const std::string first = slurp(tmp.path / "out" / "series.csv");
    REQUIRE(cli({"run", cfg, "--out", out}).code == exit_success);
    CHECK(slurp(tmp.path / "out" / "series.csv") == first);

    // drop the last samples from the manifest
    std::string manifest = slurp(tmp.path / "out" / "manifest.csv");
    manifest.erase(manifest.find("\n20,") + 1);
    spit(tmp.path / "out" / "manifest.csv", manifest);
    const auto truncated = cli({"verify", cfg, out});
    CHECK(truncated.code == exit_check_failed);
    CHECK(truncated.out.find("FAIL time-horizon") != std::string::npos);

    const auto same = cli({"lab", "strong-strong", cfg, "--eps", "0"});
    CHECK(same.code == exit_success);
    CHECK(same.out.find("max |w| = 0.000e+00") != std::string::npos);
    CHECK(cli({"lab", "strong-strong", cfg}).code == exit_success);

    CHECK(cli({}).code == exit_usage);
    CHECK(cli({"frobnicate"}).code == exit_usage);
    CHECK(cli({"run"}).code == exit_usage);
    CHECK(cli({"run", cfg, "--dt", "0.3"}).code == exit_usage);
    CHECK(cli({"run", cfg, "--cells", "4x4"}).code == exit_usage);
    CHECK(cli({"run", cfg, "--scheme", "euler"}).code == exit_usage);
    CHECK(cli({"run", (tmp.path / "absent.ini").string()}).code == exit_usage);
    CHECK(cli({"verify", cfg, (tmp.path / "nowhere").string()}).code == exit_check_failed);
    CHECK(cli({"--help"}).code == exit_success);
}
