#include "helimag/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "helimag/errors.hpp"

namespace helimag {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    // from_chars rejects a leading '+'
    const char* begin = (!text.empty() && text.front() == '+') ? text.data() + 1 : text.data();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end || begin == end)
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    return v;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            if (start < text.size()) lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

long parse_long(std::string_view text) {
    long v = 0;
    const char* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end || text.empty())
        throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
    return v;
}

std::string format_vec(const Vec3& v) {
    return format_double(v.x) + " " + format_double(v.y) + " " + format_double(v.z);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

// ---- config ---------------------------------------------------------------

struct Entry {
    std::string value;
    int line{0};
    bool used{false};
};

struct Section {
    int line{0};
    std::map<std::string, Entry> entries;
};

class SectionReader {
public:
    SectionReader(const std::string& name, Section& s) : name_(name), s_(s) {}

    int line() const { return s_.line; }

    const Entry* find(const std::string& key) {
        auto it = s_.entries.find(key);
        if (it == s_.entries.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    const Entry& require(const std::string& key) {
        const Entry* e = find(key);
        if (!e) throw ConfigError("missing key '" + key + "' in [" + name_ + "]", s_.line);
        return *e;
    }

    template <class Fn>
    auto convert(const Entry& e, Fn fn) {
        try {
            return fn(std::string_view(e.value));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& ex) {
            throw ConfigError(ex.what(), e.line);
        }
    }

    double number(const std::string& key, double fallback) {
        const Entry* e = find(key);
        return e ? convert(*e, parse_double) : fallback;
    }

    long integer(const std::string& key, long fallback) {
        const Entry* e = find(key);
        return e ? convert(*e, parse_long) : fallback;
    }

    bool flag(const std::string& key, bool fallback) {
        const Entry* e = find(key);
        if (!e) return fallback;
        if (e->value == "true") return true;
        if (e->value == "false") return false;
        throw ConfigError("expected true or false for '" + key + "'", e->line);
    }

    Vec3 vec(const std::string& key, Vec3 fallback) {
        const Entry* e = find(key);
        return e ? convert(*e, parse_vec) : fallback;
    }

    std::vector<double> numbers(const std::string& key) {
        const Entry* e = find(key);
        if (!e) return {};
        return convert(*e, [](std::string_view s) {
            std::vector<double> out;
            for (auto tok : split_ws(s)) out.push_back(parse_double(tok));
            return out;
        });
    }

    std::optional<std::string> text(const std::string& key) {
        const Entry* e = find(key);
        if (!e) return std::nullopt;
        return e->value;
    }

    /// Rejects keys nobody asked for.
    void finish() {
        for (const auto& [key, e] : s_.entries)
            if (!e.used) throw ConfigError("unknown key '" + key + "' in [" + name_ + "]", e.line);
    }

    static Vec3 parse_vec(std::string_view s) {
        const auto tok = split_ws(s);
        if (tok.size() != 3) throw std::invalid_argument("expected three numbers");
        return {parse_double(tok[0]), parse_double(tok[1]), parse_double(tok[2])};
    }

private:
    std::string name_;
    Section& s_;
};

const std::vector<std::string> known_sections = {"grid", "material", "initial", "field", "solver", "output", "lab", "verify"};

template <class Fn>
void checked(int line, Fn fn) {
    try {
        fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what(), line);
    }
}

void validate_grid(const RunConfig& c) {
    for (int d = 0; d < 3; ++d) {
        if (!(c.extents[d] > 0.0) || !std::isfinite(c.extents[d])) throw std::invalid_argument("extents > 0 violated");
        if (c.cells[d] < 1) throw std::invalid_argument("cells >= 1 violated");
    }
}

void validate_initial(const InitialCondition& ic) {
    switch (ic.kind) {
    case InitialCondition::Kind::uniform:
        if (!(norm(ic.direction) > 0.0) || !std::isfinite(norm(ic.direction)))
            throw std::invalid_argument("|direction| > 0 violated");
        break;
    case InitialCondition::Kind::helix:
        if (!std::isfinite(ic.wavenumber)) throw std::invalid_argument("wavenumber must be finite");
        break;
    case InitialCondition::Kind::skyrmion_seed:
        if (!(ic.radius > 0.0) || !std::isfinite(ic.radius)) throw std::invalid_argument("radius > 0 violated");
        break;
    case InitialCondition::Kind::file:
        if (!fs::exists(ic.file)) throw std::invalid_argument("initial file does not exist: " + ic.file.string());
        break;
    }
}

void validate_lab(const LabSpec& lab) {
    if (!(lab.eps >= 0.0)) throw std::invalid_argument("eps >= 0 violated");
    for (double e : lab.sweep)
        if (!(e > 0.0)) throw std::invalid_argument("sweep values > 0 violated");
    if (lab.levels < 1) throw std::invalid_argument("levels >= 1 violated");
}

void validate_verify(const VerifySpec& v) {
    for (double t : {v.norm_tol, v.energy_tol, v.weak_tol, v.initial_tol})
        if (!(t >= 0.0)) throw std::invalid_argument("verify tolerances >= 0 violated");
}

fs::path resolve(const fs::path& p, const fs::path& base) {
    if (p.is_absolute() || base.empty() || base == ".") return p;
    return base / p;
}

}  // namespace

AppliedField FieldSpec::build() const {
    switch (kind) {
    case Kind::zero:
        return AppliedField::zero();
    case Kind::constant:
        return AppliedField::constant(value);
    case Kind::ramp:
        return AppliedField::ramp(value, rate);
    case Kind::rotating:
        return AppliedField::rotating(value, amplitude, omega);
    }
    throw std::logic_error("unhandled field kind");
}

Grid RunConfig::grid() const { return Grid(extents, cells); }

std::function<Vec3(const Vec3&)> RunConfig::initial_profile() const {
    switch (initial.kind) {
    case InitialCondition::Kind::uniform: {
        const Vec3 d = initial.direction;
        return [d](const Vec3&) { return d; };
    }
    case InitialCondition::Kind::helix: {
        const int a = index_of(initial.axis);
        const int e1 = (a + 1) % 3, e2 = (a + 2) % 3;
        const double q = initial.wavenumber;
        return [=](const Vec3& x) {
            Vec3 m{};
            m[e1] = std::cos(q * x[a]);
            m[e2] = std::sin(q * x[a]);
            return m;
        };
    }
    case InitialCondition::Kind::skyrmion_seed: {
        const Vec3 c = initial.center;
        const double r = initial.radius;
        return [=](const Vec3& x) {
            const double dx = x.x - c.x, dy = x.y - c.y;
            const double rho = std::hypot(dx, dy);
            const double theta = rho < r ? std::numbers::pi * (1.0 - rho / r) : 0.0;
            const double phi = std::atan2(dy, dx);
            return Vec3{std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
        };
    }
    case InitialCondition::Kind::file:
        throw ConfigError("initial data from a file has no pointwise profile");
    }
    throw std::logic_error("unhandled initial condition");
}

MagnetizationField RunConfig::initial_state() const {
    const Grid g = grid();
    if (initial.kind != InitialCondition::Kind::file) return MagnetizationField::project(sample(g, initial_profile()));
    auto m = read_snapshot(initial.file);
    if (!(m.grid() == g)) throw ConfigError("initial file grid does not match [grid]");
    return m;
}

std::optional<DemagTensor> RunConfig::demag_tensor() const {
    if (!params.enable_demag) return std::nullopt;
    if (demag_cache) return load_or_build_demag_tensor(grid(), *demag_cache);
    return build_demag_tensor(grid());
}

void RunConfig::validate() const {
    checked(0, [&] {
        validate_grid(*this);
        params.validate();
        validate_initial(initial);
        solver.validate();
        validate_lab(lab);
        validate_verify(verify);
    });
}

RunConfig parse_config(std::string_view text, const fs::path& base_dir) {
    std::map<std::string, Section> sections;
    std::string current;
    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const int lineno = static_cast<int>(i) + 1;
        std::string_view line = lines[i];
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("malformed section header", lineno);
            const std::string name(trim(line.substr(1, line.size() - 2)));
            if (std::find(known_sections.begin(), known_sections.end(), name) == known_sections.end())
                throw ConfigError("unknown section [" + name + "]", lineno);
            if (auto it = sections.find(name); it != sections.end())
                throw ConfigError("duplicate section [" + name + "] (first on line " + std::to_string(it->second.line) +
                                      ")",
                                  lineno);
            sections[name].line = lineno;
            current = name;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected key = value", lineno);
        if (current.empty()) throw ConfigError("key outside of any section", lineno);
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError("empty key", lineno);
        auto& entries = sections[current].entries;
        if (auto it = entries.find(key); it != entries.end())
            throw ConfigError("duplicate key '" + key + "' in [" + current + "] (lines " + std::to_string(it->second.line) +
                                  " and " + std::to_string(lineno) + ")",
                              lineno);
        entries[key] = Entry{value, lineno, false};
    }

    for (const char* required : {"grid", "material", "initial", "solver"})
        if (!sections.count(required)) throw ConfigError(std::string("missing section [") + required + "]");

    RunConfig c;
    {
        SectionReader r("grid", sections["grid"]);
        const Vec3 ext = r.convert(r.require("extents"), SectionReader::parse_vec);
        c.extents = {ext.x, ext.y, ext.z};
        const Entry& cells = r.require("cells");
        r.convert(cells, [&](std::string_view s) {
            const auto tok = split_ws(s);
            if (tok.size() != 3) throw std::invalid_argument("expected three integers");
            for (int d = 0; d < 3; ++d) {
                const long n = parse_long(tok[d]);
                if (n < 1 || n > 1 << 20) throw std::invalid_argument("cells >= 1 violated");
                c.cells[d] = static_cast<int>(n);
            }
            return 0;
        });
        r.finish();
        checked(r.line(), [&] { validate_grid(c); });
    }
    {
        SectionReader r("material", sections["material"]);
        MaterialParams& p = c.params;
        p.ell_ex = r.number("ell_ex", p.ell_ex);
        p.kappa = r.number("kappa", p.kappa);
        p.alpha = r.number("alpha", p.alpha);
        p.enable_aniso = r.flag("anisotropy", p.enable_aniso);
        p.aniso_axis = r.vec("aniso_axis", p.aniso_axis);
        p.aniso_strength = r.number("aniso_strength", p.aniso_strength);
        p.enable_demag = r.flag("demag", p.enable_demag);
        if (auto cache = r.text("demag_cache")) c.demag_cache = resolve(*cache, base_dir);
        r.finish();
        checked(r.line(), [&] { p.validate(); });
    }
    {
        SectionReader r("initial", sections["initial"]);
        InitialCondition& ic = c.initial;
        const Entry& type = r.require("type");
        if (type.value == "uniform") {
            ic.kind = InitialCondition::Kind::uniform;
            ic.direction = r.vec("direction", ic.direction);
        } else if (type.value == "helix") {
            ic.kind = InitialCondition::Kind::helix;
            const Entry& axis = r.require("axis");
            if (axis.value == "x")
                ic.axis = Axis::x;
            else if (axis.value == "y")
                ic.axis = Axis::y;
            else if (axis.value == "z")
                ic.axis = Axis::z;
            else
                throw ConfigError("axis must be x, y or z", axis.line);
            ic.wavenumber = r.convert(r.require("wavenumber"), parse_double);
        } else if (type.value == "skyrmion_seed") {
            ic.kind = InitialCondition::Kind::skyrmion_seed;
            ic.center = r.vec("center", ic.center);
            ic.radius = r.number("radius", ic.radius);
        } else if (type.value == "file") {
            ic.kind = InitialCondition::Kind::file;
            ic.file = resolve(r.require("path").value, base_dir);
        } else {
            throw ConfigError("unknown initial type '" + type.value + "'", type.line);
        }
        r.finish();
        checked(r.line(), [&] { validate_initial(ic); });
    }
    if (sections.count("field")) {
        SectionReader r("field", sections["field"]);
        FieldSpec& f = c.field;
        const Entry& type = r.require("type");
        if (type.value == "zero") {
            f.kind = FieldSpec::Kind::zero;
        } else if (type.value == "constant") {
            f.kind = FieldSpec::Kind::constant;
            f.value = r.convert(r.require("value"), SectionReader::parse_vec);
        } else if (type.value == "ramp") {
            f.kind = FieldSpec::Kind::ramp;
            f.value = r.convert(r.require("start"), SectionReader::parse_vec);
            f.rate = r.convert(r.require("rate"), SectionReader::parse_vec);
        } else if (type.value == "rotating") {
            f.kind = FieldSpec::Kind::rotating;
            f.value = r.vec("bias", f.value);
            f.amplitude = r.convert(r.require("amplitude"), parse_double);
            f.omega = r.convert(r.require("omega"), parse_double);
        } else {
            throw ConfigError("unknown field type '" + type.value + "'", type.line);
        }
        r.finish();
    }
    {
        SectionReader r("solver", sections["solver"]);
        SolverConfig& s = c.solver;
        const Entry& scheme = r.require("scheme");
        s.scheme = r.convert(scheme, [](std::string_view v) { return scheme_from_string(std::string(v)); });
        s.dt = r.number("dt", s.dt);
        s.t_end = r.number("t_end", s.t_end);
        s.tolerance = r.number("tolerance", s.tolerance);
        s.max_iterations = static_cast<int>(r.integer("max_iterations", s.max_iterations));
        s.stride = static_cast<int>(r.integer("stride", s.stride));
        r.finish();
        checked(r.line(), [&] {
            s.validate();
            if (!(s.tolerance > 0.0)) throw std::invalid_argument("tolerance > 0 violated");
            if (s.max_iterations < 1) throw std::invalid_argument("max_iterations >= 1 violated");
        });
    }
    if (sections.count("output")) {
        SectionReader r("output", sections["output"]);
        if (auto dir = r.text("directory")) c.output.directory = *dir;
        c.output.snapshots = r.flag("snapshots", c.output.snapshots);
        r.finish();
    }
    if (sections.count("lab")) {
        SectionReader r("lab", sections["lab"]);
        c.lab.eps = r.number("eps", c.lab.eps);
        c.lab.sweep = r.numbers("sweep");
        c.lab.levels = static_cast<int>(r.integer("levels", c.lab.levels));
        const long seed = r.integer("seed", static_cast<long>(c.lab.seed));
        if (seed < 0) throw ConfigError("seed >= 0 violated", r.line());
        c.lab.seed = static_cast<std::uint64_t>(seed);
        r.finish();
        checked(r.line(), [&] { validate_lab(c.lab); });
    }
    if (sections.count("verify")) {
        SectionReader r("verify", sections["verify"]);
        VerifySpec& v = c.verify;
        v.norm_tol = r.number("norm_tol", v.norm_tol);
        v.energy_tol = r.number("energy_tol", v.energy_tol);
        v.weak_tol = r.number("weak_tol", v.weak_tol);
        v.initial_tol = r.number("initial_tol", v.initial_tol);
        r.finish();
        checked(r.line(), [&] { validate_verify(v); });
    }
    return c;
}

RunConfig load_config(const fs::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return parse_config(text, path.parent_path());
}

std::string format_config(const RunConfig& c) {
    std::ostringstream out;
    const auto d = format_double;
    out << "[grid]\n";
    out << "extents = " << d(c.extents[0]) << " " << d(c.extents[1]) << " " << d(c.extents[2]) << "\n";
    out << "cells = " << c.cells[0] << " " << c.cells[1] << " " << c.cells[2] << "\n\n";

    const MaterialParams& p = c.params;
    out << "[material]\n";
    out << "ell_ex = " << d(p.ell_ex) << "\n";
    out << "kappa = " << d(p.kappa) << "\n";
    out << "alpha = " << d(p.alpha) << "\n";
    out << "anisotropy = " << (p.enable_aniso ? "true" : "false") << "\n";
    out << "aniso_axis = " << format_vec(p.aniso_axis) << "\n";
    out << "aniso_strength = " << d(p.aniso_strength) << "\n";
    out << "demag = " << (p.enable_demag ? "true" : "false") << "\n";
    if (c.demag_cache) out << "demag_cache = " << c.demag_cache->string() << "\n";
    out << "\n[initial]\n";
    const InitialCondition& ic = c.initial;
    switch (ic.kind) {
    case InitialCondition::Kind::uniform:
        out << "type = uniform\ndirection = " << format_vec(ic.direction) << "\n";
        break;
    case InitialCondition::Kind::helix:
        out << "type = helix\naxis = " << "xyz"[index_of(ic.axis)] << "\nwavenumber = " << d(ic.wavenumber) << "\n";
        break;
    case InitialCondition::Kind::skyrmion_seed:
        out << "type = skyrmion_seed\ncenter = " << format_vec(ic.center) << "\nradius = " << d(ic.radius) << "\n";
        break;
    case InitialCondition::Kind::file:
        out << "type = file\npath = " << ic.file.string() << "\n";
        break;
    }
    out << "\n[field]\n";
    const FieldSpec& f = c.field;
    switch (f.kind) {
    case FieldSpec::Kind::zero:
        out << "type = zero\n";
        break;
    case FieldSpec::Kind::constant:
        out << "type = constant\nvalue = " << format_vec(f.value) << "\n";
        break;
    case FieldSpec::Kind::ramp:
        out << "type = ramp\nstart = " << format_vec(f.value) << "\nrate = " << format_vec(f.rate) << "\n";
        break;
    case FieldSpec::Kind::rotating:
        out << "type = rotating\nbias = " << format_vec(f.value) << "\namplitude = " << d(f.amplitude)
            << "\nomega = " << d(f.omega) << "\n";
        break;
    }
    const SolverConfig& s = c.solver;
    out << "\n[solver]\n";
    out << "scheme = " << to_string(s.scheme) << "\n";
    out << "dt = " << d(s.dt) << "\n";
    out << "t_end = " << d(s.t_end) << "\n";
    out << "tolerance = " << d(s.tolerance) << "\n";
    out << "max_iterations = " << s.max_iterations << "\n";
    out << "stride = " << s.stride << "\n";
    out << "\n[output]\n";
    out << "directory = " << c.output.directory.string() << "\n";
    out << "snapshots = " << (c.output.snapshots ? "true" : "false") << "\n";
    out << "\n[lab]\n";
    out << "eps = " << d(c.lab.eps) << "\n";
    if (!c.lab.sweep.empty()) {
        out << "sweep =";
        for (double e : c.lab.sweep) out << " " << d(e);
        out << "\n";
    }
    out << "levels = " << c.lab.levels << "\n";
    out << "seed = " << c.lab.seed << "\n";
    out << "\n[verify]\n";
    out << "norm_tol = " << d(c.verify.norm_tol) << "\n";
    out << "energy_tol = " << d(c.verify.energy_tol) << "\n";
    out << "weak_tol = " << d(c.verify.weak_tol) << "\n";
    out << "initial_tol = " << d(c.verify.initial_tol) << "\n";
    return out.str();
}

// ---- snapshots ------------------------------------------------------------

namespace {

constexpr std::string_view snapshot_magic = "helimag snapshot v1";

std::vector<std::string_view> expect_record(const std::vector<std::string_view>& lines, std::size_t i,
                                            std::string_view keyword, std::size_t values) {
    if (i >= lines.size()) throw std::runtime_error("snapshot: missing " + std::string(keyword));
    const auto tok = split_ws(lines[i]);
    if (tok.empty() || tok[0] != keyword || tok.size() != values + 1)
        throw std::runtime_error("snapshot: malformed " + std::string(keyword) + " record");
    return tok;
}

}  // namespace

std::string format_snapshot(const MagnetizationField& m) {
    const Grid& g = m.grid();
    std::string out;
    out.reserve(64 + g.size() * 64);
    out += snapshot_magic;
    out += "\nDIMENSIONS " + std::to_string(g.cells()[0]) + " " + std::to_string(g.cells()[1]) + " " +
           std::to_string(g.cells()[2]);
    out += "\nSPACING " + format_double(g.spacing()[0]) + " " + format_double(g.spacing()[1]) + " " +
           format_double(g.spacing()[2]);
    out += "\nEXTENTS " + format_double(g.extents()[0]) + " " + format_double(g.extents()[1]) + " " +
           format_double(g.extents()[2]);
    out += "\nPOINT_DATA " + std::to_string(g.size()) + "\n";
    for (const auto& v : m.field().values()) {
        out += format_vec(v);
        out += '\n';
    }
    return out;
}

MagnetizationField parse_snapshot(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty() || trim(lines[0]) != snapshot_magic) throw std::runtime_error("snapshot: malformed header");
    const auto dims = expect_record(lines, 1, "DIMENSIONS", 3);
    expect_record(lines, 2, "SPACING", 3);
    const auto ext = expect_record(lines, 3, "EXTENTS", 3);
    const auto count = expect_record(lines, 4, "POINT_DATA", 1);
    std::array<int, 3> cells{};
    std::array<double, 3> extents{};
    try {
        for (int d = 0; d < 3; ++d) {
            const long n = parse_long(dims[d + 1]);
            if (n < 1 || n > 1 << 20) throw std::invalid_argument("bad dimension");
            cells[d] = static_cast<int>(n);
            extents[d] = parse_double(ext[d + 1]);
        }
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("snapshot: ") + e.what());
    }
    const Grid g(extents, cells);
    const long n = parse_long(count[1]);
    if (n < 0 || static_cast<std::size_t>(n) != g.size())
        throw std::runtime_error("snapshot: POINT_DATA " + std::to_string(n) + " does not match dimensions (" +
                                 std::to_string(g.size()) + " cells)");
    std::size_t data_lines = 0;
    for (std::size_t i = 5; i < lines.size(); ++i)
        if (!trim(lines[i]).empty()) ++data_lines;
    if (data_lines != g.size())
        throw std::runtime_error("snapshot: dimension mismatch, expected " + std::to_string(g.size()) +
                                 " data lines, found " + std::to_string(data_lines));
    std::vector<Vec3> values;
    values.reserve(g.size());
    for (std::size_t i = 5; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        try {
            values.push_back(SectionReader::parse_vec(lines[i]));
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error("snapshot: line " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    try {
        return MagnetizationField(VectorField(g, std::move(values)), snapshot_norm_tolerance);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("snapshot: ") + e.what());
    }
}

void write_snapshot(const MagnetizationField& m, const fs::path& path) { write_file(path, format_snapshot(m)); }

MagnetizationField read_snapshot(const fs::path& path) {
    try {
        return parse_snapshot(read_file(path));
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

// ---- series ---------------------------------------------------------------

std::vector<SeriesRecord> energy_series(const Trajectory& traj, const AppliedField& f, const DemagTensor* tensor) {
    const Grid& g = traj.grid();
    std::vector<SeriesRecord> out;
    std::optional<DissipationRecord> d;
    std::vector<double> r(traj.size(), 0.0);
    if (traj.size() >= 2) {
        d = dissipation(traj, f);
        r = energy_law_residual(traj, f, tensor);
    }
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto e = energy(traj.states[k], f.at(g, traj.times[k]), traj.params, tensor);
        SeriesRecord rec;
        rec.t = traj.times[k];
        rec.E_ex = e.exchange;
        rec.E_dmi = e.dmi;
        rec.E_lo = e.lower_order;
        rec.E_appl = e.applied;
        rec.E_total = e.total;
        rec.E_helical = e.helical_total;
        rec.D_alpha = d ? d->damping[k] : 0.0;
        rec.D_f = d ? d->forcing[k] : 0.0;
        rec.residual = r[k];
        out.push_back(rec);
    }
    return out;
}

void write_series(const std::vector<SeriesRecord>& records, const fs::path& path) {
    std::string out(series_header);
    out += '\n';
    for (const auto& r : records) {
        bool first = true;
        for (double v : {r.t, r.E_ex, r.E_dmi, r.E_lo, r.E_appl, r.E_total, r.E_helical, r.D_alpha, r.D_f, r.residual}) {
            if (!first) out += ',';
            out += format_double(v);
            first = false;
        }
        out += '\n';
    }
    write_file(path, out);
}

std::vector<SeriesRecord> read_series(const fs::path& path) {
    const std::string text = read_file(path);
    const auto lines = split_lines(text);
    if (lines.empty() || trim(lines[0]) != series_header) throw std::runtime_error(path.string() + ": bad series header");
    std::vector<SeriesRecord> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto line = trim(lines[i]);
        if (line.empty()) continue;
        std::vector<double> v;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            v.push_back(parse_double(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (v.size() != 10) throw std::runtime_error(path.string() + ": line " + std::to_string(i + 1) + ": expected 10 columns");
        out.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]});
    }
    return out;
}

// ---- trajectories ---------------------------------------------------------

void write_trajectory(const Trajectory& traj, const fs::path& dir) {
    fs::create_directories(dir);
    std::string manifest = "index,t,file\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "snapshot_%06zu.dat", k);
        write_snapshot(traj.states[k], dir / name);
        manifest += std::to_string(k) + "," + format_double(traj.times[k]) + "," + name + "\n";
    }
    write_file(dir / "manifest.csv", manifest);
}

Trajectory read_trajectory(const fs::path& dir, const MaterialParams& params) {
    const std::string text = read_file(dir / "manifest.csv");
    const auto lines = split_lines(text);
    if (lines.empty() || trim(lines[0]) != "index,t,file") throw std::runtime_error("manifest: bad header");
    Trajectory traj;
    traj.params = params;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto line = trim(lines[i]);
        if (line.empty()) continue;
        const auto c1 = line.find(','), c2 = line.find(',', c1 == line.npos ? c1 : c1 + 1);
        if (c1 == line.npos || c2 == line.npos) throw std::runtime_error("manifest: line " + std::to_string(i + 1) + " malformed");
        const long index = parse_long(line.substr(0, c1));
        if (index != static_cast<long>(traj.size()))
            throw std::runtime_error("manifest: line " + std::to_string(i + 1) + ": index out of sequence");
        traj.times.push_back(parse_double(line.substr(c1 + 1, c2 - c1 - 1)));
        traj.states.push_back(read_snapshot(dir / std::string(line.substr(c2 + 1))));
        if (!(traj.states.back().grid() == traj.states.front().grid()))
            throw std::runtime_error("manifest: snapshots on different grids");
    }
    if (traj.states.empty()) throw std::runtime_error("manifest: no snapshots");
    return traj;
}

}  // namespace helimag
