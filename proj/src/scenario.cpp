#include "hjra/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "hjra/aircraft.hpp"
#include "hjra/io.hpp"

namespace hjra {

namespace {

constexpr double kNmi = 1852.0;
constexpr double kFt = 0.3048;
constexpr double kDeg = 3.14159265358979323846 / 180.0;

struct KeyValue {
    std::string value;
    std::size_t line = 0;
    bool used = false;
};

struct Section {
    std::string name;
    std::size_t line = 0;
    std::map<std::string, KeyValue> keys;
    std::vector<std::string> key_order;
};

[[noreturn]] void fail(const std::string& file, std::size_t line, const std::string& msg)
{
    throw ValidationError(file + ":" + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Number with optional unit suffix. nmi/ft convert to meters, deg to
// radians; m, s, mps are explicit SI spellings.
double parse_number(const std::string& file, std::size_t line, const std::string& key, const std::string& token)
{
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &pos);
    } catch (const std::exception&) {
        fail(file, line, "key \"" + key + "\": expected a number, got \"" + token + "\"");
    }
    if (!std::isfinite(v)) fail(file, line, "key \"" + key + "\": number must be finite");
    const std::string suffix = trim(token.substr(pos));
    if (suffix.empty() || suffix == "m" || suffix == "s" || suffix == "mps") return v;
    if (suffix == "nmi") return v * kNmi;
    if (suffix == "ft") return v * kFt;
    if (suffix == "deg") return v * kDeg;
    fail(file, line, "key \"" + key + "\": unknown unit suffix \"" + suffix + "\"");
}

std::vector<double> parse_numbers(const std::string& file, std::size_t line, const std::string& key,
                                  const std::string& value)
{
    std::vector<double> out;
    std::istringstream ss(value);
    std::string tok;
    while (ss >> tok) out.push_back(parse_number(file, line, key, tok));
    return out;
}

class SectionReader {
public:
    SectionReader(const std::string& file, Section& section) : file_(file), section_(&section) {}

    bool has(const std::string& key) const { return section_->keys.count(key) != 0; }

    std::string raw(const std::string& key)
    {
        auto it = section_->keys.find(key);
        if (it == section_->keys.end())
            fail(file_, section_->line, "section [" + section_->name + "]: missing required key \"" + key + "\"");
        it->second.used = true;
        return it->second.value;
    }

    std::size_t line_of(const std::string& key) const
    {
        auto it = section_->keys.find(key);
        return it == section_->keys.end() ? section_->line : it->second.line;
    }

    double number(const std::string& key) { return parse_number(file_, line_of(key), key, raw(key)); }
    double number_or(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    std::vector<double> numbers(const std::string& key) { return parse_numbers(file_, line_of(key), key, raw(key)); }

    long integer(const std::string& key)
    {
        const double v = number(key);
        const long n = std::lround(v);
        if (std::abs(v - static_cast<double>(n)) > 1e-9)
            fail(file_, line_of(key), "key \"" + key + "\": expected an integer");
        return n;
    }
    long integer_or(const std::string& key, long fallback) { return has(key) ? integer(key) : fallback; }

    bool boolean(const std::string& key)
    {
        const std::string v = trim(raw(key));
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        fail(file_, line_of(key), "key \"" + key + "\": expected true/false");
    }
    bool boolean_or(const std::string& key, bool fallback) { return has(key) ? boolean(key) : fallback; }

    std::string string_or(const std::string& key, const std::string& fallback)
    {
        return has(key) ? trim(raw(key)) : fallback;
    }

    void finish() const
    {
        for (const auto& key : section_->key_order) {
            const auto& kv = section_->keys.at(key);
            if (!kv.used)
                fail(file_, kv.line, "section [" + section_->name + "]: unknown key \"" + key + "\"");
        }
    }

    const std::string& file() const { return file_; }
    const Section& section() const { return *section_; }

private:
    std::string file_;
    Section* section_;
};

std::vector<Section> tokenize(const std::string& file, const std::string& text)
{
    std::vector<Section> sections;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(file, lineno, "malformed section header");
            Section s;
            s.name = trim(line.substr(1, line.size() - 2));
            s.line = lineno;
            if (s.name.empty()) fail(file, lineno, "empty section name");
            sections.push_back(std::move(s));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(file, lineno, "expected \"key = value\"");
        if (sections.empty()) fail(file, lineno, "key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(file, lineno, "empty key");
        auto& sec = sections.back();
        if (sec.keys.count(key)) fail(file, lineno, "duplicate key \"" + key + "\" in section [" + sec.name + "]");
        sec.keys[key] = KeyValue{value, lineno, false};
        sec.key_order.push_back(key);
    }
    return sections;
}

// Polynomial grammar: terms joined by '+'; each term is '*'-separated
// factors, every factor a number or x<k> or x<k>^<p>.
Polynomial parse_polynomial(const std::string& file, std::size_t line, const std::string& key, const std::string& text)
{
    Polynomial poly;
    std::string normalized = text;
    std::vector<std::string> terms;
    std::string current;
    for (char c : normalized) {
        if (c == '+') {
            terms.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    terms.push_back(current);

    for (const auto& term_text : terms) {
        const std::string t = trim(term_text);
        if (t.empty()) fail(file, line, "key \"" + key + "\": empty polynomial term");
        Monomial mono;
        mono.coef = 1.0;
        std::vector<std::string> factors;
        std::string f;
        for (char c : t) {
            if (c == '*') {
                factors.push_back(f);
                f.clear();
            } else {
                f += c;
            }
        }
        factors.push_back(f);
        for (const auto& factor_text : factors) {
            const std::string fac = trim(factor_text);
            if (fac.empty()) fail(file, line, "key \"" + key + "\": empty polynomial factor");
            if (fac[0] == 'x') {
                const auto caret = fac.find('^');
                const std::string idx_text = caret == std::string::npos ? fac.substr(1) : fac.substr(1, caret - 1);
                unsigned axis = 0;
                unsigned power = 1;
                try {
                    axis = static_cast<unsigned>(std::stoul(idx_text));
                    if (caret != std::string::npos) power = static_cast<unsigned>(std::stoul(fac.substr(caret + 1)));
                } catch (const std::exception&) {
                    fail(file, line, "key \"" + key + "\": malformed factor \"" + fac + "\"");
                }
                if (mono.powers.size() <= axis) mono.powers.resize(axis + 1, 0);
                mono.powers[axis] += power;
            } else {
                try {
                    std::size_t pos = 0;
                    mono.coef *= std::stod(fac, &pos);
                    if (trim(fac.substr(pos)) != "")
                        fail(file, line, "key \"" + key + "\": malformed factor \"" + fac + "\"");
                } catch (const ValidationError&) {
                    throw;
                } catch (const std::exception&) {
                    fail(file, line, "key \"" + key + "\": malformed factor \"" + fac + "\"");
                }
            }
        }
        poly.terms.push_back(std::move(mono));
    }
    return poly;
}

std::string serialize_polynomial(const Polynomial& poly)
{
    if (poly.terms.empty()) return "0";
    std::string out;
    for (std::size_t i = 0; i < poly.terms.size(); ++i) {
        if (i) out += " + ";
        const auto& m = poly.terms[i];
        out += format_double(m.coef);
        for (std::size_t a = 0; a < m.powers.size(); ++a) {
            if (m.powers[a] == 0) continue;
            out += "*x" + std::to_string(a);
            if (m.powers[a] > 1) out += "^" + std::to_string(m.powers[a]);
        }
    }
    return out;
}

InputBox parse_box(SectionReader& sec, const std::string& key)
{
    if (!sec.has(key)) return InputBox::absent();
    const std::vector<double> nums = sec.numbers(key);
    if (nums.empty()) return InputBox::absent();
    if (nums.size() % 2 != 0)
        fail(sec.file(), sec.line_of(key), "key \"" + key + "\": expected \"lo hi\" pairs");
    std::vector<double> lo, hi;
    for (std::size_t i = 0; i < nums.size(); i += 2) {
        lo.push_back(nums[i]);
        hi.push_back(nums[i + 1]);
    }
    try {
        return InputBox(std::move(lo), std::move(hi));
    } catch (const ValidationError& e) {
        fail(sec.file(), sec.line_of(key), std::string("key \"") + key + "\": " + e.what());
    }
}

AxisSpec parse_axis(SectionReader& sec, const std::string& key)
{
    const std::vector<double> nums = sec.numbers(key);
    if (nums.size() != 3) fail(sec.file(), sec.line_of(key), "key \"" + key + "\": expected \"min max nodes\"");
    const long nodes = std::lround(nums[2]);
    if (nodes < 2 || std::abs(nums[2] - static_cast<double>(nodes)) > 1e-9)
        fail(sec.file(), sec.line_of(key), "key \"" + key + "\": node count must be an integer >= 2");
    return AxisSpec{nums[0], nums[1], static_cast<std::size_t>(nodes)};
}

GeometrySpec parse_geometry(SectionReader& sec)
{
    const std::string shape = sec.string_or("shape", "box");
    if (shape == "box") {
        std::vector<double> lo = sec.numbers("lower");
        std::vector<double> hi = sec.numbers("upper");
        if (lo.size() != hi.size())
            fail(sec.file(), sec.line_of("lower"), "box: lower/upper lengths differ");
        return GeometrySpec::box(std::move(lo), std::move(hi));
    }
    if (shape == "cylinder") {
        const long axis = sec.integer("axis");
        std::vector<double> center = sec.numbers("center");
        const double radius = sec.number("radius");
        const double half_height = sec.number("half_height");
        if (axis < 0) fail(sec.file(), sec.line_of("axis"), "cylinder: axis must be nonnegative");
        return GeometrySpec::cylinder(static_cast<std::size_t>(axis), std::move(center), radius, half_height);
    }
    fail(sec.file(), sec.line_of("shape"), "unknown shape \"" + shape + "\" (expected box or cylinder)");
}

void parse_run(SectionReader& sec, Scenario& s)
{
    const std::string kind = trim(sec.raw("kind"));
    if (kind == "solve") s.kind = Scenario::Kind::Solve;
    else if (kind == "algorithm1") s.kind = Scenario::Kind::Algorithm1;
    else fail(sec.file(), sec.line_of("kind"), "kind must be solve or algorithm1");

    s.t0 = sec.number("t0");
    if (sec.has("T")) {
        s.T = sec.number("T");
        s.T_given = true;
    } else if (s.kind == Scenario::Kind::Solve) {
        fail(sec.file(), sec.section().line, "section [run]: missing required key \"T\" (horizon end)");
    }

    const std::string mode = sec.string_or("mode", "terminal");
    if (mode == "terminal") s.mode = SolveMode::Terminal;
    else if (mode == "anytime") s.mode = SolveMode::Anytime;
    else fail(sec.file(), sec.line_of("mode"), "mode must be terminal or anytime");

    s.cfl = sec.number_or("cfl", 0.5);
    if (!(s.cfl > 0.0) || s.cfl > 1.0) fail(sec.file(), sec.line_of("cfl"), "cfl must lie in (0, 1]");
    s.samples = static_cast<int>(sec.integer_or("samples", 3));
    if (s.samples < 2) fail(sec.file(), sec.line_of("samples"), "samples must be >= 2");
    const long rec = sec.integer_or("record_every", 1);
    if (rec < 1) fail(sec.file(), sec.line_of("record_every"), "record_every must be >= 1");
    s.record_every = static_cast<std::size_t>(rec);
    s.threads = static_cast<int>(sec.integer_or("threads", 1));
    if (s.threads < 1) fail(sec.file(), sec.line_of("threads"), "threads must be >= 1");

    s.sep.horizontal = sec.number_or("separation_h", 5.0 * kNmi);
    s.sep.vertical = sec.number_or("separation_v", 1000.0 * kFt);
    if (sec.has("alpha")) {
        s.alpha = sec.numbers("alpha");
        for (double a : *s.alpha)
            if (!(a >= 0.0)) fail(sec.file(), sec.line_of("alpha"), "alpha entries must be nonnegative");
    }
    s.reference = sec.string_or("reference", "");
    if (!s.reference.empty() && s.reference != "analytic_1d")
        fail(sec.file(), sec.line_of("reference"), "reference must be analytic_1d when present");
    s.reference_radius = sec.number_or("reference_radius", 0.5);
    s.oracle = sec.boolean_or("oracle", false);
    s.oracle_dt = sec.number_or("oracle_dt", 0.0);
    s.oracle_control_samples = static_cast<int>(sec.integer_or("oracle_control_samples", 3));
    s.oracle_disturbance_samples = static_cast<int>(sec.integer_or("oracle_disturbance_samples", 3));
    s.output_dir = sec.string_or("output_dir", "");
    if (s.oracle && !(s.oracle_dt > 0.0))
        fail(sec.file(), sec.line_of("oracle"), "oracle runs need oracle_dt > 0");

    if (!(s.t0 <= s.T) && s.T_given)
        fail(sec.file(), sec.line_of("t0"), "horizon: t0 must be <= T");
    sec.finish();
}

void parse_dynamics(SectionReader& sec, Scenario& s)
{
    const std::string type = trim(sec.raw("type"));
    DynamicsScenario& d = s.dynamics;
    d.control = parse_box(sec, "control");
    d.disturbance = parse_box(sec, "disturbance");
    if (type == "integrator1d") d.kind = DynKind::Integrator1D;
    else if (type == "double_integrator2d") d.kind = DynKind::DoubleIntegrator2D;
    else if (type == "game2d") d.kind = DynKind::Game2D;
    else if (type == "affine") {
        d.kind = DynKind::Affine;
        const long n = sec.integer("state_dim");
        if (n < 1) fail(sec.file(), sec.line_of("state_dim"), "state_dim must be >= 1");
        d.state_dim = static_cast<std::size_t>(n);
        d.drift.assign(d.state_dim, Polynomial{});
        d.control_gain.assign(d.state_dim, std::vector<Polynomial>(d.control.dim()));
        d.disturbance_gain.assign(d.state_dim, std::vector<Polynomial>(d.disturbance.dim()));
        for (std::size_t i = 0; i < d.state_dim; ++i) {
            const std::string akey = "a." + std::to_string(i);
            if (sec.has(akey)) d.drift[i] = parse_polynomial(sec.file(), sec.line_of(akey), akey, sec.raw(akey));
            for (std::size_t j = 0; j < d.control.dim(); ++j) {
                const std::string bkey = "B." + std::to_string(i) + "." + std::to_string(j);
                if (sec.has(bkey))
                    d.control_gain[i][j] = parse_polynomial(sec.file(), sec.line_of(bkey), bkey, sec.raw(bkey));
            }
            for (std::size_t k = 0; k < d.disturbance.dim(); ++k) {
                const std::string ckey = "C." + std::to_string(i) + "." + std::to_string(k);
                if (sec.has(ckey))
                    d.disturbance_gain[i][k] = parse_polynomial(sec.file(), sec.line_of(ckey), ckey, sec.raw(ckey));
            }
        }
    } else {
        fail(sec.file(), sec.line_of("type"),
             "unknown dynamics type \"" + type + "\" (integrator1d, double_integrator2d, game2d, affine)");
    }
    sec.finish();
}

void parse_aircraft(SectionReader& sec, const std::string& name, Scenario& s)
{
    AircraftScenario a;
    a.name = name;

    const std::string wps = sec.raw("waypoints");
    std::string piece;
    std::istringstream ws(wps);
    while (std::getline(ws, piece, ';')) {
        const std::vector<double> xyz = parse_numbers(sec.file(), sec.line_of("waypoints"), "waypoints", piece);
        if (xyz.size() != 3)
            fail(sec.file(), sec.line_of("waypoints"), "waypoints: each entry needs \"x y z\"");
        a.waypoints.push_back({xyz[0], xyz[1], xyz[2]});
    }
    if (a.waypoints.size() < 2)
        fail(sec.file(), sec.line_of("waypoints"), "waypoints: need at least two");

    a.profile_path = trim(sec.raw("profile"));
    a.gamma_max = sec.number_or("gamma_max", 5.0 * kDeg);
    a.speed_fraction = sec.number_or("speed_fraction", 0.1);
    if (sec.has("wind")) {
        const std::vector<double> w = sec.numbers("wind");
        if (w.size() == 1) a.wind = {w[0], w[0], w[0]};
        else if (w.size() == 3) a.wind = {w[0], w[1], w[2]};
        else fail(sec.file(), sec.line_of("wind"), "wind: expected one bound or three per-axis bounds");
    }
    a.entry = sec.number_or("entry", s.t0);

    const std::string twkind = sec.string_or("tw", "adjacent");
    if (twkind == "adjacent") a.tw.kind = TargetWindow::Kind::Adjacent;
    else if (twkind == "superimposed") a.tw.kind = TargetWindow::Kind::Superimposed;
    else fail(sec.file(), sec.line_of("tw"), "tw must be adjacent or superimposed");

    const long wp = sec.integer("tw_waypoint");
    if (wp < 1 || static_cast<std::size_t>(wp) >= a.waypoints.size())
        fail(sec.file(), sec.line_of("tw_waypoint"), "tw_waypoint must name a waypoint in 1..last");
    a.tw.center_waypoint = static_cast<std::size_t>(wp);

    const std::vector<double> band = sec.numbers("tw_band");
    if (band.size() != 2 || !(band[0] <= band[1]))
        fail(sec.file(), sec.line_of("tw_band"), "tw_band: expected ordered \"lo hi\"");
    a.tw.band_lo = band[0];
    a.tw.band_hi = band[1];

    const std::vector<double> twt = sec.numbers("tw_time");
    if (twt.size() != 2 || !(twt[0] < twt[1]))
        fail(sec.file(), sec.line_of("tw_time"), "tw_time: expected \"lo hi\" with lo < hi");
    a.tw.t_lo = twt[0];
    a.tw.t_hi = twt[1];

    a.grid_s = parse_axis(sec, "grid_s");
    a.grid_z = parse_axis(sec, "grid_z");
    sec.finish();
    s.aircraft.push_back(std::move(a));
}

} // namespace

double Scenario::horizon_end() const
{
    if (T_given) return T;
    double t = t0;
    for (const auto& a : aircraft) t = std::max(t, a.tw.t_hi);
    return t;
}

Scenario parse_scenario_text(const std::string& text, const std::string& base_dir, const std::string& display_name)
{
    std::vector<Section> sections = tokenize(display_name, text);
    Scenario s;
    s.base_dir = base_dir;

    bool saw_run = false, saw_grid = false, saw_dynamics = false;
    for (auto& section : sections) {
        SectionReader sec(display_name, section);
        if (section.name == "run") {
            parse_run(sec, s);
            saw_run = true;
        } else if (section.name == "grid") {
            for (std::size_t a = 0;; ++a) {
                const std::string key = "axis" + std::to_string(a);
                if (!sec.has(key)) break;
                s.grid_axes.push_back(parse_axis(sec, key));
            }
            if (s.grid_axes.empty()) fail(display_name, section.line, "section [grid]: needs axis0");
            sec.finish();
            saw_grid = true;
        } else if (section.name == "dynamics") {
            parse_dynamics(sec, s);
            saw_dynamics = true;
        } else if (section.name == "target") {
            s.target = parse_geometry(sec);
            sec.finish();
        } else if (section.name == "avoid") {
            s.avoid = parse_geometry(sec);
            sec.finish();
        } else if (section.name.rfind("aircraft.", 0) == 0) {
            const std::string name = section.name.substr(9);
            if (name.empty()) fail(display_name, section.line, "aircraft section needs a name: [aircraft.<name>]");
            for (const auto& existing : s.aircraft)
                if (existing.name == name)
                    fail(display_name, section.line, "duplicate aircraft \"" + name + "\"");
            parse_aircraft(sec, name, s);
        } else {
            fail(display_name, section.line, "unknown section [" + section.name + "]");
        }
    }

    if (!saw_run) throw ValidationError(display_name + ": missing [run] section");
    if (s.kind == Scenario::Kind::Solve) {
        if (!saw_grid) throw ValidationError(display_name + ": solve scenarios need a [grid] section");
        if (!saw_dynamics) throw ValidationError(display_name + ": solve scenarios need a [dynamics] section");
        if (!s.target) throw ValidationError(display_name + ": solve scenarios need a [target] section");
        if (!s.aircraft.empty())
            throw ValidationError(display_name + ": solve scenarios cannot list aircraft sections");
        const std::size_t dim = s.grid_axes.size();
        validate_geometry(*s.target, dim);
        if (s.avoid) validate_geometry(*s.avoid, dim);
        const DynamicsSpec dyn = build_dynamics(s.dynamics); // validates shapes
        if (dyn.state_dim != dim)
            throw ValidationError(display_name + ": dynamics state dimension " + std::to_string(dyn.state_dim) +
                                  " does not match grid dimension " + std::to_string(dim));
    } else {
        if (s.aircraft.empty())
            throw ValidationError(display_name + ": algorithm1 scenarios need at least one [aircraft.<name>]");
        if (saw_grid || saw_dynamics || s.target || s.avoid)
            throw ValidationError(display_name +
                                  ": algorithm1 scenarios use [aircraft.<name>] sections, not grid/dynamics/target");
        for (const auto& a : s.aircraft) {
            if (a.tw.t_lo < s.t0)
                throw ValidationError(display_name + ": aircraft \"" + a.name +
                                      "\": window starts before the scenario t0 (horizon)");
            if (s.T_given && a.tw.t_hi > s.T)
                throw ValidationError(display_name + ": aircraft \"" + a.name +
                                      "\": window ends after the scenario T (horizon)");
        }
    }
    return s;
}

Scenario parse_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string dir = std::filesystem::path(path).parent_path().string();
    return parse_scenario_text(buf.str(), dir.empty() ? "." : dir, path);
}

namespace {

std::string serialize_box(const InputBox& box)
{
    std::string out;
    for (std::size_t i = 0; i < box.dim(); ++i) {
        if (i) out += " ";
        out += format_double(box.lower[i]) + " " + format_double(box.upper[i]);
    }
    return out;
}

std::string serialize_axis(const AxisSpec& ax)
{
    return format_double(ax.min) + " " + format_double(ax.max) + " " + std::to_string(ax.nodes);
}

void serialize_geometry(std::ostream& out, const char* name, const GeometrySpec& g)
{
    out << "[" << name << "]\n";
    if (g.kind == GeometrySpec::Kind::Box) {
        out << "shape = box\n";
        std::string lo, hi;
        for (std::size_t i = 0; i < g.lower.size(); ++i) {
            if (i) {
                lo += " ";
                hi += " ";
            }
            lo += format_double(g.lower[i]);
            hi += format_double(g.upper[i]);
        }
        out << "lower = " << lo << "\nupper = " << hi << "\n";
    } else if (g.kind == GeometrySpec::Kind::Cylinder) {
        out << "shape = cylinder\naxis = " << g.axis << "\ncenter =";
        for (double c : g.center) out << " " << format_double(c);
        out << "\nradius = " << format_double(g.radius) << "\nhalf_height = " << format_double(g.half_height) << "\n";
    } else {
        throw ValidationError("serialize_scenario: only box/cylinder geometry appears in scenario files");
    }
}

} // namespace

std::string serialize_scenario(const Scenario& s)
{
    std::ostringstream out;
    out << "[run]\n";
    out << "kind = " << (s.kind == Scenario::Kind::Solve ? "solve" : "algorithm1") << "\n";
    out << "t0 = " << format_double(s.t0) << "\n";
    if (s.T_given) out << "T = " << format_double(s.T) << "\n";
    out << "mode = " << (s.mode == SolveMode::Terminal ? "terminal" : "anytime") << "\n";
    out << "cfl = " << format_double(s.cfl) << "\n";
    out << "samples = " << s.samples << "\n";
    out << "record_every = " << s.record_every << "\n";
    out << "threads = " << s.threads << "\n";
    out << "separation_h = " << format_double(s.sep.horizontal) << "\n";
    out << "separation_v = " << format_double(s.sep.vertical) << "\n";
    if (s.alpha) {
        out << "alpha =";
        for (double a : *s.alpha) out << " " << format_double(a);
        out << "\n";
    }
    if (!s.reference.empty()) {
        out << "reference = " << s.reference << "\n";
        out << "reference_radius = " << format_double(s.reference_radius) << "\n";
    }
    if (s.oracle) {
        out << "oracle = true\n";
        out << "oracle_dt = " << format_double(s.oracle_dt) << "\n";
        out << "oracle_control_samples = " << s.oracle_control_samples << "\n";
        out << "oracle_disturbance_samples = " << s.oracle_disturbance_samples << "\n";
    }
    if (!s.output_dir.empty()) out << "output_dir = " << s.output_dir << "\n";

    if (s.kind == Scenario::Kind::Solve) {
        out << "\n[grid]\n";
        for (std::size_t a = 0; a < s.grid_axes.size(); ++a)
            out << "axis" << a << " = " << serialize_axis(s.grid_axes[a]) << "\n";
        out << "\n[dynamics]\n";
        const DynamicsScenario& d = s.dynamics;
        switch (d.kind) {
        case DynKind::Integrator1D: out << "type = integrator1d\n"; break;
        case DynKind::DoubleIntegrator2D: out << "type = double_integrator2d\n"; break;
        case DynKind::Game2D: out << "type = game2d\n"; break;
        case DynKind::Affine: out << "type = affine\nstate_dim = " << d.state_dim << "\n"; break;
        }
        if (d.control.dim()) out << "control = " << serialize_box(d.control) << "\n";
        if (d.disturbance.dim()) out << "disturbance = " << serialize_box(d.disturbance) << "\n";
        if (d.kind == DynKind::Affine) {
            for (std::size_t i = 0; i < d.state_dim; ++i) {
                if (!d.drift[i].terms.empty())
                    out << "a." << i << " = " << serialize_polynomial(d.drift[i]) << "\n";
                for (std::size_t j = 0; j < d.control.dim(); ++j)
                    if (!d.control_gain[i][j].terms.empty())
                        out << "B." << i << "." << j << " = " << serialize_polynomial(d.control_gain[i][j]) << "\n";
                for (std::size_t k = 0; k < d.disturbance.dim(); ++k)
                    if (!d.disturbance_gain[i][k].terms.empty())
                        out << "C." << i << "." << k << " = " << serialize_polynomial(d.disturbance_gain[i][k]) << "\n";
            }
        }
        out << "\n";
        serialize_geometry(out, "target", *s.target);
        if (s.avoid) {
            out << "\n";
            serialize_geometry(out, "avoid", *s.avoid);
        }
    } else {
        for (const auto& a : s.aircraft) {
            out << "\n[aircraft." << a.name << "]\n";
            out << "waypoints =";
            for (std::size_t w = 0; w < a.waypoints.size(); ++w) {
                if (w) out << " ;";
                for (double c : a.waypoints[w]) out << " " << format_double(c);
            }
            out << "\n";
            out << "profile = " << a.profile_path << "\n";
            out << "gamma_max = " << format_double(a.gamma_max) << "\n";
            out << "speed_fraction = " << format_double(a.speed_fraction) << "\n";
            out << "wind = " << format_double(a.wind[0]) << " " << format_double(a.wind[1]) << " "
                << format_double(a.wind[2]) << "\n";
            out << "entry = " << format_double(a.entry) << "\n";
            out << "tw = " << (a.tw.kind == TargetWindow::Kind::Adjacent ? "adjacent" : "superimposed") << "\n";
            out << "tw_waypoint = " << a.tw.center_waypoint << "\n";
            out << "tw_band = " << format_double(a.tw.band_lo) << " " << format_double(a.tw.band_hi) << "\n";
            out << "tw_time = " << format_double(a.tw.t_lo) << " " << format_double(a.tw.t_hi) << "\n";
            out << "grid_s = " << serialize_axis(a.grid_s) << "\n";
            out << "grid_z = " << serialize_axis(a.grid_z) << "\n";
        }
    }
    return out.str();
}

bool operator==(const Scenario& a, const Scenario& b)
{
    return serialize_scenario(a) == serialize_scenario(b) && a.base_dir == b.base_dir;
}

DynamicsSpec build_dynamics(const DynamicsScenario& d)
{
    switch (d.kind) {
    case DynKind::Integrator1D: return make_integrator_1d(d.control, d.disturbance);
    case DynKind::DoubleIntegrator2D: return make_double_integrator_2d(d.control, d.disturbance);
    case DynKind::Game2D: return make_game_2d(d.control, d.disturbance);
    case DynKind::Affine:
        return make_polynomial_affine(d.state_dim, d.drift, d.control_gain, d.disturbance_gain, d.control,
                                      d.disturbance);
    }
    throw ValidationError("build_dynamics: unknown dynamics kind");
}

AircraftSetup build_aircraft(const AircraftScenario& a, const std::string& base_dir)
{
    std::filesystem::path profile(a.profile_path);
    if (profile.is_relative() && !base_dir.empty()) profile = std::filesystem::path(base_dir) / profile;
    SpeedTable table = load_speed_table(profile.string());
    AircraftSetup setup;
    setup.model = make_aircraft_model(a.name, a.waypoints, std::move(table), a.gamma_max, a.wind, a.speed_fraction);
    setup.grid = Grid({a.grid_s, a.grid_z});
    setup.tw = a.tw;
    setup.entry_time = a.entry;
    return setup;
}

} // namespace hjra
