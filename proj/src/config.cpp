#include "rytov/config.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "rytov/errors.hpp"
#include "rytov/io.hpp"

namespace rytov {

namespace {

struct RawEntry {
    std::string value;
    int line = 0;
};

using Section = std::map<std::string, RawEntry>;

struct RawConfig {
    std::map<std::string, Section> sections;  // "" is the top level
    std::map<std::string, int> section_lines;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

RawConfig tokenize(const std::string& text) {
    RawConfig raw;
    raw.sections[""];
    std::string current;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        line_no += 1;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ParseError("line " + std::to_string(line_no) + ": unterminated section header");
            current = trim(t.substr(1, t.size() - 2));
            if (current.empty())
                throw ParseError("line " + std::to_string(line_no) + ": empty section name");
            if (raw.sections.count(current))
                throw ParseError("line " + std::to_string(line_no) + ": duplicate section [" +
                                 current + "]");
            raw.sections[current];
            raw.section_lines[current] = line_no;
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value', got '" +
                             t + "'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty key");
        if (value.empty())
            throw ParseError("line " + std::to_string(line_no) + ": empty value for key '" + key +
                             "'");
        auto& section = raw.sections[current];
        if (section.count(key))
            throw ParseError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        section[key] = {value, line_no};
    }
    return raw;
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string nearest_key(const std::string& key, const std::vector<std::string>& known) {
    std::string best;
    std::size_t best_dist = static_cast<std::size_t>(-1);
    for (const auto& k : known) {
        const std::size_t d = levenshtein(key, k);
        if (d < best_dist) {
            best_dist = d;
            best = k;
        }
    }
    return best;
}

/// Typed accessor over one section with strict unknown-key detection.
class SectionReader {
public:
    SectionReader(Section& section, std::string section_name,
                  std::vector<std::string>* defaults_log)
        : section_(section), name_(std::move(section_name)), defaults_(defaults_log) {}

    void declare(const std::string& key) { known_.push_back(key); }

    bool has(const std::string& key) const { return section_.count(key) > 0; }

    std::string raw(const std::string& key) {
        const auto it = section_.find(key);
        if (it == section_.end())
            throw ValidationError(where() + ": missing required key '" + key + "'");
        return it->second.value;
    }

    double number(const std::string& key) {
        const std::string v = raw(key);
        std::size_t consumed = 0;
        double out = 0.0;
        try {
            out = std::stod(v, &consumed);
        } catch (const std::exception&) {
            throw ValidationError(context(key) + ": not a number: '" + v + "'");
        }
        if (consumed != v.size())
            throw ValidationError(context(key) + ": trailing characters in number: '" + v + "'");
        return out;
    }

    double number_or(const std::string& key, double fallback) {
        if (has(key)) return number(key);
        log_default(key, format_g17(fallback));
        return fallback;
    }

    long long integer(const std::string& key) {
        const double v = number(key);
        const long long i = std::llround(v);
        if (v != static_cast<double>(i))
            throw ValidationError(context(key) + ": expected an integer");
        return i;
    }

    long long integer_or(const std::string& key, long long fallback) {
        if (has(key)) return integer(key);
        log_default(key, std::to_string(fallback));
        return fallback;
    }

    std::uint64_t unsigned_or(const std::string& key, std::uint64_t fallback) {
        if (!has(key)) {
            log_default(key, std::to_string(fallback));
            return fallback;
        }
        const std::string v = raw(key);
        try {
            std::size_t consumed = 0;
            const std::uint64_t out = std::stoull(v, &consumed);
            if (consumed != v.size()) throw std::invalid_argument("trailing");
            return out;
        } catch (const std::exception&) {
            throw ValidationError(context(key) + ": expected an unsigned integer, got '" + v + "'");
        }
    }

    bool flag_or(const std::string& key, bool fallback) {
        if (!has(key)) {
            log_default(key, fallback ? "true" : "false");
            return fallback;
        }
        const std::string v = raw(key);
        if (v == "true") return true;
        if (v == "false") return false;
        throw ValidationError(context(key) + ": expected true or false, got '" + v + "'");
    }

    Vec3 vector(const std::string& key) {
        const std::string v = raw(key);
        std::vector<double> parts;
        std::string cur;
        for (char ch : v + ",") {
            if (ch == ',') {
                const std::string t = trim(cur);
                cur.clear();
                if (t.empty()) throw ValidationError(context(key) + ": empty vector component");
                std::size_t consumed = 0;
                try {
                    parts.push_back(std::stod(t, &consumed));
                } catch (const std::exception&) {
                    throw ValidationError(context(key) + ": not a number: '" + t + "'");
                }
                if (consumed != t.size())
                    throw ValidationError(context(key) + ": trailing characters in '" + t + "'");
            } else {
                cur += ch;
            }
        }
        if (parts.size() != 3)
            throw ValidationError(context(key) + ": expected 'x,y,z', got " +
                                  std::to_string(parts.size()) + " components");
        return {parts[0], parts[1], parts[2]};
    }

    std::string word(const std::string& key) { return raw(key); }

    std::string word_or(const std::string& key, const std::string& fallback) {
        if (has(key)) return raw(key);
        log_default(key, fallback);
        return fallback;
    }

    void require(const std::string& key) const {
        if (!has(key))
            throw ValidationError(where() + ": missing required key '" + key + "'");
    }

    void forbid(const std::string& key, const std::string& why) const {
        if (has(key))
            throw ValidationError(context_of(key) + ": key '" + key + "' is not valid here (" +
                                  why + ")");
    }

    /// Every key must have been declared; anything else is a typo.
    void finish() const {
        for (const auto& [key, entry] : section_) {
            if (std::find(known_.begin(), known_.end(), key) != known_.end()) continue;
            std::string msg = "line " + std::to_string(entry.line) + ": unknown key '" + key +
                              "' in " + where();
            const std::string suggestion = nearest_key(key, known_);
            if (!suggestion.empty()) msg += "; nearest valid key is '" + suggestion + "'";
            throw ValidationError(msg);
        }
    }

private:
    std::string where() const { return name_.empty() ? "the top level" : "section [" + name_ + "]"; }

    std::string context(const std::string& key) {
        return "line " + std::to_string(section_.at(key).line) + ": key '" + key + "'";
    }

    std::string context_of(const std::string& key) const {
        return "line " + std::to_string(section_.at(key).line);
    }

    void log_default(const std::string& key, const std::string& value) {
        if (defaults_)
            defaults_->push_back((name_.empty() ? key : name_ + "." + key) + " = " + value);
    }

    Section& section_;
    std::string name_;
    std::vector<std::string>* defaults_;
    std::vector<std::string> known_;
};

MediumModel parse_medium(Section& section, std::vector<std::string>* defaults_log) {
    SectionReader r(section, "medium", defaults_log);
    for (const char* k : {"kind", "rho0", "mu0", "vary", "g", "a", "w", "kappa"}) r.declare(k);
    r.require("kind");
    const std::string kind = r.word("kind");
    const double rho0 = r.number_or("rho0", 1.0);
    const double mu0 = r.number_or("mu0", 1.0);
    const std::string vary = r.word_or("vary", "speed");

    MediumModel m;
    if (kind == "homogeneous") {
        for (const char* k : {"g", "a", "w", "kappa"}) r.forbid(k, "medium kind is homogeneous");
        m = MediumModel::homogeneous(rho0, mu0);
    } else if (kind == "linear_gradient") {
        for (const char* k : {"a", "w", "kappa"}) r.forbid(k, "medium kind is linear_gradient");
        r.require("g");
        m = MediumModel::linear_gradient(r.vector("g"), rho0, mu0);
    } else if (kind == "gaussian_lens") {
        for (const char* k : {"g", "kappa"}) r.forbid(k, "medium kind is gaussian_lens");
        r.require("a");
        m = MediumModel::gaussian_lens(r.number("a"), r.number_or("w", 1.0), rho0, mu0);
    } else if (kind == "axial_duct") {
        for (const char* k : {"g", "a", "w"}) r.forbid(k, "medium kind is axial_duct");
        r.require("kappa");
        m = MediumModel::axial_duct(r.number("kappa"), rho0, mu0);
    } else {
        throw ValidationError("unknown medium kind '" + kind +
                              "'; expected homogeneous, linear_gradient, gaussian_lens or "
                              "axial_duct");
    }

    if (vary == "speed") {
        m.carrier = ProfileCarrier::speed;
    } else if (vary == "density") {
        m.carrier = ProfileCarrier::density;
    } else if (vary == "shear") {
        m.carrier = ProfileCarrier::shear_modulus;
    } else {
        throw ValidationError("unknown vary mode '" + vary + "'; expected speed, density or shear");
    }
    r.finish();
    return m;
}

int parse_sigma(SectionReader& r) {
    const long long s = r.integer_or("sigma", 1);
    if (s != 1 && s != -1) throw ValidationError("sigma must be 1 or -1");
    return static_cast<int>(s);
}

TraceSettings parse_trace(Section& section, std::vector<std::string>* defaults_log) {
    SectionReader r(section, "trace", defaults_log);
    for (const char* k : {"r0", "p0", "sigma", "hbar_scale", "t_max", "rel_tol", "abs_tol",
                          "max_step", "output_stride", "output_grid_dt", "bbox_min", "bbox_max",
                          "adiabaticity_threshold"})
        r.declare(k);

    TraceSettings t;
    r.require("r0");
    r.require("p0");
    r.require("t_max");
    t.r0 = r.vector("r0");
    t.p0 = r.vector("p0");
    t.sigma = parse_sigma(r);
    t.integ.hbar_scale = r.number_or("hbar_scale", 1.0);
    t.integ.t_max = r.number("t_max");
    t.integ.rel_tol = r.number_or("rel_tol", 1e-9);
    t.integ.abs_tol = r.number_or("abs_tol", 1e-12);
    t.integ.max_step = r.number_or("max_step", 0.0);
    t.integ.output_stride = static_cast<int>(r.integer_or("output_stride", 1));
    t.integ.output_grid_dt = r.number_or("output_grid_dt", 0.0);
    t.adiabaticity_threshold = r.number_or("adiabaticity_threshold", 1e-2);

    if (r.has("bbox_min") != r.has("bbox_max"))
        throw ValidationError("bbox_min and bbox_max must be given together");
    if (r.has("bbox_min")) {
        BoundingBox box{r.vector("bbox_min"), r.vector("bbox_max")};
        if (!(box.lo.x < box.hi.x && box.lo.y < box.hi.y && box.lo.z < box.hi.z))
            throw ValidationError("bounding box must have bbox_min < bbox_max componentwise");
        t.integ.bbox = box;
    }

    if (!(t.integ.t_max > 0.0)) throw ValidationError("t_max must be positive");
    if (!(t.integ.rel_tol > 0.0) || !(t.integ.abs_tol > 0.0))
        throw ValidationError("rel_tol and abs_tol must be positive");
    if (!(t.integ.hbar_scale >= 0.0)) throw ValidationError("hbar_scale must be non-negative");
    if (t.integ.max_step < 0.0) throw ValidationError("max_step must be non-negative");
    if (t.integ.output_stride < 1) throw ValidationError("output_stride must be >= 1");
    if (t.integ.output_grid_dt < 0.0) throw ValidationError("output_grid_dt must be non-negative");
    if (!(t.p0.norm() > 0.0)) throw ValidationError("p0 must be nonzero");
    r.finish();
    return t;
}

PathSettings parse_path(Section& section, std::vector<std::string>* defaults_log) {
    SectionReader r(section, "path", defaults_log);
    for (const char* k : {"kind", "theta", "p_mag", "samples", "windings", "file", "closed",
                          "closure_tol", "max_angular_step", "sigma"})
        r.declare(k);

    PathSettings p;
    r.require("kind");
    const std::string kind = r.word("kind");
    p.sigma = parse_sigma(r);
    p.closure_tol = r.number_or("closure_tol", 1e-9);
    p.max_angular_step = r.number_or("max_angular_step", 0.1);
    if (!(p.closure_tol > 0.0)) throw ValidationError("closure_tol must be positive");
    if (!(p.max_angular_step > 0.0)) throw ValidationError("max_angular_step must be positive");

    if (kind == "circle") {
        for (const char* k : {"file", "closed"}) r.forbid(k, "path kind is circle");
        p.source = PathSettings::Source::circle;
        r.require("theta");
        p.theta = r.number("theta");
        p.p_mag = r.number_or("p_mag", 1.0);
        p.samples = static_cast<int>(r.integer_or("samples", 20000));
        p.windings = static_cast<int>(r.integer_or("windings", 1));
        if (!(p.theta > 0.0) || !(p.theta < std::numbers::pi))
            throw ValidationError("theta must lie strictly inside (0, pi)");
        if (!(p.p_mag > 0.0)) throw ValidationError("p_mag must be positive");
        if (p.samples < 3) throw ValidationError("samples must be >= 3");
        if (p.windings == 0) throw ValidationError("windings must be nonzero");
    } else if (kind == "csv") {
        for (const char* k : {"theta", "p_mag", "samples", "windings"})
            r.forbid(k, "path kind is csv");
        p.source = PathSettings::Source::csv;
        r.require("file");
        p.file = r.word("file");
        const std::string closed = r.word_or("closed", "auto");
        if (closed == "auto") {
            p.closed = PathSettings::ClosedMode::automatic;
        } else if (closed == "true") {
            p.closed = PathSettings::ClosedMode::closed;
        } else if (closed == "false") {
            p.closed = PathSettings::ClosedMode::open;
        } else {
            throw ValidationError("closed must be auto, true or false");
        }
    } else {
        throw ValidationError("unknown path kind '" + kind + "'; expected circle or csv");
    }
    r.finish();
    return p;
}

NoiseSettings parse_noise(Section& section, std::vector<std::string>* defaults_log) {
    SectionReader r(section, "noise", defaults_log);
    for (const char* k : {"theta0", "p0_mag", "T", "D", "dt", "n", "estimator", "emit_raw",
                          "histogram_bins", "threads"})
        r.declare(k);

    NoiseSettings n;
    for (const char* k : {"theta0", "T", "D", "dt", "n"}) r.require(k);
    n.theta0 = r.number("theta0");
    n.p0_mag = r.number_or("p0_mag", 1.0);
    n.period = r.number("T");
    n.intensity = r.number("D");
    n.dt = r.number("dt");
    n.n = r.unsigned_or("n", 0);
    const std::string est = r.word_or("estimator", "linearized");
    if (est == "exact") {
        n.estimator = DeltaGammaEstimator::exact;
    } else if (est == "linearized") {
        n.estimator = DeltaGammaEstimator::linearized;
    } else {
        throw ValidationError("estimator must be exact or linearized");
    }
    n.emit_raw = r.flag_or("emit_raw", false);
    n.histogram_bins = static_cast<int>(r.integer_or("histogram_bins", 61));
    n.threads = static_cast<int>(r.integer_or("threads", 0));

    if (!(n.theta0 > 0.0) || !(n.theta0 < std::numbers::pi))
        throw ValidationError("theta0 must lie strictly inside (0, pi)");
    if (!(n.p0_mag > 0.0)) throw ValidationError("p0_mag must be positive");
    if (!(n.period > 0.0)) throw ValidationError("T must be positive");
    if (!(n.intensity >= 0.0)) throw ValidationError("D must be non-negative");
    if (!(n.dt > 0.0)) throw ValidationError("dt must be positive");
    if (n.dt > n.period / 1000.0)
        throw ValidationError("dt = " + format_g17(n.dt) +
                              " violates the resolution floor dt <= T/1000 = " +
                              format_g17(n.period / 1000.0));
    if (n.n < 2) throw ValidationError("n must be >= 2");
    if (n.histogram_bins < 1) throw ValidationError("histogram_bins must be >= 1");
    if (n.threads < 0) throw ValidationError("threads must be >= 0");
    r.finish();
    return n;
}

}  // namespace

const char* command_name(Command command) {
    switch (command) {
        case Command::trace: return "trace";
        case Command::loop_phase: return "loop-phase";
        case Command::noise_ensemble: return "noise-ensemble";
        case Command::validate: return "validate";
    }
    return "?";
}

RunConfig parse_config(const std::string& text, Command command) {
    RawConfig raw = tokenize(text);

    RunConfig config;
    config.command = command;

    {
        SectionReader top(raw.sections[""], "", &config.applied_defaults);
        top.declare("seed");
        config.seed = top.unsigned_or("seed", 1);
        top.finish();
    }

    std::vector<std::string> allowed;
    switch (command) {
        case Command::trace: allowed = {"medium", "trace"}; break;
        case Command::loop_phase: allowed = {"path"}; break;
        case Command::noise_ensemble: allowed = {"noise"}; break;
        case Command::validate: allowed = {}; break;
    }
    for (const auto& [name, section] : raw.sections) {
        if (name.empty()) continue;
        if (std::find(allowed.begin(), allowed.end(), name) == allowed.end())
            throw ValidationError("line " + std::to_string(raw.section_lines[name]) +
                                  ": section [" + name + "] is not valid for command '" +
                                  command_name(command) + "'");
    }

    const auto need = [&](const std::string& name) -> Section& {
        if (!raw.sections.count(name))
            throw ValidationError("command '" + std::string(command_name(command)) +
                                  "' requires a [" + name + "] section");
        return raw.sections[name];
    };

    switch (command) {
        case Command::trace:
            config.medium = parse_medium(need("medium"), &config.applied_defaults);
            config.trace = parse_trace(need("trace"), &config.applied_defaults);
            break;
        case Command::loop_phase:
            config.path = parse_path(need("path"), &config.applied_defaults);
            break;
        case Command::noise_ensemble:
            config.noise = parse_noise(need("noise"), &config.applied_defaults);
            break;
        case Command::validate:
            break;
    }
    return config;
}

std::string render_effective_config(const RunConfig& config) {
    std::ostringstream os;
    os << "seed = " << config.seed << '\n';

    if (config.medium) {
        const MediumModel& m = *config.medium;
        os << "\n[medium]\n";
        switch (m.kind) {
            case MediumKind::homogeneous: os << "kind = homogeneous\n"; break;
            case MediumKind::linear_gradient:
                os << "kind = linear_gradient\n";
                os << "g = " << format_g17(m.gradient.x) << ',' << format_g17(m.gradient.y) << ','
                   << format_g17(m.gradient.z) << '\n';
                break;
            case MediumKind::gaussian_lens:
                os << "kind = gaussian_lens\n";
                os << "a = " << format_g17(m.lens_amplitude) << '\n';
                os << "w = " << format_g17(m.lens_width) << '\n';
                break;
            case MediumKind::axial_duct:
                os << "kind = axial_duct\n";
                os << "kappa = " << format_g17(m.duct_curvature) << '\n';
                break;
        }
        os << "rho0 = " << format_g17(m.rho0) << '\n';
        os << "mu0 = " << format_g17(m.mu0) << '\n';
        os << "vary = "
           << (m.carrier == ProfileCarrier::speed
                   ? "speed"
                   : (m.carrier == ProfileCarrier::density ? "density" : "shear"))
           << '\n';
    }

    if (config.trace) {
        const TraceSettings& t = *config.trace;
        os << "\n[trace]\n";
        os << "r0 = " << format_g17(t.r0.x) << ',' << format_g17(t.r0.y) << ','
           << format_g17(t.r0.z) << '\n';
        os << "p0 = " << format_g17(t.p0.x) << ',' << format_g17(t.p0.y) << ','
           << format_g17(t.p0.z) << '\n';
        os << "sigma = " << t.sigma << '\n';
        os << "hbar_scale = " << format_g17(t.integ.hbar_scale) << '\n';
        os << "t_max = " << format_g17(t.integ.t_max) << '\n';
        os << "rel_tol = " << format_g17(t.integ.rel_tol) << '\n';
        os << "abs_tol = " << format_g17(t.integ.abs_tol) << '\n';
        os << "max_step = " << format_g17(t.integ.max_step) << '\n';
        os << "output_stride = " << t.integ.output_stride << '\n';
        os << "output_grid_dt = " << format_g17(t.integ.output_grid_dt) << '\n';
        if (t.integ.bbox) {
            os << "bbox_min = " << format_g17(t.integ.bbox->lo.x) << ','
               << format_g17(t.integ.bbox->lo.y) << ',' << format_g17(t.integ.bbox->lo.z) << '\n';
            os << "bbox_max = " << format_g17(t.integ.bbox->hi.x) << ','
               << format_g17(t.integ.bbox->hi.y) << ',' << format_g17(t.integ.bbox->hi.z) << '\n';
        }
        os << "adiabaticity_threshold = " << format_g17(t.adiabaticity_threshold) << '\n';
    }

    if (config.path) {
        const PathSettings& p = *config.path;
        os << "\n[path]\n";
        if (p.source == PathSettings::Source::circle) {
            os << "kind = circle\n";
            os << "theta = " << format_g17(p.theta) << '\n';
            os << "p_mag = " << format_g17(p.p_mag) << '\n';
            os << "samples = " << p.samples << '\n';
            os << "windings = " << p.windings << '\n';
        } else {
            os << "kind = csv\n";
            os << "file = " << p.file << '\n';
            os << "closed = "
               << (p.closed == PathSettings::ClosedMode::automatic
                       ? "auto"
                       : (p.closed == PathSettings::ClosedMode::closed ? "true" : "false"))
               << '\n';
        }
        os << "sigma = " << p.sigma << '\n';
        os << "closure_tol = " << format_g17(p.closure_tol) << '\n';
        os << "max_angular_step = " << format_g17(p.max_angular_step) << '\n';
    }

    if (config.noise) {
        const NoiseSettings& n = *config.noise;
        os << "\n[noise]\n";
        os << "theta0 = " << format_g17(n.theta0) << '\n';
        os << "p0_mag = " << format_g17(n.p0_mag) << '\n';
        os << "T = " << format_g17(n.period) << '\n';
        os << "D = " << format_g17(n.intensity) << '\n';
        os << "dt = " << format_g17(n.dt) << '\n';
        os << "n = " << n.n << '\n';
        os << "estimator = "
           << (n.estimator == DeltaGammaEstimator::exact ? "exact" : "linearized") << '\n';
        os << "emit_raw = " << (n.emit_raw ? "true" : "false") << '\n';
        os << "histogram_bins = " << n.histogram_bins << '\n';
        os << "threads = " << n.threads << '\n';
    }
    return os.str();
}

}  // namespace rytov
