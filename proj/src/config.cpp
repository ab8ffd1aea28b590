#include "loglap/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "loglap/errors.hpp"

namespace loglap {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

struct Entry {
    std::string value;
    int line = 0;
};

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double to_real(const Entry& e, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        fail(e.line, "value of '" + key + "' is not a number: '" + e.value + "'");
    }
}

long to_integer(const Entry& e, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        fail(e.line, "value of '" + key + "' is not an integer: '" + e.value + "'");
    }
}

bool to_bool(const Entry& e, const std::string& key) {
    if (e.value == "true" || e.value == "1" || e.value == "on") return true;
    if (e.value == "false" || e.value == "0" || e.value == "off") return false;
    fail(e.line, "value of '" + key + "' is not a boolean: '" + e.value + "'");
}

// "name:k1=v1,k2=v2" -> name, {k: v}
std::pair<std::string, std::map<std::string, double>> parse_family(const std::string& spec) {
    const auto colon = spec.find(':');
    std::string name = trim(spec.substr(0, colon));
    std::map<std::string, double> params;
    if (colon != std::string::npos) {
        std::stringstream ss(spec.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw ConfigError("malformed parameter '" + item + "' in '" + spec + "'");
            try {
                params[trim(item.substr(0, eq))] = std::stod(item.substr(eq + 1));
            } catch (const std::exception&) {
                throw ConfigError("parameter '" + item + "' in '" + spec + "' is not numeric");
            }
        }
    }
    return {name, params};
}

double require_param(const std::map<std::string, double>& p, const std::string& key, const std::string& spec) {
    const auto it = p.find(key);
    if (it == p.end()) throw ConfigError("'" + spec + "' is missing parameter '" + key + "'");
    return it->second;
}

} // namespace

CoefficientA parse_coefficient(const std::string& spec) {
    const auto [name, p] = parse_family(spec);
    if (name == "shifted_linear" && p.empty()) return CoefficientA::shifted_linear();
    if (name == "clamped" && p.size() == 1) return CoefficientA::clamped(require_param(p, "c", spec));
    if (name == "constant" && p.size() == 1) return CoefficientA::constant(require_param(p, "c0", spec));
    throw ConfigError("unknown coefficient '" + spec + "' (expected shifted_linear, clamped:c=..., constant:c0=...)");
}

NonlinearityF parse_nonlinearity(const std::string& spec) {
    const auto [name, p] = parse_family(spec);
    if (name == "linear" && p.empty()) return NonlinearityF::linear();
    if (name == "power" && p.size() == 1) {
        const double exponent = require_param(p, "p", spec);
        if (!(exponent >= 1)) throw ConfigError("power nonlinearity requires p >= 1");
        return NonlinearityF::power(exponent);
    }
    throw ConfigError("unknown nonlinearity '" + spec + "' (expected power:p=..., linear)");
}

RunConfig parse_config(const std::string& text) {
    static const std::map<std::string, std::set<std::string>> schema = {
        {"domain", {"family", "alpha", "r0"}},
        {"grid", {"origin", "h", "dims"}},
        {"problem", {"a", "f"}},
        {"solver", {"tau", "tol", "max_iter", "projection", "init"}},
        {"sweep", {"lambda_min", "lambda_max", "step", "tol"}},
        {"operator", {"min_box_radius"}},
    };
    std::map<std::string, std::map<std::string, Entry>> raw;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        std::string s = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(lineno, "malformed section header '" + s + "'");
            section = trim(s.substr(1, s.size() - 2));
            if (!schema.count(section)) fail(lineno, "unknown section '" + section + "'");
            raw[section];
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail(lineno, "expected 'key = value', got '" + s + "'");
        if (section.empty()) fail(lineno, "key outside of any section");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = unquote(trim(s.substr(eq + 1)));
        if (!schema.at(section).count(key)) fail(lineno, "unknown key '" + key + "' in section [" + section + "]");
        if (raw[section].count(key)) fail(lineno, "duplicate key '" + key + "'");
        if (value.empty()) fail(lineno, "empty value for '" + key + "'");
        raw[section][key] = {value, lineno};
    }

    RunConfig cfg;
    auto get = [&](const std::string& sec, const std::string& key) -> const Entry* {
        const auto s = raw.find(sec);
        if (s == raw.end()) return nullptr;
        const auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    };

    // [domain]
    {
        EpigraphFamily fam = EpigraphFamily::Paraboloid;
        double alpha = 1, r0 = 0;
        if (const Entry* e = get("domain", "family")) {
            if (e->value == "paraboloid") fam = EpigraphFamily::Paraboloid;
            else if (e->value == "cone") fam = EpigraphFamily::Cone;
            else if (e->value == "flat_bottom" || e->value == "flat-bottom") fam = EpigraphFamily::FlatBottom;
            else fail(e->line, "unknown domain family '" + e->value + "'");
        }
        if (const Entry* e = get("domain", "alpha")) {
            alpha = to_real(*e, "alpha");
            if (!(alpha > 0)) fail(e->line, "alpha must be positive");
        }
        if (const Entry* e = get("domain", "r0")) {
            r0 = to_real(*e, "r0");
            if (!(r0 >= 0)) fail(e->line, "r0 must be nonnegative");
        }
        cfg.domain = Epigraph(fam, alpha, r0);
    }

    // [grid]
    if (raw.count("grid")) {
        const Entry* eo = get("grid", "origin");
        const Entry* eh = get("grid", "h");
        const Entry* ed = get("grid", "dims");
        if (!eo || !eh || !ed) throw ConfigError("config: [grid] requires origin, h and dims");
        const double h = to_real(*eh, "h");
        if (!(h > 0) || !(h < 0.25)) fail(eh->line, "h out of range (must satisfy 0 < h < 1/4)");
        Eigen::VectorXd origin, dims;
        try {
            origin = parse_number_list(eo->value);
            dims = parse_number_list(ed->value);
        } catch (const ConfigError& err) {
            fail(eo->line, err.what());
        }
        if (origin.size() != dims.size()) fail(ed->line, "origin and dims must have the same length");
        if (origin.size() < 2) fail(ed->line, "grid dimension must be at least 2 for epigraph domains");
        for (Eigen::Index d = 0; d < dims.size(); ++d)
            if (!(dims[d] >= 2) || dims[d] != std::floor(dims[d]) || dims[d] > 100000)
                fail(ed->line, "dims must be integers in [2, 100000]");
        cfg.grid = UniformGrid(origin, h, dims.cast<int>());
    }

    // [problem]
    try {
        if (const Entry* e = get("problem", "a")) cfg.a = parse_coefficient(e->value);
    } catch (const ConfigError& err) {
        fail(get("problem", "a")->line, err.what());
    }
    try {
        if (const Entry* e = get("problem", "f")) cfg.f = parse_nonlinearity(e->value);
    } catch (const ConfigError& err) {
        fail(get("problem", "f")->line, err.what());
    }

    // [solver]
    if (const Entry* e = get("solver", "tau")) {
        cfg.solver.tau = to_real(*e, "tau");
        if (!(cfg.solver.tau > 0 && cfg.solver.tau <= 1)) fail(e->line, "tau must lie in (0, 1]");
    }
    if (const Entry* e = get("solver", "tol")) {
        cfg.solver.tol_residual = to_real(*e, "tol");
        if (!(cfg.solver.tol_residual > 0)) fail(e->line, "tol must be positive");
    }
    if (const Entry* e = get("solver", "max_iter")) {
        const long v = to_integer(*e, "max_iter");
        if (v < 0 || v > 100000000) fail(e->line, "max_iter out of range");
        cfg.solver.max_iter = static_cast<int>(v);
    }
    if (const Entry* e = get("solver", "projection")) cfg.solver.positivity_projection = to_bool(*e, "projection");
    if (const Entry* e = get("solver", "init")) {
        const auto [name, p] = parse_family(e->value);
        if (name == "manufactured") cfg.init.kind = InitialData::Kind::Manufactured;
        else if (name == "constant") cfg.init.kind = InitialData::Kind::Constant;
        else fail(e->line, "unknown init '" + e->value + "' (expected manufactured:scale=..., constant:value=...)");
        const char* key = cfg.init.kind == InitialData::Kind::Manufactured ? "scale" : "value";
        if (p.size() != 1 || !p.count(key)) fail(e->line, std::string("init requires exactly the parameter '") + key + "'");
        cfg.init.value = p.at(key);
        if (!(cfg.init.value > 0)) fail(e->line, "init parameter must be positive");
    }

    // [sweep]
    if (raw.count("sweep")) {
        const Entry* lo = get("sweep", "lambda_min");
        const Entry* hi = get("sweep", "lambda_max");
        const Entry* st = get("sweep", "step");
        if (!lo || !hi || !st) throw ConfigError("config: [sweep] requires lambda_min, lambda_max and step");
        cfg.sweep.present = true;
        cfg.sweep.lambda_min = to_real(*lo, "lambda_min");
        cfg.sweep.lambda_max = to_real(*hi, "lambda_max");
        cfg.sweep.step = to_real(*st, "step");
        if (!(cfg.sweep.lambda_min > cfg.domain.infimum())) fail(lo->line, "lambda_min must exceed inf phi");
        if (!(cfg.sweep.lambda_max >= cfg.sweep.lambda_min)) fail(hi->line, "lambda_max must be >= lambda_min");
        if (!(cfg.sweep.step > 0)) fail(st->line, "step must be positive");
        if (const Entry* e = get("sweep", "tol")) {
            cfg.sweep.tol = to_real(*e, "tol");
            if (!(cfg.sweep.tol >= 0)) fail(e->line, "tol must be nonnegative");
        }
    }

    // [operator]
    if (const Entry* e = get("operator", "min_box_radius")) {
        cfg.min_box_radius = to_real(*e, "min_box_radius");
        if (!(cfg.min_box_radius >= 0)) fail(e->line, "min_box_radius must be nonnegative");
        if (cfg.grid) {
            for (int d = 0; d < cfg.grid->dim(); ++d)
                if (cfg.grid->lower(d) > -cfg.min_box_radius + 1e-12 * cfg.grid->h() ||
                    cfg.grid->upper(d) < cfg.min_box_radius - 1e-12 * cfg.grid->h())
                    fail(e->line, "grid box does not cover [-min_box_radius, min_box_radius] in every direction");
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

const UniformGrid& RunConfig::require_grid() const {
    if (!grid) throw ConfigError("config: a [grid] section is required");
    return *grid;
}

ProblemSpec RunConfig::problem() const { return ProblemSpec(domain, a, f, require_grid()); }

GridFunction RunConfig::initial_guess() const {
    const UniformGrid& g = require_grid();
    if (init.kind == InitialData::Kind::Manufactured) return manufactured_monotone(domain, g, init.value);
    return GridFunction::sample(g, [&](const Point& x) { return in_domain(domain, x) ? init.value : 0.0; });
}

} // namespace loglap
