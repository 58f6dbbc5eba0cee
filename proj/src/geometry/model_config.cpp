#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ends/errors.hpp"
#include "ends/geometry.hpp"

namespace ends {

namespace {

struct Call {
    std::string name;
    std::vector<std::string> args;
};

std::string trim(const std::string& s)
{
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

bool parse_call(const std::string& text, Call& out)
{
    std::size_t open = text.find('(');
    if (open == std::string::npos) {
        out.name = trim(text);
        out.args.clear();
        return true;
    }
    if (text.back() != ')') return false;
    out.name = trim(text.substr(0, open));
    std::string inner = text.substr(open + 1, text.size() - open - 2);
    out.args.clear();
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) out.args.push_back(trim(item));
    return true;
}

double number(const Config& cfg, const std::string& sec, const std::string& key,
              const std::string& text)
{
    const char* s = text.c_str();
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end == s || *end != '\0') cfg.error_at(sec, key, "expected a number, got '" + text + "'");
    return v;
}

void read_table(const Config& cfg, const std::string& sec, const std::string& key,
                const std::string& path, std::vector<double>& r, std::vector<double>& v)
{
    std::filesystem::path p(path);
    if (p.is_relative()) p = std::filesystem::path(cfg.origin()).parent_path() / p;
    std::ifstream in(p);
    if (!in) cfg.error_at(sec, key, "cannot open table '" + p.string() + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
            cfg.error_at(sec, key, p.string() + ":" + std::to_string(lineno) + ": expected 'r, value'");
        char* e1 = nullptr;
        char* e2 = nullptr;
        std::string ta = trim(a), tb = trim(b);
        double x = std::strtod(ta.c_str(), &e1);
        double y = std::strtod(tb.c_str(), &e2);
        if (e1 == ta.c_str() || e2 == tb.c_str()) {
            if (r.empty() && lineno == 1) continue;  // header
            cfg.error_at(sec, key, p.string() + ":" + std::to_string(lineno) + ": not numeric");
        }
        r.push_back(x);
        v.push_back(y);
    }
    if (r.size() < 4) cfg.error_at(sec, key, "table '" + p.string() + "' needs >= 4 rows");
}

WarpProfile warp_from(const Config& cfg, const std::string& sec)
{
    const std::string key = "profile";
    std::string text = cfg.get(sec, key, "euclidean");
    Call c;
    if (!parse_call(text, c)) cfg.error_at(sec, key, "malformed profile '" + text + "'");
    if (c.name == "euclidean" && c.args.empty()) return WarpProfile::euclidean();
    if (c.name == "hyperbolic" && c.args.empty()) return WarpProfile::hyperbolic();
    if (c.name == "cylinder" && c.args.empty()) return WarpProfile::cylinder();
    if (c.name == "conic" && c.args.size() == 1) {
        double a = number(cfg, sec, key, c.args[0]);
        if (!(a > 0.0)) cfg.error_at(sec, key, "conic angle factor must be positive");
        return WarpProfile::conic(a);
    }
    if ((c.name == "table" || c.name == "custom-table") && c.args.size() == 1) {
        std::vector<double> r, f;
        read_table(cfg, sec, key, c.args[0], r, f);
        try {
            return WarpProfile::table(r, f, c.args[0]);
        } catch (const Error& e) {
            cfg.error_at(sec, key, e.what());
        }
    }
    cfg.error_at(sec, key, "unknown profile '" + text + "'");
}

RadialFunction potential_from(const Config& cfg, const std::string& sec, const std::string& key)
{
    std::string text = cfg.get(sec, key, "none");
    Call c;
    if (!parse_call(text, c)) cfg.error_at(sec, key, "malformed potential '" + text + "'");
    if (c.name == "none" && c.args.empty()) return RadialFunction::none();
    if (c.name == "power" && c.args.size() == 2)
        return RadialFunction::power(number(cfg, sec, key, c.args[0]),
                                     number(cfg, sec, key, c.args[1]));
    if (c.name == "table" && c.args.size() == 1) {
        std::vector<double> r, v;
        read_table(cfg, sec, key, c.args[0], r, v);
        try {
            return RadialFunction::table(r, v, c.args[0]);
        } catch (const Error& e) {
            cfg.error_at(sec, key, e.what());
        }
    }
    cfg.error_at(sec, key, "unknown potential '" + text + "'");
}

}  // namespace

ManifoldModel model_from_config(const Config& cfg)
{
    for (const std::string& sec : cfg.sections()) {
        if (sec == "model" || sec == "ends.1" || sec == "ends.2" || sec == "potential" ||
            sec == "grid" || sec == "run")
            continue;
        cfg.error_at(sec, "", "unknown section [" + sec + "]");
    }
    cfg.check_keys("model", {"preset", "name", "r0", "core_half_width", "horizon", "class_eps",
                             "sigma", "tau", "rho"});
    cfg.check_keys("potential", {"core"});
    for (const char* sec : {"ends.1", "ends.2"})
        cfg.check_keys(sec, {"profile", "curvature", "v_long", "v_short"});

    ManifoldModel m;
    std::string preset = cfg.get("model", "preset", "");
    if (!preset.empty()) {
        try {
            m = model_preset(preset);
        } catch (const Error&) {
            cfg.error_at("model", "preset", "unknown preset '" + preset + "'");
        }
    }
    if (preset.empty() || cfg.has_section("ends.1") || cfg.has_section("ends.2")) {
        if (!cfg.has_section("ends.1") || !cfg.has_section("ends.2"))
            cfg.error_at("model", "", "model needs sections [ends.1] and [ends.2]");
        m.ends.clear();
        for (int id = 1; id <= 2; ++id) {
            std::string sec = "ends." + std::to_string(id);
            EndProfile e;
            e.id = id;
            e.warp = warp_from(cfg, sec);
            std::string curv = cfg.get(sec, "curvature", "q1");
            if (curv != "q1" && curv != "q2")
                cfg.error_at(sec, "curvature", "curvature must be q1 or q2");
            e.curvature_in_q1 = (curv == "q1");
            e.v_long = potential_from(cfg, sec, "v_long");
            e.v_short = potential_from(cfg, sec, "v_short");
            m.ends.push_back(std::move(e));
        }
    }
    m.name = cfg.get("model", "name", preset.empty() ? "custom" : preset);
    m.r0 = cfg.get_double("model", "r0", m.r0);
    m.core_half_width = cfg.get_double("model", "core_half_width", m.core_half_width);
    m.horizon = cfg.get_double("model", "horizon", m.horizon);
    m.class_eps = cfg.get_double("model", "class_eps", m.class_eps);
    m.decay.sigma = cfg.get_double("model", "sigma", m.decay.sigma);
    m.decay.tau = cfg.get_double("model", "tau", m.decay.tau);
    m.decay.rho = cfg.get_double("model", "rho", m.decay.rho);
    if (cfg.has("potential", "core")) {
        std::string text = cfg.get("potential", "core", "none");
        Call c;
        if (!parse_call(text, c)) cfg.error_at("potential", "core", "malformed core potential");
        if (c.name == "none" && c.args.empty()) {
            m.well = SquareWell{};
        } else if (c.name == "square_well" && c.args.size() == 2) {
            m.well = {true, number(cfg, "potential", "core", c.args[0]),
                      number(cfg, "potential", "core", c.args[1])};
        } else {
            cfg.error_at("potential", "core", "unknown core potential '" + text + "'");
        }
    }
    try {
        m.finalize();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::validation) cfg.error_at("model", "", e.what());
        throw;
    }
    return m;
}

}  // namespace ends
