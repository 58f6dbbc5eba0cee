#include "ends/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ends/errors.hpp"

namespace ends {

namespace {

std::string trim(const std::string& s)
{
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void syntax(const std::string& origin, int line, int col, const std::string& msg)
{
    fail(ErrorKind::validation,
         origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin)
{
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        std::size_t cut = line.find_first_of("#;");
        if (cut != std::string::npos) line = line.substr(0, cut);
        std::string t = trim(line);
        if (t.empty()) continue;
        int col0 = static_cast<int>(line.find_first_not_of(" \t")) + 1;
        if (t.front() == '[') {
            if (t.back() != ']')
                syntax(origin, lineno, col0 + static_cast<int>(t.size()), "expected ']'");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty()) syntax(origin, lineno, col0 + 1, "empty section name");
            if (cfg.section_lines_.count(section))
                syntax(origin, lineno, col0, "duplicate section [" + section + "]");
            cfg.section_lines_[section] = lineno;
            cfg.data_[section];
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) syntax(origin, lineno, col0, "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        if (key.empty()) syntax(origin, lineno, col0, "missing key before '='");
        std::string value = trim(line.substr(eq + 1));
        std::size_t vpos = line.find_first_not_of(" \t", eq + 1);
        int vcol = vpos == std::string::npos ? static_cast<int>(eq) + 2 : static_cast<int>(vpos) + 1;
        if (value.empty()) syntax(origin, lineno, vcol, "missing value for '" + key + "'");
        auto& sec = cfg.data_[section];
        if (sec.count(key)) syntax(origin, lineno, col0, "duplicate key '" + key + "'");
        sec[key] = Entry{value, lineno, vcol};
        cfg.key_columns_[section][key] = col0;
    }
    return cfg;
}

Config Config::load(const std::string& path)
{
    std::ifstream f(path);
    if (!f) fail(ErrorKind::validation, "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
}

bool Config::has(const std::string& section, const std::string& key) const
{
    return find(section, key) != nullptr;
}

const Config::Entry* Config::find(const std::string& section, const std::string& key) const
{
    auto s = data_.find(section);
    if (s == data_.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

std::string Config::get(const std::string& section, const std::string& key,
                        const std::string& fallback) const
{
    const Entry* e = find(section, key);
    return e ? e->value : fallback;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const
{
    const Entry* e = find(section, key);
    if (!e) return fallback;
    const char* s = e->value.c_str();
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(s, &end);
    if (end == s || *end != '\0' || errno == ERANGE)
        syntax(origin_, e->line, e->column, "expected a number for '" + key + "'");
    return v;
}

int Config::get_int(const std::string& section, const std::string& key, int fallback) const
{
    const Entry* e = find(section, key);
    if (!e) return fallback;
    const char* s = e->value.c_str();
    char* end = nullptr;
    errno = 0;
    long v = std::strtol(s, &end, 10);
    if (end == s || *end != '\0' || errno == ERANGE)
        syntax(origin_, e->line, e->column, "expected an integer for '" + key + "'");
    return static_cast<int>(v);
}

std::vector<std::string> Config::sections() const
{
    std::vector<std::pair<int, std::string>> order;
    for (const auto& [name, line] : section_lines_) order.emplace_back(line, name);
    std::sort(order.begin(), order.end());
    std::vector<std::string> out;
    for (auto& p : order) out.push_back(p.second);
    return out;
}

std::vector<std::string> Config::keys(const std::string& section) const
{
    std::vector<std::string> out;
    auto s = data_.find(section);
    if (s == data_.end()) return out;
    for (const auto& kv : s->second) out.push_back(kv.first);
    return out;
}

bool Config::has_section(const std::string& section) const
{
    return data_.count(section) != 0;
}

int Config::section_line(const std::string& section) const
{
    auto it = section_lines_.find(section);
    return it == section_lines_.end() ? 0 : it->second;
}

void Config::error_at(const std::string& section, const std::string& key,
                      const std::string& msg) const
{
    if (const Entry* e = find(section, key)) syntax(origin_, e->line, e->column, msg);
    syntax(origin_, section_line(section), 1, msg);
}

void Config::check_keys(const std::string& section, const std::vector<std::string>& allowed) const
{
    auto s = data_.find(section);
    if (s == data_.end()) return;
    for (const auto& [key, entry] : s->second) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            int col = key_columns_.at(section).at(key);
            syntax(origin_, entry.line, col,
                   "unknown key '" + key + "' in [" + section + "]");
        }
    }
}

}  // namespace ends
