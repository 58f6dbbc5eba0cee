#pragma once

#include <map>
#include <string>
#include <vector>

namespace ends {

// Plain-text configuration: "[section]" headers, "key = value" lines,
// '#' or ';' start a comment. Keys before any header belong to section "".
class Config {
public:
    struct Entry {
        std::string value;
        int line = 0;
        int column = 0;  // column of the value
    };

    static Config parse(const std::string& text, const std::string& origin = "<config>");
    static Config load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    const Entry* find(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;

    std::vector<std::string> sections() const;
    std::vector<std::string> keys(const std::string& section) const;
    bool has_section(const std::string& section) const;
    int section_line(const std::string& section) const;

    // Throws a validation error "origin:line:column: msg".
    [[noreturn]] void error_at(const std::string& section, const std::string& key,
                               const std::string& msg) const;
    // Rejects keys outside the allowed set.
    void check_keys(const std::string& section, const std::vector<std::string>& allowed) const;

    const std::string& origin() const { return origin_; }

private:
    std::string origin_;
    std::map<std::string, std::map<std::string, Entry>> data_;
    std::map<std::string, int> section_lines_;
    std::map<std::string, std::map<std::string, int>> key_columns_;
};

}  // namespace ends
