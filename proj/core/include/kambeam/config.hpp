#pragma once

// Flat key = value configuration with [section] headers. '#' and ';' start comments.
//
//   [simulate]
//   sites = (1,0) (3,0)
//   xi = 1e-3 1e-3

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "kambeam/errors.hpp"
#include "kambeam/lattice.hpp"

namespace kambeam {

struct ConfigValue {
    std::string text;
    int line = 0;
};

class ConfigSection {
public:
    ConfigSection() = default;
    explicit ConfigSection(std::string name) : name_(std::move(name)) {}

    const std::string& name() const { return name_; }
    bool has(const std::string& key) const { return values_.count(key) > 0; }
    void set(const std::string& key, std::string value, int line = 0);
    const std::map<std::string, ConfigValue>& values() const { return values_; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::optional<std::string> find(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
    // "(1,0) (3,2)", "[[1,0],[3,2]]" or "1 0 3 2"; coordinates may be arbitrarily large.
    std::vector<BigSite> get_sites(const std::string& key, const std::vector<BigSite>& fallback) const;

    // ConfigError naming the first key outside the allowed set.
    void require_known(const std::set<std::string>& allowed) const;

private:
    [[noreturn]] void fail(const std::string& key, const std::string& message) const;

    std::string name_;
    std::map<std::string, ConfigValue> values_;
};

class Config {
public:
    const ConfigSection* section(const std::string& name) const;
    ConfigSection& section_mut(const std::string& name);
    const std::map<std::string, ConfigSection>& sections() const { return sections_; }

private:
    std::map<std::string, ConfigSection> sections_;
};

// Throws ConfigError with line numbers for malformed input.
Config parse_config(const std::string& text);
// Throws ConfigError if the file cannot be read.
Config load_config(const std::string& path);

std::vector<BigSite> parse_sites(const std::string& text);

}  // namespace kambeam
