#include "kambeam/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace kambeam {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> tokens(const std::string& text) {
    std::string cleaned = text;
    for (char& c : cleaned) {
        if (c == ',' || c == '(' || c == ')' || c == '[' || c == ']' || c == ';') c = ' ';
    }
    std::istringstream is(cleaned);
    std::vector<std::string> out;
    for (std::string t; is >> t;) out.push_back(t);
    return out;
}

bool parse_double(const std::string& t, double& out) {
    if (t.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return errno == 0 && end == t.c_str() + t.size();
}

}  // namespace

void ConfigSection::set(const std::string& key, std::string value, int line) {
    values_[key] = ConfigValue{std::move(value), line};
}

void ConfigSection::fail(const std::string& key, const std::string& message) const {
    auto it = values_.find(key);
    throw ConfigError(name_.empty() ? key : name_ + "." + key, message, it == values_.end() ? 0 : it->second.line);
}

std::optional<std::string> ConfigSection::find(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second.text;
}

std::string ConfigSection::get_string(const std::string& key, const std::string& fallback) const {
    return find(key).value_or(fallback);
}

double ConfigSection::get_double(const std::string& key, double fallback) const {
    auto v = find(key);
    if (!v) return fallback;
    double out = 0.0;
    if (!parse_double(trim(*v), out)) fail(key, "expected a number, got '" + *v + "'");
    return out;
}

long long ConfigSection::get_int(const std::string& key, long long fallback) const {
    auto v = find(key);
    if (!v) return fallback;
    const std::string t = trim(*v);
    errno = 0;
    char* end = nullptr;
    const long long out = std::strtoll(t.c_str(), &end, 10);
    if (t.empty() || errno != 0 || end != t.c_str() + t.size()) fail(key, "expected an integer, got '" + *v + "'");
    return out;
}

bool ConfigSection::get_bool(const std::string& key, bool fallback) const {
    auto v = find(key);
    if (!v) return fallback;
    std::string t = trim(*v);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    fail(key, "expected a boolean, got '" + *v + "'");
}

std::vector<double> ConfigSection::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
    auto v = find(key);
    if (!v) return fallback;
    std::vector<double> out;
    for (const auto& t : tokens(*v)) {
        double x = 0.0;
        if (!parse_double(t, x)) fail(key, "expected numbers, got '" + t + "'");
        out.push_back(x);
    }
    return out;
}

std::vector<BigSite> ConfigSection::get_sites(const std::string& key, const std::vector<BigSite>& fallback) const {
    auto v = find(key);
    if (!v) return fallback;
    try {
        return parse_sites(*v);
    } catch (const ConfigError& e) {
        fail(key, e.what());
    }
}

void ConfigSection::require_known(const std::set<std::string>& allowed) const {
    for (const auto& [key, val] : values_) {
        if (!allowed.count(key)) fail(key, "unknown key");
    }
}

std::vector<BigSite> parse_sites(const std::string& text) {
    const auto t = tokens(text);
    if (t.size() % 2 != 0) throw ConfigError("", "site list needs an even number of coordinates");
    std::vector<BigSite> out;
    for (std::size_t i = 0; i < t.size(); i += 2) {
        BigSite s;
        auto strip = [](std::string x) {
            x.erase(std::remove(x.begin(), x.end(), '"'), x.end());
            return x;
        };
        if (s.n1.set_str(strip(t[i]), 10) != 0 || s.n2.set_str(strip(t[i + 1]), 10) != 0) {
            throw ConfigError("", "bad site coordinate near '" + t[i] + " " + t[i + 1] + "'");
        }
        out.push_back(std::move(s));
    }
    return out;
}

const ConfigSection* Config::section(const std::string& name) const {
    auto it = sections_.find(name);
    return it == sections_.end() ? nullptr : &it->second;
}

ConfigSection& Config::section_mut(const std::string& name) {
    auto it = sections_.find(name);
    if (it == sections_.end()) it = sections_.emplace(name, ConfigSection(name)).first;
    return it->second;
}

Config parse_config(const std::string& text) {
    Config cfg;
    std::istringstream is(text);
    std::string raw;
    std::string current;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        std::string s = raw;
        if (auto pos = s.find_first_of("#;"); pos != std::string::npos) s.erase(pos);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError("", "unterminated section header", line);
            current = trim(s.substr(1, s.size() - 2));
            if (current.empty()) throw ConfigError("", "empty section name", line);
            cfg.section_mut(current);
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("", "expected key = value", line);
        const std::string key = trim(s.substr(0, eq));
        if (key.empty()) throw ConfigError("", "missing key", line);
        if (current.empty()) throw ConfigError(key, "key outside any [section]", line);
        ConfigSection& sec = cfg.section_mut(current);
        if (sec.has(key)) throw ConfigError(current + "." + key, "duplicate key", line);
        sec.set(key, trim(s.substr(eq + 1)), line);
    }
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace kambeam
