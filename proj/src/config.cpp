#include "wdro/config.hpp"

#include "wdro/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

namespace wdro {
namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string unquote(const std::string& s) {
    const std::string t = trim(s);
    if (t.size() >= 2 && ((t.front() == '"' && t.back() == '"') ||
                          (t.front() == '\'' && t.back() == '\'')))
        return t.substr(1, t.size() - 2);
    return t;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(trim(item));
    return parts;
}

bool parse_real(const std::string& text, double& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    char* end = nullptr;
    errno = 0;
    out = std::strtod(t.c_str(), &end);
    return errno == 0 && end == t.c_str() + t.size() && std::isfinite(out);
}

}  // namespace

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    v.back() = hi;
    return v;
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > 0.0)) throw DomainError("logspace: endpoints must be positive");
    std::vector<double> v = linspace(std::log(lo), std::log(hi), n);
    for (double& x : v) x = std::exp(x);
    v.front() = lo;
    v.back() = hi;
    return v;
}

ConfigBlock::ConfigBlock(std::string name, std::map<std::string, std::string> entries)
    : name_(std::move(name)), entries_(std::move(entries)) {}

bool ConfigBlock::has(const std::string& key) const { return entries_.count(key) != 0; }

std::string ConfigBlock::qualified(const std::string& key) const {
    return name_.empty() ? key : name_ + "." + key;
}

const std::string& ConfigBlock::raw(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(qualified(key), "missing required key");
    return it->second;
}

std::string ConfigBlock::get_string(const std::string& key) const { return unquote(raw(key)); }

std::string ConfigBlock::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

double ConfigBlock::get_double(const std::string& key) const {
    double v = 0.0;
    if (!parse_real(unquote(raw(key)), v))
        throw ConfigError(qualified(key), "expected a finite real, got '" + raw(key) + "'");
    return v;
}

double ConfigBlock::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long ConfigBlock::get_int(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    const double v = get_double(key);
    if (v != std::floor(v) || std::abs(v) > 9.0e15)
        throw ConfigError(qualified(key), "expected an integer, got '" + raw(key) + "'");
    return static_cast<long>(v);
}

bool ConfigBlock::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get_string(key);
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    throw ConfigError(qualified(key), "expected a boolean, got '" + v + "'");
}

std::vector<double> ConfigBlock::get_grid(const std::string& key) const {
    const std::string text = unquote(raw(key));
    static const std::regex spaced(R"(^\s*(linspace|logspace)\s*\(([^,]+),([^,]+),([^,\)]+)\)\s*$)");
    std::smatch m;
    if (std::regex_match(text, m, spaced)) {
        double lo = 0.0, hi = 0.0, n = 0.0;
        if (!parse_real(m[2], lo) || !parse_real(m[3], hi) || !parse_real(m[4], n) || n < 1 ||
            n != std::floor(n))
            throw ConfigError(qualified(key), "malformed grid '" + text + "'");
        if (m[1] == "logspace") {
            if (!(lo > 0.0 && hi > 0.0))
                throw ConfigError(qualified(key), "logspace endpoints must be positive");
            return logspace(lo, hi, static_cast<std::size_t>(n));
        }
        return linspace(lo, hi, static_cast<std::size_t>(n));
    }
    std::vector<double> values;
    for (const std::string& part : split(text, ',')) {
        double v = 0.0;
        if (!parse_real(part, v))
            throw ConfigError(qualified(key), "expected a list of finite reals, got '" + text + "'");
        values.push_back(v);
    }
    if (values.empty()) throw ConfigError(qualified(key), "empty grid");
    return values;
}

std::vector<double> ConfigBlock::get_grid(const std::string& key,
                                          const std::vector<double>& fallback) const {
    return has(key) ? get_grid(key) : fallback;
}

std::vector<std::pair<double, double>> ConfigBlock::get_pairs(const std::string& key) const {
    const std::string text = unquote(raw(key));
    std::vector<std::pair<double, double>> out;
    for (const std::string& part : split(text, ',')) {
        const auto fields = split(part, ':');
        double a = 0.0, b = 0.0;
        if (fields.size() != 2 || !parse_real(fields[0], a) || !parse_real(fields[1], b))
            throw ConfigError(qualified(key), "expected 'value:value' pairs, got '" + text + "'");
        out.emplace_back(a, b);
    }
    if (out.empty()) throw ConfigError(qualified(key), "empty list");
    return out;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), "cannot open config file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

RunConfig RunConfig::parse(const std::string& text) {
    // The INI reader only understands whole-line ';' comments; strip inline
    // ';' and '#' comments here.
    std::stringstream cleaned;
    std::stringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto mark = line.find_first_of(";#");
        if (mark != std::string::npos) line.erase(mark);
        cleaned << line << '\n';
    }

    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(cleaned, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("config", std::string("parse error: ") + e.message() + " at line " +
                                        std::to_string(e.line()));
    }

    RunConfig config;
    for (const auto& [section, children] : tree) {
        if (children.empty() && !children.data().empty())
            throw ConfigError(section, "top-level keys must live inside a [section]");
        std::map<std::string, std::string> entries;
        for (const auto& [key, value] : children) entries[key] = value.data();
        config.blocks_[section] = ConfigBlock(section, std::move(entries));
    }
    return config;
}

bool RunConfig::has_block(const std::string& name) const { return blocks_.count(name) != 0; }

const ConfigBlock& RunConfig::block(const std::string& name) const {
    auto it = blocks_.find(name);
    if (it == blocks_.end()) throw ConfigError(name, "missing required section");
    return it->second;
}

ConfigBlock RunConfig::block_or_empty(const std::string& name) const {
    auto it = blocks_.find(name);
    return it == blocks_.end() ? ConfigBlock(name, {}) : it->second;
}

}  // namespace wdro
