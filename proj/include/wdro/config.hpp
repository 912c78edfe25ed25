#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace wdro {

/// One `[section]` of a run configuration: string-valued keys with typed,
/// validating accessors. Errors name the offending `section.key`.
class ConfigBlock {
public:
    ConfigBlock() = default;
    ConfigBlock(std::string name, std::map<std::string, std::string> entries);

    const std::string& name() const noexcept { return name_; }
    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    /// Either a comma-separated list of reals or `linspace(a, b, n)` /
    /// `logspace(a, b, n)` with inclusive endpoints `a` and `b`.
    std::vector<double> get_grid(const std::string& key) const;
    std::vector<double> get_grid(const std::string& key, const std::vector<double>& fallback) const;

    /// Comma-separated `first:second` pairs, e.g. `0.05:0.5, 1.05:0.5`.
    std::vector<std::pair<double, double>> get_pairs(const std::string& key) const;

    void set(const std::string& key, const std::string& value) { entries_[key] = value; }

private:
    std::string qualified(const std::string& key) const;
    const std::string& raw(const std::string& key) const;

    std::string name_;
    std::map<std::string, std::string> entries_;
};

/// INI-style configuration: `[section]` headers followed by `key = value`
/// lines; `;` and `#` start comments.
class RunConfig {
public:
    static RunConfig load(const std::filesystem::path& path);
    static RunConfig parse(const std::string& text);

    bool has_block(const std::string& name) const;
    const ConfigBlock& block(const std::string& name) const;
    /// Empty block when the section is absent.
    ConfigBlock block_or_empty(const std::string& name) const;

private:
    std::map<std::string, ConfigBlock> blocks_;
};

std::vector<double> linspace(double lo, double hi, std::size_t n);
std::vector<double> logspace(double lo, double hi, std::size_t n);

}  // namespace wdro
