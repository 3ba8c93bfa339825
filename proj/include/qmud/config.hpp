#pragma once

// Flat structured-text configuration:
//
//   # comment
//   K = 4
//   signature = random_bipolar
//   ebn0_db = 0, 2, 4
//
// One key per line, '=' separated, values trimmed. Unknown keys are errors
// once a reader calls finish().

#include "qmud/cdma.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace qmud {

class FlatConfig {
public:
    static FlatConfig parse(std::istream& in, const std::string& source = "<config>");
    static FlatConfig load(const std::string& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& values() const noexcept { return values_; }

    // Typed accessors; each marks the key as known.
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::vector<double> get_double_list(const std::string& key, const std::vector<double>& fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    // Throws ConfigError naming every key that no accessor asked for.
    void finish() const;

private:
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> consumed_;
};

// Keys: K, N_c, signature, sync, gain, sigma2, seed.
ScenarioParams scenario_from_config(const FlatConfig& config);
std::string scenario_to_config(const ScenarioParams& params);

double parse_double(const std::string& text, const std::string& what);
std::uint64_t parse_uint(const std::string& text, const std::string& what);

}  // namespace qmud
