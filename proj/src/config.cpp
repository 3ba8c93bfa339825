#include "qmud/config.hpp"

#include "qmud/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace qmud {
namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

double parse_double(const std::string& text, const std::string& what)
{
    const std::string t = trim(text);
    if (t == "inf" || t == "+inf") {
        return std::numeric_limits<double>::infinity();
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used == t.size() && !t.empty()) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw ConfigError(what + ": '" + text + "' is not a number");
}

std::uint64_t parse_uint(const std::string& text, const std::string& what)
{
    const std::string t = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(what + ": '" + text + "' is not a non-negative integer");
    }
    return v;
}

FlatConfig FlatConfig::parse(std::istream& in, const std::string& source)
{
    FlatConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        if (trim(line).empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key");
        }
        if (cfg.has(key)) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
        cfg.values_[key] = trim(line.substr(eq + 1));
    }
    return cfg;
}

FlatConfig FlatConfig::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    return parse(in, path);
}

std::string FlatConfig::get_string(const std::string& key, const std::string& fallback) const
{
    consumed_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::uint64_t FlatConfig::get_uint(const std::string& key, std::uint64_t fallback) const
{
    consumed_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_uint(it->second, key);
}

double FlatConfig::get_double(const std::string& key, double fallback) const
{
    consumed_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_double(it->second, key);
}

std::vector<double> FlatConfig::get_double_list(const std::string& key, const std::vector<double>& fallback) const
{
    consumed_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) {
        return fallback;
    }
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_double(item, key));
    }
    if (out.empty()) {
        throw ConfigError(key + ": empty list");
    }
    return out;
}

bool FlatConfig::get_bool(const std::string& key, bool fallback) const
{
    consumed_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) {
        return fallback;
    }
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError(key + ": '" + it->second + "' is not a boolean");
}

void FlatConfig::finish() const
{
    std::string unknown;
    for (const auto& [key, value] : values_) {
        if (!consumed_.count(key)) {
            unknown += (unknown.empty() ? "" : ", ") + key;
        }
    }
    if (!unknown.empty()) {
        throw ConfigError("unknown config key(s): " + unknown);
    }
}

ScenarioParams scenario_from_config(const FlatConfig& config)
{
    ScenarioParams p;
    p.users = config.get_uint("K", p.users);
    p.chips = config.get_uint("N_c", p.chips);
    p.signature = parse_signature_kind(config.get_string("signature", to_string(p.signature)));
    p.sync = parse_sync_mode(config.get_string("sync", to_string(p.sync)));
    p.gain = parse_gain_model(config.get_string("gain", to_string(p.gain)));
    p.noise_variance = config.get_double("sigma2", p.noise_variance);
    p.seed = config.get_uint("seed", p.seed);
    validate(p);
    return p;
}

std::string scenario_to_config(const ScenarioParams& params)
{
    std::ostringstream os;
    os.precision(17);
    os << "K = " << params.users << '\n'
       << "N_c = " << params.chips << '\n'
       << "signature = " << to_string(params.signature) << '\n'
       << "sync = " << to_string(params.sync) << '\n'
       << "gain = " << to_string(params.gain) << '\n'
       << "sigma2 = " << params.noise_variance << '\n'
       << "seed = " << params.seed << '\n';
    return os.str();
}

}  // namespace qmud
