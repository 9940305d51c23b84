#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "dynregret/errors.hpp"
#include "dynregret/learners.hpp"
#include "dynregret/scenarios.hpp"

namespace dynregret {

struct ExperimentConfig {
    std::uint64_t seed = 1;
    /// "center", "minimizer", or a comma-separated coordinate list.
    std::string x1 = "center";
    ScenarioConfig scenario;
    LearnerVariant variant = LearnerVariant::OMGD;
    std::optional<double> eta;  // nullopt = auto
    std::optional<int> inner;   // nullopt = auto
    bool warmstart = true;
    double warmstart_threshold = 0.0;
    int probes = 64;

    std::string source_text;
    std::vector<std::pair<std::string, std::string>> overrides;
};

namespace detail {

inline std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline double parse_double(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw Error(ErrorKind::ConfigError, key + ": expected a number, got '" + raw + "'");
    return v;
}

inline long long parse_integer(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw Error(ErrorKind::ConfigError, key + ": expected an integer, got '" + raw + "'");
    return v;
}

inline std::uint64_t parse_seed(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw Error(ErrorKind::ConfigError, key + ": expected an unsigned integer, got '" + raw + "'");
    return v;
}

inline bool parse_bool(const std::string& key, const std::string& raw) {
    const std::string s = lower(trim(raw));
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw Error(ErrorKind::ConfigError, key + ": expected a boolean, got '" + raw + "'");
}

inline const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"experiment", {"seed", "x1"}},
        {"scenario",
         {"kind", "T", "d", "tau", "drift", "set", "radius", "center", "lower", "upper", "curvature_min",
          "curvature_max", "vary_curvature", "batch_size", "reg", "rotation_rate", "label_noise", "feature_scale",
          "fixed_batch", "rank", "beta_samples", "bounding_radius", "barrier_quadratic"}},
        {"learner", {"variant", "eta", "K", "warmstart", "warmstart_threshold"}},
        {"report", {"probes"}},
    };
    return keys;
}

inline void check_key(const std::string& section, const std::string& key) {
    const auto& keys = known_keys();
    auto it = keys.find(section);
    if (it == keys.end()) throw Error(ErrorKind::ConfigError, "unknown section [" + section + "]");
    if (!it->second.contains(key)) throw Error(ErrorKind::ConfigError, "unknown key '" + section + "." + key + "'");
}

inline void apply_key(ExperimentConfig& cfg, const std::string& section, const std::string& key,
                      const std::string& raw) {
    check_key(section, key);
    const std::string name = section + "." + key;
    const std::string value = trim(raw);
    ScenarioConfig& sc = cfg.scenario;
    if (section == "experiment") {
        if (key == "seed") cfg.seed = parse_seed(name, value);
        else cfg.x1 = value;
    } else if (section == "scenario") {
        if (key == "kind") sc.kind = parse_scenario_kind(value);
        else if (key == "T") sc.T = static_cast<int>(parse_integer(name, value));
        else if (key == "d") sc.d = static_cast<int>(parse_integer(name, value));
        else if (key == "tau") sc.tau = parse_double(name, value);
        else if (key == "drift") sc.drift = parse_double(name, value);
        else if (key == "set") {
            const std::string s = lower(value);
            if (s == "whole" || s == "whole_space") sc.set.kind = SetSpec::Kind::WholeSpace;
            else if (s == "ball") sc.set.kind = SetSpec::Kind::Ball;
            else if (s == "box") sc.set.kind = SetSpec::Kind::Box;
            else if (s == "default") sc.set.kind = SetSpec::Kind::Default;
            else throw Error(ErrorKind::ConfigError, name + ": expected whole, ball or box");
        } else if (key == "radius") sc.set.radius = parse_double(name, value);
        else if (key == "center") sc.set.center = parse_double(name, value);
        else if (key == "lower") sc.set.lower = parse_double(name, value);
        else if (key == "upper") sc.set.upper = parse_double(name, value);
        else if (key == "curvature_min") sc.curvature_min = parse_double(name, value);
        else if (key == "curvature_max") sc.curvature_max = parse_double(name, value);
        else if (key == "vary_curvature") sc.vary_curvature = parse_bool(name, value);
        else if (key == "batch_size") sc.batch_size = static_cast<int>(parse_integer(name, value));
        else if (key == "reg") sc.reg = parse_double(name, value);
        else if (key == "rotation_rate") sc.rotation_rate = parse_double(name, value);
        else if (key == "label_noise") sc.label_noise = parse_double(name, value);
        else if (key == "feature_scale") sc.feature_scale = parse_double(name, value);
        else if (key == "fixed_batch") sc.fixed_batch = parse_bool(name, value);
        else if (key == "rank") sc.rank = static_cast<int>(parse_integer(name, value));
        else if (key == "beta_samples") sc.beta_samples = static_cast<int>(parse_integer(name, value));
        else if (key == "bounding_radius") sc.bounding_radius = parse_double(name, value);
        else if (key == "barrier_quadratic") sc.barrier_quadratic = parse_double(name, value);
    } else if (section == "learner") {
        if (key == "variant") {
            const std::string s = lower(value);
            if (s == "ogd") cfg.variant = LearnerVariant::OGD;
            else if (s == "omgd") cfg.variant = LearnerVariant::OMGD;
            else if (s == "omnu") cfg.variant = LearnerVariant::OMNU;
            else throw Error(ErrorKind::ConfigError, name + ": expected ogd, omgd or omnu");
        } else if (key == "eta") {
            if (lower(value) == "auto") cfg.eta.reset();
            else cfg.eta = parse_double(name, value);
        } else if (key == "K") {
            if (lower(value) == "auto") cfg.inner.reset();
            else cfg.inner = static_cast<int>(parse_integer(name, value));
        } else if (key == "warmstart") cfg.warmstart = parse_bool(name, value);
        else if (key == "warmstart_threshold") cfg.warmstart_threshold = parse_double(name, value);
    } else if (section == "report") {
        cfg.probes = static_cast<int>(parse_integer(name, value));
    }
}

inline std::pair<std::string, std::string> split_dotted(const std::string& dotted) {
    const auto dot = dotted.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == dotted.size())
        throw Error(ErrorKind::ConfigError, "expected section.key, got '" + dotted + "'");
    return {dotted.substr(0, dot), dotted.substr(dot + 1)};
}

inline void validate(const ExperimentConfig& cfg) {
    detail::validate(cfg.scenario);
    if (cfg.eta) require(*cfg.eta > 0, ErrorKind::ConfigError, "learner.eta must be > 0");
    if (cfg.inner) require(*cfg.inner >= 1, ErrorKind::ConfigError, "learner.K must be >= 1");
    require(cfg.probes >= 0, ErrorKind::ConfigError, "report.probes must be >= 0");
}

} // namespace detail

/// Parses the section-based key/value format:
///
///   [experiment]
///   seed = 7
///   [scenario]
///   kind = drifting_quadratic
///
/// Unknown sections or keys are rejected. `seed` is mandatory.
inline ExperimentConfig parse_config(const std::string& text) {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw Error(ErrorKind::ConfigError, std::string("malformed config: ") + e.message());
    }
    ExperimentConfig cfg;
    cfg.source_text = text;
    bool have_seed = false;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw Error(ErrorKind::ConfigError, "key '" + section + "' must live inside a section");
        for (const auto& [key, node] : body) {
            detail::apply_key(cfg, section, key, node.data());
            if (section == "experiment" && key == "seed") have_seed = true;
        }
    }
    require(have_seed, ErrorKind::ConfigError, "config must set experiment.seed");
    detail::validate(cfg);
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ConfigError, "cannot read config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

/// Applies `section.key = value` on top of a parsed config and records it
/// so the summary can echo it next to the original text.
inline void apply_override(ExperimentConfig& cfg, const std::string& dotted, const std::string& value) {
    auto [section, key] = detail::split_dotted(dotted);
    detail::apply_key(cfg, section, key, value);
    detail::validate(cfg);
    cfg.overrides.emplace_back(dotted, value);
}

/// DYNREGRET_SEED, when set, replaces the config seed.
inline void apply_seed_env(ExperimentConfig& cfg) {
    if (const char* env = std::getenv("DYNREGRET_SEED"); env && *env)
        apply_override(cfg, "experiment.seed", env);
}

} // namespace dynregret
