#pragma once

// Market description files: flat key = value text with one level of
// sections. The global area sets M (and an optional simulation fee), each
// [service] section gives a data cost plus either quality parameters or a
// samples CSV to fit, and an optional [sweep] section picks a parameter
// range. Grammar:
//
//   M = 50
//   fee = 0.3            # optional, used by demand simulation
//
//   [service]
//   c = 0.1
//   alpha1 = 0.884       # either all three alphas...
//   alpha2 = 0.59
//   alpha3 = 0.114
//
//   [service]
//   c = 0.05
//   samples = s2.csv     # ...or a CSV of (n, accuracy) rows to fit
//
//   [sweep]
//   parameter = c1       # c | M | alpha3 (one service); c1 | c2 | M | alpha31 (two)
//   lo = 0.02
//   hi = 0.9
//   steps = 45
//
// '#' starts a comment. Paths are resolved relative to the config file.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "iotprice/csv.hpp"
#include "iotprice/errors.hpp"
#include "iotprice/quality.hpp"

namespace iotprice::config {

struct ServiceConfig {
    double cost;
    QualityCurve curve;
    bool fitted;               // curve came from a samples file
    double mean_sq_residual;   // fit diagnostics, zero when not fitted
    bool degenerate;
};

struct SweepConfig {
    std::string parameter;
    double lo, hi;
    long long steps;
};

struct MarketConfig {
    double customers;
    std::optional<double> fee;  // demand-simulation override
    std::vector<ServiceConfig> services;
    std::optional<SweepConfig> sweep;
};

namespace detail {

struct RawService {
    std::optional<double> c, a1, a2, a3;
    std::optional<std::string> samples;
    std::size_t line = 0;
};

struct RawSweep {
    std::optional<std::string> parameter;
    std::optional<double> lo, hi;
    std::optional<long long> steps;
};

inline double parse_config_number(const std::string& value, std::size_t lineno) {
    char* end = nullptr;
    double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size())
        throw ConfigError("line " + std::to_string(lineno) + ": not a number: '" + value + "'");
    return v;
}

}  // namespace detail

inline MarketConfig load_config(std::istream& in, const std::filesystem::path& base_dir) {
    std::optional<double> customers, fee;
    std::vector<detail::RawService> services;
    std::optional<detail::RawSweep> sweep;
    enum class Section { global, service, sweep } section = Section::global;

    std::string line;
    std::size_t lineno = 0;
    auto err = [&](const std::string& msg) {
        return ConfigError("line " + std::to_string(lineno) + ": " + msg);
    };
    auto set = [&](auto& slot, auto value, const std::string& key) {
        if (slot) throw err("duplicate key '" + key + "'");
        slot = value;
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::string t = csv::detail::trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw err("unterminated section header");
            std::string name = csv::detail::trim(t.substr(1, t.size() - 2));
            if (name == "service") {
                services.emplace_back().line = lineno;
                section = Section::service;
            } else if (name == "sweep") {
                if (sweep) throw err("duplicate [sweep] section");
                sweep.emplace();
                section = Section::sweep;
            } else {
                throw err("unknown section [" + name + "]");
            }
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos) throw err("expected key = value");
        std::string key = csv::detail::trim(t.substr(0, eq));
        std::string value = csv::detail::trim(t.substr(eq + 1));
        if (key.empty()) throw err("empty key");
        if (value.empty()) throw err("empty value for '" + key + "'");

        switch (section) {
            case Section::global:
                if (key == "M") set(customers, detail::parse_config_number(value, lineno), key);
                else if (key == "fee") set(fee, detail::parse_config_number(value, lineno), key);
                else throw err("unknown key '" + key + "'");
                break;
            case Section::service: {
                auto& s = services.back();
                if (key == "c") set(s.c, detail::parse_config_number(value, lineno), key);
                else if (key == "alpha1") set(s.a1, detail::parse_config_number(value, lineno), key);
                else if (key == "alpha2") set(s.a2, detail::parse_config_number(value, lineno), key);
                else if (key == "alpha3") set(s.a3, detail::parse_config_number(value, lineno), key);
                else if (key == "samples") set(s.samples, value, key);
                else throw err("unknown service key '" + key + "'");
                break;
            }
            case Section::sweep: {
                if (key == "parameter") set(sweep->parameter, value, key);
                else if (key == "lo") set(sweep->lo, detail::parse_config_number(value, lineno), key);
                else if (key == "hi") set(sweep->hi, detail::parse_config_number(value, lineno), key);
                else if (key == "steps") {
                    double v = detail::parse_config_number(value, lineno);
                    auto n = static_cast<long long>(v);
                    if (static_cast<double>(n) != v) throw err("steps must be an integer");
                    set(sweep->steps, n, key);
                } else {
                    throw err("unknown sweep key '" + key + "'");
                }
                break;
            }
        }
    }

    if (!customers) throw ConfigError("missing global key M");
    if (!(*customers >= 1.0)) throw ConfigError("M must be at least 1");
    if (fee && !(*fee >= 0.0)) throw ConfigError("fee must be nonnegative");
    if (services.empty()) throw ConfigError("config needs a [service] section");
    if (services.size() > 2) throw ConfigError("at most two [service] sections supported");

    MarketConfig cfg{*customers, fee, {}, std::nullopt};
    for (const auto& raw : services) {
        std::string where = "service at line " + std::to_string(raw.line);
        if (!raw.c) throw ConfigError(where + ": missing c");
        if (!(*raw.c > 0.0)) throw ConfigError(where + ": c must be positive");
        bool has_alpha = raw.a1 || raw.a2 || raw.a3;
        if (raw.samples && has_alpha)
            throw ConfigError(where + ": give alpha1..alpha3 or samples, not both");
        if (raw.samples) {
            std::filesystem::path path(*raw.samples);
            if (path.is_relative()) path = base_dir / path;
            std::ifstream f(path);
            if (!f) throw ConfigError(where + ": cannot open samples file '" + path.string() + "'");
            try {
                QualityFit fit = fit_quality_curve(csv::read_samples(f));
                cfg.services.push_back(
                    {*raw.c, fit.curve, true, fit.mean_sq_residual, fit.degenerate});
            } catch (const ParseError& e) {
                throw ConfigError(where + ": " + path.string() + ": " + e.what());
            }
        } else {
            if (!(raw.a1 && raw.a2 && raw.a3))
                throw ConfigError(where + ": need alpha1, alpha2, alpha3 or a samples file");
            try {
                cfg.services.push_back({*raw.c, QualityCurve(*raw.a1, *raw.a2, *raw.a3),
                                        false, 0.0, false});
            } catch (const std::domain_error& e) {
                throw ConfigError(where + ": " + e.what());
            }
        }
    }

    if (sweep) {
        if (!sweep->parameter) throw ConfigError("[sweep]: missing parameter");
        if (!sweep->lo || !sweep->hi) throw ConfigError("[sweep]: missing lo or hi");
        if (!sweep->steps) throw ConfigError("[sweep]: missing steps");
        const std::string& p = *sweep->parameter;
        bool two = cfg.services.size() == 2;
        bool known = p == "M" || (two ? (p == "c1" || p == "c2" || p == "alpha31")
                                      : (p == "c" || p == "alpha3"));
        if (!known)
            throw ConfigError("[sweep]: parameter '" + p + "' not valid for a " +
                              (two ? "two" : "one") + "-service config");
        if (*sweep->steps < 1) throw ConfigError("[sweep]: steps must be at least 1");
        if (!(*sweep->lo <= *sweep->hi)) throw ConfigError("[sweep]: lo must not exceed hi");
        double floor = p == "M" ? 1.0 : 0.0;
        if (!(*sweep->lo > floor) && !(p == "M" && *sweep->lo == 1.0))
            throw ConfigError("[sweep]: lo out of range for parameter '" + p + "'");
        cfg.sweep = SweepConfig{p, *sweep->lo, *sweep->hi, *sweep->steps};
    }
    return cfg;
}

inline MarketConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path.string() + "'");
    return load_config(f, path.parent_path());
}

}  // namespace iotprice::config
