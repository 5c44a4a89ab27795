#pragma once

// Parameter sweeps over a market config: one independent optimization per
// grid point, rows emitted in ascending parameter order. Column sets are
// fixed per market shape so downstream plotting never guesses.

#include <ostream>
#include <string>

#include "iotprice/bundle.hpp"
#include "iotprice/coalition.hpp"
#include "iotprice/config.hpp"
#include "iotprice/csv.hpp"
#include "iotprice/errors.hpp"
#include "iotprice/standalone.hpp"

namespace iotprice::sweep {

inline constexpr const char* kStandaloneHeader = "value,n_star,ps_star,profit,interior";
inline constexpr const char* kBundleHeader =
    "value,case,pb_star,n1_star,n2_star,profit,profit1,profit2,shapley1,shapley2";

namespace detail {

inline double point(const config::SweepConfig& sc, long long i) {
    if (sc.steps == 1) return sc.lo;
    return sc.lo + (sc.hi - sc.lo) * static_cast<double>(i) /
                       static_cast<double>(sc.steps - 1);
}

inline config::MarketConfig with_value(config::MarketConfig cfg, const std::string& p,
                                       double v) {
    if (p == "M") {
        cfg.customers = v;
    } else if (p == "c" || p == "c1") {
        cfg.services[0].cost = v;
    } else if (p == "c2") {
        cfg.services[1].cost = v;
    } else if (p == "alpha3" || p == "alpha31") {
        auto& s = cfg.services[0];
        s.curve = QualityCurve(s.curve.alpha1(), s.curve.alpha2(), v);
    } else {
        throw ConfigError("unknown sweep parameter '" + p + "'");
    }
    return cfg;
}

}  // namespace detail

inline standalone::Market standalone_market(const config::MarketConfig& cfg) {
    return {cfg.customers, cfg.services[0].cost, cfg.services[0].curve};
}

inline bundle::Market bundle_market(const config::MarketConfig& cfg) {
    return {cfg.customers, cfg.services[0].cost, cfg.services[0].curve,
            cfg.services[1].cost, cfg.services[1].curve};
}

inline void run_sweep(const config::MarketConfig& cfg, std::ostream& out) {
    if (!cfg.sweep) throw ConfigError("config has no [sweep] section");
    const auto& sc = *cfg.sweep;
    using csv::format_number;
    if (cfg.services.size() == 1) {
        out << kStandaloneHeader << '\n';
        for (long long i = 0; i < sc.steps; ++i) {
            double v = detail::point(sc, i);
            auto s = standalone::optimize(
                standalone_market(detail::with_value(cfg, sc.parameter, v)));
            out << format_number(v) << ',' << format_number(s.data_size) << ','
                << format_number(s.fee) << ',' << format_number(s.profit) << ','
                << (s.interior ? 1 : 0) << '\n';
        }
        return;
    }
    out << kBundleHeader << '\n';
    for (long long i = 0; i < sc.steps; ++i) {
        double v = detail::point(sc, i);
        auto at = detail::with_value(cfg, sc.parameter, v);
        auto b = bundle::optimize(bundle_market(at));
        double p1 = standalone::optimize({at.customers, at.services[0].cost,
                                          at.services[0].curve}).profit;
        double p2 = standalone::optimize({at.customers, at.services[1].cost,
                                          at.services[1].curve}).profit;
        auto phi = coalition::shapley(coalition::build_game(p1, p2, b.profit));
        out << format_number(v) << ',' << b.case_id << ',' << format_number(b.pb) << ','
            << format_number(b.n1) << ',' << format_number(b.n2) << ','
            << format_number(b.profit) << ',' << format_number(p1) << ','
            << format_number(p2) << ',' << format_number(phi[0]) << ','
            << format_number(phi[1]) << '\n';
    }
}

}  // namespace iotprice::sweep
