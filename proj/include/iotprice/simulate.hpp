#pragma once

// Monte Carlo validation of the analytic take rates: draw customer
// valuations, count subscriptions, report the binomial standard error.
// Estimates are deterministic in the seed (see Sampler).

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "iotprice/random.hpp"

namespace iotprice::mc {

struct Config {
    long long samples;  // >= 1
    std::uint64_t seed;
};

struct Estimate {
    double mean;       // subscription frequency
    double std_error;  // sqrt(p (1-p) / samples)
};

namespace detail {

inline Estimate finish(long long hits, long long samples) {
    double p = static_cast<double>(hits) / static_cast<double>(samples);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

inline void check(const Config& cfg) {
    if (cfg.samples < 1) throw std::domain_error("simulate: need at least one sample");
}

}  // namespace detail

// Fraction of customers with theta * quality >= fee, theta ~ U[0,1).
inline Estimate standalone_demand(double quality, double fee, const Config& cfg) {
    detail::check(cfg);
    if (!(quality > 0.0)) throw std::domain_error("simulate: quality must be positive");
    if (!(fee >= 0.0)) throw std::domain_error("simulate: fee must be nonnegative");
    Sampler rng(cfg.seed);
    long long hits = 0;
    for (long long i = 0; i < cfg.samples; ++i)
        if (rng.uniform01() * quality >= fee) ++hits;
    return detail::finish(hits, cfg.samples);
}

// Fraction with theta1 q1 + theta2 q2 >= bundle fee; theta1 is drawn before
// theta2 for every sample, so streams are reproducible.
inline Estimate bundle_demand(double q1, double q2, double bundle_fee, const Config& cfg) {
    detail::check(cfg);
    if (!(q1 > 0.0 && q2 > 0.0)) throw std::domain_error("simulate: qualities must be positive");
    if (!(bundle_fee >= 0.0)) throw std::domain_error("simulate: fee must be nonnegative");
    Sampler rng(cfg.seed);
    long long hits = 0;
    for (long long i = 0; i < cfg.samples; ++i) {
        double t1 = rng.uniform01();
        double t2 = rng.uniform01();
        if (t1 * q1 + t2 * q2 >= bundle_fee) ++hits;
    }
    return detail::finish(hits, cfg.samples);
}

}  // namespace iotprice::mc
