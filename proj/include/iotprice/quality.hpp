#pragma once

// Service quality model: accuracy of an ML-backed service as a saturating
// function of the training-data size n,
//
//     q(n) = alpha1 - alpha2 * exp(-alpha3 * n)
//
// alpha1 is the accuracy ceiling, alpha1 - alpha2 the accuracy with no data,
// alpha3 the learning rate. Calibration from (size, accuracy) samples uses
// variable projection: for a fixed alpha3 the model is linear in
// (alpha1, -alpha2), so those two come from a closed-form least-squares
// solve and only alpha3 needs a one-dimensional search.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "iotprice/errors.hpp"
#include "iotprice/numopt.hpp"
#include "iotprice/random.hpp"

namespace iotprice {

class QualityCurve {
public:
    // Requires 0 < alpha1 <= 1, 0 <= alpha2 <= alpha1, alpha3 > 0, so the
    // curve rises from q(0) = alpha1 - alpha2 >= 0 toward the ceiling.
    QualityCurve(double alpha1, double alpha2, double alpha3)
        : a1_(alpha1), a2_(alpha2), a3_(alpha3) {
        if (!(a1_ > 0.0 && a1_ <= 1.0)) throw std::domain_error("quality: alpha1 outside (0, 1]");
        if (!(a2_ >= 0.0 && a2_ <= a1_)) throw std::domain_error("quality: alpha2 outside [0, alpha1]");
        if (!(a3_ > 0.0)) throw std::domain_error("quality: alpha3 must be positive");
    }

    double alpha1() const { return a1_; }
    double alpha2() const { return a2_; }
    double alpha3() const { return a3_; }

    double value(double n) const {
        if (!(n >= 0.0)) throw std::domain_error("quality: data size must be nonnegative");
        return a1_ - a2_ * std::exp(-a3_ * n);
    }

    // dq/dn; positive whenever alpha2 > 0 and decaying in n.
    double marginal(double n) const {
        if (!(n >= 0.0)) throw std::domain_error("quality: data size must be nonnegative");
        return a2_ * a3_ * std::exp(-a3_ * n);
    }

private:
    double a1_, a2_, a3_;
};

struct AccuracySample {
    double n;         // data size, >= 0
    double accuracy;  // in [0, 1]
};

struct QualityFit {
    QualityCurve curve;
    double mean_sq_residual;
    // Flat data leaves alpha2/alpha3 unidentified; they are pinned to 0 and
    // the search floor and this flag is set.
    bool degenerate;
};

namespace detail {

inline constexpr double kAlpha3Floor = 1e-3;
inline constexpr double kAlpha3Ceil = 2.0;

struct LinearFit {
    double a1, a2, msr;
};

// Least squares for (alpha1, alpha2) at fixed alpha3, clamped to the
// feasible box alpha1 in (0, 1], alpha2 in [0, alpha1]. When the
// unconstrained solution leaves the box, the better of the two
// edge-restricted solves is used.
inline LinearFit linear_fit(std::span<const AccuracySample> s, double alpha3) {
    const double m = static_cast<double>(s.size());
    double se = 0.0, see = 0.0, sy = 0.0, sye = 0.0;
    for (const auto& p : s) {
        double e = std::exp(-alpha3 * p.n);
        se += e;
        see += e * e;
        sy += p.accuracy;
        sye += p.accuracy * e;
    }
    auto clamp_pair = [](double a, double b) {
        a = std::clamp(a, 1e-12, 1.0);
        b = std::clamp(b, -a, 0.0);
        return std::pair<double, double>(a, b);
    };
    auto msr_of = [&](double a, double b) {
        double msr = 0.0;
        for (const auto& p : s) {
            double r = a + b * std::exp(-alpha3 * p.n) - p.accuracy;
            msr += r * r;
        }
        return msr / m;
    };
    double det = m * see - se * se;
    double a = sy / m, b = 0.0;
    if (det > 1e-300) {
        a = (see * sy - se * sye) / det;
        b = (m * sye - se * sy) / det;
    }
    if (a > 0.0 && a <= 1.0 && b <= 0.0 && b >= -a) {
        return {a, -b, msr_of(a, b)};
    }
    // edge 1: clamp a, re-solve b given a
    auto [a1, b1] = clamp_pair(a, see > 0.0 ? (sye - std::clamp(a, 1e-12, 1.0) * se) / see : 0.0);
    // edge 2: clamp b, re-solve a given b
    double bc = std::clamp(b, -1.0, 0.0);
    auto [a2, b2] = clamp_pair((sy - bc * se) / m, bc);
    double m1 = msr_of(a1, b1), m2 = msr_of(a2, b2);
    if (m1 <= m2) return {a1, -b1, m1};
    return {a2, -b2, m2};
}

}  // namespace detail

// Calibrates a quality curve to accuracy samples. alpha3 is found by scanning
// 1000 log-spaced candidates on [1e-3, 2] and refining the best bracket with
// golden section to 1e-8; alpha1 and alpha2 then come from the closed-form
// linear solve. Throws UnderdeterminedFit when fewer than three distinct
// sizes are present.
inline QualityFit fit_quality_curve(std::span<const AccuracySample> samples) {
    for (const auto& p : samples) {
        if (!(p.n >= 0.0)) throw std::domain_error("fit: data size must be nonnegative");
        if (!(p.accuracy >= 0.0 && p.accuracy <= 1.0))
            throw std::domain_error("fit: accuracy must lie in [0, 1]");
    }
    std::set<double> distinct;
    for (const auto& p : samples) distinct.insert(p.n);
    if (distinct.size() < 3)
        throw UnderdeterminedFit("fit: need samples at three or more distinct data sizes");

    double ymin = samples[0].accuracy, ymax = samples[0].accuracy, ysum = 0.0;
    for (const auto& p : samples) {
        ymin = std::min(ymin, p.accuracy);
        ymax = std::max(ymax, p.accuracy);
        ysum += p.accuracy;
    }
    if (ymin == ymax) {
        double a1 = std::clamp(ysum / static_cast<double>(samples.size()), 1e-12, 1.0);
        return {QualityCurve(a1, 0.0, detail::kAlpha3Floor), 0.0, true};
    }

    const double llo = std::log(detail::kAlpha3Floor);
    const double lhi = std::log(detail::kAlpha3Ceil);
    constexpr int kGrid = 1000;
    int best = 0;
    double best_msr = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kGrid; ++i) {
        double a3 = std::exp(llo + (lhi - llo) * i / (kGrid - 1));
        double msr = detail::linear_fit(samples, a3).msr;
        if (msr < best_msr) {
            best_msr = msr;
            best = i;
        }
    }
    auto a3_at = [&](int i) { return std::exp(llo + (lhi - llo) * i / (kGrid - 1)); };
    double lo = a3_at(std::max(best - 1, 0));
    double hi = a3_at(std::min(best + 1, kGrid - 1));
    double a3 = numopt::golden_max(
        [&](double t) { return -detail::linear_fit(samples, t).msr; }, lo, hi, 1e-8);
    detail::LinearFit lf = detail::linear_fit(samples, a3);
    if (lf.msr > best_msr) {  // keep the grid winner if refinement did not help
        a3 = a3_at(best);
        lf = detail::linear_fit(samples, a3);
    }
    return {QualityCurve(lf.a1, lf.a2, a3), lf.msr, lf.a2 == 0.0};
}

// Draws accuracy samples q(n) + noise, clamped to [0, 1]. Deterministic in
// the seed; see Sampler for the pinned generator.
inline std::vector<AccuracySample> synthetic_samples(const QualityCurve& curve,
                                                     std::span<const double> sizes,
                                                     double noise_sd, std::uint64_t seed) {
    if (!(noise_sd >= 0.0)) throw std::domain_error("synthetic_samples: noise_sd must be >= 0");
    Sampler rng(seed);
    std::vector<AccuracySample> out;
    out.reserve(sizes.size());
    for (double n : sizes) {
        double y = curve.value(n) + (noise_sd > 0.0 ? rng.gaussian(noise_sd) : 0.0);
        out.push_back({n, std::clamp(y, 0.0, 1.0)});
    }
    return out;
}

}  // namespace iotprice
