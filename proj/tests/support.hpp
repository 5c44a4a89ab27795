#pragma once

// Shared test helpers: seeded random market generators and brute-force
// oracles the closed-form/KKT solvers are checked against.

#include <algorithm>
#include <cmath>
#include <span>

#include "iotprice/bundle.hpp"
#include "iotprice/numopt.hpp"
#include "iotprice/quality.hpp"
#include "iotprice/random.hpp"
#include "iotprice/standalone.hpp"

namespace testsupport {

inline iotprice::QualityCurve random_curve(iotprice::Sampler& rng) {
    double a1 = rng.uniform(0.55, 0.95);
    double a2 = rng.uniform(0.15, 0.85) * a1;
    double a3 = rng.uniform(0.05, 0.35);
    return {a1, a2, a3};
}

// Market whose cost sits strictly below the feasibility threshold, so the
// closed-form optimum is interior.
inline iotprice::standalone::Market random_interior_standalone(iotprice::Sampler& rng) {
    double M = rng.uniform(20.0, 150.0);
    iotprice::QualityCurve c = random_curve(rng);
    double thr = M * std::min(c.alpha1(), c.alpha2()) * c.alpha3() / 4.0;
    return {M, rng.uniform(0.15, 0.7) * thr, c};
}

// Bundle market with costs on the scale of the per-service thresholds; the
// optimum may be interior or press against a data-size bound.
inline iotprice::bundle::Market random_bundle(iotprice::Sampler& rng) {
    double M = rng.uniform(20.0, 150.0);
    iotprice::QualityCurve c1 = random_curve(rng);
    iotprice::QualityCurve c2 = random_curve(rng);
    double t1 = M * c1.alpha2() * c1.alpha3() / 4.0;
    double t2 = M * c2.alpha2() * c2.alpha3() / 4.0;
    return {M, rng.uniform(0.1, 0.8) * t1, c1, rng.uniform(0.1, 0.8) * t2, c2};
}

// Dense-grid-plus-polish maximization of the standalone profit over
// (fee, data size).
inline iotprice::numopt::MaxResult standalone_oracle(const iotprice::standalone::Market& m,
                                                     int points = 400) {
    iotprice::numopt::GridDim dims[] = {{0.0, m.curve.value(200.0), points},
                                        {0.0, 200.0, points}};
    return iotprice::numopt::grid_polish_max(
        [&](std::span<const double> x) { return iotprice::standalone::profit(m, x[0], x[1]); },
        dims);
}

// Same for the bundle profit over (fee, n1, n2).
inline iotprice::numopt::MaxResult bundle_oracle(const iotprice::bundle::Market& m,
                                                 int points = 120) {
    double pbmax = m.curve1.alpha1() + m.curve2.alpha1();
    iotprice::numopt::GridDim dims[] = {{0.0, pbmax, points},
                                        {0.0, 200.0, points},
                                        {0.0, 200.0, points}};
    return iotprice::numopt::grid_polish_max(
        [&](std::span<const double> x) { return iotprice::bundle::profit(m, x[0], x[1], x[2]); },
        dims);
}

}  // namespace testsupport
