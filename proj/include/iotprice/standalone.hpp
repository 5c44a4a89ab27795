#pragma once

// Single-service market. Each of the M customers has a private valuation
// theta drawn uniformly on [0, 1] and subscribes when theta * q >= fee, so
// expected demand is M * clamp(1 - fee/q, 0, 1) and the provider's profit is
//
//     F(fee, n) = M * fee * clamp(1 - fee / q(n), 0, 1) - n * c.
//
// The first-order conditions give the closed-form interior optimum
//
//     fee* = (M a1 a3 - 4c) / (2 M a3),    n* = ln(M a2 a3 / (4c)) / a3,
//
// at which exactly half the customers subscribe (fee* = q(n*)/2). Both
// M a1 a3 > 4c and M a2 a3 > 4c are required: the first keeps fee* positive,
// the second n*. Above the cost threshold the provider buys no data and the
// best fee is q(0)/2.

#include <cmath>

#include "iotprice/quality.hpp"

namespace iotprice::standalone {

struct Market {
    double customers;  // M >= 1
    double unit_cost;  // c > 0, price per unit of training data
    QualityCurve curve;

    Market(double customers_, double unit_cost_, QualityCurve curve_)
        : customers(customers_), unit_cost(unit_cost_), curve(curve_) {
        if (!(customers >= 1.0)) throw std::domain_error("market: customers must be >= 1");
        if (!(unit_cost > 0.0)) throw std::domain_error("market: unit cost must be positive");
    }
};

inline double profit(const Market& m, double fee, double data_size) {
    if (!(fee >= 0.0)) throw std::domain_error("profit: fee must be nonnegative");
    double q = m.curve.value(data_size);  // validates data_size
    double take = q > 0.0 ? std::clamp(1.0 - fee / q, 0.0, 1.0) : 0.0;
    return m.customers * fee * take - data_size * m.unit_cost;
}

// Largest unit cost that still admits an interior optimum,
// min(M a1 a3, M a2 a3) / 4.
inline double feasibility_threshold(const Market& m) {
    const auto& c = m.curve;
    return std::min(m.customers * c.alpha1() * c.alpha3(),
                    m.customers * c.alpha2() * c.alpha3()) / 4.0;
}

struct Solution {
    double data_size;
    double fee;
    double profit;
    bool interior;  // false when the cost threshold forces n = 0
};

inline Solution optimize(const Market& m) {
    const double M = m.customers, c = m.unit_cost;
    const double a1 = m.curve.alpha1(), a2 = m.curve.alpha2(), a3 = m.curve.alpha3();
    if (M * a1 * a3 > 4.0 * c && M * a2 * a3 > 4.0 * c) {
        double n = std::log(M * a2 * a3 / (4.0 * c)) / a3;
        double fee = (M * a1 * a3 - 4.0 * c) / (2.0 * M * a3);
        return {n, fee, profit(m, fee, n), true};
    }
    double q0 = m.curve.value(0.0);
    return {0.0, q0 / 2.0, M * q0 / 4.0, false};
}

}  // namespace iotprice::standalone
