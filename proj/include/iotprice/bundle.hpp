#pragma once

// Two-service bundle market. Customers hold independent valuations theta1,
// theta2 ~ U[0,1] and buy the bundle when theta1 q1 + theta2 q2 >= pb, so the
// take rate is the area of the unit square above a line. That area has four
// regimes depending on where the line q1 t1 + q2 t2 = pb cuts the square:
//
//   case 1, pb <= min(q1, q2):        P = 1 - pb^2 / (2 q1 q2)
//   case 2, q2 <= pb <= q1:           P = 1 - (2 pb - q2) / (2 q1)
//   case 3, q1 <= pb <= q2:           P = 1 - (2 pb - q1) / (2 q2)
//   case 4, max(q1,q2) <= pb <= q1+q2: P = (q1 + q2 - pb)^2 / (2 q1 q2)
//
// and P = 0 beyond q1 + q2. P is continuous and nonincreasing in pb. The
// provider maximizes F = M pb P(q1(n1), q2(n2), pb) - n1 c1 - n2 c2.
//
// In case 1 the stationarity conditions collapse nicely: dF/dpb = 0 gives
// pb^2 = (2/3) q1 q2, and dF/dn_i = 0 gives (M pb / 3) q_i'/q_i = c_i, which
// pins the exponential term of each curve as a function of pb alone.
// Substituting back leaves one scalar equation in pb that is bracketed and
// bisected; note the take rate at any such point is exactly 2/3. The other
// cases lack usable closed forms and are solved as box-constrained searches
// over their regions.
//
// An algebraic shortcut for the case-1 optimum that is sometimes quoted
// (closed_form_case1 below) does not satisfy the stationarity system; it is
// kept only so closed_form_gap can report how far off it is.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "iotprice/numopt.hpp"
#include "iotprice/quality.hpp"

namespace iotprice::bundle {

// Search bound on the data size of either service.
inline constexpr double kMaxDataSize = 200.0;

struct Market {
    double customers;        // M >= 1
    double cost1, cost2;     // per-unit data prices, > 0
    QualityCurve curve1, curve2;

    Market(double customers_, double cost1_, QualityCurve curve1_,
           double cost2_, QualityCurve curve2_)
        : customers(customers_), cost1(cost1_), cost2(cost2_),
          curve1(curve1_), curve2(curve2_) {
        if (!(customers >= 1.0)) throw std::domain_error("market: customers must be >= 1");
        if (!(cost1 > 0.0 && cost2 > 0.0))
            throw std::domain_error("market: unit costs must be positive");
    }
};

// Which take-rate regime a bundle fee falls in; 0 when pb > q1 + q2 (no
// customer can value the bundle that highly).
inline int demand_case(double q1, double q2, double pb) {
    if (!(q1 > 0.0 && q2 > 0.0)) throw std::domain_error("demand: qualities must be positive");
    if (!(pb >= 0.0)) throw std::domain_error("demand: fee must be nonnegative");
    if (pb <= q1 && pb <= q2) return 1;
    if (pb <= q1) return 2;
    if (pb <= q2) return 3;
    if (pb <= q1 + q2) return 4;
    return 0;
}

namespace detail {

// Per-case take-rate formula without region checks or clamping; smooth, so
// usable for derivative probes slightly outside the region.
inline double take_rate_raw(int k, double q1, double q2, double pb) {
    switch (k) {
        case 1: return 1.0 - pb * pb / (2.0 * q1 * q2);
        case 2: return 1.0 - (2.0 * pb - q2) / (2.0 * q1);
        case 3: return 1.0 - (2.0 * pb - q1) / (2.0 * q2);
        case 4: {
            double w = q1 + q2 - pb;
            return w * w / (2.0 * q1 * q2);
        }
        default: return 0.0;
    }
}

}  // namespace detail

inline double demand_probability(double q1, double q2, double pb) {
    int k = demand_case(q1, q2, pb);
    if (k == 0) return 0.0;
    return std::clamp(detail::take_rate_raw(k, q1, q2, pb), 0.0, 1.0);
}

inline double profit(const Market& m, double pb, double n1, double n2) {
    if (!(pb >= 0.0)) throw std::domain_error("profit: fee must be nonnegative");
    double q1 = m.curve1.value(n1);
    double q2 = m.curve2.value(n2);
    double take = (q1 > 0.0 && q2 > 0.0) ? demand_probability(q1, q2, pb) : 0.0;
    return m.customers * pb * take - n1 * m.cost1 - n2 * m.cost2;
}

enum class CaseStatus {
    optimal,           // restricted maximum inside the case's own region
    on_case_boundary,  // restricted maximum pressed against a fee bound shared
                       // with an adjacent case; the true optimum lives next door
    infeasible,        // region empty or no interior stationary point
};

struct Solution {
    int case_id;
    double pb, n1, n2;
    double profit;
    double kkt_residual;  // max-norm of the projected first-order conditions
    CaseStatus status;
};

namespace detail {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline Solution infeasible(int k) {
    return {k, kNaN, kNaN, kNaN, kNaN, kNaN, CaseStatus::infeasible};
}

struct Interval {
    double lo, hi;
    bool ok;
};

// Feasible fee interval of case k at fixed qualities.
inline Interval pb_interval(int k, double q1, double q2) {
    switch (k) {
        case 1: {
            double hi = std::min(q1, q2);
            return {0.0, hi, hi >= 0.0};
        }
        case 2: return {q2, q1, q2 <= q1};
        case 3: return {q1, q2, q1 <= q2};
        default: {
            double lo = std::max(q1, q2);
            return {lo, q1 + q2, true};
        }
    }
}

// Solutions of q(n) >= t (ge) or q(n) <= t (le) for n in [0, kMaxDataSize].
inline Interval n_where_q_ge(const QualityCurve& c, double t) {
    double q0 = c.value(0.0), qN = c.value(kMaxDataSize);
    if (q0 >= t) return {0.0, kMaxDataSize, true};
    if (qN < t) return {0.0, 0.0, false};
    double n = -std::log((c.alpha1() - t) / c.alpha2()) / c.alpha3();
    return {std::clamp(n, 0.0, kMaxDataSize), kMaxDataSize, true};
}

inline Interval n_where_q_le(const QualityCurve& c, double t) {
    double q0 = c.value(0.0), qN = c.value(kMaxDataSize);
    if (qN <= t) return {0.0, kMaxDataSize, true};
    if (q0 > t) return {0.0, 0.0, false};
    double n = -std::log((c.alpha1() - t) / c.alpha2()) / c.alpha3();
    return {0.0, std::clamp(n, 0.0, kMaxDataSize), true};
}

inline Interval intersect(Interval a, Interval b) {
    if (!a.ok || !b.ok) return {0.0, 0.0, false};
    double lo = std::max(a.lo, b.lo), hi = std::min(a.hi, b.hi);
    return {lo, hi, lo <= hi};
}

// Feasible n-interval for the service being varied, the other held fixed.
// other_q is the fixed service's quality.
inline Interval n_interval(int k, bool first, const QualityCurve& c, double pb, double other_q) {
    switch (k) {
        case 1: return n_where_q_ge(c, pb);
        case 2: return first ? n_where_q_ge(c, pb) : n_where_q_le(c, pb);
        case 3: return first ? n_where_q_le(c, pb) : n_where_q_ge(c, pb);
        default: return intersect(n_where_q_le(c, pb), n_where_q_ge(c, pb - other_q));
    }
}

inline double objective(const Market& m, int k, double pb, double n1, double n2) {
    double q1 = m.curve1.value(n1), q2 = m.curve2.value(n2);
    double take = std::clamp(take_rate_raw(k, q1, q2, pb), 0.0, 1.0);
    return m.customers * pb * take - n1 * m.cost1 - n2 * m.cost2;
}

// Same expression without the clamp, extended smoothly for derivative probes
// a step outside the region (data sizes may go slightly negative).
inline double objective_raw(const Market& m, int k, double pb, double n1, double n2) {
    double q1 = m.curve1.alpha1() - m.curve1.alpha2() * std::exp(-m.curve1.alpha3() * n1);
    double q2 = m.curve2.alpha1() - m.curve2.alpha2() * std::exp(-m.curve2.alpha3() * n2);
    return m.customers * pb * take_rate_raw(k, q1, q2, pb) - n1 * m.cost1 - n2 * m.cost2;
}

// Restricted maximization of one case: dense scan of the region (the fee
// axis is sampled inside the per-cell feasible interval, so thin regions are
// never missed), then projected coordinate ascent with golden-section line
// searches on the exact feasible intervals.
inline Solution solve_region(const Market& m, int k) {
    constexpr int G = 64;  // data-size grid per service
    constexpr int K = 16;  // fee samples per feasible interval
    const double N = kMaxDataSize;

    std::vector<double> q1g(G), q2g(G);
    for (int i = 0; i < G; ++i) {
        double n = N * i / (G - 1);
        q1g[i] = m.curve1.value(n);
        q2g[i] = m.curve2.value(n);
    }

    double bx[3] = {0, 0, 0};
    double bv = -std::numeric_limits<double>::infinity();
    bool found = false;
    for (int i1 = 0; i1 < G; ++i1) {
        double n1 = N * i1 / (G - 1);
        for (int i2 = 0; i2 < G; ++i2) {
            double n2 = N * i2 / (G - 1);
            Interval pbiv = pb_interval(k, q1g[i1], q2g[i2]);
            if (!pbiv.ok) continue;
            int kk = pbiv.hi > pbiv.lo ? K : 1;
            for (int j = 0; j < kk; ++j) {
                double pb = kk == 1 ? pbiv.lo
                                    : pbiv.lo + (pbiv.hi - pbiv.lo) * j / (K - 1);
                double v = objective(m, k, pb, n1, n2);
                if (!found || v > bv) {
                    bv = v;
                    bx[0] = pb; bx[1] = n1; bx[2] = n2;
                    found = true;
                }
            }
        }
    }
    if (!found) return infeasible(k);

    double pb = bx[0], n1 = bx[1], n2 = bx[2];
    for (int pass = 0; pass < 300; ++pass) {
        double moved = 0.0;
        Interval iv = pb_interval(k, m.curve1.value(n1), m.curve2.value(n2));
        if (iv.ok && iv.hi > iv.lo) {
            double t = numopt::golden_max(
                [&](double p) { return objective(m, k, p, n1, n2); }, iv.lo, iv.hi, 1e-10);
            if (objective(m, k, t, n1, n2) > bv) {
                bv = objective(m, k, t, n1, n2);
                moved = std::max(moved, std::abs(t - pb));
                pb = t;
            }
        }
        iv = intersect(n_interval(k, true, m.curve1, pb, m.curve2.value(n2)),
                       {0.0, N, true});
        if (iv.ok && iv.hi > iv.lo) {
            double t = numopt::golden_max(
                [&](double n) { return objective(m, k, pb, n, n2); }, iv.lo, iv.hi, 1e-10);
            if (objective(m, k, pb, t, n2) > bv) {
                bv = objective(m, k, pb, t, n2);
                moved = std::max(moved, std::abs(t - n1));
                n1 = t;
            }
        }
        iv = intersect(n_interval(k, false, m.curve2, pb, m.curve1.value(n1)),
                       {0.0, N, true});
        if (iv.ok && iv.hi > iv.lo) {
            double t = numopt::golden_max(
                [&](double n) { return objective(m, k, pb, n1, n); }, iv.lo, iv.hi, 1e-10);
            if (objective(m, k, pb, n1, t) > bv) {
                bv = objective(m, k, pb, n1, t);
                moved = std::max(moved, std::abs(t - n2));
                n2 = t;
            }
        }
        if (moved < 1e-11) break;
    }

    // Golden section locates a slice optimum only to sqrt(ulp) in position
    // (the objective is flat to machine precision over that span), which on
    // a high-curvature coordinate leaves an O(1e-6) gradient. Clamped
    // coordinate Newton corrections on the smooth objective recover position
    // accuracy down to the differencing noise floor. Curvature uses a wider
    // step than the gradient so its own noise stays small; coordinates whose
    // curvature is lost in that noise are flat enough that the golden result
    // already carries a negligible gradient.
    for (int pass = 0; pass < 20; ++pass) {
        double moved = 0.0;
        double xs[3] = {pb, n1, n2};
        for (int i = 0; i < 3; ++i) {
            Interval iv =
                i == 0 ? pb_interval(k, m.curve1.value(xs[1]), m.curve2.value(xs[2]))
                : i == 1 ? intersect(n_interval(k, true, m.curve1, xs[0],
                                                m.curve2.value(xs[2])),
                           {0.0, N, true})
                         : intersect(n_interval(k, false, m.curve2, xs[0],
                                                m.curve1.value(xs[1])),
                           {0.0, N, true});
            if (!iv.ok || iv.hi <= iv.lo) continue;
            double h = 1e-6 * (1.0 + std::abs(xs[i]));
            double hc = 64.0 * h;
            double p[3] = {xs[0], xs[1], xs[2]};
            double f0 = objective_raw(m, k, p[0], p[1], p[2]);
            p[i] = xs[i] + h;
            double fp = objective_raw(m, k, p[0], p[1], p[2]);
            p[i] = xs[i] - h;
            double fm = objective_raw(m, k, p[0], p[1], p[2]);
            p[i] = xs[i] + hc;
            double fpc = objective_raw(m, k, p[0], p[1], p[2]);
            p[i] = xs[i] - hc;
            double fmc = objective_raw(m, k, p[0], p[1], p[2]);
            double g = (fp - fm) / (2.0 * h);
            double curv = (fpc - 2.0 * f0 + fmc) / (hc * hc);
            double cnoise = 16.0 * std::numeric_limits<double>::epsilon() *
                            (1.0 + std::abs(f0)) / (hc * hc);
            if (!(curv < -cnoise)) continue;
            double t = std::clamp(xs[i] - g / curv, iv.lo, iv.hi);
            if (std::abs(t - xs[i]) > 1e-3 * (1.0 + std::abs(xs[i]))) continue;
            moved = std::max(moved, std::abs(t - xs[i]));
            xs[i] = t;
        }
        pb = xs[0]; n1 = xs[1]; n2 = xs[2];
        if (moved < 1e-12) break;
    }
    bv = objective(m, k, pb, n1, n2);

    // Projected gradient of the smooth case objective: a component pointing
    // out of the feasible set across an active bound carries no first-order
    // information, so it is zeroed before taking the max-norm.
    const double x[3] = {pb, n1, n2};
    double grad[3];
    for (int i = 0; i < 3; ++i) {
        double h = 1e-6 * (1.0 + std::abs(x[i]));
        double p[3] = {x[0], x[1], x[2]};
        p[i] = x[i] + h;
        double fp = objective_raw(m, k, p[0], p[1], p[2]);
        p[i] = x[i] - h;
        double fm = objective_raw(m, k, p[0], p[1], p[2]);
        grad[i] = (fp - fm) / (2.0 * h);
    }
    double q1 = m.curve1.value(n1), q2 = m.curve2.value(n2);
    Interval ivs[3] = {pb_interval(k, q1, q2),
                       intersect(n_interval(k, true, m.curve1, pb, q2), {0.0, N, true}),
                       intersect(n_interval(k, false, m.curve2, pb, q1), {0.0, N, true})};
    double residual = 0.0;
    for (int i = 0; i < 3; ++i) {
        double g = grad[i];
        if (ivs[i].ok) {
            double atol = 1e-7 * (1.0 + std::abs(x[i]));
            if (x[i] <= ivs[i].lo + atol && g < 0.0) g = 0.0;
            if (x[i] >= ivs[i].hi - atol && g > 0.0) g = 0.0;
        }
        residual = std::max(residual, std::abs(g));
    }

    double btol = 1e-7 * (1.0 + pb);
    bool shared = false;
    switch (k) {
        case 1: shared = pb >= std::min(q1, q2) - btol; break;
        case 2: shared = pb <= q2 + btol || pb >= q1 - btol; break;
        case 3: shared = pb <= q1 + btol || pb >= q2 - btol; break;
        default: shared = pb <= std::max(q1, q2) + btol; break;
    }
    return {k, pb, n1, n2, bv, residual,
            shared ? CaseStatus::on_case_boundary : CaseStatus::optimal};
}

}  // namespace detail

// Interior case-1 optimum via the stationarity system. The two marginal
// conditions pin u_i = alpha2_i * exp(-alpha3_i n_i) as
// u_i = 3 c_i alpha1_i / (M pb alpha3_i + 3 c_i); substituting into
// pb^2 = (2/3) q1 q2 leaves a scalar root problem, bracketed on
// (1e-9, sqrt((2/3) alpha1_1 alpha1_2)] and bisected to 1e-10. Infeasible
// when no bracketed root exists, a data size comes out nonpositive, or the
// root violates pb <= min(q1, q2).
inline Solution solve_case1(const Market& m) {
    const double M = m.customers, c1 = m.cost1, c2 = m.cost2;
    const double a11 = m.curve1.alpha1(), a21 = m.curve1.alpha2(), a31 = m.curve1.alpha3();
    const double a12 = m.curve2.alpha1(), a22 = m.curve2.alpha2(), a32 = m.curve2.alpha3();
    if (a21 == 0.0 || a22 == 0.0) return detail::infeasible(1);  // q' = 0: no marginal balance

    auto u_of = [&](double pb) { return 3.0 * c1 * a11 / (M * pb * a31 + 3.0 * c1); };
    auto v_of = [&](double pb) { return 3.0 * c2 * a12 / (M * pb * a32 + 3.0 * c2); };
    auto g = [&](double pb) {
        return pb * pb - (2.0 / 3.0) * (a11 - u_of(pb)) * (a12 - v_of(pb));
    };
    const double lo = 1e-9;
    const double hi = std::sqrt((2.0 / 3.0) * a11 * a12);
    if (!(g(lo) < 0.0) || !(g(hi) > 0.0)) return detail::infeasible(1);
    double pb = numopt::bisect(g, {lo, hi}, 1e-10);

    double u = u_of(pb), v = v_of(pb);
    if (!(u < a21) || !(v < a22)) return detail::infeasible(1);  // would need n <= 0
    double n1 = -std::log(u / a21) / a31;
    double n2 = -std::log(v / a22) / a32;
    if (!(n1 > 0.0) || !(n2 > 0.0) || n1 > kMaxDataSize || n2 > kMaxDataSize)
        return detail::infeasible(1);
    double q1 = a11 - u, q2 = a12 - v;
    if (pb > std::min(q1, q2) * (1.0 + 1e-12)) return detail::infeasible(1);

    double r = std::abs(g(pb));
    r = std::max(r, std::abs(M * pb / 3.0 * (a31 * u / q1) - c1));
    r = std::max(r, std::abs(M * pb / 3.0 * (a32 * v / q2) - c2));
    double F = M * pb * (1.0 - pb * pb / (2.0 * q1 * q2)) - n1 * c1 - n2 * c2;
    return {1, pb, n1, n2, F, r, CaseStatus::optimal};
}

// Restricted maximum of the profit over one of the corner/edge regimes
// (cases 2-4). The result always carries numbers when the region is
// nonempty; status tells whether the maximum pressed against a fee bound
// shared with a neighboring case.
inline Solution solve_case(const Market& m, int case_id) {
    if (case_id < 2 || case_id > 4)
        throw std::invalid_argument("solve_case: case_id must be 2, 3 or 4");
    return detail::solve_region(m, case_id);
}

// Global optimum: the case-1 stationary point (or, failing that, the
// restricted case-1 search) compared against the restricted maxima of cases
// 2-4. Equal profits resolve to the lowest case id. The case solvers are
// independent; they are simply run in order here so results never depend on
// scheduling.
inline Solution optimize(const Market& m) {
    std::vector<Solution> cands;
    Solution s1 = solve_case1(m);
    if (s1.status == CaseStatus::optimal) cands.push_back(s1);
    Solution r1 = detail::solve_region(m, 1);
    if (r1.status != CaseStatus::infeasible) cands.push_back(r1);
    for (int k = 2; k <= 4; ++k) {
        Solution r = solve_case(m, k);
        if (r.status != CaseStatus::infeasible) cands.push_back(r);
    }
    const Solution* best = nullptr;
    for (const auto& s : cands) {
        if (std::isnan(s.profit)) continue;
        if (!best || s.profit > best->profit) best = &s;
    }
    if (!best) throw InfeasibleMarket("optimize: every pricing regime is empty");
    return *best;
}

// Direct algebraic constants for the case-1 optimum. Kept for diagnosis
// only: they generally do NOT satisfy the stationarity system (see
// closed_form_gap). Entries are NaN when a log argument is nonpositive.
struct ClosedFormCase1 {
    double pb, n1, n2;
};

inline ClosedFormCase1 closed_form_case1(const Market& m) {
    const double M = m.customers, c1 = m.cost1, c2 = m.cost2;
    const double a11 = m.curve1.alpha1(), a21 = m.curve1.alpha2(), a31 = m.curve1.alpha3();
    const double a12 = m.curve2.alpha1(), a22 = m.curve2.alpha2(), a32 = m.curve2.alpha3();
    double A = 3.0 * a31 * c2 + 3.0 * a32 * c1 -
               std::sqrt(4.0 * a11 * a12 * M * M * a31 * a31 * a32 * a32 +
                         9.0 * a31 * a31 * c2 * c2 - 18.0 * a31 * a32 * c1 * c2 +
                         9.0 * a32 * a32 * c1 * c1);
    double pb = -0.5 * A / (M * a31 * a32);
    double n1 = std::log(a21 / a11 - a21 * A / (6.0 * a11 * a32 * c1)) / a31;
    double n2 = std::log(a22 / a12 - a22 * A / (6.0 * a12 * a31 * c2)) / a32;
    return {pb, n1, n2};
}

struct ClosedFormGap {
    ClosedFormCase1 direct;
    Solution solved;
    double pb_gap, n1_gap, n2_gap;  // direct minus solved
    double direct_residual;         // stationarity residual at the direct point
    bool discrepant;
};

inline ClosedFormGap closed_form_gap(const Market& m) {
    ClosedFormCase1 d = closed_form_case1(m);
    Solution s = solve_case1(m);
    ClosedFormGap gap{d, s, d.pb - s.pb, d.n1 - s.n1, d.n2 - s.n2, detail::kNaN, true};
    if (std::isfinite(d.pb) && std::isfinite(d.n1) && std::isfinite(d.n2)) {
        double q1 = m.curve1.value(std::max(d.n1, 0.0));
        double q2 = m.curve2.value(std::max(d.n2, 0.0));
        double r = std::abs(d.pb * d.pb - (2.0 / 3.0) * q1 * q2);
        r = std::max(r, std::abs(m.customers * d.pb / 3.0 *
                                     m.curve1.marginal(std::max(d.n1, 0.0)) / q1 - m.cost1));
        r = std::max(r, std::abs(m.customers * d.pb / 3.0 *
                                     m.curve2.marginal(std::max(d.n2, 0.0)) / q2 - m.cost2));
        gap.direct_residual = r;
    }
    gap.discrepant = !std::isfinite(gap.direct_residual) || gap.direct_residual > 1e-6 ||
                     !(std::abs(gap.pb_gap) <= 1e-6 * (1.0 + std::abs(s.pb)));
    return gap;
}

inline std::string describe(const ClosedFormGap& g) {
    char buf[512];
    std::string out = "closed-form check (case-1 optimum)\n";
    std::snprintf(buf, sizeof buf, "  direct:  pb=%.9g n1=%.9g n2=%.9g\n",
                  g.direct.pb, g.direct.n1, g.direct.n2);
    out += buf;
    std::snprintf(buf, sizeof buf, "  solved:  pb=%.9g n1=%.9g n2=%.9g\n",
                  g.solved.pb, g.solved.n1, g.solved.n2);
    out += buf;
    std::snprintf(buf, sizeof buf, "  gap:     pb=%.9g n1=%.9g n2=%.9g\n",
                  g.pb_gap, g.n1_gap, g.n2_gap);
    out += buf;
    std::snprintf(buf, sizeof buf, "  stationarity residual at direct point: %.9g\n",
                  g.direct_residual);
    out += buf;
    out += g.discrepant
               ? "  verdict: DISCREPANT (direct constants do not satisfy the stationarity system)\n"
               : "  verdict: consistent\n";
    return out;
}

}  // namespace iotprice::bundle
