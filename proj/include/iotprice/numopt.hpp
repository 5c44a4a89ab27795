#pragma once

// Small deterministic numerical toolbox: bracketed root finding, golden
// section line search, dense-grid maximization with coordinate polish, and
// finite-difference derivatives. Everything here is reference-grade and
// branch-stable: identical inputs produce bit-identical results, ties go to
// the lowest grid index, and no randomness or threading is involved, so the
// routines can serve as oracles for the closed-form solvers.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace iotprice::numopt {

struct Bracket {
    double lo, hi;
};

// Sign-change bisection. Requires f(lo) and f(hi) of opposite sign (or zero);
// halves the bracket until its width is at most tol and returns the midpoint.
// Iteration count is ceil(log2(width / tol)).
template <class F>
double bisect(F&& f, Bracket b, double tol) {
    if (!(b.lo < b.hi)) throw std::invalid_argument("bisect: empty bracket");
    if (!(tol > 0.0)) throw std::invalid_argument("bisect: tol must be positive");
    double flo = f(b.lo);
    double fhi = f(b.hi);
    if (flo == 0.0) return b.lo;
    if (fhi == 0.0) return b.hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::invalid_argument("bisect: no sign change over bracket");
    while (b.hi - b.lo > tol) {
        double mid = 0.5 * (b.lo + b.hi);
        if (mid <= b.lo || mid >= b.hi) break;  // bracket at floating resolution
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (fhi > 0.0)) {
            b.hi = mid;
            fhi = fm;
        } else {
            b.lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (b.lo + b.hi);
}

// Golden-section search for a maximum of f on [lo, hi]; returns the argmax
// estimate once the interval has shrunk to tol.
template <class F>
double golden_max(F&& f, double lo, double hi, double tol) {
    constexpr double invphi = 0.6180339887498948482;
    if (hi - lo <= tol) return 0.5 * (lo + hi);
    double c = hi - invphi * (hi - lo);
    double d = lo + invphi * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    while (hi - lo > tol) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - invphi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + invphi * (hi - lo);
            fd = f(d);
        }
    }
    return 0.5 * (lo + hi);
}

struct GridDim {
    double lo, hi;
    int points;  // >= 2
};

struct MaxResult {
    std::vector<double> arg;
    double value;
};

// Exhaustive scan of a rectangular grid (dimension 0 outermost, so the first
// lexicographic index wins ties) followed by repeated coordinate-wise
// golden-section polish inside one-spacing windows clipped to the box. A
// polish step is accepted only on strict improvement, which keeps the result
// at the lowest-index grid point for flat objectives and guarantees
// value >= best grid value.
template <class F>
MaxResult grid_polish_max(F&& f, std::span<const GridDim> dims, int polish_passes = 80) {
    const std::size_t d = dims.size();
    if (d == 0 || d > 3) throw std::invalid_argument("grid_polish_max: 1 to 3 dimensions");
    std::array<double, 3> step{};
    for (std::size_t i = 0; i < d; ++i) {
        if (dims[i].points < 2 || !(dims[i].lo < dims[i].hi))
            throw std::invalid_argument("grid_polish_max: bad grid dimension");
        step[i] = (dims[i].hi - dims[i].lo) / (dims[i].points - 1);
    }

    std::array<double, 3> x{};
    std::array<int, 3> idx{};
    std::array<double, 3> best{};
    double best_val = -std::numeric_limits<double>::infinity();
    bool have = false;
    for (;;) {
        for (std::size_t i = 0; i < d; ++i) x[i] = dims[i].lo + step[i] * idx[i];
        double v = f(std::span<const double>(x.data(), d));
        if (!have || v > best_val) {
            best_val = v;
            best = x;
            have = true;
        }
        std::size_t i = d;
        while (i > 0) {
            --i;
            if (++idx[i] < dims[i].points) break;
            idx[i] = 0;
            if (i == 0) goto scanned;
        }
    }
scanned:

    x = best;
    for (int pass = 0; pass < polish_passes; ++pass) {
        double moved = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            double lo = std::max(dims[i].lo, x[i] - step[i]);
            double hi = std::min(dims[i].hi, x[i] + step[i]);
            if (!(hi > lo)) continue;
            auto line = [&](double t) {
                std::array<double, 3> p = x;
                p[i] = t;
                return f(std::span<const double>(p.data(), d));
            };
            double t = golden_max(line, lo, hi, 1e-10);
            double v = line(t);
            if (v > best_val) {
                moved = std::max(moved, std::abs(t - x[i]));
                x[i] = t;
                best_val = v;
            }
        }
        if (moved < 1e-11) break;
    }
    return {std::vector<double>(x.begin(), x.begin() + d), best_val};
}

// Central-difference gradient.
template <class F>
std::vector<double> finite_diff_grad(F&& f, std::span<const double> x, double h) {
    std::vector<double> g(x.size());
    std::vector<double> p(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        p[i] = x[i] + h;
        double fp = f(std::span<const double>(p));
        p[i] = x[i] - h;
        double fm = f(std::span<const double>(p));
        p[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

// Central-difference Hessian, row-major, symmetric by construction.
template <class F>
std::vector<double> finite_diff_hessian(F&& f, std::span<const double> x, double h) {
    const std::size_t d = x.size();
    std::vector<double> m(d * d);
    std::vector<double> p(x.begin(), x.end());
    double f0 = f(std::span<const double>(p));
    for (std::size_t i = 0; i < d; ++i) {
        p[i] = x[i] + h;
        double fp = f(std::span<const double>(p));
        p[i] = x[i] - h;
        double fm = f(std::span<const double>(p));
        p[i] = x[i];
        m[i * d + i] = (fp - 2.0 * f0 + fm) / (h * h);
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            p[i] = x[i] + h; p[j] = x[j] + h;
            double fpp = f(std::span<const double>(p));
            p[j] = x[j] - h;
            double fpm = f(std::span<const double>(p));
            p[i] = x[i] - h; p[j] = x[j] + h;
            double fmp = f(std::span<const double>(p));
            p[j] = x[j] - h;
            double fmm = f(std::span<const double>(p));
            p[i] = x[i]; p[j] = x[j];
            double v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            m[i * d + j] = v;
            m[j * d + i] = v;
        }
    }
    return m;
}

// Eigenvalues of a small symmetric matrix (row-major), ascending. Classic
// Jacobi rotations; adequate and exact to roundoff for the 2x2 and 3x3
// curvature checks this library needs.
inline std::vector<double> symmetric_eigenvalues(std::span<const double> m, int dim) {
    if (dim < 1 || static_cast<std::size_t>(dim) * dim != m.size())
        throw std::invalid_argument("symmetric_eigenvalues: bad dimension");
    std::vector<double> a(m.begin(), m.end());
    auto at = [&](int i, int j) -> double& { return a[i * dim + j]; };
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return std::vector<double>(dim, 0.0);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < dim; ++i)
            for (int j = i + 1; j < dim; ++j) off += at(i, j) * at(i, j);
        if (off <= 1e-30 * scale * scale) break;
        for (int i = 0; i < dim; ++i) {
            for (int j = i + 1; j < dim; ++j) {
                if (at(i, j) == 0.0) continue;
                double theta = 0.5 * std::atan2(2.0 * at(i, j), at(i, i) - at(j, j));
                double c = std::cos(theta), s = std::sin(theta);
                for (int k = 0; k < dim; ++k) {
                    double aki = at(k, i), akj = at(k, j);
                    at(k, i) = c * aki + s * akj;
                    at(k, j) = -s * aki + c * akj;
                }
                for (int k = 0; k < dim; ++k) {
                    double aik = at(i, k), ajk = at(j, k);
                    at(i, k) = c * aik + s * ajk;
                    at(j, k) = -s * aik + c * ajk;
                }
            }
        }
    }
    std::vector<double> eig(dim);
    for (int i = 0; i < dim; ++i) eig[i] = at(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

}  // namespace iotprice::numopt
