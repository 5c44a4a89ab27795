#pragma once

// Profit sharing between service providers, in classic cooperative-game
// terms. A characteristic function assigns each provider coalition the
// profit it can earn on its own; the core and the Shapley value then answer
// "which splits are stable" and "which split is fair".

#include <bit>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace iotprice::coalition {

// Coalition worth, indexed by player bitmask (bit i = player i present).
// v(empty) = 0 always.
class CharacteristicFunction {
public:
    explicit CharacteristicFunction(int players) : players_(players) {
        if (players < 1 || players > 12)
            throw std::domain_error("characteristic function: 1 to 12 players");
        v_.assign(std::size_t(1) << players, 0.0);
    }

    int players() const { return players_; }

    double value(unsigned coalition) const {
        check(coalition);
        return v_[coalition];
    }

    void set_value(unsigned coalition, double v) {
        check(coalition);
        if (coalition == 0) throw std::domain_error("characteristic function: v(empty) is fixed at 0");
        v_[coalition] = v;
    }

private:
    void check(unsigned coalition) const {
        if (coalition >= v_.size())
            throw std::domain_error("characteristic function: coalition out of range");
    }
    int players_;
    std::vector<double> v_;
};

// Two providers: singleton worths are the standalone profits, the grand
// coalition earns the bundle profit.
inline CharacteristicFunction build_game(double profit1, double profit2, double bundle_profit) {
    CharacteristicFunction g(2);
    g.set_value(0b01, profit1);
    g.set_value(0b10, profit2);
    g.set_value(0b11, bundle_profit);
    return g;
}

// Exact Shapley value by enumerating subsets: player i receives
// sum over S not containing i of |S|! (n-|S|-1)! / n! * (v(S+i) - v(S)).
// Efficient enough for the supported n <= 12.
inline std::vector<double> shapley(const CharacteristicFunction& g) {
    const int n = g.players();
    std::vector<double> fact(n + 1, 1.0);
    for (int i = 1; i <= n; ++i) fact[i] = fact[i - 1] * i;
    std::vector<double> phi(n, 0.0);
    const unsigned full = (1u << n) - 1;
    for (int i = 0; i < n; ++i) {
        const unsigned bit = 1u << i;
        for (unsigned s = 0; s <= full; ++s) {
            if (s & bit) continue;
            int size = std::popcount(s);
            double w = fact[size] * fact[n - size - 1] / fact[n];
            phi[i] += w * (g.value(s | bit) - g.value(s));
        }
    }
    return phi;
}

// Core membership: efficiency within 1e-9 and every coalition weakly covered
// (1e-9 slack on each inequality).
inline bool in_core(const CharacteristicFunction& g, std::span<const double> payoff) {
    const int n = g.players();
    if (payoff.size() != static_cast<std::size_t>(n))
        throw std::domain_error("core membership: payoff size mismatch");
    constexpr double tol = 1e-9;
    const unsigned full = (1u << n) - 1;
    double total = 0.0;
    for (double p : payoff) total += p;
    if (std::abs(total - g.value(full)) > tol) return false;
    for (unsigned s = 1; s < full; ++s) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i)
            if (s & (1u << i)) sum += payoff[i];
        if (sum < g.value(s) - tol) return false;
    }
    return true;
}

// For two players the core is the segment of player-1 payoffs
// [v({1}), v(N) - v({2})] (player 2 takes the rest); empty exactly when the
// game is subadditive, v(N) < v({1}) + v({2}).
struct CoreInterval {
    double lo, hi;
    bool empty;
};

inline CoreInterval core_interval_2p(const CharacteristicFunction& g) {
    if (g.players() != 2) throw std::domain_error("core interval: two-player games only");
    double lo = g.value(0b01);
    double hi = g.value(0b11) - g.value(0b10);
    return {lo, hi, lo > hi};
}

}  // namespace iotprice::coalition
