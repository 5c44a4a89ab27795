#include "iotprice/bundle.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "iotprice/simulate.hpp"
#include "support.hpp"

using iotprice::QualityCurve;
namespace bd = iotprice::bundle;

namespace {

bd::Market reference_market() {
    return {50, 0.1, QualityCurve(0.884, 0.59, 0.114), 0.05, QualityCurve(0.82, 0.069, 0.142)};
}

// Service 2 with a tiny accuracy ceiling and expensive data: the optimal
// bundle fee exceeds q2, so the optimum lives in case 2, not case 1.
bd::Market lopsided_market() {
    return {50, 0.1, QualityCurve(0.884, 0.59, 0.114), 0.5, QualityCurve(0.05, 0.03, 0.1)};
}

}  // namespace

TEST(DemandCase, Classification) {
    EXPECT_EQ(bd::demand_case(0.8, 0.7, 0.3), 1);
    EXPECT_EQ(bd::demand_case(0.8, 0.7, 0.75), 2);
    EXPECT_EQ(bd::demand_case(0.7, 0.8, 0.75), 3);
    EXPECT_EQ(bd::demand_case(0.8, 0.7, 1.4), 4);
    EXPECT_EQ(bd::demand_case(0.8, 0.7, 1.6), 0);
    EXPECT_THROW(bd::demand_case(0.0, 0.7, 0.5), std::domain_error);
    EXPECT_THROW(bd::demand_case(0.8, 0.7, -0.1), std::domain_error);
}

TEST(Demand, ReferenceValue) {
    EXPECT_NEAR(bd::demand_probability(0.8186, 0.7945, 0.65846), 0.666678630279, 1e-9);
    EXPECT_NEAR(bd::demand_probability(0.8186, 0.7945, 0.65846), 0.6667, 1e-4);
}

TEST(Demand, Endpoints) {
    EXPECT_EQ(bd::demand_probability(0.8, 0.7, 0.0), 1.0);
    EXPECT_NEAR(bd::demand_probability(0.8, 0.7, 1.5), 0.0, 1e-15);
    EXPECT_EQ(bd::demand_probability(0.8, 0.7, 2.5), 0.0);
}

TEST(Demand, ContinuousAcrossCaseBoundaries) {
    iotprice::Sampler rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        double q1 = rng.uniform(0.1, 1.0);
        double q2 = rng.uniform(0.1, 1.0);
        for (double b : {std::min(q1, q2), std::max(q1, q2), q1 + q2}) {
            double below = bd::demand_probability(q1, q2, std::nextafter(b, 0.0));
            double above = bd::demand_probability(q1, q2, std::nextafter(b, 1e9));
            EXPECT_LE(std::abs(below - above), 1e-12)
                << "q1=" << q1 << " q2=" << q2 << " boundary=" << b;
        }
    }
}

TEST(Demand, NonincreasingInFee) {
    iotprice::Sampler rng(18);
    for (int trial = 0; trial < 50; ++trial) {
        double q1 = rng.uniform(0.1, 1.0);
        double q2 = rng.uniform(0.1, 1.0);
        double prev = 1.0;
        for (int i = 0; i <= 400; ++i) {
            double pb = (q1 + q2 + 0.1) * i / 400.0;
            double p = bd::demand_probability(q1, q2, pb);
            EXPECT_LE(p, prev + 1e-15);
            EXPECT_GE(p, 0.0);
            EXPECT_LE(p, 1.0);
            prev = p;
        }
    }
}

TEST(Demand, MatchesMonteCarlo) {
    iotprice::Sampler rng(19);
    for (int trial = 0; trial < 5; ++trial) {
        double q1 = rng.uniform(0.2, 1.0);
        double q2 = rng.uniform(0.2, 1.0);
        double pb = rng.uniform(0.1, 0.9) * (q1 + q2);
        double analytic = bd::demand_probability(q1, q2, pb);
        if (analytic < 0.02 || analytic > 0.98) continue;  // degenerate band
        auto est = iotprice::mc::bundle_demand(
            q1, q2, pb, {100000, static_cast<uint64_t>(99 + trial)});
        EXPECT_LE(std::abs(est.mean - analytic), 4.0 * est.std_error);
    }
}

TEST(Profit, ReferencePoint) {
    EXPECT_NEAR(bd::profit(reference_market(), 0.65846, 19.29, 7.01), 19.6690838786, 1e-9);
}

TEST(Profit, RejectsNegativeArguments) {
    EXPECT_THROW(bd::profit(reference_market(), -0.1, 1, 1), std::domain_error);
    EXPECT_THROW(bd::profit(reference_market(), 0.1, -1, 1), std::domain_error);
    EXPECT_THROW(bd::profit(reference_market(), 0.1, 1, -1), std::domain_error);
}

TEST(SolveCase1, ReferenceMarket) {
    auto s = bd::solve_case1(reference_market());
    ASSERT_EQ(s.status, bd::CaseStatus::optimal);
    EXPECT_EQ(s.case_id, 1);
    EXPECT_NEAR(s.pb, 0.658463531168915, 1e-8);
    EXPECT_NEAR(s.n1, 19.2908365333845, 1e-6);
    EXPECT_NEAR(s.n2, 7.01233632900243, 1e-6);
    EXPECT_NEAR(s.profit, 19.6690839025086, 1e-8);
    EXPECT_LE(s.kkt_residual, 1e-6);
}

TEST(SolveCase1, TakeRateIsExactlyTwoThirds) {
    // At any case-1 stationary point pb^2 = (2/3) q1 q2, so the take rate
    // 1 - pb^2/(2 q1 q2) collapses to 2/3 identically.
    auto s = bd::solve_case1(reference_market());
    double q1 = reference_market().curve1.value(s.n1);
    double q2 = reference_market().curve2.value(s.n2);
    EXPECT_NEAR(bd::demand_probability(q1, q2, s.pb), 2.0 / 3.0, 1e-9);
}

TEST(SolveCase1, SymmetricMarketIsExactlySymmetric) {
    QualityCurve c(0.85, 0.4, 0.12);
    bd::Market m(60, 0.08, c, 0.08, c);
    auto s = bd::solve_case1(m);
    ASSERT_EQ(s.status, bd::CaseStatus::optimal);
    EXPECT_EQ(s.n1, s.n2);  // identical floating computations
    double q = m.curve1.value(s.n1);
    EXPECT_NEAR(s.pb * s.pb, (2.0 / 3.0) * q * q, 1e-8);
}

TEST(SolveCase1, InfeasibleWhenCurveIsFlat) {
    bd::Market m(50, 0.1, QualityCurve(0.8, 0.0, 0.1), 0.05, QualityCurve(0.82, 0.069, 0.142));
    EXPECT_EQ(bd::solve_case1(m).status, bd::CaseStatus::infeasible);
}

TEST(SolveCase1, InfeasibleWhenRootLeavesRegion) {
    // The stationary fee would exceed q2; the case-1 system has no interior
    // solution for this market.
    EXPECT_EQ(bd::solve_case1(lopsided_market()).status, bd::CaseStatus::infeasible);
}

TEST(SolveCase, RejectsBadCaseId) {
    EXPECT_THROW(bd::solve_case(reference_market(), 1), std::invalid_argument);
    EXPECT_THROW(bd::solve_case(reference_market(), 5), std::invalid_argument);
}

TEST(SolveCase, ReferenceMarketCornerCasesFallShort) {
    auto best = bd::solve_case1(reference_market());
    // Independently computed restricted maxima: 18.487, 18.243, 17.844; each
    // presses against the fee bound it shares with case 1.
    double expected[] = {18.487, 18.243, 17.844};
    for (int k = 2; k <= 4; ++k) {
        auto s = bd::solve_case(reference_market(), k);
        ASSERT_NE(s.status, bd::CaseStatus::infeasible);
        EXPECT_EQ(s.status, bd::CaseStatus::on_case_boundary) << "case " << k;
        EXPECT_NEAR(s.profit, expected[k - 2], 0.05) << "case " << k;
        EXPECT_LT(s.profit, best.profit) << "case " << k;
        EXPECT_LE(s.kkt_residual, 1e-6) << "case " << k;
    }
}

TEST(SolveCase, LopsidedMarketHasInteriorCase2Optimum) {
    auto s = bd::solve_case(lopsided_market(), 2);
    ASSERT_EQ(s.status, bd::CaseStatus::optimal);  // fee well inside (q2, q1)
    EXPECT_NEAR(s.pb, 0.411906981988, 1e-4);
    EXPECT_NEAR(s.n1, 18.6752031816, 1e-3);
    EXPECT_NEAR(s.n2, 0.0, 1e-7);
    EXPECT_NEAR(s.profit, 8.55669020913, 1e-6);
    EXPECT_LE(s.kkt_residual, 1e-6);
}

TEST(Optimize, ReferenceMarketPicksCase1) {
    auto s = bd::optimize(reference_market());
    EXPECT_EQ(s.case_id, 1);
    EXPECT_NEAR(s.pb, 0.658463531168915, 1e-6);
    EXPECT_NEAR(s.n1, 19.2908365333845, 1e-4);
    EXPECT_NEAR(s.n2, 7.01233632900243, 1e-4);
    EXPECT_NEAR(s.profit, 19.6690839025086, 1e-6);
    for (int k = 2; k <= 4; ++k)
        EXPECT_GE(s.profit, bd::solve_case(reference_market(), k).profit);
}

TEST(Optimize, LopsidedMarketPicksCase2) {
    auto s = bd::optimize(lopsided_market());
    EXPECT_EQ(s.case_id, 2);
    EXPECT_NEAR(s.profit, 8.55669020913, 1e-6);
}

TEST(Optimize, SmallMarketParksSecondServiceAtZeroData) {
    // M = 10: the marginal value of service-2 data cannot cover its price, so
    // the optimum sits on the n2 = 0 face while the fee stays in case 1.
    bd::Market m(10, 0.1, QualityCurve(0.884, 0.59, 0.114), 0.05, QualityCurve(0.82, 0.069, 0.142));
    auto s = bd::optimize(m);
    EXPECT_EQ(s.case_id, 1);
    EXPECT_LE(s.n2, 1e-7);
    EXPECT_NEAR(s.profit, 3.0125, 0.01);
    EXPECT_LE(s.kkt_residual, 1e-6);
}

TEST(Optimize, NeverBelowDenseGridMaximum) {
    auto m = reference_market();
    auto s = bd::optimize(m);
    double grid_best = -1e300;
    const int G = 120;
    double pbmax = m.curve1.alpha1() + m.curve2.alpha1();
    for (int i = 0; i < G; ++i)
        for (int j = 0; j < G; ++j)
            for (int k = 0; k < G; ++k) {
                double v = bd::profit(m, pbmax * i / (G - 1), 200.0 * j / (G - 1),
                                      200.0 * k / (G - 1));
                grid_best = std::max(grid_best, v);
            }
    EXPECT_GE(s.profit, grid_best - 1e-9);
    EXPECT_LE(s.profit - grid_best, 0.05);  // within the grid's resolution error
}

TEST(Optimize, AgreesWithGridOracleOnRandomMarkets) {
    iotprice::Sampler rng(23);
    for (int trial = 0; trial < 3; ++trial) {
        bd::Market m = testsupport::random_bundle(rng);
        auto s = bd::optimize(m);
        auto oracle = testsupport::bundle_oracle(m, 100);
        EXPECT_NEAR(s.pb, oracle.arg[0], 1e-3);
        EXPECT_NEAR(s.n1, oracle.arg[1], 1e-3);
        EXPECT_NEAR(s.n2, oracle.arg[2], 1e-3);
        EXPECT_NEAR(s.profit, oracle.value, 1e-4);
    }
}

TEST(Optimize, ResidualSmallAcrossRandomMarkets) {
    iotprice::Sampler rng(29);
    for (int trial = 0; trial < 15; ++trial) {
        bd::Market m = testsupport::random_bundle(rng);
        auto s = bd::optimize(m);
        EXPECT_LE(s.kkt_residual, 1e-6);
        EXPECT_GE(s.pb, 0.0);
        EXPECT_LE(s.pb, m.curve1.value(s.n1) + m.curve2.value(s.n2) + 1e-9);
    }
}

TEST(Optimize, Deterministic) {
    auto a = bd::optimize(reference_market());
    auto b = bd::optimize(reference_market());
    EXPECT_EQ(a.pb, b.pb);
    EXPECT_EQ(a.n1, b.n1);
    EXPECT_EQ(a.n2, b.n2);
    EXPECT_EQ(a.profit, b.profit);
}

TEST(ClosedForm, DirectConstantsAtReferenceMarket) {
    auto d = bd::closed_form_case1(reference_market());
    EXPECT_NEAR(d.pb, 0.814665390673, 1e-9);
    EXPECT_NEAR(d.n1, 21.0327247201, 1e-8);
    EXPECT_NEAR(d.n2, 8.46930713761, 1e-8);
}

TEST(ClosedForm, GapIsFlaggedAtReferenceMarket) {
    auto g = bd::closed_form_gap(reference_market());
    EXPECT_TRUE(g.discrepant);
    EXPECT_NEAR(g.pb_gap, 0.814665390673 - 0.658463531168915, 1e-6);
    EXPECT_GT(g.direct_residual, 1e-3);  // direct point badly violates stationarity
    auto text = bd::describe(g);
    EXPECT_NE(text.find("DISCREPANT"), std::string::npos);
    EXPECT_NE(text.find("pb=0.81466539"), std::string::npos);
}
