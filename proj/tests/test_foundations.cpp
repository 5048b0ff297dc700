#include <gtest/gtest.h>

#include <cmath>

#include "ggamma/grid.hpp"
#include "ggamma/quadrature.hpp"
#include "ggamma/weights.hpp"

using namespace ggamma;

TEST(Quadrature, ConstantOnUnitInterval)
{
    EXPECT_NEAR(integrate([](double) { return 1.0; }, 0.0, 1.0), 1.0, 1e-12);
}

TEST(Quadrature, InverseSqrtSingularity)
{
    EXPECT_NEAR(integrate([](double s) { return 1 / std::sqrt(s); }, 0.0, 1.0), 2.0, 1e-8);
}

TEST(Quadrature, DivergentLogSingularity)
{
    EXPECT_THROW(integrate([](double s) { return 1 / s; }, 0.0, 1.0), QuadratureFailure);
}

TEST(Quadrature, WideLogRange)
{
    // int_1e-6^1e6 ds/(1+s^2) = atan(1e6) - atan(1e-6)
    const double v = integrate([](double s) { return 1 / (1 + s * s); }, 1e-6, 1e6);
    EXPECT_NEAR(v, std::atan(1e6) - std::atan(1e-6), 1e-9);
}

TEST(Quadrature, SplitAtJump)
{
    QuadOptions o;
    o.splits = {0.3};
    EXPECT_NEAR(integrate([](double s) { return s < 0.3 ? 1.0 : 5.0; }, 0.0, 1.0, o), 0.3 + 3.5, 1e-12);
}

TEST(Quadrature, ReversedLimits)
{
    EXPECT_NEAR(integrate([](double s) { return s; }, 1.0, 0.0), -0.5, 1e-12);
}

TEST(Weights, PowerPrimitive)
{
    const Weight w = make_weight(WeightSpec::power(1), Domain(1.0));
    EXPECT_NEAR(w.primitive(0.5), 0.125, 1e-15);
    EXPECT_DOUBLE_EQ(w(0.5), 0.5);
}

TEST(Weights, PiecewisePrimitive)
{
    const Weight w = make_weight(WeightSpec::piecewise({0.5}, {1, 2}), Domain(1.0));
    EXPECT_NEAR(w.primitive(0.75), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(w.value_left(0.5), 1.0);
    EXPECT_DOUBLE_EQ(w.value_right(0.5), 2.0);
}

TEST(Weights, PowerlogMatchesQuadrature)
{
    const Weight w = make_weight(WeightSpec::powerlog(-0.5, 2), Domain(infinity, 1e6));
    for (double t : {1e-7, 0.3, 1.0, 17.0, 5e5}) {
        const double ref = integrate([](double s) { return std::pow(s, -0.5) * std::pow(1 + std::abs(std::log(s)), 2); },
                                     0.0, t, 1e-12);
        EXPECT_NEAR(w.primitive(t), ref, 1e-9 * ref) << t;
    }
}

TEST(Weights, TablePrimitiveIsTrapezoid)
{
    const Weight w = make_weight(WeightSpec::table({0.2, 0.6}, {1, 3}), Domain(1.0));
    EXPECT_NEAR(w.primitive(0.2), 0.2, 1e-15);
    EXPECT_NEAR(w.primitive(0.6), 0.2 + 0.8, 1e-15);
    EXPECT_NEAR(w.primitive(1.0), 1.0 + 1.2, 1e-15);
    EXPECT_NEAR(w(0.4), 2.0, 1e-15);
}

TEST(Weights, RejectsNonIntegrableExponent)
{
    EXPECT_THROW(make_weight(WeightSpec::power(-1), Domain(1.0)), InadmissibleSpec);
    EXPECT_THROW(make_weight(WeightSpec::power(0, -2), Domain(1.0)), InadmissibleSpec);
    EXPECT_THROW(make_weight(WeightSpec::piecewise({0.5}, {1, 0}), Domain(1.0)), InadmissibleSpec);
}

TEST(Weights, AdmissibilityReportFlagsBadWeight)
{
    const Domain d(1.0);
    const Grid g = build_grid(d, 32);
    EXPECT_TRUE(check_admissible(unit_weights(d), g).ok);
    WeightSet ws = unit_weights(d);
    ws.v = Weight(WeightSpec::power(-2), d);
    const auto rep = check_admissible(ws, g);
    EXPECT_FALSE(rep.ok);
    ASSERT_EQ(rep.failures.size(), 1u);
    EXPECT_NE(rep.failures[0].find("v:"), std::string::npos);
}

TEST(Grid, LinearPoints)
{
    const Grid g = build_grid(Domain(1.0), 9, GridMode::linear);
    ASSERT_EQ(g.size(), 9u);
    for (int i = 0; i < 9; ++i) EXPECT_NEAR(g.points[static_cast<std::size_t>(i)], 0.1 * (i + 1), 1e-15);
}

TEST(Grid, LogAndHybridStayInside)
{
    for (GridMode m : {GridMode::logarithmic, GridMode::hybrid}) {
        const Grid g = build_grid(Domain(2.0), 40, m);
        EXPECT_EQ(g.size(), 40u);
        EXPECT_TRUE(std::is_sorted(g.points.begin(), g.points.end()));
        EXPECT_GT(g.front(), 0.0);
        EXPECT_LT(g.back(), 2.0);
    }
}

TEST(Grid, TooFewPoints)
{
    EXPECT_THROW(build_grid(Domain(1.0), 7), BadCount);
}

TEST(Grid, RefineDropsDuplicates)
{
    const Grid g = build_grid(Domain(1.0), 9, GridMode::linear);
    const Grid r = refine(g, 0.5, 3);
    EXPECT_EQ(r.size(), 15u);
    EXPECT_TRUE(std::adjacent_find(r.points.begin(), r.points.end()) == r.points.end());
}

TEST(Esup, ParabolaPeak)
{
    const Grid g = build_grid(Domain(1.0), 16, GridMode::linear);
    EXPECT_NEAR(esup_on([](double t) { return t * (1 - t); }, 0.0, 1.0, g), 0.25, 1e-6);
}

TEST(Esup, OffGridPeakIsRefined)
{
    const Grid g = build_grid(Domain(1.0), 10, GridMode::linear);
    const double v = esup_on([](double t) { return -std::abs(t - 0.3333); }, 0.0, 1.0, g);
    EXPECT_NEAR(v, 0.0, 1e-5);
}

TEST(Esup, EmptyWindow)
{
    const Grid g = build_grid(Domain(1.0), 9, GridMode::linear);
    EXPECT_THROW(esup_on([](double t) { return t; }, 0.41, 0.49, g), EmptyWindow);
}

TEST(Esup, LogarithmicLimitAtZero)
{
    // y/(1+y) with y = log(1/t) tends to 1 only logarithmically
    const Grid g = build_grid(Domain(1.0), 64);
    EsupOptions o;
    o.limit_left = true;
    const auto r = esup_detailed([](double t) { const double y = -std::log(t); return y / (1 + y); }, 0.0, 1.0, g, o);
    EXPECT_TRUE(r.limit_used);
    EXPECT_TRUE(r.limit_converged);
    EXPECT_NEAR(r.value, 1.0, 1e-5);
}
