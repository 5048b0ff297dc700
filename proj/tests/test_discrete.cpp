#include <gtest/gtest.h>

#include <cmath>

#include "ggamma/discrete.hpp"

using namespace ggamma;

namespace {

const Domain unit(1.0);
RealFn ident = [](double t) { return t; };

}  // namespace

TEST(StrongMonotone, Classification)
{
    auto c = is_strongly_monotone({0, {1, 2, 4, 8}});
    EXPECT_EQ(c.kind, Monotonicity::increasing);
    EXPECT_DOUBLE_EQ(c.rho, 2);
    EXPECT_EQ(is_strongly_monotone({0, {1, 1, 1}}).kind, Monotonicity::neither);
    c = is_strongly_monotone({0, {8, 4, 2, 1}});
    EXPECT_EQ(c.kind, Monotonicity::decreasing);
    EXPECT_DOUBLE_EQ(c.rho, 0.5);
    EXPECT_THROW(is_strongly_monotone({0, {1, 0, 2}}), NonPositive);
}

TEST(StrongMonotone, HandExample)
{
    const auto r = strong_monotone_equivalence({0, {1, 2, 4}}, {0, {1, 1, 1}}, 1, EquivalenceForm::increasing_sum_sum);
    EXPECT_DOUBLE_EQ(r.lhs, 11);
    EXPECT_DOUBLE_EQ(r.rhs, 7);
    EXPECT_DOUBLE_EQ(r.ratio, 11.0 / 7);
}

TEST(StrongMonotone, ZeroSequenceAndWrongDirection)
{
    const auto r = strong_monotone_equivalence({0, {1, 2, 4}}, {0, {0, 0, 0}}, 2, EquivalenceForm::increasing_sup_sum);
    EXPECT_EQ(r.ratio, 1);
    EXPECT_THROW(strong_monotone_equivalence({0, {1, 1, 1}}, {0, {1, 1, 1}}, 1, EquivalenceForm::increasing_sum_sum),
                 WrongMonotonicity);
    EXPECT_THROW(strong_monotone_equivalence({0, {1, 2, 4}}, {0, {1, 1, 1}}, 1, EquivalenceForm::decreasing_sum_sum),
                 WrongMonotonicity);
}

TEST(StrongMonotone, DecreasingForms)
{
    // rho = {4,2,1}, a = {1,1,1}: heads 1,2,3
    auto r = strong_monotone_equivalence({0, {4, 2, 1}}, {0, {1, 1, 1}}, 1, EquivalenceForm::decreasing_sum_sum);
    EXPECT_DOUBLE_EQ(r.lhs, 4 + 4 + 3);
    EXPECT_DOUBLE_EQ(r.rhs, 7);
    r = strong_monotone_equivalence({0, {4, 2, 1}}, {0, {1, 1, 1}}, 1, EquivalenceForm::decreasing_sup_sum);
    EXPECT_DOUBLE_EQ(r.lhs, 4);
    EXPECT_DOUBLE_EQ(r.rhs, 4);
}

TEST(Bennett, TwoTermExample)
{
    const RealSeq a{1, {1, 1}}, b{1, {2, 1}};
    EXPECT_DOUBLE_EQ(discrete_hardy_D(a, b, {1, 1, 1}), 4);
    const auto bf = discrete_hardy_bruteforce(a, b, {1, 1, 1}, 1000);
    EXPECT_NEAR(bf.ratio, 4, 0.04);
    EXPECT_LE(bf.ratio, 4 * (1 + 1e-12));
}

TEST(Bennett, ZeroAndSingleTerm)
{
    EXPECT_EQ(discrete_hardy_D({0, {0, 0, 0}}, {0, {1, 2, 3}}, {1, 2, 3}), 0);
    const ParamTriple par{0.7, 1.5, 2};
    const auto bf = discrete_hardy_bruteforce({0, {3}}, {0, {5}}, par, 4);
    EXPECT_NEAR(bf.ratio, std::pow(3, 1 / par.q) * std::pow(5, 1 / par.r), 1e-12);
}

TEST(Bennett, Homogeneity)
{
    const RealSeq a{0, {1, 0.5, 2}}, b{0, {2, 1, 3}};
    RealSeq b2 = b;
    for (auto& v : b2.values) v *= 7;
    const ParamTriple par{1, 2, 1.5};
    EXPECT_NEAR(discrete_hardy_D(a, b2, par), std::pow(7, 1 / par.r) * discrete_hardy_D(a, b, par), 1e-12);
    EXPECT_THROW(discrete_hardy_D(a, b, {2, 1, 1}), OutOfScope);
}

TEST(Bennett, SecondBranchBracketsBruteForce)
{
    const RealSeq a{0, {1, 0.3, 2, 0.1}}, b{0, {0.5, 2, 1, 4}};
    const ParamTriple par{2, 3, 1};
    const double D = discrete_hardy_D(a, b, par);
    const double bf = discrete_hardy_bruteforce(a, b, par, 64).ratio;
    EXPECT_GT(bf, D / 20);
    EXPECT_LT(bf, D * 20);
}

TEST(LocalB, UnitWeightsWholeInterval)
{
    const auto g = build_grid(unit, 512, GridMode::logarithmic);
    const Profile pr({1, 1, 1}, unit_weights(unit), g);
    EXPECT_NEAR(local_B(0, g.upper, pr), 1, 1e-6);
    EXPECT_EQ(local_B(0.3, 0.3, pr), 0);
}

TEST(LocalB, DeltaScaling)
{
    const auto g = build_grid(unit, 256, GridMode::logarithmic);
    const ParamTriple par{1, 2, 2};
    auto ws = unit_weights(unit);
    const Profile pr(par, ws, g);
    ws.delta = ws.delta.scaled(9);
    const Profile pr9(par, ws, g);
    EXPECT_NEAR(local_B(0.01, 0.5, pr9), 3 * local_B(0.01, 0.5, pr), 1e-9);
}

TEST(LocalB, BruteForceWithinConstant)
{
    const auto g = build_grid(unit, 256, GridMode::logarithmic);
    for (double r : {0.5, 1.0, 2.0}) {
        const Profile pr({1, 2, r}, unit_weights(unit), g);
        const double f = local_B(0.01, 0.5, pr), bf = local_B_bruteforce(0.01, 0.5, pr, 8);
        EXPECT_GT(bf, 0);
        EXPECT_LT(bf / f, 10) << "r=" << r;
        EXPECT_GT(bf / f, 0.1) << "r=" << r;
    }
    const Profile pr({1, 1, 1}, unit_weights(unit), g);
    EXPECT_EQ(local_B_bruteforce(0.01, 0.5, pr, 0), 0);
}

namespace {

struct Built {
    Grid grid;
    Profile pr;
    CoveringSequence cs;
    Built(const ParamTriple& par, const WeightSet& ws, double a, int n = 512)
        : grid(build_grid(unit, n, GridMode::logarithmic)), pr(par, ws, grid),
          cs(build_covering_sequence([this](double t) { return pr.phi(t); },
                                     [this, par](double t) { return std::pow(pr.U(t), par.p); }, a, grid))
    {
    }
};

}  // namespace

TEST(Cij, C41AgainstB1)
{
    Built s({1, 1, 1}, unit_weights(unit), 109);
    const double c41 = compute_Cij(s.cs, s.pr, "C41");
    EXPECT_GT(c41, 0);
    EXPECT_LE(c41, 1 + 1e-9);  // C41 <= B1 = 1
    EXPECT_GE(c41, 0.25);
}

TEST(Cij, ScopeAndEmpty)
{
    Built s({1, 2, 1.5}, unit_weights(unit), 3);
    EXPECT_THROW(compute_Cij(s.cs, s.pr, "C33"), OutOfScope);
    EXPECT_THROW(compute_Cij(s.cs, s.pr, "C13"), OutOfScope);
    EXPECT_THROW(compute_Cij(s.cs, s.pr, "C99"), OutOfScope);
    CoveringSequence one = s.cs;
    one.N = 0;
    one.points = {0, s.grid.upper};
    one.z2 = {1};
    one.z1.clear();
    EXPECT_THROW(compute_Cij(one, s.pr, "C41"), EmptyCovering);
    EXPECT_NO_THROW(compute_Cij(one, s.pr, "C11"));
}

TEST(Cij, OuterWeightScaling)
{
    const ParamTriple par{0.5, 0.8, 0.3};
    auto ws = unit_weights(unit);
    ws.delta = make_weight(WeightSpec::power(0.5), unit);
    Built s(par, ws, 3);
    ws.w = ws.w.scaled(16);
    const Profile pr16(par, ws, s.grid);
    for (const auto& l : {"C11", "C12", "C13", "C14", "C15", "C16", "C21", "C22", "C31", "C32", "C34", "C41"}) {
        const double c = compute_Cij(s.cs, s.pr, l), c16 = compute_Cij(s.cs, pr16, l);
        EXPECT_NEAR(c16 / c, std::pow(16, 1 / par.q), 1e-6) << l;
    }
}

TEST(Cij, ChainC21C31C32)
{
    const ParamTriple par{0.4, 2, 0.5};
    auto ws = unit_weights(unit);
    ws.delta = make_weight(WeightSpec::power(1), unit);
    Built s(par, ws, 1.2);
    ASSERT_GE(s.cs.M() - s.cs.N, 3);
    const double c21 = compute_Cij(s.cs, s.pr, "C21"), c31 = compute_Cij(s.cs, s.pr, "C31"),
                 c32 = compute_Cij(s.cs, s.pr, "C32");
    EXPECT_LE(c21, c31 * (1 + 1e-12));
    EXPECT_LE(c31, 100 * c32);
}

TEST(DiscretizedForms, ZeroAndScaling)
{
    Built s({1, 1, 1}, unit_weights(unit), 2);
    const auto z = discretized_forms({{0.1, 0.5}, {0.0}}, s.cs, s.pr);
    EXPECT_EQ(z.m1 + z.m2 + z.m3 + z.m4 + z.rhs, 0);
    const TestFunction h{{0.05, 0.2, 0.7}, {1.0, 3.0}};
    const auto f1 = discretized_forms(h, s.cs, s.pr), f3 = discretized_forms(h.scaled(3), s.cs, s.pr);
    EXPECT_GT(f1.rhs, 0);
    EXPECT_NEAR(f3.m1, 3 * f1.m1, 1e-12 * f3.m1 + 1e-300);
    EXPECT_NEAR(f3.m2, 3 * f1.m2, 1e-12 * f3.m2 + 1e-300);
    EXPECT_NEAR(f3.m3, 3 * f1.m3, 1e-12 * f3.m3 + 1e-300);
    EXPECT_NEAR(f3.m4, 3 * f1.m4, 1e-12 * f3.m4 + 1e-300);
    EXPECT_NEAR(f3.rhs, 3 * f1.rhs, 1e-12 * f3.rhs);
}

TEST(DiscretizedForms, IndicatorBoundedByConstants)
{
    const ParamTriple par{1, 1, 1};
    Built s(par, unit_weights(unit), 2);
    const int k = (s.cs.N + s.cs.M()) / 2 + 1;
    const auto f = discretized_forms(indicator(s.cs.x(k - 1), s.cs.x(k)), s.cs, s.pr);
    double csum = 0;
    for (const auto& l : required_C(Case::i)) csum += compute_Cij(s.cs, s.pr, l);
    for (double m : {f.m1, f.m2, f.m3, f.m4}) EXPECT_LE(m / f.rhs, 10 * csum);
}
