#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ccheis/distance.hpp"
#include "ccheis/group.hpp"
#include "support.hpp"

using namespace ccheis;

using testing_support::code_of;
using testing_support::point;

TEST(GroupSpec, SingleBlockConstants)
{
    const auto s = GroupSpec::create({{1.0, 1}}, 1, {0.0});
    EXPECT_EQ(s.n(), 1);
    EXPECT_DOUBLE_EQ(s.K(), 1.0);
    EXPECT_DOUBLE_EQ(s.C_H(), 1.0);
    EXPECT_DOUBLE_EQ(s.N(), 2.5);
    ASSERT_EQ(s.c_frak().size(), 1u);
    EXPECT_DOUBLE_EQ(s.c_frak()[0], 1.0);
}

TEST(GroupSpec, TwoBlockConstants)
{
    const auto s = GroupSpec::create({{0.5, 1}, {1.0, 1}}, 1, {0.0});
    EXPECT_EQ(s.n(), 2);
    EXPECT_DOUBLE_EQ(s.K(), 1.25);
    EXPECT_DOUBLE_EQ(s.C_H(), 0.625);
    EXPECT_DOUBLE_EQ(s.N(), 3.5);
    EXPECT_NEAR(s.c_frak()[0], 2.0 / 7, 1e-15);
    EXPECT_NEAR(s.c_frak()[1], 5.0 / 7, 1e-15);
    EXPECT_EQ(s.block_offset(1), 2);
    EXPECT_EQ(s.dim_x(), 4);
}

TEST(GroupSpec, RejectsInvalidParameters)
{
    EXPECT_EQ(code_of([] { GroupSpec::create({{1.0, 1}}, 3, {0, 0, 0}); }), ErrorCode::DimensionConstraint);
    EXPECT_EQ(code_of([] { GroupSpec::create({{1.0, 1}}, 2, {0, 0}); }), ErrorCode::DimensionConstraint);
    EXPECT_EQ(code_of([] { GroupSpec::create({{1.0, 2}, {0.5, 2}}, 1, {0}); }), ErrorCode::NonIncreasingSpectrum);
    EXPECT_EQ(code_of([] { GroupSpec::create({{1.0, 2}, {1.0, 2}}, 1, {0}); }), ErrorCode::NonIncreasingSpectrum);
    EXPECT_EQ(code_of([] { GroupSpec::create({{1.0, 1}}, 1, {-0.1}); }), ErrorCode::NegativeWeight);
}

TEST(GroupSpec, AcceptsBoundaryOfDimensionConstraint)
{
    // m + 1 = 2 k_j for every block.
    EXPECT_NO_THROW(GroupSpec::create({{0.5, 2}, {1.0, 2}}, 3, {0, 0, 0}));
    EXPECT_NO_THROW(GroupSpec::create({{1.0, 1}}, 1, {0}));
}

TEST(Normalize, ScalesSpectrumWeightsAndCenter)
{
    const auto s = GroupSpec::create({{2.0, 1}, {4.0, 1}}, 1, {8.0});
    const auto [s2, g2] = normalize(s, point({1, 0, 0, 1}, {1.0}));
    EXPECT_DOUBLE_EQ(s2.a(0), 0.5);
    EXPECT_DOUBLE_EQ(s2.a(1), 1.0);
    EXPECT_DOUBLE_EQ(s2.b()[0], 0.5);
    EXPECT_DOUBLE_EQ(g2.t[0], 0.25);
    EXPECT_EQ(g2.x, (Vec(4) << 1, 0, 0, 1).finished());
}

TEST(Normalize, IdempotentAndDistancePreserving)
{
    const auto s = GroupSpec::create({{0.7, 2}, {3.0, 2}}, 2, {0.4, 2.0});
    const auto g = point({0.3, -0.2, 0.5, 0.1, -0.4, 0.6, 0.2, 0.9}, {0.7, -1.1});
    const auto [s1, g1] = normalize(s, g);
    const auto [s2, g2] = normalize(s1, g1);
    EXPECT_EQ(s1.canonical(), s2.canonical());
    EXPECT_EQ(g1.t, g2.t);
    EXPECT_NEAR(distance(s1, g1).d, distance(s, g).d, 1e-9);
}

TEST(HType, ValidatesStandardModels)
{
    for (const auto& blocks : std::vector<std::vector<SpectrumBlock>>{
             {{1.0, 1}}, {{0.5, 1}, {1.0, 1}}, {{1.0, 2}}, {{0.25, 3}, {0.5, 1}, {1.0, 2}}}) {
        const auto s = standard_u_m1(GroupSpec::create(blocks, 1, {0.0}));
        EXPECT_TRUE(validate_htype(s)) << s.canonical();
    }
}

TEST(HType, StandardMatrixEntries)
{
    const auto s = standard_u_m1(GroupSpec::create({{0.5, 1}, {1.0, 1}}, 1, {0.0}));
    Mat expect = Mat::Zero(4, 4);
    expect(0, 1) = 0.5;
    expect(1, 0) = -0.5;
    expect(2, 3) = 1.0;
    expect(3, 2) = -1.0;
    EXPECT_EQ((*s.u_matrices())[0], expect);

    const auto s2 = standard_u_m1(GroupSpec::create({{1.0, 2}}, 1, {0.0}));
    const Mat& u = (*s2.u_matrices())[0];
    EXPECT_EQ(u(0, 1), 1.0);
    EXPECT_EQ(u(2, 3), 1.0);
    EXPECT_EQ(u(1, 2), 0.0);
}

TEST(HType, RejectsNonSkewMatrix)
{
    const auto s = GroupSpec::create({{1.0, 1}}, 1, {0.0}, std::vector<Mat>{Mat::Identity(2, 2)});
    EXPECT_FALSE(validate_htype(s));
}

TEST(HType, ErrorsWithoutMatrices)
{
    const auto s = GroupSpec::create({{1.0, 1}}, 1, {0.0});
    EXPECT_EQ(code_of([&] { validate_htype(s); }), ErrorCode::MissingU);
    EXPECT_EQ(code_of([&] { multiply(s, identity(s), identity(s)); }), ErrorCode::MissingU);
    const auto s2 = GroupSpec::create({{1.0, 2}}, 2, {0.0, 0.0});
    EXPECT_EQ(code_of([&] { standard_u_m1(s2); }), ErrorCode::WrongCenterDim);
}

TEST(Multiply, HeisenbergBasisProduct)
{
    const auto s = standard_u_m1(GroupSpec::create({{1.0, 1}}, 1, {0.0}));
    const auto g = multiply(s, point({1, 0}, {0}), point({0, 1}, {0}));
    EXPECT_DOUBLE_EQ(g.x[0], 1.0);
    EXPECT_DOUBLE_EQ(g.x[1], 1.0);
    // <U e1, e2> with U = [[0,1],[-1,0]] is -1.
    EXPECT_DOUBLE_EQ(g.t[0], -0.5);
}

TEST(Multiply, GroupLaws)
{
    const auto s = standard_u_m1(GroupSpec::create({{0.5, 1}, {1.0, 2}}, 1, {0.3}));
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    auto rnd = [&] {
        GroupPoint g{Vec(s.dim_x()), Vec(1)};
        for (auto& v : g.x) v = nd(rng);
        g.t[0] = nd(rng);
        return g;
    };
    for (int i = 0; i < 200; ++i) {
        const auto a = rnd(), b = rnd(), c = rnd();
        const auto l = multiply(s, multiply(s, a, b), c);
        const auto r = multiply(s, a, multiply(s, b, c));
        EXPECT_LT((l.x - r.x).norm() + (l.t - r.t).norm(), 1e-12);
        const auto e = multiply(s, a, identity(s));
        EXPECT_EQ(e.x, a.x);
        EXPECT_EQ(e.t, a.t);
        const auto o = multiply(s, a, inverse(a));
        EXPECT_LT(o.x.norm() + o.t.norm(), 1e-15);
    }
}

TEST(Multiply, LeftTranslationPreservesMeasure)
{
    // The map (x', t') -> g (x', t') is affine; its linear part must have unit determinant.
    const auto s = standard_u_m1(GroupSpec::create({{0.5, 1}, {1.0, 1}}, 1, {0.0}));
    const auto g = point({0.3, -1.2, 0.7, 2.0}, {0.4});
    const int d = s.dim_x() + 1;
    Mat J(d, d);
    const auto base = multiply(s, g, identity(s));
    for (int c = 0; c < d; ++c) {
        GroupPoint e = identity(s);
        if (c < s.dim_x()) e.x[c] = 1.0;
        else e.t[0] = 1.0;
        const auto p = multiply(s, g, e);
        J.block(0, c, s.dim_x(), 1) = p.x - base.x;
        J(d - 1, c) = p.t[0] - base.t[0];
    }
    EXPECT_NEAR(J.determinant(), 1.0, 1e-14);
}

TEST(WxNorm, Examples)
{
    const auto s1 = GroupSpec::create({{1.0, 2}}, 1, {0.0});
    EXPECT_EQ(wx_norm(s1, Vec::Zero(4)), 0.0);
    const Vec x = (Vec(4) << 1, 2, -2, 0.5).finished();
    EXPECT_NEAR(wx_norm(s1, x), x.norm(), 1e-15);
    const auto s2 = GroupSpec::create({{0.5, 1}, {1.0, 1}}, 1, {0.0});
    EXPECT_NEAR(wx_norm(s2, (Vec(4) << 2, 0, 0, 1).finished()), std::sqrt(2.0), 1e-15);
}

TEST(Point, DimensionMismatchRejected)
{
    const auto s = GroupSpec::create({{1.0, 1}}, 1, {0.0});
    EXPECT_THROW(check_point(s, point({1, 2, 3}, {0})), Error);
    EXPECT_THROW(check_point(s, point({1, 2}, {0, 1})), Error);
    EXPECT_NO_THROW(check_point(s, point({1, 2}, {0})));
}
