#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ccheis/distance.hpp"
#include "ccheis/poisson.hpp"
#include "ccheis/volume.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace ccheis;
using std::numbers::pi;
using testing_support::code_of;
using testing_support::point;

namespace {

GroupSpec h21() { return GroupSpec::create({{1.0, 1}}, 1, {0.0}); }

struct Case {
    GroupSpec spec;
    GroupPoint g;
    double h;
};

std::vector<Case> cases()
{
    std::vector<Case> out;
    std::mt19937_64 rng(99);
    std::normal_distribution<double> nd;
    const std::vector<GroupSpec> specs = {
        h21(),
        GroupSpec::create({{0.5, 1}, {1.0, 1}}, 1, {0.0}),
        GroupSpec::create({{0.5, 1}, {1.0, 2}}, 1, {2.0}),
        GroupSpec::create({{0.5, 2}, {1.0, 2}}, 2, {0.0, 0.0}),
        GroupSpec::create({{0.5, 2}, {1.0, 2}}, 2, {0.1, 10.0}),
        GroupSpec::create({{0.25, 2}, {0.5, 2}, {1.0, 2}}, 2, {1.0, 0.3}),
    };
    for (const auto& s : specs) {
        for (int i = 0; i < 4; ++i) {
            GroupPoint g{Vec(s.dim_x()), Vec(s.m())};
            for (auto& v : g.x) v = nd(rng);
            for (auto& v : g.t) v = 2 * nd(rng);
            const double d = distance(s, g).d;
            out.push_back({s, g, d / std::sqrt(double(s.n())) * (0.2 + 0.25 * i)});
        }
    }
    return out;
}

std::vector<oracle::ld> as_ld(const Vec& v) { return {v.begin(), v.end()}; }

} // namespace

TEST(SValue, OriginAndOracle)
{
    for (const auto& c : cases()) {
        EXPECT_NEAR(s_value(c.spec, c.g, c.h, Vec::Zero(c.spec.m())), c.g.x.squaredNorm() + c.h * c.h, 1e-13);
        Vec lam = Vec::Constant(c.spec.m(), 0.7 / std::sqrt(double(c.spec.m())));
        lam[0] = -lam[0];
        const double ref = static_cast<double>(oracle::s_value(c.spec, c.g, c.h, as_ld(lam)));
        EXPECT_NEAR(s_value(c.spec, c.g, c.h, lam), ref, 1e-13 * std::abs(ref));
    }
}

TEST(SValue, InitialSlopeAlongCenter)
{
    for (const auto& c : cases()) {
        const Vec dir = c.g.t.normalized();
        const double r = 1e-6;
        const double slope = (s_value(c.spec, c.g, c.h, r * dir) - s_value(c.spec, c.g, c.h, -r * dir)) / (2 * r);
        EXPECT_NEAR(slope, 4 * c.g.t.norm(), 1e-6 * (1 + c.g.t.norm()));
    }
}

TEST(Saddle, GradientVanishes)
{
    for (const auto& c : cases()) {
        const auto sd = saddle_solve(c.spec, c.g, c.h);
        const double scale = c.g.x.squaredNorm() + c.h * c.h;
        EXPECT_LT(sd.grad_norm, 1e-9 * scale);
        EXPECT_GT(sd.rho, 0.0);
        EXPECT_LT(sd.rho, r_star(c.spec));
        Vec grad(c.spec.m());
        for (int l = 0; l < c.spec.m(); ++l) {
            Vec e = Vec::Zero(c.spec.m());
            e[l] = 1e-6;
            grad[l] = (s_value(c.spec, c.g, c.h, sd.tau + e) - s_value(c.spec, c.g, c.h, sd.tau - e)) / 2e-6;
        }
        EXPECT_LT(grad.norm(), 1e-7 * scale) << c.spec.canonical();
    }
}

TEST(Saddle, MatchesGridArgmaxForOneCenterDimension)
{
    for (const auto& c : cases()) {
        if (c.spec.m() != 1) continue;
        auto f = [&](oracle::ld l) { return oracle::s_value(c.spec, c.g, c.h, {l}); };
        const double edge = pi * (1 - 1e-9);
        const double ref = static_cast<double>(oracle::argmax_1d(f, -edge, edge));
        EXPECT_NEAR(saddle_solve(c.spec, c.g, c.h).tau[0], ref, 1e-6) << c.spec.canonical();
    }
}

TEST(Saddle, UniqueMaximizerOnGrid)
{
    for (const auto& c : cases()) {
        if (c.spec.m() != 2) continue;
        const auto sd = saddle_solve(c.spec, c.g, c.h);
        double best = -INFINITY;
        Vec arg(2);
        const int n = 300;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j) {
                const Vec lam = (Vec(2) << -pi + 2 * pi * i / n, -pi + 2 * pi * j / n).finished() * 0.999;
                if (lam.norm() >= pi * 0.999) continue;
                const double v = s_value(c.spec, c.g, c.h, lam);
                if (v > best) {
                    best = v;
                    arg = lam;
                }
            }
        EXPECT_LE(best, sd.s_value * (1 + 1e-12));
        EXPECT_LT((arg - sd.tau).norm(), 2 * 2 * pi / n) << c.spec.canonical();
    }
}

TEST(Saddle, ClosedFormValueAndRoundTrip)
{
    for (const auto& c : cases()) {
        const auto sd = saddle_solve(c.spec, c.g, c.h);
        EXPECT_NEAR(sd.s_value, s_value(c.spec, c.g, c.h, sd.tau), 1e-12 * sd.s_value);
        EXPECT_NEAR(s_at_saddle_closed(c.spec, c.g, c.h, sd), sd.s_value, 1e-10 * sd.s_value);
        const auto prof = RadialProfile::from_point(c.spec, c.g.x, c.h);
        EXPECT_LT((c_map(c.spec, prof, sd.tau) - c.g.t).norm(), 1e-9 * c.g.t.norm());
        EXPECT_LE(c_map(c.spec, prof, Vec::Zero(c.spec.m())).norm(), 0.0);
    }
}

TEST(Saddle, UpperBoundBySquaredDistance)
{
    for (const auto& c : cases()) {
        const auto sd = saddle_solve(c.spec, c.g, c.h);
        const double d = distance(c.spec, c.g).d;
        EXPECT_LE(sd.s_value, (d * d + c.h * c.h) * lambda_big(c.spec, sd.rho) * (1 + 1e-12));
    }
}

TEST(Saddle, RejectsPointsOffGenericSet)
{
    const auto s = GroupSpec::create({{0.5, 1}, {1.0, 1}}, 1, {0.0});
    EXPECT_EQ(code_of([&] { saddle_solve(s, point({1, 0, 1, 1}, {0.5}), 0.1); }), ErrorCode::OutsideDomainG);
    EXPECT_EQ(code_of([&] { saddle_solve(s, point({1, 1, 1, 1}, {0.0}), 0.1); }), ErrorCode::OutsideDomainG);
}

TEST(CMap, MonotoneWithoutWeights)
{
    const auto s = GroupSpec::create({{0.5, 1}, {1.0, 1}}, 1, {0.0});
    const auto prof = RadialProfile::from_point(s, (Vec(4) << 0.3, 1, -0.2, 0.5).finished(), 0.4);
    double prev = 0;
    for (int i = 1; i < 400; ++i) {
        const double v = c_map(s, prof, Vec::Constant(1, i * r_star(s) / 400))[0];
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(Hessian, MatchesFiniteDifferences)
{
    for (const auto& c : cases()) {
        const auto sd = saddle_solve(c.spec, c.g, c.h);
        const Mat H = hessian_s(c.spec, c.g, c.h, sd);
        const Mat fd = -oracle::hessian_fd([&](const Vec& l) { return s_value(c.spec, c.g, c.h, l); }, sd.tau,
                                           3e-4 * std::max(sd.rho, 0.1));
        EXPECT_LT((H - fd).cwiseAbs().maxCoeff(), 1e-5 * H.cwiseAbs().maxCoeff()) << c.spec.canonical();
        EXPECT_EQ(Eigen::LLT<Mat>(H).info(), Eigen::Success);
        EXPECT_LT((H - sd.neg_hessian).norm(), 1e-12 * H.norm());
    }
}

TEST(Hessian, RankOneStructureWithoutWeights)
{
    for (const auto& c : cases()) {
        if (c.spec.m() != 2 || c.spec.b()[0] != 0 || c.spec.b()[1] != 0) continue;
        const auto sd = saddle_solve(c.spec, c.g, c.h);
        const Vec perp = (Vec(2) << -sd.tau[1], sd.tau[0]).finished();
        const Vec hp = sd.neg_hessian * perp;
        const Vec ht = sd.neg_hessian * sd.tau;
        EXPECT_NEAR(hp.dot(sd.tau), 0.0, 1e-12 * hp.norm() * sd.rho);
        EXPECT_NEAR(ht.dot(perp), 0.0, 1e-12 * ht.norm() * sd.rho);
    }
}

TEST(Kernel, DirectAgreesWithShiftedContour)
{
    QuadConfig cfg;
    cfg.rel_tol = 1e-9;
    for (const auto& c : cases()) {
        const auto direct = poisson_direct(c.spec, c.g, c.h, cfg);
        const auto shifted = poisson_shifted(c.spec, c.g, c.h, cfg);
        EXPECT_GT(direct.value, 0.0);
        EXPECT_LT(direct.imag_ratio, 1e-8);
        EXPECT_LT(shifted.imag_ratio, 1e-8);
        EXPECT_NEAR(direct.value, shifted.value, 1e-6 * shifted.value) << c.spec.canonical();
    }
}

TEST(Kernel, SaddleApproachesQuadratureAsDimensionGrows)
{
    // The Laplace error shrinks with N: about 15% at n = 1 and under 6% at n = 8.
    double prev_err = 1.0;
    for (int k : {1, 2, 4, 8}) {
        const auto s = GroupSpec::create({{1.0, k}}, 1, {0.0});
        const auto g = GroupPoint{Vec::Constant(2 * k, 0.7), Vec::Constant(1, 0.8)};
        const double h = 0.1;
        const double ratio = poisson_saddle(s, g, h).value / poisson_shifted(s, g, h).value;
        const double err = std::abs(ratio - 1.0);
        EXPECT_LT(err, prev_err) << k;
        EXPECT_LT(err, 0.2);
        prev_err = err;
    }
    EXPECT_LT(prev_err, 0.06);
}

TEST(Kernel, ShiftedQuadratureStableUnderRefinement)
{
    const auto s = GroupSpec::create({{0.5, 1}, {1.0, 1}}, 1, {0.3});
    const auto g = point({0.4, -0.7, 0.9, 0.2}, {1.3});
    QuadConfig lo, hi;
    lo.rel_tol = 1e-6;
    hi.rel_tol = 1e-11;
    const double a = poisson_shifted(s, g, 0.3, lo).value;
    const double b = poisson_shifted(s, g, 0.3, hi).value;
    EXPECT_NEAR(a, b, 1e-5 * b);
}

TEST(Kernel, SmallHScalingIsLinear)
{
    const auto s = GroupSpec::create({{0.5, 1}, {1.0, 1}}, 1, {0.0});
    const auto g = point({0.4, -0.7, 0.9, 0.2}, {1.3});
    const double h1 = 1e-3, h2 = 2e-3;
    for (auto f : {+[](const GroupSpec& sp, const GroupPoint& p, double h) { return poisson_saddle(sp, p, h).value; },
                   +[](const GroupSpec& sp, const GroupPoint& p, double h) { return poisson_shifted(sp, p, h).value; }}) {
        const double slope = std::log(f(s, g, h2) / f(s, g, h1)) / std::log(h2 / h1);
        EXPECT_NEAR(slope, 1.0, 1e-3);
    }
}

TEST(Kernel, LargeHDecayAtOrigin)
{
    // P_h(o) = h^{-(2n + 2m)} P_1(o) by dilation.
    const auto s = h21();
    QuadConfig cfg;
    cfg.rel_tol = 1e-10;
    const double p1 = poisson_direct(s, identity(s), 100.0, cfg).value;
    const double p2 = poisson_direct(s, identity(s), 200.0, cfg).value;
    EXPECT_NEAR(std::log(p2 / p1) / std::log(2.0), -2.0 * (s.n() + s.m()), 1e-6);
}

TEST(Kernel, SaddleFlagsRegime)
{
    const auto s = h21();
    const auto g = point({1.0, 0.5}, {0.8});
    const double d = distance(s, g).d;
    EXPECT_FALSE(poisson_saddle(s, g, 0.5 * d).regime_warning);
    EXPECT_TRUE(poisson_saddle(s, g, 2.0 * d).regime_warning);
}

TEST(Heat, OriginValueOnClassicalGroup)
{
    const double integral = static_cast<double>(oracle::lambda_over_sinh_integral());
    ASSERT_NEAR(integral, pi * pi / 2, 1e-14);
    const auto s = h21();
    QuadConfig cfg;
    cfg.rel_tol = 1e-10;
    for (double h : {0.25, 1.0, 4.0}) {
        // h^{-2} / (2 pi * 4 pi) * int lam / sinh lam dlam
        const double expect = integral / (8 * pi * pi) / (h * h);
        EXPECT_NEAR(heat_kernel(s, identity(s), h, cfg).value, expect, 1e-8 * expect) << h;
    }
}

TEST(Heat, ScalingAndPositivity)
{
    const auto s = GroupSpec::create({{0.5, 2}, {1.0, 2}}, 2, {0.0, 0.0});
    QuadConfig cfg;
    cfg.rel_tol = 1e-9;
    const double p1 = heat_kernel(s, identity(s), 0.5, cfg).value;
    const double p2 = heat_kernel(s, identity(s), 1.0, cfg).value;
    EXPECT_NEAR(p1 / p2, std::pow(2.0, s.n() + s.m()), 1e-6 * p1 / p2);
    for (const auto& c : cases()) EXPECT_GT(heat_kernel(c.spec, c.g, 0.5, cfg).value, 0.0);
}

TEST(Maximal, VanishesOutsideBall)
{
    const auto s = h21();
    const auto g = point({1.0, 0.5}, {0.8});
    const double d = distance(s, g).d;
    EXPECT_EQ(maximal_bound_check(s, g, 0.9 * d), 0.0);
}

TEST(Maximal, BoundaryValueOnClassicalGroup)
{
    // Frozen from a 20-digit evaluation of the h-average of the real-contour integral.
    constexpr double kRatio = 12.862046370280912066;
    const auto s = h21();
    const auto g = point({0.999, 0.000999}, {9.98001e-05});
    QuadConfig cfg;
    cfg.rel_tol = 1e-8;
    EXPECT_NEAR(maximal_bound_check(s, g, 1.0, -1.0, cfg), kRatio, 1e-6 * kRatio);
}

TEST(Maximal, FiniteAndDilationInvariant)
{
    const auto s = GroupSpec::create({{0.5, 1}, {1.0, 1}}, 1, {0.0});
    const auto g = point({0.4, -0.7, 0.9, 0.2}, {0.6});
    const double d = distance(s, g).d;
    QuadConfig cfg;
    cfg.rel_tol = 1e-6;
    const double r1 = maximal_bound_check(s, g, 1.5 * d, -1.0, cfg);
    const double r2 = maximal_bound_check(s, {2 * g.x, 4 * g.t}, 3.0 * d, -1.0, cfg);
    EXPECT_GT(r1, 0.0);
    EXPECT_LT(r1, 10.0);
    EXPECT_NEAR(r1, r2, 1e-4 * r1);
}
