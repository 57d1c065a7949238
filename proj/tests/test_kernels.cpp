#include <gtest/gtest.h>

#include "bergman/bergman.hpp"

using namespace bergman;

namespace {

Complex at(const ClosedFormKernel& K, const CPoint& z) { return K(z, z); }

double max_delta(const KernelEvaluator& a, const KernelEvaluator& b, const DomainSpec& spec, std::size_t pairs,
                 std::uint64_t seed)
{
    auto pts = sample_interior(spec, 2 * pairs, seed).points;
    double worst = 0.0;
    for (std::size_t i = 0; i < pairs; ++i)
        worst = std::max(worst, relative_error(a(pts[2 * i], pts[2 * i + 1]), b(pts[2 * i], pts[2 * i + 1])));
    return worst;
}

std::vector<ClosedFormKernel> all_closed()
{
    return {kernel_disk(),
            kernel_ball(3),
            kernel_dangelo(1, 2.0),
            kernel_dangelo(2, 0.7),
            kernel_dangelo_inflated(1, 2, 2.0),
            kernel_ex42(1, 1),
            kernel_ex42(2, 1),
            kernel_ex43(1, 1, {1.0}),
            kernel_ex43(2, 0, {0.5, 1.5}),
            kernel_ex71_stage3(2.5),
            kernel_product(kernel_disk(), kernel_dangelo(1, 2.0))};
}

} // namespace

TEST(ClosedForm, OriginAndDiagonalValues)
{
    EXPECT_NEAR(at(kernel_disk(), {0.0}).real(), 1.0 / pi, 1e-15);
    EXPECT_NEAR(at(kernel_ball(2), {0.0, 0.0}).real(), 2.0 / (pi * pi), 1e-15);
    EXPECT_NEAR(at(kernel_disk(), {0.5}).real(), 0.565884242104517, 1e-14);
    EXPECT_NEAR(at(kernel_dangelo(1, 2.0), {0.0, 0.0}).real(), 0.151981775463507, 1e-14);
    EXPECT_NEAR(at(kernel_dangelo(1, 2.0), {0.5, 0.0}).real(), 0.330232005945397, 1e-13);
    EXPECT_NEAR(at(kernel_ex42(1, 1), {0.0, 0.0, 0.0}).real(), 4.0 / std::pow(pi, 3), 1e-15);
    EXPECT_NEAR(at(kernel_ex43(1, 1, {1.0}), {0.0, 0.0, 0.0}).real(), 2.0 / std::pow(pi, 3), 1e-15);
    EXPECT_NEAR(at(kernel_ex43(1, 0, {1.0}), {0.0, 0.0}).real(), 1.0 / (pi * pi), 1e-15);
    auto dd = kernel_product(kernel_disk(), kernel_disk());
    EXPECT_NEAR(at(dd, {0.0, 0.0}).real(), 1.0 / (pi * pi), 1e-15);
    EXPECT_NEAR(at(dd, {0.5, 0.5}).real(), 0.320224975462203, 1e-13);
}

TEST(ClosedForm, ExponentOneIsBall)
{
    EXPECT_LT(max_delta(kernel_dangelo(1, 1.0).evaluator, kernel_ball(2).evaluator, DomainSpec(BaseDomain::ball(2)),
                        200, 1),
              1e-12);
    EXPECT_LT(max_delta(kernel_dangelo(2, 1.0).evaluator, kernel_ball(3).evaluator, DomainSpec(BaseDomain::ball(3)),
                        200, 2),
              1e-12);
    for (std::size_t n : {1, 2})
        for (std::size_t m : {1, 2, 3})
            EXPECT_LT(max_delta(kernel_dangelo_inflated(n, m, 1.0).evaluator, kernel_ball(n + m).evaluator,
                                DomainSpec(BaseDomain::ball(n + m)), 100, 3),
                      1e-10)
                << n << " " << m;
}

TEST(ClosedForm, NoPassiveCoordinatesIsBall)
{
    for (std::size_t n : {1, 2, 3})
        EXPECT_LT(max_delta(kernel_ex42(n, 0).evaluator, kernel_ball(n + 1).evaluator,
                            DomainSpec(BaseDomain::ball(n + 1)), 200, 4),
                  1e-12);
}

TEST(ClosedForm, AgreesWithSeries)
{
    auto inflated = kernel_dangelo_inflated(1, 2, 2.0);
    CPoint o(3, 0.0);
    auto s = series_kernel(inflated.domain(), o, o, 2);
    EXPECT_LT(relative_error(at(inflated, o), s.value), 1e-13);

    auto e43 = kernel_ex43(1, 1, {2.0});
    CPoint p{0.3, 0.4, 0.5};
    auto t = series_kernel(e43.domain(), p, p, 150, SeriesOptions{1e-15});
    EXPECT_LT(relative_error(at(e43, p), t.value), 1e-10);

    auto d = kernel_dangelo(2, 0.7);
    CPoint a{Complex(0.2, 0.1), Complex(-0.1, 0.2), Complex(0.1, -0.3)};
    CPoint b{Complex(0.1, -0.2), Complex(0.2, 0.1), Complex(-0.3, 0.1)};
    auto u = series_kernel(d.domain(), a, b, 60, SeriesOptions{1e-15});
    EXPECT_LT(relative_error(d(a, b), u.value), 1e-10);
}

TEST(ClosedForm, Stage3MatchesLiftedPipeline)
{
    auto k = kernel_ex71_stage3(2.5);
    EXPECT_LT(max_delta(k.evaluator, compose_pipeline(k.domain()), k.domain(), 200, 5), 1e-10);
    auto k2 = kernel_ex71_stage3(1.3);
    EXPECT_LT(max_delta(k2.evaluator, compose_pipeline(k2.domain()), k2.domain(), 200, 6), 1e-10);
}

TEST(ClosedForm, HermitianSymmetry)
{
    for (const auto& K : all_closed()) {
        auto sample = sample_region(K, 2000, 7).points;
        double worst = 0.0;
        for (std::size_t i = 0; i + 1 < sample.size(); i += 2) {
            Complex a = K(sample[i], sample[i + 1]), b = K(sample[i + 1], sample[i]);
            worst = std::max(worst, std::abs(a - std::conj(b)) / std::abs(a));
        }
        EXPECT_LT(worst, 1e-13) << K.name;
    }
}

TEST(ClosedForm, DiagonalPositive)
{
    for (const auto& K : all_closed()) {
        for (const auto& p : sample_region(K, 500, 8).points) {
            Complex v = K(p, p);
            ASSERT_GT(v.real(), 0.0) << K.name;
            ASSERT_LE(std::abs(v.imag()), 1e-12 * v.real()) << K.name;
        }
    }
}

TEST(ClosedForm, DiagonalBlowsUpAtBoundary)
{
    for (const auto& K : all_closed()) {
        for (const auto& p : sample_region(K, 20, 9).points) {
            double lo = 1.0, hi = 1.0;
            auto scaled = [&](double s) {
                CPoint q = p;
                for (auto& c : q)
                    c *= s;
                return q;
            };
            while (K.contains(scaled(hi)))
                hi *= 2.0;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
                double mid = 0.5 * (lo + hi);
                (K.contains(scaled(mid)) ? lo : hi) = mid;
            }
            CPoint q = scaled(lo * (1.0 - 1e-6));
            ASSERT_TRUE(K.contains(q));
            EXPECT_GT(K(q, q).real(), 1e6) << K.name;
        }
    }
}

TEST(ClosedForm, DimensionChecked)
{
    EXPECT_THROW(kernel_ball(2)(CPoint{0.0}, CPoint{0.0}), DimensionError);
    EXPECT_THROW(kernel_ball(0), InvalidArgument);
    EXPECT_THROW(kernel_dangelo(1, -1.0), InvalidArgument);
    EXPECT_THROW(kernel_dangelo_inflated(1, 5, 2.0), UnsupportedOrderError);
}

TEST(ClosedForm, Lookup)
{
    EXPECT_EQ(closed_form_for(kernel_ex42(1, 1).domain()).name, kernel_ex42(1, 1).name);
    EXPECT_NO_THROW(closed_form_for(DomainSpec(BaseDomain::polydisk(2))));
    EXPECT_THROW(closed_form_for(stage4_spec()), NoClosedFormError);
}
