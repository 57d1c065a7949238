#include <gtest/gtest.h>

#include "bergman/bergman.hpp"

using namespace bergman;

namespace {

std::vector<CPoint> shrunk(std::vector<CPoint> pts, double s)
{
    for (auto& p : pts)
        for (auto& c : p)
            c *= s;
    return pts;
}

double max_delta(const KernelEvaluator& a, const KernelEvaluator& b, const std::vector<CPoint>& pts)
{
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2)
        worst = std::max(worst, relative_error(a(pts[i], pts[i + 1]), b(pts[i], pts[i + 1])));
    return worst;
}

} // namespace

TEST(Slice, KernelValues)
{
    auto disk = kernel_disk().evaluator;
    LiftStep u{LiftKind::U, {1.0}, 1};
    CPoint o{0.0};
    Complex w0[] = {0.0};
    auto s0 = slice_kernel(disk, u, w0);
    CPoint z{Complex(0.3, 0.1)}, q{Complex(-0.2, 0.4)};
    EXPECT_EQ(s0(z, q), disk(z, q));
    Complex w[] = {std::sqrt(0.5)};
    EXPECT_NEAR(std::abs(slice_kernel(disk, u, w)(o, o) - 2.0 / pi), 0.0, 1e-14);
    Complex bad[] = {1.0};
    EXPECT_THROW(slice_kernel(disk, u, bad), SingularEvaluationError);
}

TEST(Lift, DiskUWithTwoDimensionalFibreMatchesSeries)
{
    auto K = lift_U(kernel_disk().evaluator, {0.5}, 2);
    DomainSpec spec(BaseDomain::disk(), {LiftStep{LiftKind::U, {0.5}, 2}});
    auto pts = shrunk(sample_interior(spec, 20, 1).points, 0.6);
    SeriesOracle oracle(spec, 60);
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
        auto s = oracle(pts[i], pts[i + 1], SeriesOptions{1e-14});
        EXPECT_LT(relative_error(K(pts[i], pts[i + 1]), s.value), 1e-8);
    }
}

TEST(Lift, VOfDiskAtOrigin)
{
    auto K = lift_V(kernel_disk().evaluator, {1.0});
    CPoint o{0.0, 0.0};
    EXPECT_NEAR(std::abs(K(o, o) - 1.0 / (pi * pi)), 0.0, 1e-15);
}

TEST(Lift, MatchesClosedForms)
{
    auto disk = kernel_disk().evaluator;
    auto d = kernel_dangelo(1, 2.0);
    EXPECT_LT(max_delta(lift_U(disk, {0.5}), d.evaluator, sample_interior(d.domain(), 200, 2).points), 1e-12);
    auto d3 = kernel_dangelo_inflated(1, 3, 2.0);
    EXPECT_LT(max_delta(lift_U(disk, {0.5}, 3), d3.evaluator, sample_interior(d3.domain(), 200, 3).points), 1e-10);
    for (const auto& K : {kernel_ex42(1, 1), kernel_ex42(2, 1), kernel_ex43(1, 1, {1.0}), kernel_ex43(2, 1, {0.5, 2.0})})
        EXPECT_LT(max_delta(compose_pipeline(K.domain()), K.evaluator, sample_interior(K.domain(), 200, 4).points),
                  1e-10)
            << K.name;
}

TEST(Lift, EmptyLiftListIsBase)
{
    for (auto base : {BaseDomain::disk(), BaseDomain::ball(2, 1), BaseDomain::ellipsoid({2.0, 1.0}, 1),
                      BaseDomain::polydisk(2)}) {
        DomainSpec spec(base);
        auto a = compose_pipeline(spec), b = base_kernel(base);
        for (const auto& p : sample_interior(spec, 50, 5).points) {
            CPoint q = p;
            for (auto& c : q)
                c = std::conj(c) * 0.5;
            EXPECT_EQ(a(p, q), b(p, q));
        }
    }
}

TEST(Lift, SmallWeightApproachesProduct)
{
    // U with weight -> 0 degenerates to the product with the unit disk
    auto K = lift_U(kernel_disk().evaluator, {1e-6});
    auto P = kernel_product(kernel_disk(), kernel_disk());
    auto pts = shrunk(sample_region(P, 100, 6).points, 0.9);
    EXPECT_LT(max_delta(K, P.evaluator, pts), 1e-4);
}

TEST(Lift, Stage4MatchesSeries)
{
    auto spec = stage4_spec();
    auto K = compose_pipeline(spec);
    auto pts = shrunk(sample_interior(spec, 20, 7).points, 0.6);
    SeriesOracle oracle(spec, series_cap(spec.dimension()));
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
        auto s = oracle(pts[i], pts[i + 1]);
        EXPECT_LT(relative_error(K(pts[i], pts[i + 1]), s.value), 1e-3);
        EXPECT_LT(s.tail_bound, 1e-4);
    }
}

TEST(Lift, FactorOrderIndependent)
{
    auto base = kernel_ball(2).evaluator;
    auto asc = lift_U(base, {0.3, 1.7}, 3, FactorOrder::Ascending);
    auto desc = lift_U(base, {0.3, 1.7}, 3, FactorOrder::Descending);
    DomainSpec spec(BaseDomain::ball(2), {LiftStep{LiftKind::U, {0.3, 1.7}, 3}});
    EXPECT_LT(max_delta(asc, desc, sample_interior(spec, 200, 8).points), 1e-13);
    auto vasc = lift_V(base, {0.4, 1.1}, 2, FactorOrder::Ascending);
    auto vdesc = lift_V(base, {0.4, 1.1}, 2, FactorOrder::Descending);
    DomainSpec vspec(BaseDomain::ball(2), {LiftStep{LiftKind::V, {0.4, 1.1}, 2}});
    EXPECT_LT(max_delta(vasc, vdesc, sample_interior(vspec, 200, 9).points), 1e-13);
}

TEST(Lift, DegreeStructure)
{
    // K(e^{i theta_j} z_j, e^{i theta_j} zeta_j) = K(z, zeta) for each j
    // separately, so only the (z zeta-bar)^a monomials occur
    auto spec = stage4_spec();
    auto K = compose_pipeline(spec);
    auto pts = sample_interior(spec, 40, 10).points;
    CounterRng rng(10, 0);
    std::uint64_t c = 0;
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
        Complex v = K(pts[i], pts[i + 1]);
        for (std::size_t j = 0; j < spec.dimension(); ++j) {
            CPoint a = pts[i], b = pts[i + 1];
            Complex rot = std::polar(1.0, 2.0 * pi * rng.uniform(c++));
            a[j] *= rot;
            b[j] *= rot;
            EXPECT_LT(relative_error(K(a, b), v), 1e-12);
        }
    }
    // holomorphic in z: the Taylor coefficients of z_1 -> K at fixed zeta
    // scale by e^{-i k theta} when zeta_1 is rotated by e^{i theta}
    CPoint z = pts[0], q = pts[1];
    std::vector<Jet> zj(z.begin(), z.end());
    zj[0] = Jet::variable(0, 3, 0.0);
    Jet base = K(zj, q);
    CPoint qr = q;
    Complex rot = std::polar(1.0, 0.7);
    qr[0] *= rot;
    Jet turned = K(zj, qr);
    for (int k = 0; k <= 3; ++k) {
        int pw[] = {k};
        EXPECT_LT(std::abs(turned.coefficient(pw) - base.coefficient(pw) * std::pow(std::conj(rot), k)),
                  1e-12 * std::abs(base.value()));
    }
}

TEST(Lift, Errors)
{
    auto disk = kernel_disk().evaluator;
    EXPECT_THROW(lift_U(disk, {1.0, 1.0}), InvalidArgument);
    EXPECT_THROW(lift_U(disk, {-1.0}), InvalidArgument);
    EXPECT_THROW(lift_U(disk, {0.0}), InvalidArgument);
    EXPECT_THROW(lift_V(disk, {1.0}, 4), UnsupportedOrderError);
    auto K = lift_U(disk, {1.0});
    EXPECT_THROW(K(CPoint{0.0}, CPoint{0.0}), DimensionError);
}
