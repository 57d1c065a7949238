#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "bergman/numerics.hpp"
#include "bergman/quadrature.hpp"

using namespace bergman;

TEST(Pochhammer, SmallValues)
{
    EXPECT_DOUBLE_EQ(pochhammer(2.0, 3), 24.0);
    EXPECT_DOUBLE_EQ(pochhammer(1.5, 0), 1.0);
    EXPECT_DOUBLE_EQ(pochhammer(0.5, 2), 0.75);
}

TEST(Pochhammer, MatchesGammaRatio)
{
    for (double a : {0.3, 1.0, 2.7, 5.5})
        for (unsigned b = 0; b < 12; ++b)
            EXPECT_NEAR(pochhammer(a, b) / std::exp(std::lgamma(a + b) - std::lgamma(a)), 1.0, 1e-12);
}

TEST(Pochhammer, NonPositiveIntegerRejected)
{
    EXPECT_THROW(pochhammer(0.0, 2), DomainError);
    EXPECT_THROW(pochhammer(-3.0, 1), DomainError);
}

TEST(PrincipalPower, Values)
{
    EXPECT_DOUBLE_EQ(principal_power(1.0, 0.5).real(), 1.0);
    EXPECT_NEAR(std::abs(principal_power(4.0, 0.5) - Complex(2.0)), 0.0, 1e-15);
    Complex r = principal_power(Complex(1.0, 1.0), 0.5);
    EXPECT_NEAR(r.real(), 1.09868411346781, 1e-13);
    EXPECT_NEAR(r.imag(), 0.455089860562227, 1e-13);
}

TEST(PrincipalPower, BranchCut)
{
    EXPECT_THROW(principal_power(Complex(-1.0, 0.0), 0.5), BranchCutError);
    EXPECT_THROW(principal_power(Complex(0.0, 0.0), 0.5), BranchCutError);
    EXPECT_THROW(principal_log(Complex(-2.0, 0.0)), BranchCutError);
}

TEST(PrincipalPower, IntegerExponentIsRepeatedProduct)
{
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        Complex z(u(gen), u(gen));
        if (z.real() <= 0.0 && std::abs(z.imag()) < 1e-3)
            continue;
        for (int n = 0; n <= 6; ++n) {
            Complex prod = 1.0;
            for (int k = 0; k < n; ++k)
                prod *= z;
            EXPECT_LE(relative_error(principal_power(z, n), prod), 1e-13);
            EXPECT_LE(relative_error(ipow(z, n), prod), 1e-15);
        }
    }
}

TEST(CompensatedSum, Cancellation)
{
    std::vector<Complex> t{1.0, -1.0, 1e-16};
    EXPECT_EQ(compensated_sum(t).real(), 1e-16);
    EXPECT_EQ(compensated_sum(std::span<const Complex>{}), Complex(0.0));
}

TEST(CompensatedSum, ManyTenths)
{
    CompensatedSum s;
    for (int i = 0; i < 1'000'000; ++i)
        s.add(0.1);
    EXPECT_NEAR(s.value().real(), 1e5, 1e-9);
}

TEST(CompensatedSum, NonFiniteRejected)
{
    CompensatedSum s;
    EXPECT_THROW(s.add(Complex(std::numeric_limits<double>::infinity(), 0.0)), OverflowError);
}

TEST(Quadrature, GaussLegendreExactOnPolynomials)
{
    for (int n : {5, 10, 20}) {
        const auto& rule = detail::gl_rule(n);
        for (int deg = 0; deg < 2 * n; ++deg) {
            double s = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i)
                s += rule.weights[i] * std::pow(rule.nodes[i], deg);
            double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
            EXPECT_NEAR(s, exact, 1e-13) << n << " " << deg;
        }
    }
}

TEST(Quadrature, AdaptiveSmoothIntegrand)
{
    auto r = integrate_adaptive<double>([](double x) { return std::exp(-x) * std::cos(3 * x); }, 0.0, 2.0);
    double exact = (1.0 + std::exp(-2.0) * (3 * std::sin(6.0) - std::cos(6.0))) / 10.0;
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, exact, 1e-10);
}

TEST(Quadrature, AdaptiveInfiniteInterval)
{
    double inf = std::numeric_limits<double>::infinity();
    auto r = integrate_adaptive<double>([](double x) { return std::exp(-x) * x * x; }, 0.0, inf);
    EXPECT_NEAR(r.value, 2.0, 1e-8);
}
