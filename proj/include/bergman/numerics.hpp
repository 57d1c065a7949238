#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>

#include "errors.hpp"

namespace bergman {

using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

// Gamma(a+b)/Gamma(a) as the exact rising product.
inline double pochhammer(double a, unsigned b)
{
    if (a <= 0.0 && a == std::floor(a))
        throw DomainError("pochhammer: Gamma pole at a = " + std::to_string(a));
    double result = 1.0;
    for (unsigned i = 0; i < b; ++i)
        result *= a + i;
    return result;
}

inline double factorial(unsigned n)
{
    return pochhammer(1.0, n);
}

inline bool on_branch_cut(Complex z)
{
    return z.imag() == 0.0 && z.real() <= 0.0;
}

inline Complex principal_log(Complex z)
{
    if (on_branch_cut(z))
        throw BranchCutError("principal log: argument on (-inf, 0]");
    return std::log(z);
}

inline Complex principal_power(Complex base, double exponent)
{
    if (on_branch_cut(base))
        throw BranchCutError("principal power: base on (-inf, 0]");
    if (exponent == 0.0)
        return 1.0;
    return std::exp(exponent * std::log(base));
}

inline Complex ipow(Complex z, int n)
{
    if (n < 0)
        return 1.0 / ipow(z, -n);
    Complex result = 1.0;
    while (n > 0) {
        if (n & 1)
            result *= z;
        z *= z;
        n >>= 1;
    }
    return result;
}

inline double ipow(double x, int n)
{
    if (n < 0)
        return 1.0 / ipow(x, -n);
    double result = 1.0;
    while (n > 0) {
        if (n & 1)
            result *= x;
        x *= x;
        n >>= 1;
    }
    return result;
}

inline bool is_finite(Complex z)
{
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline Complex require_finite(Complex z, const char* what)
{
    if (!is_finite(z))
        throw OverflowError(std::string(what) + ": non-finite result");
    return z;
}

// Neumaier summation, separately on the real and imaginary parts.
class CompensatedSum {
public:
    void add(Complex term)
    {
        if (!is_finite(term))
            throw OverflowError("compensated_sum: non-finite term");
        step(sum_re_, c_re_, term.real());
        step(sum_im_, c_im_, term.imag());
        if (!std::isfinite(sum_re_) || !std::isfinite(sum_im_))
            throw OverflowError("compensated_sum: overflow");
    }

    Complex value() const { return {sum_re_ + c_re_, sum_im_ + c_im_}; }

private:
    static void step(double& sum, double& c, double x)
    {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            c += (sum - t) + x;
        else
            c += (x - t) + sum;
        sum = t;
    }

    double sum_re_ = 0.0, c_re_ = 0.0;
    double sum_im_ = 0.0, c_im_ = 0.0;
};

inline Complex compensated_sum(std::span<const Complex> terms)
{
    CompensatedSum acc;
    for (Complex t : terms)
        acc.add(t);
    return acc.value();
}

inline double relative_error(Complex a, Complex b)
{
    double scale = std::max(std::abs(a), std::abs(b));
    if (scale == 0.0)
        return 0.0;
    return std::abs(a - b) / scale;
}

} // namespace bergman
