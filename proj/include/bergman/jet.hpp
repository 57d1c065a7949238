#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

#include "numerics.hpp"

namespace bergman {

struct JetVariable {
    int id;
    int order;
    bool operator==(const JetVariable&) const = default;
};

// Truncated holomorphic Taylor expansion in a set of jet variables.
// Truncation is per variable (s_i^{e_i} with e_i <= order_i), so the
// coefficient of a pure power of one variable is exact even while other
// variables are present. Coefficients are Taylor coefficients; use
// derivative() for partial derivatives.
class Jet {
public:
    static constexpr int max_order = 3;

    Jet() : coeffs_{Complex{}} {}
    Jet(Complex v) : coeffs_{v} {}
    Jet(double v) : coeffs_{Complex(v)} {}

    // value + s_id
    static Jet variable(int id, int order, Complex value = 0.0)
    {
        if (order < 1 || order > max_order)
            throw UnsupportedOrderError("jet order " + std::to_string(order) + " outside 1..3");
        if (id < 0)
            throw InvalidArgument("jet variable id must be >= 0");
        Jet j;
        j.vars_ = {{id, order}};
        j.coeffs_.assign(order + 1, Complex{});
        j.coeffs_[0] = value;
        j.coeffs_[1] = 1.0;
        return j;
    }

    const std::vector<JetVariable>& variables() const { return vars_; }
    std::size_t size() const { return coeffs_.size(); }
    Complex value() const { return coeffs_[0]; }
    const std::vector<Complex>& coefficients() const { return coeffs_; }
    bool is_constant() const { return vars_.empty(); }

    int max_id() const { return vars_.empty() ? -1 : vars_.back().id; }

    int degree_bound() const
    {
        int d = 0;
        for (const auto& v : vars_)
            d += v.order;
        return d;
    }

    // Taylor coefficient; powers aligned with variables().
    Complex coefficient(std::span<const int> powers) const
    {
        if (powers.size() != vars_.size())
            throw DimensionError("jet coefficient: power count mismatch");
        std::size_t idx = 0;
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (powers[i] < 0 || powers[i] > vars_[i].order)
                return 0.0;
            idx = idx * (vars_[i].order + 1) + powers[i];
        }
        return coeffs_[idx];
    }

    Complex derivative(std::span<const int> powers) const
    {
        double scale = 1.0;
        for (int p : powers)
            scale *= factorial(static_cast<unsigned>(std::max(p, 0)));
        return coefficient(powers) * scale;
    }

    // Coefficient of s_id^power, as a jet in the remaining variables.
    Jet slice(int id, int power) const
    {
        auto it = std::find_if(vars_.begin(), vars_.end(), [&](const JetVariable& v) { return v.id == id; });
        if (it == vars_.end())
            return power == 0 ? *this : Jet();
        std::size_t pos = static_cast<std::size_t>(it - vars_.begin());
        if (power < 0 || power > it->order)
            return Jet();
        Jet out;
        out.vars_ = vars_;
        out.vars_.erase(out.vars_.begin() + static_cast<std::ptrdiff_t>(pos));
        std::size_t inner = 1;
        for (std::size_t i = pos + 1; i < vars_.size(); ++i)
            inner *= vars_[i].order + 1;
        std::size_t radix = it->order + 1;
        std::size_t outer = coeffs_.size() / (inner * radix);
        out.coeffs_.assign(outer * inner, Complex{});
        for (std::size_t o = 0; o < outer; ++o)
            for (std::size_t i = 0; i < inner; ++i)
                out.coeffs_[o * inner + i] = coeffs_[(o * radix + power) * inner + i];
        return out;
    }

    Jet operator-() const
    {
        Jet r = *this;
        for (auto& c : r.coeffs_)
            c = -c;
        return r;
    }

    Jet& operator+=(const Jet& b) { return *this = add(*this, b, 1.0); }
    Jet& operator-=(const Jet& b) { return *this = add(*this, b, -1.0); }
    Jet& operator*=(const Jet& b) { return *this = multiply(*this, b); }
    Jet& operator/=(const Jet& b) { return *this = multiply(*this, reciprocal(b)); }

    Jet& operator+=(Complex b)
    {
        coeffs_[0] += b;
        return *this;
    }
    Jet& operator-=(Complex b)
    {
        coeffs_[0] -= b;
        return *this;
    }
    Jet& operator*=(Complex b)
    {
        for (auto& c : coeffs_)
            c *= b;
        return *this;
    }
    Jet& operator/=(Complex b) { return *this *= 1.0 / b; }

    friend Jet operator+(const Jet& a, const Jet& b) { return add(a, b, 1.0); }
    friend Jet operator-(const Jet& a, const Jet& b) { return add(a, b, -1.0); }
    friend Jet operator*(const Jet& a, const Jet& b) { return multiply(a, b); }
    friend Jet operator/(const Jet& a, const Jet& b) { return multiply(a, reciprocal(b)); }

    // f(a) from the Taylor data f^{(j)}(a0)/j!, j = 0..degree_bound.
    template <class Coeff>
    static Jet compose(const Jet& a, Coeff&& taylor)
    {
        int degree = a.degree_bound();
        Jet result(taylor(0));
        if (degree == 0)
            return result;
        Jet delta = a;
        delta.coeffs_[0] = 0.0;
        Jet power = delta;
        for (int j = 1; j <= degree; ++j) {
            result += power * taylor(j);
            if (j < degree)
                power = power * delta;
        }
        return result;
    }

    friend Jet reciprocal(const Jet& a)
    {
        Complex a0 = a.value();
        if (a0 == Complex{})
            throw SingularEvaluationError("jet reciprocal of zero");
        Complex inv = 1.0 / a0;
        return compose(a, [&](int j) { return (j % 2 ? -1.0 : 1.0) * ipow(inv, j + 1); });
    }

    friend Jet exp(const Jet& a)
    {
        Complex e = std::exp(a.value());
        return compose(a, [&](int j) { return e / factorial(static_cast<unsigned>(j)); });
    }

    friend Jet log(const Jet& a)
    {
        Complex a0 = a.value();
        Complex l = principal_log(a0);
        return compose(a, [&](int j) -> Complex {
            if (j == 0)
                return l;
            return (j % 2 ? 1.0 : -1.0) / (static_cast<double>(j) * ipow(a0, j));
        });
    }

    friend Jet principal_power(const Jet& a, double exponent)
    {
        Complex a0 = a.value();
        Complex base = principal_power(a0, exponent);
        if (a.is_constant())
            return Jet(base);
        Complex inv = 1.0 / a0;
        return compose(a, [&](int j) {
            double binom = 1.0;
            for (int i = 0; i < j; ++i)
                binom *= (exponent - i) / (i + 1);
            return binom * base * ipow(inv, j);
        });
    }

    friend Jet ipow(const Jet& a, int n)
    {
        if (n < 0)
            return reciprocal(ipow(a, -n));
        Jet result(1.0), base = a;
        while (n > 0) {
            if (n & 1)
                result = result * base;
            n >>= 1;
            if (n > 0)
                base = base * base;
        }
        return result;
    }

private:
    std::vector<JetVariable> vars_;
    std::vector<Complex> coeffs_;

    static std::vector<JetVariable> merged(const std::vector<JetVariable>& a, const std::vector<JetVariable>& b)
    {
        std::vector<JetVariable> out;
        std::size_t i = 0, j = 0;
        while (i < a.size() || j < b.size()) {
            if (j == b.size() || (i < a.size() && a[i].id < b[j].id)) {
                out.push_back(a[i++]);
            } else if (i == a.size() || b[j].id < a[i].id) {
                out.push_back(b[j++]);
            } else {
                if (a[i].order != b[j].order)
                    throw InvalidArgument("jet variable " + std::to_string(a[i].id) + " used with two orders");
                out.push_back(a[i]);
                ++i;
                ++j;
            }
        }
        return out;
    }

    Jet expanded(const std::vector<JetVariable>& target) const
    {
        if (target == vars_)
            return *this;
        std::vector<std::size_t> pos(vars_.size());
        for (std::size_t i = 0, k = 0; i < vars_.size(); ++i) {
            while (target[k].id != vars_[i].id)
                ++k;
            pos[i] = k;
        }
        std::vector<std::size_t> stride(target.size());
        std::size_t total = 1;
        for (std::size_t k = target.size(); k-- > 0;) {
            stride[k] = total;
            total *= target[k].order + 1;
        }
        Jet out;
        out.vars_ = target;
        out.coeffs_.assign(total, Complex{});
        for (std::size_t idx = 0; idx < coeffs_.size(); ++idx) {
            std::size_t rest = idx, flat = 0;
            for (std::size_t i = vars_.size(); i-- > 0;) {
                std::size_t radix = vars_[i].order + 1;
                flat += (rest % radix) * stride[pos[i]];
                rest /= radix;
            }
            out.coeffs_[flat] = coeffs_[idx];
        }
        return out;
    }

    static Jet add(const Jet& a, const Jet& b, double sign)
    {
        if (a.vars_ == b.vars_) {
            Jet r = a;
            for (std::size_t i = 0; i < r.coeffs_.size(); ++i)
                r.coeffs_[i] += sign * b.coeffs_[i];
            return r;
        }
        auto vars = merged(a.vars_, b.vars_);
        Jet r = a.expanded(vars);
        Jet bb = b.expanded(vars);
        for (std::size_t i = 0; i < r.coeffs_.size(); ++i)
            r.coeffs_[i] += sign * bb.coeffs_[i];
        return r;
    }

    static Jet multiply(const Jet& a, const Jet& b)
    {
        if (a.vars_.empty()) {
            Jet r = b;
            r *= a.coeffs_[0];
            return r;
        }
        if (b.vars_.empty()) {
            Jet r = a;
            r *= b.coeffs_[0];
            return r;
        }
        auto vars = merged(a.vars_, b.vars_);
        Jet x = a.expanded(vars);
        Jet y = b.expanded(vars);
        std::size_t nv = vars.size(), n = x.coeffs_.size();
        std::vector<int> digits(n * nv);
        for (std::size_t idx = 0; idx < n; ++idx) {
            std::size_t rest = idx;
            for (std::size_t v = nv; v-- > 0;) {
                std::size_t radix = vars[v].order + 1;
                digits[idx * nv + v] = static_cast<int>(rest % radix);
                rest /= radix;
            }
        }
        std::vector<std::size_t> stride(nv);
        for (std::size_t v = nv, s = 1; v-- > 0;) {
            stride[v] = s;
            s *= vars[v].order + 1;
        }
        Jet r;
        r.vars_ = vars;
        r.coeffs_.assign(n, Complex{});
        for (std::size_t i = 0; i < n; ++i) {
            if (x.coeffs_[i] == Complex{})
                continue;
            const int* di = &digits[i * nv];
            for (std::size_t j = 0; j < n; ++j) {
                const int* dj = &digits[j * nv];
                bool ok = true;
                std::size_t flat = 0;
                for (std::size_t v = 0; v < nv; ++v) {
                    int d = di[v] + dj[v];
                    if (d > vars[v].order) {
                        ok = false;
                        break;
                    }
                    flat += d * stride[v];
                }
                if (ok)
                    r.coeffs_[flat] += x.coeffs_[i] * y.coeffs_[j];
            }
        }
        return r;
    }
};

template <class T>
concept JetScalar = std::is_same_v<T, double> || std::is_same_v<T, Complex>;

template <JetScalar T> Jet operator+(const Jet& a, T b) { Jet r = a; r += Complex(b); return r; }
template <JetScalar T> Jet operator+(T a, const Jet& b) { Jet r = b; r += Complex(a); return r; }
template <JetScalar T> Jet operator-(const Jet& a, T b) { Jet r = a; r -= Complex(b); return r; }
template <JetScalar T> Jet operator-(T a, const Jet& b) { Jet r = -b; r += Complex(a); return r; }
template <JetScalar T> Jet operator*(const Jet& a, T b) { Jet r = a; r *= Complex(b); return r; }
template <JetScalar T> Jet operator*(T a, const Jet& b) { Jet r = b; r *= Complex(a); return r; }
template <JetScalar T> Jet operator/(const Jet& a, T b) { Jet r = a; r /= Complex(b); return r; }
template <JetScalar T> Jet operator/(T a, const Jet& b) { return reciprocal(b) * Complex(a); }

// Scalar view used by code templated on Complex or Jet.
template <class S>
S scalar_from_jet(const Jet& j)
{
    if constexpr (std::is_same_v<S, Jet>) {
        return j;
    } else {
        if (!j.is_constant())
            throw InvalidArgument("jet still carries variables where a scalar is expected");
        return j.value();
    }
}

inline Complex value_of(Complex z) { return z; }
inline Complex value_of(const Jet& j) { return j.value(); }

} // namespace bergman
