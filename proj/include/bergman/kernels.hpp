#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "domains.hpp"
#include "evaluator.hpp"

namespace bergman {

namespace detail {

// sum_j p_j conj(q_j) over [begin, end)
template <class S>
S hdot(std::span<const S> p, std::span<const Complex> q, std::size_t begin, std::size_t end)
{
    S acc = S(0.0);
    for (std::size_t j = begin; j < end; ++j)
        acc += p[j] * std::conj(q[j]);
    return acc;
}

inline std::vector<std::size_t> iota(std::size_t n, std::size_t from = 0)
{
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), from);
    return v;
}

struct BallBody {
    std::size_t dim;
    template <class S>
    S operator()(std::span<const S> p, std::span<const Complex> q) const
    {
        S t = hdot(p, q, 0, dim);
        double c = factorial(static_cast<unsigned>(dim)) / std::pow(pi, static_cast<double>(dim));
        return ipow(1.0 - t, -static_cast<int>(dim + 1)) * c;
    }
};

// n!/(pi^{n+m} p) [(n+p)B^{1/p} + (1-p)u] / [B^{2-1/p} (B^{1/p} - u)^{n+2}], B = 1 - t.
template <class T, class U>
auto dangelo_core(const T& t, const U& u, std::size_t n, double p)
{
    auto b = 1.0 - t;
    auto bq = principal_power(b, 1.0 / p);
    auto num = bq * (static_cast<double>(n) + p) + u * (1.0 - p);
    auto den = principal_power(b, 2.0 - 1.0 / p) * ipow(bq - u, static_cast<int>(n + 2));
    return num / den;
}

// z in [0, n), w in [n, n+m). For m > 1 the (d/dt)^{m-1} of the m = 1
// expression is taken with a jet in t.
struct DAngeloBody {
    std::size_t n, m;
    double p;
    template <class S>
    S operator()(std::span<const S> z, std::span<const Complex> q) const
    {
        S u = hdot(z, q, 0, n);
        S t = hdot(z, q, n, n + m);
        double c = factorial(static_cast<unsigned>(n)) / (std::pow(pi, static_cast<double>(n + m)) * p);
        if (m == 1)
            return dangelo_core(t, u, n, p) * c;
        int id = max_jet_id(z) + 1;
        int order = static_cast<int>(m - 1);
        Jet tt = Jet::variable(id, order) + t;
        Jet f = dangelo_core(tt, Jet(0.0) + u, n, p);
        return scalar_from_jet<S>(f.slice(id, order)) * (c * factorial(static_cast<unsigned>(order)));
    }
};

// z in [0, n), z' in [n, n+m), w at n+m.
struct Ex42Body {
    std::size_t n, m;
    template <class S>
    S operator()(std::span<const S> p, std::span<const Complex> q) const
    {
        S u = hdot(p, q, 0, n);
        S up = hdot(p, q, n, n + m);
        S t = p[n + m] * std::conj(q[n + m]);
        S b = 1.0 - t;
        double nn = static_cast<double>(n), mm = static_cast<double>(m);
        S num = ipow(b, static_cast<int>(m)) * ((nn + 1.0) - up * (nn + 1.0) + u * mm / b);
        S den = ipow(b - u - up + t * up, static_cast<int>(m + n + 2));
        double c = factorial(static_cast<unsigned>(m + n)) / std::pow(pi, mm + nn + 1.0);
        return num / den * c;
    }
};

struct Ex43Body {
    std::size_t n, m;
    std::vector<double> gamma;
    template <class S>
    S operator()(std::span<const S> p, std::span<const Complex> q) const
    {
        using std::exp;
        S t = p[n + m] * std::conj(q[n + m]);
        S weighted = S(0.0), plain = S(0.0);
        double g = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            S term = exp(t * gamma[j]) * (p[j] * std::conj(q[j]));
            plain += term;
            weighted += term * gamma[j];
            g += gamma[j];
        }
        S rho = 1.0 - plain - hdot(p, q, n, n + m);
        int d = static_cast<int>(m + n);
        double c = factorial(static_cast<unsigned>(m + n)) / std::pow(pi, static_cast<double>(m + n + 1));
        return exp(t * g) * (ipow(rho, -(d + 1)) * g + weighted * ipow(rho, -(d + 2)) * (d + 1.0)) * c;
    }
};

// {|z1|^{2p} + e^{|z3|^2}|z2|^2 < 1}
struct Ex71Stage3Body {
    double p;
    template <class S>
    S operator()(std::span<const S> z, std::span<const Complex> q) const
    {
        using std::exp;
        S e = exp(z[2] * std::conj(q[2]));
        S v = z[0] * std::conj(q[0]);
        S u = e * (z[1] * std::conj(q[1]));
        S b = 1.0 - u;
        S bq = principal_power(b, 1.0 / p);
        S c = bq - v;
        S lead = bq * (1.0 + p) + v * (1.0 - p);
        S t1 = lead / (principal_power(b, 2.0 - 1.0 / p) * ipow(c, 3));
        S t2 = u * (bq * (2.0 + 2.0 / p) - v * (2.0 - 1.0 / p)) * (p - 1.0) /
               (principal_power(b, 3.0 - 1.0 / p) * ipow(c, 3));
        S t3 = u * lead * (3.0 / p) / (principal_power(b, 3.0 - 2.0 / p) * ipow(c, 4));
        return e * (t1 + t2 + t3) / (pi * pi * pi * p);
    }
};

struct ProductBody {
    KernelEvaluator a, b;
    template <class S>
    S operator()(std::span<const S> p, std::span<const Complex> q) const
    {
        std::size_t da = a.dimension();
        return evaluate<S>(a, p.first(da), q.first(da)) * evaluate<S>(b, p.subspan(da), q.subspan(da));
    }
};

// inner coordinate k reads outer coordinate source[k]
struct PermutedBody {
    KernelEvaluator inner;
    std::vector<std::size_t> source;
    template <class S>
    S operator()(std::span<const S> p, std::span<const Complex> q) const
    {
        std::vector<S> pp;
        std::vector<Complex> qq;
        for (std::size_t k : source) {
            pp.push_back(p[k]);
            qq.push_back(q[k]);
        }
        return evaluate<S>(inner, std::span<const S>(pp), std::span<const Complex>(qq));
    }
};

} // namespace detail

struct ClosedFormKernel {
    std::string name;
    KernelEvaluator evaluator;
    // the domain is the Cartesian product of these factors
    std::vector<DomainSpec> factors;

    std::size_t dimension() const { return evaluator.dimension(); }

    Complex operator()(std::span<const Complex> p, std::span<const Complex> q) const { return evaluator(p, q); }
    Complex operator()(const CPoint& p, const CPoint& q) const { return evaluator(p, q); }

    bool contains(std::span<const Complex> p) const
    {
        if (p.size() != dimension())
            throw DimensionError("closed-form kernel: dimension mismatch");
        std::size_t off = 0;
        for (const auto& f : factors) {
            if (!f.contains(p.subspan(off, f.dimension())))
                return false;
            off += f.dimension();
        }
        return true;
    }

    std::vector<std::size_t> star_coordinates() const
    {
        std::vector<std::size_t> out;
        std::size_t off = 0;
        for (const auto& f : factors) {
            for (std::size_t j : f.star_coordinates())
                out.push_back(off + j);
            off += f.dimension();
        }
        return out;
    }

    std::vector<double> half_widths(double v_radius = 3.0) const
    {
        std::vector<double> out;
        for (const auto& f : factors)
            for (double h : f.half_widths(v_radius))
                out.push_back(h);
        return out;
    }

    const DomainSpec& domain() const
    {
        if (factors.size() != 1)
            throw InvalidArgument(name + ": product domain has no single DomainSpec");
        return factors.front();
    }
};

inline ClosedFormKernel kernel_ball(std::size_t dim)
{
    if (dim < 1)
        throw InvalidArgument("kernel_ball: dim >= 1");
    Arity a{dim, detail::iota(dim)};
    return {"ball(" + std::to_string(dim) + ")", KernelEvaluator::from_body(a, detail::BallBody{dim}),
            {DomainSpec(BaseDomain::ball(dim))}};
}

inline ClosedFormKernel kernel_disk() { return kernel_ball(1); }

inline ClosedFormKernel kernel_dangelo_inflated(std::size_t n, std::size_t m, double p)
{
    if (n < 1 || m < 1)
        throw InvalidArgument("kernel_dangelo_inflated: n >= 1 and m >= 1");
    if (m - 1 > static_cast<std::size_t>(Jet::max_order))
        throw UnsupportedOrderError("kernel_dangelo_inflated: m - 1 exceeds the jet order cap");
    if (!(p > 0.0))
        throw InvalidArgument("kernel_dangelo_inflated: p > 0");
    Arity a{n + m, detail::iota(n + m)};
    DomainSpec spec(BaseDomain::ball(n), {LiftStep{LiftKind::U, std::vector<double>(n, 1.0 / p), m}});
    std::string nm = m == 1 ? "dangelo(" + std::to_string(n) + ",p=" + std::to_string(p) + ")"
                            : "dangelo_inflated(" + std::to_string(n) + "," + std::to_string(m) + ",p=" +
                                  std::to_string(p) + ")";
    return {nm, KernelEvaluator::from_body(a, detail::DAngeloBody{n, m, p}), {spec}};
}

inline ClosedFormKernel kernel_dangelo(std::size_t n, double p) { return kernel_dangelo_inflated(n, 1, p); }

inline ClosedFormKernel kernel_ex42(std::size_t n, std::size_t m)
{
    if (n < 1)
        throw InvalidArgument("kernel_ex42: n >= 1");
    std::vector<std::size_t> star = detail::iota(n);
    star.push_back(n + m);
    DomainSpec spec(BaseDomain::ball(n, m), {LiftStep{LiftKind::U, std::vector<double>(n, 1.0), 1}});
    return {"ex42(" + std::to_string(n) + "," + std::to_string(m) + ")",
            KernelEvaluator::from_body(Arity{n + m + 1, star}, detail::Ex42Body{n, m}), {spec}};
}

inline ClosedFormKernel kernel_ex43(std::size_t n, std::size_t m, std::vector<double> gamma)
{
    if (n < 1 || gamma.size() != n)
        throw InvalidArgument("kernel_ex43: need n >= 1 and one gamma per z coordinate");
    std::vector<std::size_t> star = detail::iota(n);
    star.push_back(n + m);
    DomainSpec spec(BaseDomain::ball(n, m), {LiftStep{LiftKind::V, gamma, 1}});
    std::string nm = "ex43(" + std::to_string(n) + "," + std::to_string(m) + ",gamma=";
    for (std::size_t j = 0; j < n; ++j)
        nm += (j ? ":" : "") + std::to_string(gamma[j]);
    return {nm + ")", KernelEvaluator::from_body(Arity{n + m + 1, star}, detail::Ex43Body{n, m, std::move(gamma)}),
            {spec}};
}

inline ClosedFormKernel kernel_ex71_stage3(double p)
{
    if (!(p > 0.0))
        throw InvalidArgument("kernel_ex71_stage3: p > 0");
    DomainSpec spec(BaseDomain::disk(), {LiftStep{LiftKind::U, {1.0 / p}, 1}, LiftStep{LiftKind::V, {0.0, 1.0}, 1}});
    return {"ex71_stage3(p=" + std::to_string(p) + ")",
            KernelEvaluator::from_body(Arity{3, {0, 1, 2}}, detail::Ex71Stage3Body{p}), {spec}};
}

inline ClosedFormKernel kernel_product(const ClosedFormKernel& a, const ClosedFormKernel& b)
{
    Arity ar{a.dimension() + b.dimension(), a.evaluator.arity().star};
    for (std::size_t j : b.evaluator.arity().star)
        ar.star.push_back(a.dimension() + j);
    auto factors = a.factors;
    factors.insert(factors.end(), b.factors.begin(), b.factors.end());
    return {a.name + "x" + b.name, KernelEvaluator::from_body(ar, detail::ProductBody{a.evaluator, b.evaluator}),
            std::move(factors)};
}

// Evaluator whose coordinate k feeds inner coordinate position k of `source`.
inline KernelEvaluator permuted(const KernelEvaluator& inner, std::vector<std::size_t> source, Arity arity)
{
    return KernelEvaluator::from_body(std::move(arity), detail::PermutedBody{inner, std::move(source)});
}

// Closed-form kernel of a base domain, when one is known.
inline KernelEvaluator base_kernel(const BaseDomain& base)
{
    std::size_t d = base.dimension();
    Arity arity{d, detail::iota(base.n_star)};
    if (base.kind == BaseKind::Polydisk) {
        ClosedFormKernel k = kernel_disk();
        for (std::size_t j = 1; j < d; ++j)
            k = kernel_product(k, kernel_disk());
        return k.evaluator.with_arity(arity);
    }
    std::vector<std::size_t> special;
    for (std::size_t j = 0; j < d; ++j)
        if (base.exponents[j] != 1.0)
            special.push_back(j);
    KernelEvaluator ball = kernel_ball(d).evaluator;
    if (special.empty() || d == 1)
        return ball.with_arity(arity);
    if (special.size() == 1) {
        std::size_t j = special.front();
        std::vector<std::size_t> source{j};
        for (std::size_t i = 0; i < d; ++i)
            if (i != j)
                source.push_back(i);
        auto inflated = kernel_dangelo_inflated(1, d - 1, base.exponents[j]).evaluator;
        return permuted(inflated, std::move(source), arity);
    }
    throw NoClosedFormError("no closed-form kernel for an ellipsoid with several exponents != 1");
}

namespace detail {

inline bool all_equal(const std::vector<double>& v, double x)
{
    for (double e : v)
        if (e != x)
            return false;
    return true;
}

} // namespace detail

// Hand-coded kernel for a spec, if it is one of the explicit families.
inline ClosedFormKernel closed_form_for(const DomainSpec& spec)
{
    const auto& base = spec.base();
    const auto& lifts = spec.lifts();
    bool unit_ellipsoid = base.kind == BaseKind::Ellipsoid &&
                          (detail::all_equal(base.exponents, 1.0) || base.dimension() == 1);
    if (lifts.empty()) {
        ClosedFormKernel k{"base", base_kernel(base), {spec}};
        if (base.kind == BaseKind::Polydisk)
            k.name = "polydisk(" + std::to_string(base.dimension()) + ")";
        else if (unit_ellipsoid)
            k.name = "ball(" + std::to_string(base.dimension()) + ")";
        else
            k.name = "ellipsoid";
        return k;
    }
    if (unit_ellipsoid && lifts.size() == 1) {
        const auto& l = lifts.front();
        std::size_t n = base.n_star, m = base.m_passive;
        if (l.kind == LiftKind::U && m == 0 && detail::all_equal(l.weights, l.weights.front()))
            return kernel_dangelo_inflated(n, l.w_dim, 1.0 / l.weights.front());
        if (l.kind == LiftKind::U && l.w_dim == 1 && detail::all_equal(l.weights, 1.0))
            return kernel_ex42(n, m);
        if (l.kind == LiftKind::V && l.w_dim == 1)
            return kernel_ex43(n, m, l.weights);
    }
    if (base.kind == BaseKind::Ellipsoid && base.dimension() == 1 && lifts.size() == 2 &&
        lifts[0].kind == LiftKind::U && lifts[0].w_dim == 1 && lifts[1].kind == LiftKind::V &&
        lifts[1].w_dim == 1 && lifts[1].weights == std::vector<double>{0.0, 1.0})
        return kernel_ex71_stage3(1.0 / lifts[0].weights[0]);
    throw NoClosedFormError("no hand-coded kernel for this domain");
}

} // namespace bergman
