#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "numerics.hpp"
#include "rng.hpp"

namespace bergman {

struct GaussLegendreRule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

inline GaussLegendreRule gauss_legendre(int n)
{
    GaussLegendreRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        r.nodes[i] = x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

namespace detail {

inline const GaussLegendreRule& gl_rule(int n)
{
    static const GaussLegendreRule r5 = gauss_legendre(5);
    static const GaussLegendreRule r10 = gauss_legendre(10);
    static const GaussLegendreRule r20 = gauss_legendre(20);
    if (n == 5)
        return r5;
    if (n == 10)
        return r10;
    if (n == 20)
        return r20;
    throw InvalidArgument("gauss-legendre rule of order 5, 10 or 20 only");
}

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(Complex v) { return std::abs(v); }
inline double magnitude(const std::vector<Complex>& v)
{
    double m = 0.0;
    for (Complex c : v)
        m = std::max(m, std::abs(c));
    return m;
}

inline void accumulate(double& acc, double v, double w) { acc += v * w; }
inline void accumulate(Complex& acc, Complex v, double w) { acc += v * w; }
inline void accumulate(std::vector<Complex>& acc, const std::vector<Complex>& v, double w)
{
    if (acc.empty())
        acc.assign(v.size(), Complex{});
    for (std::size_t i = 0; i < v.size(); ++i)
        acc[i] += v[i] * w;
}

inline double difference(double a, double b) { return std::abs(a - b); }
inline double difference(Complex a, Complex b) { return std::abs(a - b); }
inline double difference(const std::vector<Complex>& a, const std::vector<Complex>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace detail

struct QuadratureOptions {
    double rel_tol = 1e-9;
    double abs_tol = 0.0;
    std::size_t max_nodes = std::size_t{1} << 14;
    int order = 10;
};

template <class V>
struct QuadResult {
    V value{};
    double error = 0.0;
    std::size_t nodes = 0;
    bool converged = true;
};

// Globally adaptive Gauss-Legendre on [a, b]; b may be +inf (mapped by
// x = a + u/(1-u)). Each panel is estimated by the rule on its two halves,
// its error by the difference to the rule on the whole panel. The panel
// with the largest error is split until the summed error meets the
// tolerance or the node budget is exhausted.
template <class V, class F>
QuadResult<V> integrate_adaptive(F&& f, double a, double b, const QuadratureOptions& opt = {})
{
    QuadResult<V> res;
    if (!(b > a))
        return res;
    bool infinite = std::isinf(b);
    auto g = [&](double u) -> std::pair<V, double> {
        if (!infinite)
            return {f(u), 1.0};
        double om = 1.0 - u;
        return {f(a + u / om), 1.0 / (om * om)};
    };
    double lo = infinite ? 0.0 : a, hi = infinite ? 1.0 : b;
    const auto& rule = detail::gl_rule(opt.order);
    auto panel = [&](double x0, double x1) {
        V acc{};
        double c = 0.5 * (x0 + x1), h = 0.5 * (x1 - x0);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            auto [v, jac] = g(c + h * rule.nodes[i]);
            detail::accumulate(acc, v, rule.weights[i] * h * jac);
        }
        res.nodes += rule.nodes.size();
        return acc;
    };
    struct Piece {
        double x0, x1;
        V left, right, whole;
        double err;
    };
    auto make = [&](double x0, double x1, V whole) {
        double m = 0.5 * (x0 + x1);
        Piece p{x0, x1, panel(x0, m), panel(m, x1), std::move(whole), 0.0};
        V sum = p.left;
        detail::accumulate(sum, p.right, 1.0);
        p.err = detail::difference(sum, p.whole);
        return p;
    };
    std::vector<Piece> pieces;
    pieces.push_back(make(lo, hi, panel(lo, hi)));
    for (;;) {
        V total{};
        double err = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            detail::accumulate(total, pieces[i].left, 1.0);
            detail::accumulate(total, pieces[i].right, 1.0);
            err += pieces[i].err;
            if (pieces[i].err > pieces[worst].err)
                worst = i;
        }
        res.value = total;
        res.error = err;
        if (err <= std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total)))
            return res;
        if (res.nodes >= opt.max_nodes) {
            res.converged = false;
            return res;
        }
        Piece p = std::move(pieces[worst]);
        double m = 0.5 * (p.x0 + p.x1);
        pieces[worst] = make(p.x0, m, std::move(p.left));
        pieces.push_back(make(m, p.x1, std::move(p.right)));
        std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) { return x.x0 < y.x0; });
    }
}

// Tanh-sinh rule on [0, 1]; comp holds 1 - node without cancellation.
struct TanhSinhRule {
    std::vector<double> nodes, comp, weights;
};

inline TanhSinhRule tanh_sinh(double h, double tmax = 4.0)
{
    TanhSinhRule r;
    int kmax = static_cast<int>(std::ceil(tmax / h));
    for (int k = -kmax; k <= kmax; ++k) {
        double t = k * h;
        double u = 0.5 * pi * std::sinh(t);
        double e = std::exp(-2.0 * std::abs(u));
        double small = e / (1.0 + e), large = 1.0 / (1.0 + e);
        double x = u >= 0 ? large : small;
        double c = u >= 0 ? small : large;
        double ch = std::cosh(u);
        double w = h * 0.25 * pi * std::cosh(t) / (ch * ch);
        if (!(x > 0.0) || !(c > 0.0) || w == 0.0)
            continue;
        r.nodes.push_back(x);
        r.comp.push_back(c);
        r.weights.push_back(w);
    }
    return r;
}

// Integral over the simplex {r_j >= 0, sum r_j < 1} in R^k of
// f(r, 1 - sum r). The slack 1 - sum r is carried without cancellation.
template <class F>
double simplex_tanh_sinh(F&& f, std::size_t k, double h)
{
    TanhSinhRule rule = tanh_sinh(h);
    std::vector<double> r(k, 0.0);
    std::function<double(std::size_t, double)> level = [&](std::size_t L, double room) -> double {
        double acc = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            r[L] = room * rule.nodes[i];
            double rest = room * rule.comp[i];
            double v = L + 1 == k ? f(std::span<const double>(r), rest) : level(L + 1, rest);
            acc += rule.weights[i] * room * v;
        }
        return acc;
    };
    return level(0, 1.0);
}

} // namespace bergman
