#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "csv.hpp"
#include "domains.hpp"
#include "errors.hpp"
#include "evaluator.hpp"
#include "numerics.hpp"

namespace bergman {

// S1..S4 for a single U lift. Under a single V lift S1 marks strongly and
// S2 weakly pseudoconvex points (grad_z r = 0); S3/S4 do not occur there.
enum class Stratum { S1, S2, S3, S4 };

inline const char* to_string(Stratum s)
{
    switch (s) {
    case Stratum::S1: return "S1";
    case Stratum::S2: return "S2";
    case Stratum::S3: return "S3";
    case Stratum::S4: return "S4";
    }
    return "?";
}

inline Stratum parse_stratum(const std::string& s)
{
    if (s == "S1" || s == "s1") return Stratum::S1;
    if (s == "S2" || s == "s2") return Stratum::S2;
    if (s == "S3" || s == "s3") return Stratum::S3;
    if (s == "S4" || s == "s4") return Stratum::S4;
    throw ParseError("unknown stratum '" + s + "'");
}

namespace detail {

constexpr double boundary_tol = 1e-10;
constexpr double gradient_tol = 1e-8;

inline void require_single_lift(const DomainSpec& spec)
{
    if (spec.lifts().size() != 1)
        throw InvalidArgument("boundary: expected a spec with exactly one lift");
    if (spec.base().kind != BaseKind::Ellipsoid)
        throw InvalidArgument("boundary: the base must be an ellipsoid");
}

inline double w_norm2(const DomainSpec& spec, std::span<const Complex> p)
{
    double wn = 0.0;
    for (std::size_t j = spec.dimension_at(0); j < spec.dimension(); ++j)
        wn += std::norm(p[j]);
    return wn;
}

// X_j: the base moduli after undoing the lift
inline std::vector<double> lifted_moduli(const DomainSpec& spec, std::span<const Complex> p)
{
    const auto& lift = spec.lifts()[0];
    double wn = w_norm2(spec, p);
    std::vector<double> X(spec.dimension_at(0));
    for (std::size_t j = 0; j < X.size(); ++j)
        X[j] = std::norm(p[j]);
    const auto& star = spec.star_coordinates(0);
    for (std::size_t i = 0; i < star.size(); ++i)
        X[star[i]] *= lift.kind == LiftKind::U ? std::pow(1.0 - wn, -lift.weights[i]) : std::exp(lift.weights[i] * wn);
    return X;
}

inline double base_r(const BaseDomain& b, std::span<const double> X)
{
    double s = 0.0;
    for (std::size_t j = 0; j < X.size(); ++j)
        s += std::pow(X[j], b.exponents[j]);
    return s - 1.0;
}

// |grad_z r| of the lifted defining function over the star block
inline double z_gradient(const DomainSpec& spec, std::span<const Complex> p)
{
    const auto& lift = spec.lifts()[0];
    const auto& base = spec.base();
    auto X = lifted_moduli(spec, p);
    double wn = w_norm2(spec, p);
    const auto& star = spec.star_coordinates(0);
    double g2 = 0.0;
    for (std::size_t i = 0; i < star.size(); ++i) {
        std::size_t j = star[i];
        double pj = base.exponents[j];
        double factor = lift.kind == LiftKind::U ? std::pow(1.0 - wn, -lift.weights[i] / 2.0)
                                                 : std::exp(lift.weights[i] * wn / 2.0);
        double g;
        // |d r / d zbar_j| = p_j X_j^{p_j - 1/2} * factor
        if (X[j] > 0.0)
            g = pj * std::pow(X[j], pj - 0.5) * factor;
        else
            g = pj > 0.5 ? 0.0 : (pj == 0.5 ? 0.5 * factor : std::numeric_limits<double>::infinity());
        g2 += g * g;
    }
    return std::sqrt(g2);
}

} // namespace detail

inline Stratum stratify_point(const DomainSpec& spec, std::span<const Complex> p)
{
    detail::require_single_lift(spec);
    if (p.size() != spec.dimension())
        throw DimensionError("stratify_point: dimension mismatch");
    const auto& lift = spec.lifts()[0];
    double wn = detail::w_norm2(spec, p);
    const auto& star = spec.star_coordinates(0);
    double znorm = 0.0;
    for (std::size_t j : star)
        znorm += std::norm(p[j]);
    if (lift.kind == LiftKind::U && std::abs(1.0 - wn) <= detail::boundary_tol) {
        if (znorm > 0.0)
            throw BoundaryError("stratify_point: |w| = 1 with z != 0 is not a boundary point");
        std::vector<double> X(spec.dimension_at(0));
        for (std::size_t j = 0; j < X.size(); ++j)
            X[j] = std::norm(p[j]);
        double rb = detail::base_r(spec.base(), X);
        if (rb > detail::boundary_tol)
            throw BoundaryError("stratify_point: (0, z') lies outside the base");
        return std::abs(rb) <= detail::boundary_tol ? Stratum::S4 : Stratum::S3;
    }
    if (lift.kind == LiftKind::U && wn > 1.0)
        throw BoundaryError("stratify_point: |w| > 1");
    double r = detail::base_r(spec.base(), detail::lifted_moduli(spec, p));
    if (std::abs(r) > detail::boundary_tol)
        throw BoundaryError("stratify_point: defining function " + format_double(r) + " is not 0");
    return detail::z_gradient(spec, p) > detail::gradient_tol ? Stratum::S1 : Stratum::S2;
}

// Scale p by lambda > 0 onto the boundary (bisection on membership).
inline CPoint project_to_boundary(const DomainSpec& spec, std::span<const Complex> p)
{
    auto scaled = [&](double l) {
        CPoint q(p.begin(), p.end());
        for (auto& c : q)
            c *= l;
        return q;
    };
    double lo = 0.0, hi = 1.0;
    while (spec.contains(scaled(hi))) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12)
            throw BoundaryError("project_to_boundary: ray does not leave the domain");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        (spec.contains(scaled(mid)) ? lo : hi) = mid;
    }
    return scaled(lo);
}

struct PathParams {
    double z_scale = 0.5;
    double z_exponent = 0.0; // 0: stratum default
    double q = 0.5;          // W2 exponent
    std::vector<double> p;   // W3 exponents; empty: 2 alpha_j
    std::vector<double> s;   // V region exponents; empty: 1/2
    int levels = 22;
};

struct ApproachPath {
    CPoint target;
    Stratum stratum = Stratum::S1;
    PathParams params;
    std::function<CPoint(double)> at;
    std::function<bool(std::span<const Complex>)> in_region;
};

namespace detail {

inline bool in_w2(const DomainSpec& spec, std::span<const Complex> z, double q)
{
    const auto& lift = spec.lifts()[0];
    const auto& base = spec.base();
    auto X = lifted_moduli(spec, z);
    double wn = w_norm2(spec, z);
    double r = base_r(base, X);
    const auto& star = spec.star_coordinates(0);
    double acc = 0.0;
    for (std::size_t i = 0; i < star.size(); ++i) {
        std::size_t j = star[i];
        // |z_j|^2 r_j(X) = p_j X_j^{p_j} (1-|w|^2)^{alpha_j}
        double term = base.exponents[j] * std::pow(X[j], base.exponents[j]) * std::pow(1.0 - wn, lift.weights[i]);
        acc += std::pow(term, q);
    }
    return acc < -r;
}

inline bool in_w3(const DomainSpec& spec, std::span<const Complex> z, const std::vector<double>& p)
{
    double wn = w_norm2(spec, z);
    const auto& star = spec.star_coordinates(0);
    for (std::size_t i = 0; i < star.size(); ++i)
        if (!(std::norm(z[star[i]]) < std::pow(1.0 - wn, p[i])))
            return false;
    return true;
}

inline bool in_v_region(const DomainSpec& spec, std::span<const Complex> z, const std::vector<double>& s)
{
    const auto& lift = spec.lifts()[0];
    double wn = w_norm2(spec, z);
    std::vector<double> X(spec.dimension_at(0));
    for (std::size_t j = 0; j < X.size(); ++j)
        X[j] = std::norm(z[j]);
    const auto& star = spec.star_coordinates(0);
    for (std::size_t i = 0; i < star.size(); ++i)
        X[star[i]] = std::exp(lift.weights[i] * wn) * std::pow(X[star[i]], s[i]);
    return base_r(spec.base(), X) < 0.0;
}

} // namespace detail

// One-parameter paths t -> p_t, t in (0, 1/2]:
//   S1: radial in the base coordinates, w fixed.
//   S2 and the V weak stratum: z' radial, w fixed, |z_1| = c t^2.
//   S3: |w|^2 = (1-t)|w0|^2, |z_1| = c t^{1+p_1/2}, so |z_1|^2/(1-|w|^2)^{p_1} = c^2 t^2.
//   S4: both, |z_1| = c t^{2+p_1/2}.
// z_1 is the first star coordinate. Membership in the domain and in the
// approach region is checked at t = 2^-k, k = 1..levels.
inline ApproachPath default_path(const DomainSpec& spec, std::span<const Complex> target, Stratum stratum,
                                 PathParams params = {})
{
    detail::require_single_lift(spec);
    Stratum actual = stratify_point(spec, target);
    if (actual != stratum)
        throw BoundaryError(std::string("default_path: target is ") + to_string(actual) + ", not " +
                            to_string(stratum));
    const auto& lift = spec.lifts()[0];
    const auto& star = spec.star_coordinates(0);
    std::size_t nbase = spec.dimension_at(0);
    if (params.p.empty())
        for (double a : lift.weights)
            params.p.push_back(a > 0.0 ? 2.0 * a : 1.0);
    if (params.s.empty())
        params.s.assign(lift.weights.size(), 0.5);
    if (params.p.size() != star.size() || params.s.size() != star.size())
        throw InvalidArgument("default_path: one region exponent per star coordinate");
    double e = params.z_exponent;
    if (e == 0.0) {
        switch (stratum) {
        case Stratum::S1: e = 0.0; break;
        case Stratum::S2: e = 2.0; break;
        case Stratum::S3: e = 1.0 + params.p[0] / 2.0; break;
        case Stratum::S4: e = 2.0 + params.p[0] / 2.0; break;
        }
    }
    ApproachPath path;
    path.target.assign(target.begin(), target.end());
    path.stratum = stratum;
    path.params = params;
    bool is_u = lift.kind == LiftKind::U;
    CPoint t0 = path.target;
    double c = params.z_scale;
    std::size_t z1 = star.empty() ? 0 : star[0];
    path.at = [t0, stratum, nbase, e, c, z1](double t) {
        CPoint q = t0;
        if (stratum == Stratum::S1) {
            for (std::size_t j = 0; j < nbase; ++j)
                q[j] *= 1.0 - t;
            return q;
        }
        bool radial = stratum == Stratum::S2 || stratum == Stratum::S4;
        bool shrink_w = stratum == Stratum::S3 || stratum == Stratum::S4;
        if (radial)
            for (std::size_t j = 0; j < nbase; ++j)
                q[j] *= 1.0 - t;
        if (shrink_w)
            for (std::size_t j = nbase; j < q.size(); ++j)
                q[j] *= std::sqrt(1.0 - t);
        q[z1] = c * std::pow(t, e);
        return q;
    };
    std::function<bool(std::span<const Complex>)> region;
    if (!is_u)
        region = [&spec, s = params.s](std::span<const Complex> z) { return detail::in_v_region(spec, z, s); };
    else if (stratum == Stratum::S2)
        region = [&spec, q = params.q](std::span<const Complex> z) { return detail::in_w2(spec, z, q); };
    else if (stratum == Stratum::S3)
        region = [&spec, p = params.p](std::span<const Complex> z) { return detail::in_w3(spec, z, p); };
    else if (stratum == Stratum::S4)
        region = [&spec, q = params.q, p = params.p](std::span<const Complex> z) {
            return detail::in_w2(spec, z, q) && detail::in_w3(spec, z, p);
        };
    else
        region = [](std::span<const Complex>) { return true; };
    if (!is_u && stratum == Stratum::S1)
        region = [](std::span<const Complex>) { return true; };
    for (int k = 1; k <= params.levels; ++k) {
        double t = std::ldexp(1.0, -k);
        CPoint q = path.at(t);
        if (!spec.contains(q))
            throw BoundaryError("default_path: sample at t = " + format_double(t) + " leaves the domain");
        if (!region(q))
            throw BoundaryError("default_path: sample at t = " + format_double(t) + " leaves the approach region");
    }
    path.in_region = std::move(region);
    return path;
}

enum class WeightKind { Defining, W, Product };

inline const char* to_string(WeightKind w)
{
    switch (w) {
    case WeightKind::Defining: return "defining";
    case WeightKind::W: return "w";
    case WeightKind::Product: return "product";
    }
    return "?";
}

inline WeightKind parse_weight_kind(const std::string& s)
{
    if (s == "defining" || s == "r") return WeightKind::Defining;
    if (s == "w") return WeightKind::W;
    if (s == "product") return WeightKind::Product;
    throw ParseError("unknown weight '" + s + "' (expected defining, w or product)");
}

// (-r)^a (1-|w|^2)^b; NaN exponents take the defaults a = dimension,
// b = 2 + sum alpha.
struct Weight {
    WeightKind kind = WeightKind::Defining;
    double defining_exponent = std::numeric_limits<double>::quiet_NaN();
    double w_exponent = std::numeric_limits<double>::quiet_NaN();
};

// The pairing stratum -> weight with a nonzero limit.
inline WeightKind matching_weight(Stratum s)
{
    switch (s) {
    case Stratum::S3: return WeightKind::W;
    case Stratum::S4: return WeightKind::Product;
    default: return WeightKind::Defining;
    }
}

inline double weight_value(const DomainSpec& spec, const Weight& w, std::span<const Complex> p)
{
    double a = std::isnan(w.defining_exponent) ? static_cast<double>(spec.dimension()) : w.defining_exponent;
    double v = 1.0;
    if (w.kind != WeightKind::W)
        v *= std::pow(-defining_function(spec, p), a);
    if (w.kind != WeightKind::Defining) {
        if (spec.lifts().empty())
            throw InvalidArgument("weight: the w factor needs a lifted domain");
        double b = std::isnan(w.w_exponent) ? 2.0 + spec.lifts().front().weight_sum() : w.w_exponent;
        double wn = 0.0;
        for (std::size_t j = spec.dimension_at(spec.lifts().size() - 1); j < spec.dimension(); ++j)
            wn += std::norm(p[j]);
        v *= std::pow(1.0 - wn, b);
    }
    return v;
}

struct ProbeReport {
    std::vector<double> t;
    std::vector<double> values;
    std::vector<double> extrapolations;
    double limit = std::numeric_limits<double>::quiet_NaN();
    double spread = std::numeric_limits<double>::infinity();
    double r_squared = 0.0;
    bool richardson = false;
    bool converged = false;
    bool diverged = false;
    bool tends_to_zero = false;

    std::string to_csv() const
    {
        std::string out = "t,weighted_value,running_extrapolation\n";
        for (std::size_t k = 0; k < t.size(); ++k)
            out += format_double(t[k]) + "," + format_double(values[k]) + "," + format_double(extrapolations[k]) + "\n";
        return out;
    }
};

struct ProbeOptions {
    double spread_tol = 1e-2;
    double zero_tol = 1e-3;
    int fit_points = 8;
};

// Diagonal kernel times weight along t_k = 2^-k. Richardson with a
// first-order error model; when the linear fit in t is poor (R^2 < 0.9)
// the last value is reported instead.
inline ProbeReport weighted_limit(const KernelEvaluator& K, const DomainSpec& spec, const ApproachPath& path,
                                  const Weight& weight, const ProbeOptions& opt = {})
{
    ProbeReport rep;
    int levels = path.params.levels;
    for (int k = 1; k <= levels; ++k) {
        double t = std::ldexp(1.0, -k);
        CPoint p = path.at(t);
        double v;
        try {
            v = K(p, p).real() * weight_value(spec, weight, p);
        } catch (const OverflowError&) {
            rep.diverged = true;
            break;
        }
        if (!std::isfinite(v)) {
            rep.diverged = true;
            break;
        }
        rep.t.push_back(t);
        rep.values.push_back(v);
        rep.extrapolations.push_back(rep.values.size() < 2 ? v : 2.0 * v - rep.values[rep.values.size() - 2]);
    }
    std::size_t n = rep.values.size();
    if (n < 3) {
        rep.diverged = true;
        return rep;
    }
    // linear fit of v against t over the tail
    std::size_t m = std::min<std::size_t>(n, static_cast<std::size_t>(opt.fit_points));
    double st = 0, sv = 0, stt = 0, stv = 0, svv = 0;
    for (std::size_t k = n - m; k < n; ++k) {
        st += rep.t[k];
        sv += rep.values[k];
        stt += rep.t[k] * rep.t[k];
        stv += rep.t[k] * rep.values[k];
        svv += rep.values[k] * rep.values[k];
    }
    double ct = stt - st * st / m, cv = svv - sv * sv / m, ctv = stv - st * sv / m;
    rep.r_squared = (ct > 0 && cv > 0) ? ctv * ctv / (ct * cv) : 0.0;
    rep.richardson = rep.r_squared >= 0.9;
    rep.limit = rep.richardson ? rep.extrapolations.back() : rep.values.back();
    double lo = std::min({rep.values[n - 1], rep.values[n - 2], rep.values[n - 3]});
    double hi = std::max({rep.values[n - 1], rep.values[n - 2], rep.values[n - 3]});
    double peak = 0.0;
    for (double v : rep.values)
        peak = std::max(peak, std::abs(v));
    rep.spread = (hi - lo) / std::max(std::abs(rep.limit), std::numeric_limits<double>::min());
    bool growing = n >= 4 && rep.values[n - 1] > rep.values[n - 2] && rep.values[n - 2] > rep.values[n - 3] &&
                   rep.values[n - 3] > rep.values[n - 4] && rep.values[n - 1] > 2.0 * rep.values[n - 4];
    rep.diverged = rep.diverged || growing;
    rep.tends_to_zero = !rep.diverged && std::abs(rep.limit) <= opt.zero_tol * peak &&
                        std::abs(rep.values.back()) <= opt.zero_tol * peak;
    rep.converged = !rep.diverged && (rep.spread <= opt.spread_tol || rep.tends_to_zero);
    return rep;
}

// Closed-form boundary constants for the model fixtures: the U lift of
// B^{n+m} with alpha = 1 on the z block, and the V lift of it.
inline std::optional<double> predicted_limit(const DomainSpec& spec, std::span<const Complex> target, Stratum s,
                                             const Weight& w)
{
    if (spec.lifts().size() != 1 || spec.lifts()[0].w_dim != 1 || spec.base().kind != BaseKind::Ellipsoid)
        return std::nullopt;
    const auto& base = spec.base();
    for (double p : base.exponents)
        if (p != 1.0)
            return std::nullopt;
    if (!std::isnan(w.defining_exponent) || !std::isnan(w.w_exponent))
        return std::nullopt;
    std::size_t n = base.n_star, m = base.m_passive;
    const auto& lift = spec.lifts()[0];
    double wn = std::norm(target.back());
    double fact = std::tgamma(static_cast<double>(m + n) + 1.0);
    double pw = std::pow(pi, static_cast<double>(m + n + 1));
    if (lift.kind == LiftKind::V) {
        if (s != Stratum::S2 || w.kind != WeightKind::Defining)
            return std::nullopt;
        double G = lift.weight_sum();
        return std::exp(G * wn) * G * fact / pw;
    }
    for (double a : lift.weights)
        if (a != 1.0)
            return std::nullopt;
    double c = fact * static_cast<double>(n + 1) / pw;
    if (s == Stratum::S2 && w.kind == WeightKind::Defining)
        return c / std::pow(1.0 - wn, static_cast<double>(n + 2));
    if (s == Stratum::S4 && w.kind == WeightKind::Product)
        return c;
    if (s == Stratum::S3 && w.kind == WeightKind::W) {
        double zp = 0.0;
        for (std::size_t j = n; j < n + m; ++j)
            zp += std::norm(target[j]);
        return c / std::pow(1.0 - zp, static_cast<double>(n + m + 1));
    }
    return std::nullopt;
}

// Smallest eigenvalue of the complex Hessian of the defining function on
// the complex tangent space, by central differences.
inline double levi_min_eigenvalue(const DomainSpec& spec, std::span<const Complex> p, double step = 1e-4)
{
    std::size_t N = spec.dimension();
    if (p.size() != N)
        throw DimensionError("levi_min_eigenvalue: dimension mismatch");
    if (N < 2)
        throw InvalidArgument("levi_min_eigenvalue: the complex tangent space is trivial in dimension 1");
    auto r = [&](const std::vector<double>& v) {
        CPoint z(N);
        for (std::size_t j = 0; j < N; ++j)
            z[j] = Complex(v[2 * j], v[2 * j + 1]);
        return defining_function(spec, z);
    };
    std::vector<double> x0(2 * N);
    for (std::size_t j = 0; j < N; ++j) {
        x0[2 * j] = p[j].real();
        x0[2 * j + 1] = p[j].imag();
    }
    double h = step;
    std::vector<double> grad(2 * N);
    for (std::size_t a = 0; a < 2 * N; ++a) {
        auto xp = x0, xm = x0;
        xp[a] += h;
        xm[a] -= h;
        grad[a] = (r(xp) - r(xm)) / (2.0 * h);
    }
    Eigen::MatrixXd H(2 * N, 2 * N);
    double r0 = r(x0);
    for (std::size_t a = 0; a < 2 * N; ++a)
        for (std::size_t b = a; b < 2 * N; ++b) {
            double v;
            if (a == b) {
                auto xp = x0, xm = x0;
                xp[a] += h;
                xm[a] -= h;
                v = (r(xp) - 2.0 * r0 + r(xm)) / (h * h);
            } else {
                auto pp = x0, pm = x0, mp = x0, mm = x0;
                pp[a] += h; pp[b] += h;
                pm[a] += h; pm[b] -= h;
                mp[a] -= h; mp[b] += h;
                mm[a] -= h; mm[b] -= h;
                v = (r(pp) - r(pm) - r(mp) + r(mm)) / (4.0 * h * h);
            }
            H(a, b) = H(b, a) = v;
        }
    // dr/dz_j = (r_x - i r_y)/2; tangent vectors satisfy sum_j g_j v_j = 0
    Eigen::VectorXcd g(N);
    for (std::size_t j = 0; j < N; ++j)
        g(j) = 0.5 * Complex(grad[2 * j], -grad[2 * j + 1]);
    if (g.norm() < detail::gradient_tol)
        throw BoundaryError("levi_min_eigenvalue: gradient vanishes, tangent space ill-defined");
    Eigen::MatrixXcd L(N, N);
    for (std::size_t j = 0; j < N; ++j)
        for (std::size_t k = 0; k < N; ++k)
            L(j, k) = 0.25 * Complex(H(2 * j, 2 * k) + H(2 * j + 1, 2 * k + 1),
                                     H(2 * j, 2 * k + 1) - H(2 * j + 1, 2 * k));
    L = (0.5 * (L + L.adjoint())).eval();
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g.conjugate());
    Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(N, N);
    Eigen::MatrixXcd T = Q.rightCols(N - 1);
    // the form sum L_jk v_j conj(v_k) is v^H L^T v
    Eigen::MatrixXcd M = T.adjoint() * L.transpose() * T;
    M = (0.5 * (M + M.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
    return es.eigenvalues()(0);
}

} // namespace bergman
