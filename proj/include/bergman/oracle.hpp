#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "csv.hpp"
#include "domains.hpp"
#include "evaluator.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "shadow.hpp"

namespace bergman {

struct MultiIndex {
    std::vector<unsigned> entries;

    MultiIndex() = default;
    MultiIndex(std::initializer_list<unsigned> e) : entries(e) {}
    explicit MultiIndex(std::vector<unsigned> e) : entries(std::move(e)) {}

    std::size_t size() const { return entries.size(); }
    unsigned operator[](std::size_t i) const { return entries[i]; }
    unsigned total() const
    {
        unsigned t = 0;
        for (unsigned e : entries)
            t += e;
        return t;
    }

    std::string to_string() const
    {
        std::string s;
        for (std::size_t i = 0; i < entries.size(); ++i)
            s += (i ? ":" : "") + std::to_string(entries[i]);
        return s;
    }

    static MultiIndex parse(const std::string& text)
    {
        MultiIndex m;
        for (const auto& part : split(text, ':')) {
            if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
                throw ParseError("bad multi-index '" + text + "'");
            m.entries.push_back(static_cast<unsigned>(std::stoul(part)));
        }
        return m;
    }

    auto operator<=>(const MultiIndex&) const = default;
};

// All multi-indices of total degree `degree` in `dim` variables, in
// lexicographic order (first entry largest first).
inline std::vector<MultiIndex> shell_indices(std::size_t dim, unsigned degree)
{
    std::vector<MultiIndex> out;
    std::vector<unsigned> cur(dim, 0);
    std::function<void(std::size_t, unsigned)> rec = [&](std::size_t j, unsigned left) {
        if (j + 1 == dim) {
            cur[j] = left;
            out.emplace_back(cur);
            return;
        }
        for (unsigned e = left + 1; e-- > 0;) {
            cur[j] = e;
            rec(j + 1, left - e);
        }
    };
    if (dim == 0)
        return out;
    rec(0, degree);
    return out;
}

enum class NormMethod { Exact, Quadrature, MonteCarlo, Auto };

inline const char* to_string(NormMethod m)
{
    switch (m) {
    case NormMethod::Exact: return "exact";
    case NormMethod::Quadrature: return "quadrature";
    case NormMethod::MonteCarlo: return "monte-carlo";
    default: return "auto";
    }
}

inline NormMethod parse_norm_method(const std::string& s)
{
    if (s == "exact") return NormMethod::Exact;
    if (s == "quadrature") return NormMethod::Quadrature;
    if (s == "monte-carlo") return NormMethod::MonteCarlo;
    if (s == "auto") return NormMethod::Auto;
    throw ParseError("unknown norm method '" + s + "'");
}

struct NormValue {
    double value = 0.0;
    double error = 0.0;
    NormMethod method = NormMethod::Exact;
};

struct NormOptions {
    NormMethod method = NormMethod::Auto;
    double rel_tol = 1e-9;
    std::size_t mc_samples = 1'000'000;
    std::size_t mc_strata = 64;
    double mc_rel_tol = 0.05;
    std::uint64_t seed = 0;
};

// log ||z^a||^2 from the Dirichlet/Gamma factorization: one factor per lift
// (U: pi^k prod c_j! Gamma(s+1)/Gamma(s+1+|c|+k), V: pi^k prod c_j!/s^{|c|+k},
// s = sum weight_j (a_j+1) over the lift's star coordinates) times the
// base norm.
inline double exact_log_norm(const DomainSpec& spec, const MultiIndex& idx)
{
    if (idx.size() != spec.dimension())
        throw DimensionError("multi-index length differs from the domain dimension");
    double acc = 0.0;
    const double log_pi = std::log(pi);
    for (std::size_t L = spec.lifts().size(); L-- > 0;) {
        const auto& lift = spec.lifts()[L];
        const auto& star = spec.star_coordinates(L);
        double s = 0.0;
        for (std::size_t i = 0; i < star.size(); ++i)
            s += lift.weights[i] * (idx[star[i]] + 1.0);
        double csum = 0.0;
        for (std::size_t j = spec.dimension_at(L); j < spec.dimension_at(L + 1); ++j) {
            acc += std::lgamma(idx[j] + 1.0);
            csum += idx[j];
        }
        double k = static_cast<double>(lift.w_dim);
        acc += k * log_pi;
        if (lift.kind == LiftKind::U)
            acc += std::lgamma(s + 1.0) - std::lgamma(s + 1.0 + csum + k);
        else
            acc -= (csum + k) * std::log(s);
    }
    const auto& base = spec.base();
    std::size_t d = base.dimension();
    if (base.kind == BaseKind::Polydisk) {
        for (std::size_t j = 0; j < d; ++j)
            acc += log_pi - std::log(idx[j] + 1.0);
    } else {
        double sum = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            double e = (idx[j] + 1.0) / base.exponents[j];
            acc += log_pi + std::lgamma(e) - std::log(base.exponents[j]);
            sum += e;
        }
        acc -= std::lgamma(1.0 + sum);
    }
    return acc;
}

namespace detail {

inline double pow_u(double x, unsigned e) { return ipow(x, static_cast<int>(e)); }

} // namespace detail

// ||z^idx||^2 on the domain, reduced to the x = |z|^2 shadow: the measure is
// pi^d dx times the torus average.
inline NormValue monomial_norm(const DomainSpec& spec, const MultiIndex& idx, const NormOptions& opt = {})
{
    if (idx.size() != spec.dimension())
        throw DimensionError("multi-index length differs from the domain dimension");
    std::size_t d = spec.dimension();
    NormMethod method = opt.method;
    if (method == NormMethod::Auto)
        method = d <= 3 ? NormMethod::Quadrature : NormMethod::MonteCarlo;
    if (method == NormMethod::Exact)
        return {std::exp(exact_log_norm(spec, idx)), 0.0, NormMethod::Exact};

    double scale = std::pow(pi, static_cast<double>(d));
    auto f = [&](std::span<const double> x) {
        double v = 1.0;
        for (std::size_t j = 0; j < d; ++j)
            v *= detail::pow_u(x[j], idx[j]);
        return v;
    };
    LiftedShadow shadow(spec);
    if (method == NormMethod::Quadrature) {
        QuadratureOptions q;
        q.rel_tol = opt.rel_tol;
        auto r = shadow.integrate<double>(f, q);
        if (!(r.value > 0.0) || !std::isfinite(r.value))
            throw IntegrationError("monomial norm: quadrature produced a non-positive value");
        if (!r.converged && r.error > 1e-6 * r.value)
            throw IntegrationError("monomial norm: quadrature did not converge (error " + format_double(r.error) + ")");
        return {scale * r.value, scale * r.error, NormMethod::Quadrature};
    }
    auto r = shadow.monte_carlo<double>(f, opt.mc_samples, opt.mc_strata, opt.seed);
    if (!(r.value > 0.0) || !std::isfinite(r.value))
        throw IntegrationError("monomial norm: Monte Carlo produced a non-positive value");
    if (r.error > opt.mc_rel_tol * r.value)
        throw IntegrationError("monomial norm: Monte Carlo standard error " + format_double(r.error / r.value) +
                               " above tolerance");
    return {scale * r.value, scale * r.error, NormMethod::MonteCarlo};
}

class NormTable {
public:
    explicit NormTable(DomainSpec spec) : spec_(std::move(spec)) {}

    static NormTable build(const DomainSpec& spec, unsigned max_degree, const NormOptions& opt = {},
                           unsigned workers = 0)
    {
        NormTable t(spec);
        std::vector<MultiIndex> all;
        for (unsigned D = 0; D <= max_degree; ++D)
            for (auto& m : shell_indices(spec.dimension(), D))
                all.push_back(std::move(m));
        std::sort(all.begin(), all.end());
        std::vector<NormValue> values(all.size());
        parallel_for(all.size(), workers, [&](std::size_t i) {
            NormOptions o = opt;
            o.seed = opt.seed + i;
            values[i] = monomial_norm(spec, all[i], o);
        });
        for (std::size_t i = 0; i < all.size(); ++i)
            t.entries_.emplace(all[i], values[i]);
        return t;
    }

    const DomainSpec& spec() const { return spec_; }
    const std::map<MultiIndex, NormValue>& entries() const { return entries_; }
    void set(const MultiIndex& idx, NormValue v) { entries_[idx] = v; }

    const NormValue& at(const MultiIndex& idx) const
    {
        auto it = entries_.find(idx);
        if (it == entries_.end())
            throw InvalidArgument("norm table has no entry " + idx.to_string());
        return it->second;
    }

    std::string to_csv() const
    {
        std::string out = "index,value,error_estimate,method\n";
        for (const auto& [idx, v] : entries_)
            out += idx.to_string() + "," + format_double(v.value) + "," + format_double(v.error) + "," +
                   to_string(v.method) + "\n";
        return out;
    }

    static NormTable from_csv(const DomainSpec& spec, const std::string& text)
    {
        NormTable t(spec);
        std::istringstream in(text);
        std::string line;
        if (!std::getline(in, line) || line != "index,value,error_estimate,method")
            throw ParseError("norm table CSV: bad header");
        while (std::getline(in, line)) {
            if (line.empty())
                continue;
            auto f = split(line, ',');
            if (f.size() != 4)
                throw ParseError("norm table CSV: expected 4 fields");
            MultiIndex idx = MultiIndex::parse(f[0]);
            if (idx.size() != spec.dimension())
                throw ParseError("norm table CSV: index length mismatch");
            NormValue v{parse_double(f[1]), parse_double(f[2]), parse_norm_method(f[3])};
            if (!(v.value > 0.0))
                throw ParseError("norm table CSV: norms must be positive");
            t.entries_[idx] = v;
        }
        return t;
    }

private:
    DomainSpec spec_;
    std::map<MultiIndex, NormValue> entries_;
};

struct SeriesOptions {
    double stop_rel = 1e-9;
};

struct SeriesResult {
    Complex value;
    double tail_bound = 0.0;
    unsigned degree = 0;    // last shell summed
    bool stopped_early = false;
};

// Monomial series sum_a p^a conj(q)^a / ||z^a||^2 by total-degree shells,
// with exact norms precomputed once per (spec, cap).
class SeriesOracle {
public:
    SeriesOracle(const DomainSpec& spec, unsigned degree_cap) : dim_(spec.dimension()), cap_(degree_cap)
    {
        for (unsigned D = 0; D <= cap_; ++D) {
            Shell sh;
            for (const auto& m : shell_indices(dim_, D)) {
                for (unsigned e : m.entries)
                    sh.exponents.push_back(static_cast<std::uint16_t>(e));
                sh.inv_norm.push_back(std::exp(-exact_log_norm(spec, m)));
            }
            shells_.push_back(std::move(sh));
        }
    }

    unsigned degree_cap() const { return cap_; }

    SeriesResult operator()(std::span<const Complex> p, std::span<const Complex> q, const SeriesOptions& opt = {}) const
    {
        if (p.size() != dim_ || q.size() != dim_)
            throw DimensionError("series_kernel: dimension mismatch");
        std::vector<std::vector<Complex>> pw(dim_, std::vector<Complex>(cap_ + 1));
        for (std::size_t j = 0; j < dim_; ++j) {
            Complex u = p[j] * std::conj(q[j]);
            pw[j][0] = 1.0;
            for (unsigned e = 1; e <= cap_; ++e)
                pw[j][e] = pw[j][e - 1] * u;
        }
        CompensatedSum total;
        std::vector<double> mags;
        std::vector<Complex> sums;
        SeriesResult res;
        for (unsigned D = 0; D <= cap_; ++D) {
            const Shell& sh = shells_[D];
            CompensatedSum shell;
            double mag = 0.0;
            for (std::size_t t = 0; t < sh.inv_norm.size(); ++t) {
                Complex term = sh.inv_norm[t];
                const std::uint16_t* e = &sh.exponents[t * dim_];
                for (std::size_t j = 0; j < dim_; ++j)
                    term *= pw[j][e[j]];
                shell.add(term);
                mag += std::abs(term);
            }
            Complex s = shell.value();
            total.add(s);
            mags.push_back(mag);
            sums.push_back(s);
            res.degree = D;
            double partial = std::abs(total.value());
            if (D >= 2 && std::abs(sums[D]) <= opt.stop_rel * partial &&
                std::abs(sums[D - 1]) <= opt.stop_rel * partial && mags[D] <= opt.stop_rel * partial) {
                res.stopped_early = D < cap_;
                break;
            }
        }
        res.value = total.value();
        std::size_t n = mags.size();
        if (mags.back() == 0.0) {
            res.tail_bound = 0.0;
        } else if (n < 3) {
            res.tail_bound = std::numeric_limits<double>::infinity();
        } else {
            double r1 = mags[n - 2] > 0.0 ? mags[n - 1] / mags[n - 2] : 0.0;
            double r2 = mags[n - 3] > 0.0 ? mags[n - 2] / mags[n - 3] : 0.0;
            double rho = std::max(r1, r2);
            if (rho >= 1.0) {
                // a few leading shells may grow before the geometric decay sets in
                if (!res.stopped_early && res.degree < 8) {
                    res.tail_bound = std::numeric_limits<double>::infinity();
                    return res;
                }
                if (!res.stopped_early)
                    throw ConvergenceError("series_kernel: shells not decaying at degree " + std::to_string(res.degree) +
                                           " (ratio " + format_double(rho) + ")");
                res.tail_bound = mags.back();
            } else {
                res.tail_bound = mags.back() * rho / (1.0 - rho);
            }
        }
        return res;
    }

private:
    struct Shell {
        std::vector<std::uint16_t> exponents;
        std::vector<double> inv_norm;
    };
    std::size_t dim_;
    unsigned cap_;
    std::vector<Shell> shells_;
};

inline SeriesResult series_kernel(const DomainSpec& spec, std::span<const Complex> p, std::span<const Complex> q,
                                  unsigned degree_cap, const SeriesOptions& opt = {})
{
    return SeriesOracle(spec, degree_cap)(p, q, opt);
}

struct ReproducingOptions {
    QuadratureOptions quad{1e-6, 1e-12, std::size_t{1} << 14, 5};
    double torus_tol = 1e-6;
    int torus_max = 32;
    bool monte_carlo = false;   // forced on above 3 complex dimensions
    std::size_t mc_samples = 200'000;
    std::uint64_t seed = 0;
};

struct ReproducingResult {
    MultiIndex idx;
    Complex integral;
    Complex expected;
    double residual = 0.0;
    double error_estimate = 0.0;
};

namespace detail {

inline Complex monomial(std::span<const Complex> z, const MultiIndex& idx)
{
    Complex v = 1.0;
    for (std::size_t j = 0; j < z.size(); ++j)
        v *= ipow(z[j], static_cast<int>(idx[j]));
    return v;
}

} // namespace detail

// |int K(p; conj q) q^idx dV(q) - p^idx| / max(|p^idx|, 1e-6) for each index.
inline std::vector<ReproducingResult> reproducing_check(const KernelEvaluator& K, const DomainSpec& spec,
                                                        const std::vector<MultiIndex>& indices,
                                                        std::span<const Complex> p, const ReproducingOptions& opt = {})
{
    std::size_t d = spec.dimension();
    if (K.dimension() != d || p.size() != d)
        throw DimensionError("reproducing_check: dimension mismatch");
    for (const auto& m : indices)
        if (m.size() != d)
            throw DimensionError("reproducing_check: multi-index length mismatch");
    if (!spec.contains(p))
        throw DomainError("reproducing_check: p is not interior");
    std::size_t nidx = indices.size();
    // Trapezoid sizes on the torus: modes aliased onto q^b are damped by
    // |p_j|^{N_j}; N_j > max b_j keeps the matching mode exact.
    std::vector<unsigned> maxdeg(d, 0);
    for (const auto& m : indices)
        for (std::size_t j = 0; j < d; ++j)
            maxdeg[j] = std::max(maxdeg[j], m[j]);
    std::vector<int> N(d);
    std::size_t grid = 1;
    for (std::size_t j = 0; j < d; ++j) {
        int n = static_cast<int>(maxdeg[j]) + 1;
        double a = std::abs(p[j]);
        if (a > 0.0)
            n = std::max(n, static_cast<int>(std::ceil(std::log(opt.torus_tol) / std::log(std::min(a, 0.95)))) + 2);
        N[j] = std::clamp(n, 4, opt.torus_max);
        grid *= static_cast<std::size_t>(N[j]);
    }
    std::vector<std::vector<Complex>> phases(d);
    for (std::size_t j = 0; j < d; ++j)
        for (int k = 0; k < N[j]; ++k)
            phases[j].push_back(std::polar(1.0, 2.0 * pi * (k + 0.5) / N[j]));

    // torus average of K(p; conj q) q^idx at moduli x
    auto torus = [&](std::span<const double> x) {
        std::vector<Complex> acc(nidx, Complex{});
        std::vector<double> r(d);
        for (std::size_t j = 0; j < d; ++j)
            r[j] = std::sqrt(x[j]);
        CPoint q(d);
        std::vector<std::vector<Complex>> pw(d);
        for (std::size_t g = 0; g < grid; ++g) {
            std::size_t rest = g;
            for (std::size_t j = 0; j < d; ++j) {
                q[j] = r[j] * phases[j][rest % N[j]];
                rest /= N[j];
                pw[j].assign(maxdeg[j] + 1, Complex(1.0));
                for (unsigned e = 1; e <= maxdeg[j]; ++e)
                    pw[j][e] = pw[j][e - 1] * q[j];
            }
            Complex k = K(std::span<const Complex>(p), std::span<const Complex>(q));
            for (std::size_t i = 0; i < nidx; ++i) {
                Complex m = k;
                for (std::size_t j = 0; j < d; ++j)
                    m *= pw[j][indices[i][j]];
                acc[i] += m;
            }
        }
        for (auto& a : acc)
            a /= static_cast<double>(grid);
        return acc;
    };

    LiftedShadow shadow(spec);
    QuadResult<std::vector<Complex>> r;
    if (!opt.monte_carlo && d <= 3) {
        r = shadow.integrate<std::vector<Complex>>(torus, opt.quad);
    } else {
        // one random torus point per sample
        CounterRng rng(opt.seed, 4);
        std::uint64_t counter = 0;
        auto sample = [&](std::span<const double> x) {
            CPoint q(d);
            for (std::size_t j = 0; j < d; ++j)
                q[j] = std::polar(std::sqrt(x[j]), 2.0 * pi * rng.uniform(counter++));
            Complex k = K(std::span<const Complex>(p), std::span<const Complex>(q));
            std::vector<Complex> v(nidx);
            for (std::size_t i = 0; i < nidx; ++i)
                v[i] = k * detail::monomial(q, indices[i]);
            return v;
        };
        r = shadow.monte_carlo<std::vector<Complex>>(sample, opt.mc_samples, 64, opt.seed);
    }
    if (r.value.size() != nidx)
        throw IntegrationError("reproducing_check: no feasible quadrature samples");
    double scale = std::pow(pi, static_cast<double>(d));
    std::vector<ReproducingResult> out;
    for (std::size_t i = 0; i < nidx; ++i) {
        Complex integral = r.value[i] * scale;
        Complex expected = detail::monomial(p, indices[i]);
        double denom = std::max(std::abs(expected), 1e-6);
        out.push_back({indices[i], integral, expected, std::abs(integral - expected) / denom, r.error * scale / denom});
    }
    return out;
}

inline double reproducing_check(const KernelEvaluator& K, const DomainSpec& spec, const MultiIndex& idx,
                                std::span<const Complex> p, const ReproducingOptions& opt = {})
{
    return reproducing_check(K, spec, std::vector<MultiIndex>{idx}, p, opt).front().residual;
}

struct DirichletResult {
    double quadrature = 0.0;
    double pochhammer = 0.0;
    double error_estimate = 0.0;
};

// pi^k int_{simplex} (1 - sum r)^s r^c dr against pi^k prod c_j! / (1+s)_{|c|+k}.
inline DirichletResult dirichlet_identity_check(double s, const MultiIndex& c, std::size_t k)
{
    if (k < 1 || k > 4)
        throw InvalidArgument("dirichlet_identity_check: 1 <= k <= 4");
    if (c.size() != k)
        throw DimensionError("dirichlet_identity_check: c must have k entries");
    if (!(s > 0.0))
        throw InvalidArgument("dirichlet_identity_check: s > 0");
    double pik = std::pow(pi, static_cast<double>(k));
    double num = 1.0;
    for (unsigned e : c.entries)
        num *= factorial(e);
    DirichletResult res;
    res.pochhammer = pik * num / pochhammer(1.0 + s, c.total() + static_cast<unsigned>(k));
    auto f = [&](std::span<const double> r, double slack) {
        double v = std::pow(slack, s);
        for (std::size_t j = 0; j < k; ++j)
            v *= ipow(r[j], static_cast<int>(c[j]));
        return v;
    };
    double coarse = simplex_tanh_sinh(f, k, k >= 4 ? 0.25 : 0.125);
    double fine = simplex_tanh_sinh(f, k, k >= 4 ? 0.125 : 0.0625);
    res.quadrature = pik * fine;
    res.error_estimate = pik * std::abs(fine - coarse);
    return res;
}

} // namespace bergman
