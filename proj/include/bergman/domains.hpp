#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "numerics.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace bergman {

using CPoint = std::vector<Complex>;

enum class BaseKind { Ellipsoid, Polydisk };
enum class LiftKind { U, V };

inline const char* to_string(BaseKind k) { return k == BaseKind::Ellipsoid ? "GeneralizedComplexEllipsoid" : "Polydisk"; }
inline const char* to_string(LiftKind k) { return k == LiftKind::U ? "U" : "V"; }

// Ellipsoid: sum_j |z_j|^{2 p_j} < 1. Polydisk: max_j |z_j| < 1.
// Coordinates 0..n_star-1 are star coordinates, the rest are passive.
struct BaseDomain {
    BaseKind kind = BaseKind::Ellipsoid;
    std::vector<double> exponents;
    std::size_t n_star = 0;
    std::size_t m_passive = 0;

    std::size_t dimension() const { return n_star + m_passive; }
    double exponent(std::size_t j) const { return kind == BaseKind::Polydisk ? 1.0 : exponents.at(j); }

    static BaseDomain ball(std::size_t n, std::size_t m_passive = 0)
    {
        return {BaseKind::Ellipsoid, std::vector<double>(n + m_passive, 1.0), n, m_passive};
    }
    static BaseDomain disk() { return ball(1); }
    static BaseDomain ellipsoid(std::vector<double> exponents, std::size_t n_star)
    {
        std::size_t total = exponents.size();
        return {BaseKind::Ellipsoid, std::move(exponents), n_star, total - std::min(n_star, total)};
    }
    static BaseDomain polydisk(std::size_t n) { return {BaseKind::Polydisk, {}, n, 0}; }

    bool operator==(const BaseDomain&) const = default;
};

struct LiftStep {
    LiftKind kind = LiftKind::U;
    std::vector<double> weights;
    std::size_t w_dim = 1;

    double weight_sum() const
    {
        double s = 0.0;
        for (double w : weights)
            s += w;
        return s;
    }

    bool operator==(const LiftStep&) const = default;
};

// Base domain plus an ordered stack of lifts. Coordinates are laid out as
// base coordinates followed by each lift's w-block in lift order. The star
// set seen by lift i is the base star set followed by the w-blocks of lifts
// 0..i-1; lift i's weights are indexed by that list.
class DomainSpec {
public:
    explicit DomainSpec(BaseDomain base, std::vector<LiftStep> lifts = {})
        : base_(std::move(base)), lifts_(std::move(lifts))
    {
        validate();
        dims_.push_back(base_.dimension());
        std::vector<std::size_t> star;
        for (std::size_t j = 0; j < base_.n_star; ++j)
            star.push_back(j);
        stars_.push_back(star);
        for (const auto& lift : lifts_) {
            std::size_t d = dims_.back();
            for (std::size_t j = 0; j < lift.w_dim; ++j)
                star.push_back(d + j);
            dims_.push_back(d + lift.w_dim);
            stars_.push_back(star);
        }
        for (std::size_t i = 0; i < lifts_.size(); ++i)
            if (lifts_[i].weights.size() != stars_[i].size())
                throw InvalidArgument("lift " + std::to_string(i) + " has " + std::to_string(lifts_[i].weights.size()) +
                                      " weights for " + std::to_string(stars_[i].size()) + " star coordinates");
    }

    const BaseDomain& base() const { return base_; }
    const std::vector<LiftStep>& lifts() const { return lifts_; }
    std::size_t dimension() const { return dims_.back(); }
    // dimension after the first `level` lifts
    std::size_t dimension_at(std::size_t level) const { return dims_.at(level); }
    const std::vector<std::size_t>& star_coordinates(std::size_t level) const { return stars_.at(level); }
    const std::vector<std::size_t>& star_coordinates() const { return stars_.back(); }

    DomainSpec prefix(std::size_t level) const
    {
        return DomainSpec(base_, std::vector<LiftStep>(lifts_.begin(), lifts_.begin() + static_cast<std::ptrdiff_t>(level)));
    }

    DomainSpec with_lift(LiftStep step) const
    {
        auto lifts = lifts_;
        lifts.push_back(std::move(step));
        return DomainSpec(base_, std::move(lifts));
    }

    bool operator==(const DomainSpec& o) const { return base_ == o.base_ && lifts_ == o.lifts_; }

    // Box half-width per coordinate for rejection sampling. V-lift w
    // coordinates are unbounded and truncated at v_radius.
    std::vector<double> half_widths(double v_radius = 3.0) const
    {
        std::vector<double> h(dimension(), 1.0);
        for (std::size_t i = 0; i < lifts_.size(); ++i)
            if (lifts_[i].kind == LiftKind::V)
                for (std::size_t j = dims_[i]; j < dims_[i + 1]; ++j)
                    h[j] = v_radius;
        return h;
    }

    struct Unwound {
        bool w_ok;
        double r;
    };

    // Works on squared moduli x_j = |z_j|^2 only: every condition is
    // rotation invariant. Lifts are undone from the outermost in.
    Unwound unwind_moduli(std::span<const double> x_in) const
    {
        if (x_in.size() != dimension())
            throw DimensionError("expected " + std::to_string(dimension()) + " coordinates");
        double buf[64];
        std::vector<double> heap;
        double* x = buf;
        if (x_in.size() > 64) {
            heap.assign(x_in.begin(), x_in.end());
            x = heap.data();
        } else {
            std::copy(x_in.begin(), x_in.end(), buf);
        }
        for (std::size_t L = lifts_.size(); L-- > 0;) {
            const auto& lift = lifts_[L];
            double wn = 0.0;
            for (std::size_t j = dims_[L]; j < dims_[L + 1]; ++j)
                wn += x[j];
            const auto& star = stars_[L];
            if (lift.kind == LiftKind::U) {
                if (wn >= 1.0)
                    return {false, std::numeric_limits<double>::quiet_NaN()};
                double s = 1.0 - wn;
                for (std::size_t j = 0; j < star.size(); ++j)
                    if (lift.weights[j] != 0.0)
                        x[star[j]] /= std::pow(s, lift.weights[j]);
            } else {
                for (std::size_t j = 0; j < star.size(); ++j)
                    if (lift.weights[j] != 0.0)
                        x[star[j]] *= std::exp(lift.weights[j] * wn);
            }
        }
        return {true, base_defining(x)};
    }

    bool contains_moduli(std::span<const double> x) const
    {
        auto u = unwind_moduli(x);
        return u.w_ok && u.r < 0.0;
    }

    bool contains(std::span<const Complex> p) const
    {
        if (p.size() != dimension())
            throw DimensionError("point has " + std::to_string(p.size()) + " coordinates, domain has " +
                                 std::to_string(dimension()));
        return contains_moduli(moduli(p));
    }

    static std::vector<double> moduli(std::span<const Complex> p)
    {
        std::vector<double> x(p.size());
        for (std::size_t j = 0; j < p.size(); ++j)
            x[j] = std::norm(p[j]);
        return x;
    }

private:
    BaseDomain base_;
    std::vector<LiftStep> lifts_;
    std::vector<std::size_t> dims_;
    std::vector<std::vector<std::size_t>> stars_;

    double base_defining(const double* x) const
    {
        std::size_t d = base_.dimension();
        if (base_.kind == BaseKind::Polydisk) {
            double m = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                m = std::max(m, x[j]);
            return m - 1.0;
        }
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            double p = base_.exponents[j];
            s += p == 1.0 ? x[j] : std::pow(x[j], p);
        }
        return s - 1.0;
    }

    void validate() const
    {
        if (base_.dimension() == 0)
            throw InvalidArgument("base domain has no coordinates");
        if (base_.kind == BaseKind::Ellipsoid) {
            if (base_.exponents.size() != base_.dimension())
                throw InvalidArgument("ellipsoid needs one exponent per coordinate");
            for (std::size_t j = 0; j < base_.exponents.size(); ++j) {
                double p = base_.exponents[j];
                if (!(p > 0.0) || !std::isfinite(p))
                    throw InvalidArgument("ellipsoid exponents must be positive and finite");
                if (j >= base_.n_star && p != 1.0)
                    throw InvalidArgument("passive coordinates must have exponent 1");
            }
        } else {
            if (!base_.exponents.empty() && base_.exponents != std::vector<double>(base_.dimension(), 1.0))
                throw InvalidArgument("polydisk takes no exponents");
            if (base_.m_passive != 0)
                throw InvalidArgument("polydisk has no passive coordinates");
        }
        for (const auto& lift : lifts_) {
            if (lift.w_dim < 1)
                throw InvalidArgument("lift w_dim must be >= 1");
            bool any_positive = false;
            for (double w : lift.weights) {
                if (!(w >= 0.0) || !std::isfinite(w))
                    throw InvalidArgument("lift weights must be finite and >= 0");
                any_positive = any_positive || w > 0.0;
            }
            if (!any_positive)
                throw InvalidArgument("lift needs at least one positive weight");
        }
    }
};

inline bool contains(const DomainSpec& spec, std::span<const Complex> p) { return spec.contains(p); }

// r < 0 inside; the base defining function composed with the lift maps.
inline double defining_function(const DomainSpec& spec, std::span<const Complex> p)
{
    if (p.size() != spec.dimension())
        throw DimensionError("defining_function: dimension mismatch");
    auto u = spec.unwind_moduli(DomainSpec::moduli(p));
    if (!u.w_ok)
        throw SingularEvaluationError("defining_function: |w| >= 1 under a U lift");
    return u.r;
}

// Image of a point of prefix(lift_index + 1) in prefix(lift_index) under
// f_alpha(., w) or g_gamma(., w).
inline CPoint slice_map(const DomainSpec& spec, std::size_t lift_index, std::span<const Complex> p)
{
    if (lift_index >= spec.lifts().size())
        throw InvalidArgument("slice_map: no lift " + std::to_string(lift_index));
    std::size_t inner = spec.dimension_at(lift_index), outer = spec.dimension_at(lift_index + 1);
    if (p.size() != outer)
        throw DimensionError("slice_map: expected " + std::to_string(outer) + " coordinates");
    const auto& lift = spec.lifts()[lift_index];
    double wn = 0.0;
    for (std::size_t j = inner; j < outer; ++j)
        wn += std::norm(p[j]);
    CPoint out(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(inner));
    const auto& star = spec.star_coordinates(lift_index);
    if (lift.kind == LiftKind::U) {
        if (wn >= 1.0)
            throw SingularEvaluationError("slice_map: |w| >= 1 under a U lift");
        for (std::size_t j = 0; j < star.size(); ++j)
            out[star[j]] /= std::pow(1.0 - wn, lift.weights[j] / 2.0);
    } else {
        for (std::size_t j = 0; j < star.size(); ++j)
            out[star[j]] *= std::exp(lift.weights[j] * wn / 2.0);
    }
    return out;
}

template <class R>
concept Region = requires(const R& r, std::span<const Complex> p) {
    { r.contains(p) } -> std::convertible_to<bool>;
    { r.dimension() } -> std::convertible_to<std::size_t>;
    { r.star_coordinates() } -> std::convertible_to<std::vector<std::size_t>>;
    { r.half_widths() } -> std::convertible_to<std::vector<double>>;
};

struct SamplingOptions {
    double v_radius = 3.0;
    std::uint64_t max_draws = 10'000'000;
    double min_acceptance = 1e-6;
    unsigned workers = 1;
};

struct SampleResult {
    std::vector<CPoint> points;
    std::uint64_t draws = 0;
    double acceptance_ratio = 0.0;
    double box_volume = 0.0;

    double volume_estimate() const { return acceptance_ratio * box_volume; }
};

namespace detail {

inline CPoint box_point(const CounterRng& rng, std::uint64_t draw, const std::vector<double>& h)
{
    std::size_t d = h.size();
    CPoint p(d);
    for (std::size_t j = 0; j < d; ++j) {
        double re = 2.0 * rng.uniform(draw * 2 * d + 2 * j) - 1.0;
        double im = 2.0 * rng.uniform(draw * 2 * d + 2 * j + 1) - 1.0;
        p[j] = Complex(re * h[j], im * h[j]);
    }
    return p;
}

template <Region R>
SampleResult sample_region(const R& region, std::size_t count, std::uint64_t seed, std::vector<double> h,
                           const SamplingOptions& opt)
{
    if (count == 0)
        throw InvalidArgument("sample count must be >= 1");
    CounterRng rng(seed, 1);
    SampleResult res;
    res.box_volume = 1.0;
    for (double w : h)
        res.box_volume *= 4.0 * w * w;
    // Draws are processed in blocks; each block depends only on its counter
    // range, and accepted points are appended in counter order.
    const std::uint64_t block = 4096;
    unsigned workers = resolve_workers(opt.workers);
    while (res.points.size() < count) {
        std::size_t nblocks = workers;
        std::vector<std::vector<std::pair<std::uint64_t, CPoint>>> found(nblocks);
        std::uint64_t start = res.draws;
        parallel_for(nblocks, workers, [&](std::size_t b) {
            for (std::uint64_t i = 0; i < block; ++i) {
                std::uint64_t draw = start + b * block + i;
                CPoint p = box_point(rng, draw, h);
                if (region.contains(p))
                    found[b].emplace_back(draw, std::move(p));
            }
        });
        res.draws = start + nblocks * block;
        for (auto& hits : found) {
            for (auto& [draw, p] : hits) {
                if (res.points.size() == count)
                    break;
                res.points.push_back(std::move(p));
                if (res.points.size() == count)
                    res.draws = draw + 1;
            }
        }
        if (res.points.size() < count && res.draws >= opt.max_draws &&
            static_cast<double>(res.points.size()) / static_cast<double>(res.draws) < opt.min_acceptance)
            throw SamplingError("acceptance ratio below " + std::to_string(opt.min_acceptance) + " after " +
                                std::to_string(res.draws) + " draws");
    }
    res.acceptance_ratio = static_cast<double>(res.points.size()) / static_cast<double>(res.draws);
    return res;
}

} // namespace detail

template <Region R>
SampleResult sample_region(const R& region, std::size_t count, std::uint64_t seed, const SamplingOptions& opt = {})
{
    return detail::sample_region(region, count, seed, region.half_widths(), opt);
}

inline SampleResult sample_interior(const DomainSpec& spec, std::size_t count, std::uint64_t seed,
                                    const SamplingOptions& opt = {})
{
    return detail::sample_region(spec, count, seed, spec.half_widths(opt.v_radius), opt);
}

// Random scalings of the star coordinates by |lambda_j| <= 1 must stay inside.
// Moduli 0 and 1 are drawn with positive probability so that holes at the
// origin and non-monotone boundaries are hit.
template <Region R>
bool star_shape_check(const R& region, std::size_t trials, std::uint64_t seed, const SamplingOptions& opt = {})
{
    if (trials == 0)
        throw InvalidArgument("star_shape_check needs trials >= 1");
    auto sample = sample_region(region, trials, seed, opt);
    CounterRng rng(seed, 2);
    std::vector<std::size_t> star = region.star_coordinates();
    std::uint64_t counter = 0;
    for (const auto& p : sample.points) {
        CPoint q = p;
        for (std::size_t j : star) {
            double u = rng.uniform(counter++);
            double mag = u < 0.125 ? 0.0 : u < 0.25 ? 1.0 : rng.uniform(counter++);
            double phase = 2.0 * pi * rng.uniform(counter++);
            q[j] *= std::polar(mag, phase);
        }
        if (!region.contains(q))
            return false;
    }
    return true;
}

} // namespace bergman
