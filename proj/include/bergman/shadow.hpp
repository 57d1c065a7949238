#pragma once

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "domains.hpp"
#include "quadrature.hpp"
#include "rng.hpp"

namespace bergman {

// The Reinhardt shadow {x = |z|^2} of a spec, parametrized lift by lift:
// the w-block of the outermost lift ranges over a simplex (U) or the
// orthant (V), the coordinates it acts on are rescaled by (1-|w|^2)^{a}
// or e^{-a|w|^2}, and so on down to the base shadow, whose bounds are
// explicit. Then x_j = y_j * scale_j and dx = prod scale_j dy.
class LiftedShadow {
public:
    explicit LiftedShadow(const DomainSpec& spec) : spec_(spec)
    {
        for (std::size_t L = spec.lifts().size(); L-- > 0;) {
            std::size_t b = spec.dimension_at(L), e = spec.dimension_at(L + 1);
            for (std::size_t j = b; j < e; ++j)
                axes_.push_back({j, spec.lifts()[L].kind == LiftKind::U ? Kind::UBlock : Kind::VBlock,
                                 static_cast<int>(L), j == e - 1});
        }
        for (std::size_t j = 0; j < spec.base().dimension(); ++j)
            axes_.push_back({j, Kind::Base, -1, false});
    }

    std::size_t dimension() const { return axes_.size(); }

    // integral of f(x) dx over the shadow
    template <class V, class F>
    QuadResult<V> integrate(F&& f, const QuadratureOptions& opt) const
    {
        std::size_t d = axes_.size();
        std::vector<double> y(d, 0.0);
        QuadResult<V> total;
        std::function<V(std::size_t, std::vector<double>)> level = [&](std::size_t i,
                                                                       std::vector<double> scale) -> V {
            if (i == d)
                return evaluate<V>(f, y, scale);
            const Axis& ax = axes_[i];
            double bound = upper(i, y);
            auto r = integrate_adaptive<V>(
                [&](double t) {
                    y[ax.coord] = t;
                    if (ax.closes_block)
                        return level(i + 1, rescaled(ax.lift, y, scale));
                    return level(i + 1, scale);
                },
                0.0, bound, opt);
            if (i == 0) {
                total.error = r.error;
                total.nodes = r.nodes;
            }
            total.converged = total.converged && r.converged;
            return r.value;
        };
        total.value = level(0, std::vector<double>(d, 1.0));
        return total;
    }

    // Stratified Monte Carlo: U-blocks uniform on the unit cube (outside the
    // simplex contributes 0), V axes exponential with rate Gamma/2, base
    // axes uniform on [0,1). Strata along the first axis.
    template <class V, class F>
    QuadResult<V> monte_carlo(F&& f, std::size_t samples, std::size_t strata, std::uint64_t seed) const
    {
        std::size_t d = axes_.size();
        CounterRng rng(seed, 3);
        strata = std::max<std::size_t>(1, std::min(strata, samples));
        std::size_t per = std::max<std::size_t>(2, samples / strata);
        QuadResult<V> res;
        double variance = 0.0;
        std::uint64_t counter = 0;
        std::vector<double> y(d);
        for (std::size_t st = 0; st < strata; ++st) {
            V sum{};
            double m1 = 0.0, m2 = 0.0;
            for (std::size_t n = 0; n < per; ++n) {
                double density = 1.0;
                bool inside = true;
                std::vector<double> scale(d, 1.0);
                for (std::size_t i = 0; i < d; ++i) {
                    const Axis& ax = axes_[i];
                    double u = rng.uniform(counter++);
                    if (i == 0)
                        u = (st + u) / static_cast<double>(strata);
                    if (ax.kind == Kind::VBlock) {
                        double rate = 0.5 * spec_.lifts()[ax.lift].weight_sum();
                        y[ax.coord] = -std::log1p(-u) / rate;
                        density *= rate * std::exp(-rate * y[ax.coord]);
                    } else {
                        y[ax.coord] = u;
                        if (u >= upper(i, y))
                            inside = false;
                    }
                    if (inside && ax.closes_block)
                        scale = rescaled(ax.lift, y, scale);
                }
                V value{};
                if (inside)
                    value = evaluate<V>(f, y, scale);
                accumulate(sum, value, 1.0 / density);
                double mag = detail::magnitude(value) / density;
                m1 += mag;
                m2 += mag * mag;
            }
            double w = 1.0 / static_cast<double>(strata);
            accumulate(res.value, sum, w / static_cast<double>(per));
            double mean = m1 / per;
            double var = std::max(0.0, m2 / per - mean * mean) * per / (per - 1.0);
            variance += w * w * var / per;
        }
        res.error = std::sqrt(variance);
        res.nodes = strata * per;
        return res;
    }

private:
    enum class Kind { UBlock, VBlock, Base };
    struct Axis {
        std::size_t coord;
        Kind kind;
        int lift;
        bool closes_block;
    };

    const DomainSpec& spec_;
    std::vector<Axis> axes_;

    template <class V>
    static void accumulate(V& acc, const V& v, double w)
    {
        detail::accumulate(acc, v, w);
    }

    template <class V, class F>
    static V evaluate(F& f, const std::vector<double>& y, const std::vector<double>& scale)
    {
        std::vector<double> x(y.size());
        double jac = 1.0;
        for (std::size_t j = 0; j < y.size(); ++j) {
            x[j] = y[j] * scale[j];
            jac *= scale[j];
        }
        V v = f(std::span<const double>(x));
        V out{};
        detail::accumulate(out, v, jac);
        return out;
    }

    // upper limit of axis i given the earlier axes
    double upper(std::size_t i, const std::vector<double>& y) const
    {
        const Axis& ax = axes_[i];
        if (ax.kind == Kind::VBlock)
            return std::numeric_limits<double>::infinity();
        if (ax.kind == Kind::UBlock) {
            double used = 0.0;
            for (std::size_t j = spec_.dimension_at(ax.lift); j < ax.coord; ++j)
                used += y[j];
            return std::max(0.0, 1.0 - used);
        }
        const auto& base = spec_.base();
        if (base.kind == BaseKind::Polydisk)
            return 1.0;
        double used = 0.0;
        for (std::size_t j = 0; j < ax.coord; ++j)
            used += std::pow(y[j], base.exponents[j]);
        if (used >= 1.0)
            return 0.0;
        return std::pow(1.0 - used, 1.0 / base.exponents[ax.coord]);
    }

    std::vector<double> rescaled(int L, const std::vector<double>& y, std::vector<double> scale) const
    {
        const auto& lift = spec_.lifts()[L];
        // the lift's own inequality is stated in the coordinates left after
        // undoing the outer lifts, which is y on this block
        double wn = 0.0;
        for (std::size_t j = spec_.dimension_at(L); j < spec_.dimension_at(L + 1); ++j)
            wn += y[j];
        const auto& star = spec_.star_coordinates(L);
        for (std::size_t i = 0; i < star.size(); ++i) {
            double a = lift.weights[i];
            if (a == 0.0)
                continue;
            scale[star[i]] *= lift.kind == LiftKind::U ? std::pow(std::max(0.0, 1.0 - wn), a) : std::exp(-a * wn);
        }
        return scale;
    }
};

} // namespace bergman
