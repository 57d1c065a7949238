#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "domains.hpp"
#include "evaluator.hpp"
#include "kernels.hpp"

namespace bergman {

enum class FactorOrder { Ascending, Descending };

namespace detail {

inline void check_lift(const KernelEvaluator& base, const std::vector<double>& weights, std::size_t k)
{
    if (k < 1)
        throw InvalidArgument("lift: w dimension k >= 1");
    if (k > static_cast<std::size_t>(Jet::max_order))
        throw UnsupportedOrderError("lift: order k = " + std::to_string(k) + " exceeds the jet cap of 3");
    if (weights.size() != base.arity().star.size())
        throw InvalidArgument("lift: " + std::to_string(weights.size()) + " weights for " +
                              std::to_string(base.arity().star.size()) + " star coordinates");
    bool positive = false;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw InvalidArgument("lift: weights must be finite and >= 0");
        positive = positive || w > 0.0;
    }
    if (!positive)
        throw InvalidArgument("lift: at least one weight must be positive");
}

inline Arity lifted_arity(const Arity& inner, std::size_t k)
{
    Arity a{inner.dimension + k, inner.star};
    for (std::size_t j = 0; j < k; ++j)
        a.star.push_back(inner.dimension + j);
    return a;
}

// v holds E^i G for i = 0..; applies (c + E) for each constant, in order.
// Each application consumes one moment; the result is v[0].
inline Jet apply_factors(std::vector<Jet> v, const std::vector<double>& constants)
{
    if (v.size() < constants.size() + 1)
        throw InvalidArgument("apply_factors: not enough moments");
    for (double c : constants) {
        for (std::size_t i = 0; i + 1 < v.size(); ++i)
            v[i] = v[i] * c + v[i + 1];
        v.pop_back();
    }
    return v.front();
}

// Moments E^i G, i = 0..k, of a jet G(s) built with x_l -> x_l e^{w_l s}.
inline std::vector<Jet> euler_moments(const Jet& g, int id, std::size_t k)
{
    std::vector<Jet> v;
    for (std::size_t i = 0; i <= k; ++i)
        v.push_back(g.slice(id, static_cast<int>(i)) * factorial(static_cast<unsigned>(i)));
    return v;
}

struct SliceBody {
    KernelEvaluator base;
    LiftStep lift;
    std::vector<Complex> w;
    template <class S>
    S operator()(std::span<const S> p, std::span<const Complex> q) const
    {
        const auto& star = base.arity().star;
        double w2 = 0.0;
        for (Complex c : w)
            w2 += std::norm(c);
        std::vector<S> pp(p.begin(), p.end());
        std::vector<Complex> qq(q.begin(), q.end());
        double factor = 1.0;
        for (std::size_t i = 0; i < star.size(); ++i) {
            double a = lift.weights[i];
            if (a == 0.0)
                continue;
            double scale = lift.kind == LiftKind::U ? std::pow(1.0 - w2, -a / 2.0) : std::exp(a * w2 / 2.0);
            pp[star[i]] = pp[star[i]] * scale;
            qq[star[i]] *= scale;
            factor *= lift.kind == LiftKind::U ? std::pow(1.0 - w2, -a) : std::exp(a * w2);
        }
        return evaluate<S>(base, std::span<const S>(pp), std::span<const Complex>(qq)) * factor;
    }
};

struct LiftBody {
    KernelEvaluator base;
    LiftStep lift;
    FactorOrder order = FactorOrder::Ascending;

    template <class S>
    S operator()(std::span<const S> p, std::span<const Complex> q) const
    {
        using std::exp;
        const auto& star = base.arity().star;
        std::size_t d = base.dimension(), k = lift.w_dim;
        S t = hdot(p, q, d, d + k);
        double eta2 = 0.0;
        for (std::size_t j = d; j < d + k; ++j)
            eta2 += std::norm(q[j]);
        double total = lift.weight_sum();
        bool is_u = lift.kind == LiftKind::U;
        if (is_u) {
            if (eta2 >= 1.0)
                throw SingularEvaluationError("lift_U: |eta| >= 1");
            if (!(std::real(value_of(1.0 - t)) > 0.0))
                throw BranchCutError("lift_U: Re(1 - <w,eta>) <= 0");
        }

        int id = max_jet_id(p) + 1;
        Jet s = Jet::variable(id, static_cast<int>(k));
        std::vector<Jet> args(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(d));
        std::vector<Complex> qargs(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(d));
        // h(z, w, eta) or l(z, w, eta), followed by the slice map f or g;
        // the factor e^{a s} seeds the Euler operator.
        for (std::size_t i = 0; i < star.size(); ++i) {
            double a = lift.weights[i];
            if (a == 0.0)
                continue;
            Jet scale = exp(s * a);
            if (is_u) {
                scale = scale * principal_power(1.0 - t, -a) * std::pow(1.0 - eta2, a / 2.0);
                qargs[star[i]] *= std::pow(1.0 - eta2, -a / 2.0);
            } else {
                scale = scale * exp((t - eta2 / 2.0) * a);
                qargs[star[i]] *= std::exp(a * eta2 / 2.0);
            }
            args[star[i]] = args[star[i]] * scale;
        }
        Jet g = base(std::span<const Jet>(args), std::span<const Complex>(qargs));
        g = g * (is_u ? std::pow(1.0 - eta2, -total) : std::exp(total * eta2));

        std::vector<double> constants;
        for (std::size_t j = 1; j <= k; ++j)
            constants.push_back(is_u ? static_cast<double>(j) + total : total);
        if (order == FactorOrder::Descending)
            std::reverse(constants.begin(), constants.end());
        Jet result = apply_factors(euler_moments(g, id, k), constants);

        double pik = std::pow(pi, static_cast<double>(k));
        if (is_u)
            result = result * principal_power(1.0 - t, -(static_cast<double>(k) + 1.0 + total)) *
                     (std::pow(1.0 - eta2, total) / pik);
        else
            result = result * exp((t - eta2) * total) / pik;
        return scalar_from_jet<S>(result);
    }
};

} // namespace detail

// Kernel of the fixed-w slice: factor * K_base(f(z), conj(f(zeta))).
inline KernelEvaluator slice_kernel(const KernelEvaluator& base, const LiftStep& lift, std::span<const Complex> w)
{
    detail::check_lift(base, lift.weights, lift.w_dim);
    if (w.size() != lift.w_dim)
        throw DimensionError("slice_kernel: w block has the wrong length");
    double w2 = 0.0;
    for (Complex c : w)
        w2 += std::norm(c);
    if (lift.kind == LiftKind::U && w2 >= 1.0)
        throw SingularEvaluationError("slice_kernel: |w| >= 1 under a U lift");
    return KernelEvaluator::from_body(base.arity(), detail::SliceBody{base, lift, {w.begin(), w.end()}});
}

inline KernelEvaluator lift(const KernelEvaluator& base, const LiftStep& step,
                            FactorOrder order = FactorOrder::Ascending)
{
    detail::check_lift(base, step.weights, step.w_dim);
    return KernelEvaluator::from_body(detail::lifted_arity(base.arity(), step.w_dim),
                                      detail::LiftBody{base, step, order});
}

inline KernelEvaluator lift_U(const KernelEvaluator& base, std::vector<double> alpha, std::size_t k = 1,
                              FactorOrder order = FactorOrder::Ascending)
{
    return lift(base, LiftStep{LiftKind::U, std::move(alpha), k}, order);
}

inline KernelEvaluator lift_V(const KernelEvaluator& base, std::vector<double> gamma, std::size_t k = 1,
                              FactorOrder order = FactorOrder::Ascending)
{
    return lift(base, LiftStep{LiftKind::V, std::move(gamma), k}, order);
}

// Base closed form folded through every lift of the spec.
inline KernelEvaluator compose_pipeline(const DomainSpec& spec)
{
    KernelEvaluator k = base_kernel(spec.base());
    for (const auto& step : spec.lifts())
        k = lift(k, step);
    return k;
}

} // namespace bergman
