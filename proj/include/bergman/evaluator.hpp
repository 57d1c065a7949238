#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "jet.hpp"

namespace bergman {

struct Arity {
    std::size_t dimension = 0;
    // coordinates later lifts may scale (base star set plus every w-block)
    std::vector<std::size_t> star;
};

// K(p, q) evaluates the kernel K(p; conj(q)). The first argument may carry
// jets (holomorphic dependence); the second is a plain point and is
// conjugated internally.
class KernelEvaluator {
public:
    using ScalarFn = std::function<Complex(std::span<const Complex>, std::span<const Complex>)>;
    using JetFn = std::function<Jet(std::span<const Jet>, std::span<const Complex>)>;

    KernelEvaluator() = default;
    KernelEvaluator(Arity arity, ScalarFn scalar, JetFn jet)
        : arity_(std::make_shared<const Arity>(std::move(arity))), scalar_(std::move(scalar)), jet_(std::move(jet))
    {
    }

    // body must provide template <class S> S operator()(span<const S>, span<const Complex>) const
    template <class Body>
    static KernelEvaluator from_body(Arity arity, Body body)
    {
        auto shared = std::make_shared<const Body>(std::move(body));
        return KernelEvaluator(
            std::move(arity),
            [shared](std::span<const Complex> p, std::span<const Complex> q) {
                return (*shared).template operator()<Complex>(p, q);
            },
            [shared](std::span<const Jet> p, std::span<const Complex> q) {
                return (*shared).template operator()<Jet>(p, q);
            });
    }

    const Arity& arity() const { return *arity_; }

    KernelEvaluator with_arity(Arity arity) const
    {
        if (arity.dimension != dimension())
            throw DimensionError("with_arity: dimension change");
        KernelEvaluator k = *this;
        k.arity_ = std::make_shared<const Arity>(std::move(arity));
        return k;
    }
    std::size_t dimension() const { return arity_->dimension; }
    explicit operator bool() const { return static_cast<bool>(scalar_); }

    Complex operator()(std::span<const Complex> p, std::span<const Complex> q) const
    {
        check(p.size(), q.size());
        return require_finite(scalar_(p, q), "kernel evaluation");
    }

    Jet operator()(std::span<const Jet> p, std::span<const Complex> q) const
    {
        check(p.size(), q.size());
        return jet_(p, q);
    }

    Complex operator()(const std::vector<Complex>& p, const std::vector<Complex>& q) const
    {
        return (*this)(std::span<const Complex>(p), std::span<const Complex>(q));
    }

    Jet operator()(const std::vector<Jet>& p, const std::vector<Complex>& q) const
    {
        return (*this)(std::span<const Jet>(p), std::span<const Complex>(q));
    }

private:
    std::shared_ptr<const Arity> arity_ = std::make_shared<const Arity>();
    ScalarFn scalar_;
    JetFn jet_;

    void check(std::size_t np, std::size_t nq) const
    {
        if (np != arity_->dimension || nq != arity_->dimension)
            throw DimensionError("kernel expects " + std::to_string(arity_->dimension) + " coordinates, got " +
                                 std::to_string(np) + " and " + std::to_string(nq));
    }
};

// Generic evaluation on Complex or Jet first arguments.
template <class S>
S evaluate(const KernelEvaluator& k, std::span<const S> p, std::span<const Complex> q)
{
    return k(p, q);
}

inline int max_jet_id(std::span<const Jet> p)
{
    int id = -1;
    for (const auto& j : p)
        id = std::max(id, j.max_id());
    return id;
}

inline int max_jet_id(std::span<const Complex>) { return -1; }

inline std::vector<Jet> to_jets(std::span<const Complex> p)
{
    return std::vector<Jet>(p.begin(), p.end());
}

} // namespace bergman
