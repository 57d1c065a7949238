// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>

#include "bergman/bergman.hpp"

using namespace bergman;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) { char b[64]; std::snprintf(b, sizeof b, f, a); return b; }

double max_delta(const KernelEvaluator& a, const KernelEvaluator& b, const std::vector<CPoint>& pts)
{
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2)
        worst = std::max(worst, relative_error(a(pts[i], pts[i + 1]), b(pts[i], pts[i + 1])));
    return worst;
}

std::vector<CPoint> pairs(const DomainSpec& spec, std::size_t n, std::uint64_t seed)
{
    return sample_interior(spec, 2 * n, seed).points;
}

Outcome suite_outcome(const SuiteReport& r)
{
    double worst = 0.0;
    for (const auto& c : r.cases)
        if (c.tolerance > 0.0)
            worst = std::max(worst, c.measured / c.tolerance);
    return {r.all_pass(), std::to_string(r.passed()) + "/" + std::to_string(r.cases.size()) +
                              " cases, worst measured/tolerance " + fmt("%.3g", worst)};
}

Outcome lift_equivalence()
{
    double worst = 0.0;
    auto disk = kernel_disk().evaluator;
    worst = std::max(worst, max_delta(lift_U(disk, {0.5}), kernel_dangelo(1, 2.0).evaluator,
                                      pairs(kernel_dangelo(1, 2.0).domain(), 200, 1)));
    for (std::size_t n : {1, 2}) {
        auto K = kernel_ex42(n, 1);
        auto L = lift_U(base_kernel(BaseDomain::ball(n, 1)), std::vector<double>(n, 1.0));
        worst = std::max(worst, max_delta(L, K.evaluator, pairs(K.domain(), 200, 2 + n)));
    }
    for (auto gamma : {std::vector<double>{1.0}, std::vector<double>{0.5, 2.0}}) {
        auto K = kernel_ex43(gamma.size(), 1, gamma);
        auto L = lift_V(base_kernel(BaseDomain::ball(gamma.size(), 1)), gamma);
        worst = std::max(worst, max_delta(L, K.evaluator, pairs(K.domain(), 200, 5 + gamma.size())));
    }
    return {worst < 1e-10, "max relative error " + fmt("%.3g", worst)};
}

Outcome boundary_probes()
{
    double p3 = std::pow(pi, 3);
    struct Case {
        const char* name;
        ClosedFormKernel K;
        CPoint target;
        Stratum s;
        double expected;
    };
    std::vector<Case> cases{{"U S2", kernel_ex42(1, 1), {0.0, 1.0, 0.0}, Stratum::S2, 4.0 / p3},
                            {"U S4", kernel_ex42(1, 1), {0.0, 1.0, 1.0}, Stratum::S4, 4.0 / p3},
                            {"V weak", kernel_ex43(1, 1, {1.0}), {0.0, 1.0, 0.0}, Stratum::S2, 2.0 / p3}};
    bool ok = true;
    std::string detail;
    for (const auto& c : cases) {
        auto t0 = Clock::now();
        const DomainSpec& spec = c.K.domain();
        auto path = default_path(spec, c.target, c.s);
        auto rep = weighted_limit(c.K.evaluator, spec, path, Weight{matching_weight(c.s)});
        double rel = std::abs(rep.limit / c.expected - 1.0);
        double secs = seconds_since(t0);
        ok = ok && rep.converged && rel < 1e-2 && secs <= 30.0;
        detail += std::string(detail.empty() ? "" : "; ") + c.name + " rel " + fmt("%.2g", rel) + " in " +
                  fmt("%.2fs", secs);
    }
    return {ok, detail};
}

Outcome degenerate_reductions()
{
    double a = max_delta(kernel_dangelo(1, 1.0).evaluator, kernel_ball(2).evaluator,
                         pairs(DomainSpec(BaseDomain::ball(2)), 200, 11));
    a = std::max(a, max_delta(kernel_dangelo(2, 1.0).evaluator, kernel_ball(3).evaluator,
                              pairs(DomainSpec(BaseDomain::ball(3)), 200, 12)));
    double b = 0.0;
    for (std::size_t n : {1, 2, 3})
        b = std::max(b, max_delta(kernel_ex42(n, 0).evaluator, kernel_ball(n + 1).evaluator,
                                  pairs(DomainSpec(BaseDomain::ball(n + 1)), 200, 13 + n)));
    auto P = kernel_product(kernel_disk(), kernel_disk());
    auto pts = sample_region(P, 200, 17).points;
    for (auto& p : pts)
        for (auto& x : p)
            x *= 0.9;
    double c = max_delta(lift_U(kernel_disk().evaluator, {1e-6}), P.evaluator, pts);
    return {a < 1e-12 && b < 1e-12 && c < 1e-4,
            "p=1 " + fmt("%.2g", a) + ", m=0 " + fmt("%.2g", b) + ", alpha=1e-6 " + fmt("%.2g", c)};
}

double jet_fd_error()
{
    std::vector<ClosedFormKernel> ks{kernel_ball(2), kernel_dangelo(1, 2.0), kernel_ex42(1, 1),
                                     kernel_ex43(1, 1, {1.0}), kernel_ex71_stage3(2.5)};
    double worst = 0.0;
    const double h = 1e-5;
    for (const auto& K : ks) {
        auto pts = sample_interior(K.domain(), 20, 21).points;
        for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
            CPoint z = pts[i], q = pts[i + 1];
            for (auto& c : z)
                c *= 0.7;
            for (std::size_t j = 0; j < z.size(); ++j) {
                std::vector<Jet> zj(z.begin(), z.end());
                zj[j] = Jet::variable(0, 1, z[j]);
                int one[] = {1};
                Complex d = K.evaluator(zj, q).derivative(one);
                auto at = [&](Complex dz) {
                    CPoint w = z;
                    w[j] += dz;
                    return K(w, q);
                };
                Complex fd = (at(h) - at(-h)) / (2.0 * h);
                worst = std::max(worst, std::abs(d - fd) / std::max(std::abs(d), std::abs(K(z, q))));
            }
        }
    }
    return worst;
}

double factor_order_error()
{
    double worst = 0.0;
    auto base = kernel_ball(2).evaluator;
    for (auto kind : {LiftKind::U, LiftKind::V}) {
        for (std::size_t k : {1, 2, 3}) {
            LiftStep step{kind, {0.3, 1.7}, k};
            DomainSpec spec(BaseDomain::ball(2), {step});
            worst = std::max(worst, max_delta(lift(base, step, FactorOrder::Ascending),
                                              lift(base, step, FactorOrder::Descending), pairs(spec, 200, 30 + k)));
        }
    }
    return worst;
}

Outcome property_suites()
{
    auto sym = run_suite("symmetry");
    double jet = jet_fd_error();
    double order = factor_order_error();
    bool star = true;
    std::size_t nspec = 0;
    for (const auto& e : std::filesystem::directory_iterator(BERGMAN_SPECS)) {
        star = star && star_shape_check(load_domain(e.path().string()), 2000, 41);
        ++nspec;
    }
    for (const auto& f : standard_fixtures()) {
        star = star && star_shape_check(f.spec, 2000, 42);
        ++nspec;
    }
    double sym_worst = 0.0;
    for (const auto& c : sym.cases)
        sym_worst = std::max(sym_worst, c.measured);
    return {sym.all_pass() && jet < 1e-6 && order < 1e-13 && star,
            "symmetry " + fmt("%.2g", sym_worst) + " over " + std::to_string(sym.cases.size()) +
                " kernels, jet vs FD " + fmt("%.2g", jet) + ", factor order " + fmt("%.2g", order) +
                ", star shape " + (star ? "ok" : "FAILED") + " on " + std::to_string(nspec) + " specs"};
}

Outcome pipeline()
{
    auto k3 = kernel_ex71_stage3(2.5);
    double a = max_delta(compose_pipeline(k3.domain()), k3.evaluator, pairs(k3.domain(), 50, 51));
    auto spec = stage4_spec();
    auto K = compose_pipeline(spec);
    auto pts = pairs(spec, 10, 52);
    for (auto& p : pts)
        for (auto& x : p)
            x *= 0.6;
    SeriesOracle oracle(spec, series_cap(spec.dimension()));
    double b = 0.0, tail = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
        auto s = oracle(pts[i], pts[i + 1]);
        b = std::max(b, relative_error(K(pts[i], pts[i + 1]), s.value));
        tail = std::max(tail, s.tail_bound);
    }
    return {a < 1e-10 && b < 1e-3,
            "stage 3 " + fmt("%.2g", a) + ", stage 4 vs series " + fmt("%.2g", b) + " (tail " + fmt("%.2g", tail) + ")"};
}

} // namespace

int main()
{
    struct Criterion {
        int id;
        const char* name;
        double budget;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> all{
        {1, "lift vs closed form", 5.0, lift_equivalence},
        {2, "series oracle agreement", 60.0, [] { return suite_outcome(run_suite("series")); }},
        {3, "reproducing property", 600.0, [] { return suite_outcome(run_suite("reproducing")); }},
        {4, "Dirichlet identity (44-case grid)", 5.0, [] { return suite_outcome(run_suite("dirichlet")); }},
        {5, "boundary limits", 90.0, boundary_probes},
        {6, "degenerate reductions", 60.0, degenerate_reductions},
        {7, "property suites", 120.0, property_suites},
        {8, "lifted pipeline", 60.0, pipeline},
    };
    int failed = 0;
    for (const auto& c : all) {
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = seconds_since(t0);
        bool pass = o.pass && secs <= c.budget;
        failed += !pass;
        std::printf("%s criterion %d %s: %s; %.2f s (budget %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs, c.budget);
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
