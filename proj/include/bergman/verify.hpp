#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "boundary.hpp"
#include "csv.hpp"
#include "domains.hpp"
#include "kernels.hpp"
#include "lifting.hpp"
#include "oracle.hpp"
#include "parallel.hpp"

namespace bergman {

struct Fixture {
    std::string name;
    DomainSpec spec;
    std::optional<ClosedFormKernel> closed;
    KernelEvaluator lifted;
};

inline Fixture make_fixture(std::string name, const DomainSpec& spec)
{
    std::optional<ClosedFormKernel> closed;
    try {
        closed = closed_form_for(spec);
    } catch (const NoClosedFormError&) {
    }
    return {std::move(name), spec, std::move(closed), compose_pipeline(spec)};
}

inline DomainSpec stage4_spec(double p = 2.5, double p2 = 0.7)
{
    return DomainSpec(BaseDomain::disk(), {LiftStep{LiftKind::U, {1.0 / p}, 1}, LiftStep{LiftKind::V, {0.0, 1.0}, 1},
                                           LiftStep{LiftKind::U, {0.0, 0.0, p2}, 1}});
}

// The model domains used by the suites and the acceptance run.
inline std::vector<Fixture> standard_fixtures()
{
    std::vector<Fixture> out;
    out.push_back(make_fixture("disk", DomainSpec(BaseDomain::disk())));
    out.push_back(make_fixture("ball2", DomainSpec(BaseDomain::ball(2))));
    out.push_back(make_fixture("dangelo_p2", kernel_dangelo(1, 2.0).domain()));
    out.push_back(make_fixture("ex42_n1m1", kernel_ex42(1, 1).domain()));
    out.push_back(make_fixture("ex43_n1m1", kernel_ex43(1, 1, {1.0}).domain()));
    out.push_back(make_fixture("ex71_stage3", kernel_ex71_stage3(2.5).domain()));
    return out;
}

struct CaseResult {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct SuiteReport {
    std::string suite;
    std::vector<CaseResult> cases;

    bool all_pass() const
    {
        for (const auto& c : cases)
            if (!c.pass)
                return false;
        return !cases.empty();
    }
    std::size_t passed() const
    {
        std::size_t n = 0;
        for (const auto& c : cases)
            n += c.pass;
        return n;
    }
    std::string to_csv() const
    {
        std::string out = "suite,case,measured,tolerance,pass\n";
        for (const auto& c : cases)
            out += suite + "," + c.name + "," + format_double(c.measured) + "," + format_double(c.tolerance) + "," +
                   (c.pass ? "1" : "0") + "\n";
        return out;
    }
};

struct VerifyOptions {
    std::uint64_t seed = 0;
    unsigned workers = 0;
    double tol = 0.0; // 0: suite default
};

namespace detail {

inline double tol_or(const VerifyOptions& o, double def) { return o.tol > 0.0 ? o.tol : def; }

inline CaseResult make_case(std::string name, double measured, double tol)
{
    return {std::move(name), measured, tol, std::isfinite(measured) && measured < tol};
}

inline double max_relative_delta(const KernelEvaluator& a, const KernelEvaluator& b, const std::vector<CPoint>& pts)
{
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2)
        worst = std::max(worst, relative_error(a(pts[i], pts[i + 1]), b(pts[i], pts[i + 1])));
    return worst;
}

// |K(p,q) - conj K(q,p)| / |K(p,q)| over consecutive pairs
inline double max_asymmetry(const KernelEvaluator& K, const std::vector<CPoint>& pts)
{
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
        Complex a = K(pts[i], pts[i + 1]);
        Complex b = std::conj(K(pts[i + 1], pts[i]));
        worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), 1e-300));
    }
    return worst;
}

} // namespace detail

// 2 * pairs interior points of spec drawn with the given seed.
inline std::vector<CPoint> pair_points(const DomainSpec& spec, std::size_t pairs, std::uint64_t seed)
{
    return sample_interior(spec, 2 * pairs, seed).points;
}

// The series panel: 20 pairs pulled toward the origin by 0.6.
inline std::vector<CPoint> series_panel(const DomainSpec& spec, std::uint64_t seed)
{
    auto pts = pair_points(spec, 20, seed);
    for (auto& p : pts)
        for (auto& c : p)
            c *= 0.6;
    return pts;
}

inline SuiteReport verify_symmetry(const VerifyOptions& opt = {})
{
    SuiteReport rep{"symmetry", {}};
    double tol = detail::tol_or(opt, 1e-13);
    auto fx = standard_fixtures();
    std::vector<std::pair<std::string, std::pair<const KernelEvaluator*, const DomainSpec*>>> kernels;
    for (const auto& f : fx) {
        if (f.closed)
            kernels.push_back({f.name + "/closed", {&f.closed->evaluator, &f.spec}});
        kernels.push_back({f.name + "/lifted", {&f.lifted, &f.spec}});
    }
    rep.cases.resize(kernels.size());
    parallel_for(kernels.size(), opt.workers, [&](std::size_t i) {
        auto pts = pair_points(*kernels[i].second.second, 1000, opt.seed + i);
        rep.cases[i] = detail::make_case(kernels[i].first, detail::max_asymmetry(*kernels[i].second.first, pts), tol);
    });
    return rep;
}

inline SuiteReport verify_lift_equivalence(const VerifyOptions& opt = {})
{
    SuiteReport rep{"lift-equivalence", {}};
    double tol = detail::tol_or(opt, 1e-10);
    struct Family {
        std::string name;
        ClosedFormKernel closed;
        KernelEvaluator lifted;
    };
    std::vector<Family> fam;
    fam.push_back({"dangelo_p2", kernel_dangelo(1, 2.0), lift_U(kernel_disk().evaluator, {0.5})});
    fam.push_back({"ex42_n1m1", kernel_ex42(1, 1), compose_pipeline(kernel_ex42(1, 1).domain())});
    fam.push_back({"ex43_n1m1", kernel_ex43(1, 1, {1.0}), compose_pipeline(kernel_ex43(1, 1, {1.0}).domain())});
    rep.cases.resize(fam.size());
    parallel_for(fam.size(), opt.workers, [&](std::size_t i) {
        auto pts = pair_points(fam[i].closed.domain(), 200, opt.seed + i);
        rep.cases[i] = detail::make_case(fam[i].name, detail::max_relative_delta(fam[i].closed.evaluator, fam[i].lifted, pts), tol);
    });
    return rep;
}

// Relative error and tail bound of the series oracle against a kernel.
struct SeriesComparison {
    double max_relative = 0.0;
    double max_tail = 0.0;
};

inline unsigned series_cap(std::size_t dim) { return dim <= 1 ? 120 : dim == 2 ? 70 : 45; }

inline SeriesComparison compare_series(const KernelEvaluator& K, const DomainSpec& spec, const std::vector<CPoint>& pts)
{
    SeriesOracle oracle(spec, series_cap(spec.dimension()));
    SeriesComparison c;
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
        auto s = oracle(pts[i], pts[i + 1]);
        Complex k = K(pts[i], pts[i + 1]);
        c.max_relative = std::max(c.max_relative, std::abs(s.value - k) / std::abs(k));
        c.max_tail = std::max(c.max_tail, s.tail_bound);
    }
    return c;
}

inline SuiteReport verify_series(const VerifyOptions& opt = {})
{
    SuiteReport rep{"series", {}};
    double tol = detail::tol_or(opt, 1e-3);
    auto fx = standard_fixtures();
    std::vector<SeriesComparison> res(fx.size());
    parallel_for(fx.size(), opt.workers, [&](std::size_t i) {
        const auto& K = fx[i].closed ? fx[i].closed->evaluator : fx[i].lifted;
        res[i] = compare_series(K, fx[i].spec, series_panel(fx[i].spec, opt.seed + i));
    });
    for (std::size_t i = 0; i < fx.size(); ++i) {
        rep.cases.push_back(detail::make_case(fx[i].name + "/relative", res[i].max_relative, tol));
        rep.cases.push_back(detail::make_case(fx[i].name + "/tail", res[i].max_tail, 1e-4));
    }
    return rep;
}

// (s, k, c) with s in {0.5, 1, 1.7, 3}, k in 1..3, |c| <= 2, c non-increasing.
inline std::vector<std::tuple<double, std::size_t, MultiIndex>> dirichlet_grid()
{
    std::vector<std::tuple<double, std::size_t, MultiIndex>> out;
    for (double s : {0.5, 1.0, 1.7, 3.0})
        for (std::size_t k = 1; k <= 3; ++k)
            for (unsigned D = 0; D <= 2; ++D)
                for (const auto& c : shell_indices(k, D))
                    if (std::is_sorted(c.entries.rbegin(), c.entries.rend()))
                        out.emplace_back(s, k, c);
    return out;
}

inline SuiteReport verify_dirichlet(const VerifyOptions& opt = {})
{
    SuiteReport rep{"dirichlet", {}};
    double tol = detail::tol_or(opt, 1e-8);
    auto grid = dirichlet_grid();
    rep.cases.resize(grid.size());
    parallel_for(grid.size(), opt.workers, [&](std::size_t i) {
        auto [s, k, c] = grid[i];
        auto r = dirichlet_identity_check(s, c, k);
        rep.cases[i] = detail::make_case("s=" + format_double(s) + ";c=" + c.to_string(),
                                         relative_error(r.quadrature, r.pochhammer), tol);
    });
    return rep;
}

// Three interior points of a fixture for the reproducing check.
inline std::vector<CPoint> reproducing_points(const DomainSpec& spec, std::uint64_t seed)
{
    auto pts = sample_interior(spec, 3, seed).points;
    for (auto& p : pts)
        for (auto& c : p)
            c *= 0.7;
    return pts;
}

inline SuiteReport verify_reproducing(const VerifyOptions& opt = {})
{
    SuiteReport rep{"reproducing", {}};
    double tol = detail::tol_or(opt, 1e-3);
    std::vector<ClosedFormKernel> ks{kernel_ex42(1, 1), kernel_ex43(1, 1, {1.0})};
    std::vector<MultiIndex> idx;
    for (unsigned D = 0; D <= 2; ++D)
        for (auto& m : shell_indices(3, D))
            idx.push_back(m);
    struct Job {
        std::size_t kernel;
        CPoint p;
        std::string name;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        auto pts = reproducing_points(ks[i].domain(), opt.seed + i);
        for (std::size_t j = 0; j < pts.size(); ++j)
            jobs.push_back({i, pts[j], ks[i].name + "/p" + std::to_string(j)});
    }
    std::vector<std::vector<ReproducingResult>> res(jobs.size());
    parallel_for(jobs.size(), opt.workers, [&](std::size_t j) {
        ReproducingOptions ro;
        ro.seed = opt.seed;
        res[j] = reproducing_check(ks[jobs[j].kernel].evaluator, ks[jobs[j].kernel].domain(), idx, jobs[j].p, ro);
    });
    for (std::size_t j = 0; j < jobs.size(); ++j)
        for (const auto& r : res[j])
            rep.cases.push_back(detail::make_case(jobs[j].name + "/" + r.idx.to_string(), r.residual, tol));
    return rep;
}

inline SuiteReport verify_levi(const VerifyOptions& opt = {})
{
    SuiteReport rep{"levi", {}};
    DomainSpec ball2(BaseDomain::ball(2));
    CPoint b{Complex(0.6, 0.0), Complex(0.0, 0.8)};
    double v = levi_min_eigenvalue(ball2, b);
    rep.cases.push_back(detail::make_case("ball2", std::abs(v - 1.0), detail::tol_or(opt, 1e-4)));
    auto e42 = kernel_ex42(1, 1).domain();
    CPoint s1 = project_to_boundary(e42, CPoint{0.5, Complex(0.3, 0.1), 0.2});
    double v42 = levi_min_eigenvalue(e42, s1);
    rep.cases.push_back({"ex42_n1m1/S1", v42, 0.0, v42 > 0.0});
    auto e43 = kernel_ex43(1, 1, {1.0}).domain();
    double v43 = levi_min_eigenvalue(e43, CPoint{0.0, 1.0, 0.3});
    rep.cases.push_back(detail::make_case("ex43_n1m1/weak", std::abs(v43), 1e-6));
    return rep;
}

inline const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"symmetry", "reproducing", "series",
                                                "dirichlet", "lift-equivalence", "levi"};
    return names;
}

inline SuiteReport run_suite(const std::string& name, const VerifyOptions& opt = {})
{
    if (name == "symmetry") return verify_symmetry(opt);
    if (name == "reproducing") return verify_reproducing(opt);
    if (name == "series") return verify_series(opt);
    if (name == "dirichlet") return verify_dirichlet(opt);
    if (name == "lift-equivalence") return verify_lift_equivalence(opt);
    if (name == "levi") return verify_levi(opt);
    throw InvalidArgument("unknown suite '" + name + "'");
}

} // namespace bergman
