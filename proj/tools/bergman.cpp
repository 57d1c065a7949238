#include <algorithm>
#include <cstdio>
#include <limits>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bergman/bergman.hpp"

using namespace bergman;

namespace {

enum Exit { Ok = 0, Failed = 1, InputError = 2 };

struct Output {
    std::ofstream file;
    std::ostream* os = &std::cout;

    explicit Output(const std::string& path)
    {
        if (path.empty())
            return;
        file.open(path);
        if (!file)
            throw ParseError("cannot write " + path);
        os = &file;
    }
    std::ostream& operator*() { return *os; }
};

CPoint parse_point(const std::string& text)
{
    CPoint p;
    for (const auto& tok : split(text, ','))
        p.push_back(parse_complex(tok));
    return p;
}

// One point (diagonal) or two points (p then q) per line.
std::vector<std::pair<CPoint, CPoint>> read_points(const std::string& path, std::size_t dim)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open points file " + path);
    std::vector<std::pair<CPoint, CPoint>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        CPoint v = parse_point(line);
        if (v.size() == dim)
            out.emplace_back(v, v);
        else if (v.size() == 2 * dim)
            out.emplace_back(CPoint(v.begin(), v.begin() + dim), CPoint(v.begin() + dim, v.end()));
        else
            throw ParseError("points file: expected " + std::to_string(dim) + " or " + std::to_string(2 * dim) +
                             " coordinates, got " + std::to_string(v.size()));
    }
    return out;
}

struct EvalArgs {
    std::string spec, points, point, out, mode = "all";
    std::uint64_t seed = 0;
    std::size_t count = 5;
    double tol = 1e-9;
    unsigned workers = 0;
};

int cmd_eval(const EvalArgs& a)
{
    DomainSpec spec = load_domain(a.spec);
    std::size_t d = spec.dimension();
    std::vector<std::pair<CPoint, CPoint>> pts;
    if (!a.points.empty()) {
        pts = read_points(a.points, d);
    } else if (!a.point.empty()) {
        CPoint p = parse_point(a.point);
        if (p.size() != d)
            throw DimensionError("--point has " + std::to_string(p.size()) + " coordinates, spec has " + std::to_string(d));
        pts.emplace_back(p, p);
    } else {
        // pulled toward the origin so the series column converges
        auto s = sample_interior(spec, a.count, a.seed);
        for (auto& p : s.points) {
            for (auto& c : p)
                c *= 0.6;
            pts.emplace_back(p, p);
        }
    }
    bool want_closed = a.mode == "closed" || a.mode == "all";
    bool want_lifted = a.mode == "lifted" || a.mode == "all";
    bool want_series = a.mode == "series" || a.mode == "all";
    if (!want_closed && !want_lifted && !want_series)
        throw InvalidArgument("--mode must be closed, lifted, series or all");
    std::optional<KernelEvaluator> closed;
    if (want_closed) {
        try {
            closed = closed_form_for(spec).evaluator;
        } catch (const NoClosedFormError&) {
            if (a.mode == "closed")
                throw;
        }
    }
    std::optional<KernelEvaluator> lifted;
    if (want_lifted)
        lifted = compose_pipeline(spec);
    std::optional<SeriesOracle> series;
    if (want_series)
        series.emplace(spec, series_cap(d));

    Output out(a.out);
    std::string header = "index";
    if (want_closed) header += ",closed";
    if (want_lifted) header += ",lifted";
    if (want_series) header += ",series,series_tail";
    if (a.mode == "all") header += ",delta_closed_lifted,delta_closed_series,delta_lifted_series";
    header += ",status";
    *out << header << "\n";
    std::vector<std::string> rows(pts.size());
    std::vector<char> failed(pts.size(), 0);
    parallel_for(pts.size(), a.workers, [&](std::size_t i) {
        const auto& [p, q] = pts[i];
        std::string row = std::to_string(i);
        std::string status = "ok";
        if (!spec.contains(p) || !spec.contains(q)) {
            failed[i] = 1;
            std::size_t cols = want_closed + want_lifted + 2 * want_series + (a.mode == "all" ? 3 : 0);
            for (std::size_t c = 0; c < cols; ++c)
                row += ",";
            rows[i] = row + ",error:exterior";
            return;
        }
        std::optional<Complex> kc, kl, ks;
        if (closed) kc = (*closed)(p, q);
        if (lifted) kl = (*lifted)(p, q);
        if (want_closed) row += "," + (kc ? format_complex(*kc) : std::string("n/a"));
        if (want_lifted) row += "," + format_complex(*kl);
        if (want_series) {
            try {
                SeriesOptions so;
                so.stop_rel = a.tol;
                auto s = (*series)(p, q, so);
                ks = s.value;
                row += "," + format_complex(s.value) + "," + format_double(s.tail_bound);
            } catch (const ConvergenceError&) {
                row += ",,";
                status = "error:series-no-convergence";
                failed[i] = 1;
            }
        }
        if (a.mode == "all") {
            auto delta = [](const std::optional<Complex>& x, const std::optional<Complex>& y) {
                return x && y ? format_double(relative_error(*x, *y)) : std::string("n/a");
            };
            row += "," + delta(kc, kl) + "," + delta(kc, ks) + "," + delta(kl, ks);
        }
        rows[i] = row + "," + status;
    });
    bool any_error = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        *out << rows[i] << "\n";
        any_error = any_error || failed[i];
    }
    return any_error ? InputError : Ok;
}

struct VerifyArgs {
    std::string suite, out;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    double tol = 0.0;
};

int cmd_verify(const VerifyArgs& a)
{
    std::vector<std::string> suites;
    if (a.suite == "all")
        suites = suite_names();
    else
        suites.push_back(a.suite);
    VerifyOptions opt{a.seed, a.workers, a.tol};
    Output out(a.out);
    bool ok = true;
    *out << "suite,case,measured,tolerance,pass\n";
    for (const auto& s : suites) {
        auto rep = run_suite(s, opt);
        std::string csv = rep.to_csv();
        *out << csv.substr(csv.find('\n') + 1);
        std::cerr << s << ": " << rep.passed() << "/" << rep.cases.size() << " pass\n";
        ok = ok && rep.all_pass();
    }
    return ok ? Ok : Failed;
}

struct BoundaryArgs {
    std::string spec, target, stratum, weight, out;
    double defining_exponent = std::numeric_limits<double>::quiet_NaN();
    double w_exponent = std::numeric_limits<double>::quiet_NaN();
    int levels = 22;
};

int cmd_boundary(const BoundaryArgs& a)
{
    DomainSpec spec = load_domain(a.spec);
    CPoint target = parse_point(a.target);
    if (target.size() != spec.dimension())
        throw DimensionError("--target has the wrong number of coordinates");
    Stratum actual = stratify_point(spec, target);
    Stratum st = a.stratum.empty() ? actual : parse_stratum(a.stratum);
    if (st != actual)
        throw BoundaryError(std::string("target lies on ") + to_string(actual) + ", not " + to_string(st));
    Weight w{parse_weight_kind(a.weight), a.defining_exponent, a.w_exponent};
    if (w.kind != matching_weight(st))
        throw InvalidArgument(std::string("weight '") + to_string(w.kind) + "' does not match " + to_string(st) +
                              "; pairing: S1,S2 -> defining, S3 -> w, S4 -> product (V lifts: defining)");
    PathParams pp;
    pp.levels = a.levels;
    auto path = default_path(spec, target, st, pp);
    KernelEvaluator K = [&] {
        try {
            return closed_form_for(spec).evaluator;
        } catch (const NoClosedFormError&) {
            return compose_pipeline(spec);
        }
    }();
    auto rep = weighted_limit(K, spec, path, w);
    auto pred = predicted_limit(spec, target, st, w);
    Output out(a.out);
    *out << rep.to_csv();
    *out << "# stratum=" << to_string(st) << " weight=" << to_string(w.kind) << " limit=" << format_double(rep.limit)
         << " spread=" << format_double(rep.spread) << " method=" << (rep.richardson ? "richardson" : "last-value")
         << " converged=" << rep.converged << " diverged=" << rep.diverged;
    if (pred)
        *out << " predicted=" << format_double(*pred)
             << " relative_delta=" << format_double(std::abs(rep.limit - *pred) / std::abs(*pred));
    *out << "\n";
    return rep.converged ? Ok : Failed;
}

struct SampleArgs {
    std::string spec, out;
    std::uint64_t seed = 0;
    std::size_t count = 10;
    unsigned workers = 0;
};

int cmd_sample(const SampleArgs& a)
{
    DomainSpec spec = load_domain(a.spec);
    SamplingOptions opt;
    opt.workers = a.workers;
    auto s = sample_interior(spec, a.count, a.seed, opt);
    Output out(a.out);
    *out << "index";
    for (std::size_t j = 0; j < spec.dimension(); ++j)
        *out << ",z" << j + 1;
    *out << "\n";
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        *out << i;
        for (Complex c : s.points[i])
            *out << "," << format_complex(c);
        *out << "\n";
    }
    std::cerr << "draws=" << s.draws << " acceptance=" << format_double(s.acceptance_ratio)
              << " volume=" << format_double(s.volume_estimate()) << "\n";
    return Ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bergman kernels on Hartogs domains"};
    app.require_subcommand(1);

    EvalArgs ea;
    auto* eval = app.add_subcommand("eval", "evaluate a kernel at points");
    eval->add_option("--spec", ea.spec, "domain spec (JSON)")->required()->check(CLI::ExistingFile);
    eval->add_option("--points", ea.points, "file with one point (or p and q) per line");
    eval->add_option("--point", ea.point, "single point, comma-separated complex coordinates");
    eval->add_option("--mode", ea.mode, "closed, lifted, series or all")->capture_default_str();
    eval->add_option("--count", ea.count, "random interior points (scaled by 0.6) when no points are given")->capture_default_str();
    eval->add_option("--seed", ea.seed)->capture_default_str();
    eval->add_option("--tol", ea.tol, "series stopping tolerance")->capture_default_str();
    eval->add_option("--out", ea.out);
    eval->add_option("--workers", ea.workers);

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("suite", va.suite, "symmetry, reproducing, series, dirichlet, lift-equivalence, levi or all")
        ->required();
    verify->add_option("--seed", va.seed)->capture_default_str();
    verify->add_option("--tol", va.tol, "override the suite tolerance");
    verify->add_option("--workers", va.workers);
    verify->add_option("--out", va.out);

    BoundaryArgs ba;
    auto* boundary = app.add_subcommand("boundary", "weighted diagonal limit at a boundary point");
    boundary->add_option("--spec", ba.spec)->required()->check(CLI::ExistingFile);
    boundary->add_option("--target", ba.target, "boundary point, comma-separated")->required();
    boundary->add_option("--stratum", ba.stratum, "S1..S4 (default: classified)");
    boundary->add_option("--weight", ba.weight, "defining, w or product")->required();
    boundary->add_option("--defining-exponent", ba.defining_exponent);
    boundary->add_option("--w-exponent", ba.w_exponent);
    boundary->add_option("--levels", ba.levels)->capture_default_str();
    boundary->add_option("--out", ba.out);

    SampleArgs sa;
    auto* sample = app.add_subcommand("sample", "rejection-sample interior points");
    sample->add_option("--spec", sa.spec)->required()->check(CLI::ExistingFile);
    sample->add_option("--count", sa.count)->capture_default_str();
    sample->add_option("--seed", sa.seed)->capture_default_str();
    sample->add_option("--workers", sa.workers);
    sample->add_option("--out", sa.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return InputError;
    }

    if (verify->parsed() && va.suite != "all") {
        const auto& names = suite_names();
        if (std::find(names.begin(), names.end(), va.suite) == names.end()) {
            std::cerr << "unknown suite '" << va.suite << "'\n";
            return InputError;
        }
    }
    try {
        if (eval->parsed())
            return cmd_eval(ea);
        if (verify->parsed())
            return cmd_verify(va);
        if (boundary->parsed())
            return cmd_boundary(ba);
        if (sample->parsed())
            return cmd_sample(sa);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return InputError;
    }
    return InputError;
}
