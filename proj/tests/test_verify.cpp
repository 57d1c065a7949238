#include <gtest/gtest.h>

#include "bergman/bergman.hpp"

using namespace bergman;

namespace {

void expect_all_pass(const SuiteReport& r)
{
    EXPECT_TRUE(r.all_pass()) << r.to_csv();
    EXPECT_EQ(r.passed(), r.cases.size());
}

} // namespace

TEST(Suites, Symmetry) { expect_all_pass(run_suite("symmetry")); }

TEST(Suites, LiftEquivalence) { expect_all_pass(run_suite("lift-equivalence")); }

TEST(Suites, Series) { expect_all_pass(run_suite("series")); }

TEST(Suites, Dirichlet)
{
    auto r = run_suite("dirichlet");
    EXPECT_EQ(r.cases.size(), 44u);
    expect_all_pass(r);
}

TEST(Suites, Levi) { expect_all_pass(run_suite("levi")); }

TEST(Suites, Names)
{
    for (const auto& n : suite_names())
        EXPECT_FALSE(n.empty());
    EXPECT_THROW(run_suite("nonsense"), InvalidArgument);
}

TEST(Suites, TightToleranceFails)
{
    VerifyOptions o;
    o.tol = 1e-30;
    auto r = run_suite("lift-equivalence", o);
    EXPECT_FALSE(r.all_pass());
}

TEST(Suites, CsvAndDeterminism)
{
    VerifyOptions one, three;
    one.workers = 1;
    three.workers = 3;
    auto a = run_suite("series", one), b = run_suite("series", three);
    EXPECT_EQ(a.to_csv(), b.to_csv());
    EXPECT_EQ(a.to_csv().substr(0, a.to_csv().find('\n')), "suite,case,measured,tolerance,pass");
}

TEST(Fixtures, StandardSetIsConsistent)
{
    for (const auto& f : standard_fixtures()) {
        EXPECT_TRUE(static_cast<bool>(f.lifted)) << f.name;
        EXPECT_EQ(f.lifted.dimension(), f.spec.dimension()) << f.name;
        if (f.closed) {
            EXPECT_EQ(f.closed->domain(), f.spec) << f.name;
        }
        EXPECT_TRUE(star_shape_check(f.spec, 500, 1)) << f.name;
    }
}
