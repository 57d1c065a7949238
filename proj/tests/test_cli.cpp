#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args)
{
    std::string cmd = std::string(BERGMAN_CLI) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe)
        return {-1, ""};
    std::string out;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        out.append(buf.data(), n);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string spec(const std::string& name) { return std::string(BERGMAN_SPECS) + "/" + name + ".json"; }

} // namespace

TEST(Cli, EvalDiskOrigin)
{
    auto r = run("eval --spec " + spec("disk") + " --point 0");
    ASSERT_EQ(r.code, 0);
    // closed, lifted and series columns all carry 1/pi
    std::size_t hits = 0, pos = 0;
    while ((pos = r.out.find("0.3183098861837", pos)) != std::string::npos) {
        ++hits;
        ++pos;
    }
    EXPECT_EQ(hits, 3u) << r.out;
    EXPECT_NE(r.out.find(",ok"), std::string::npos);
}

TEST(Cli, EvalExteriorPoint)
{
    auto r = run("eval --spec " + spec("disk") + " --point 2");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("error:exterior"), std::string::npos);
}

TEST(Cli, EvalRandomPointsDeterministic)
{
    std::string args = "eval --spec " + spec("ex71_stage3") + " --count 6 --seed 4";
    auto a = run(args + " --workers 1"), b = run(args + " --workers 3");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out.substr(0, a.out.find('\n')),
              "index,closed,lifted,series,series_tail,delta_closed_lifted,delta_closed_series,delta_lifted_series,status");
}

TEST(Cli, VerifySuites)
{
    EXPECT_EQ(run("verify dirichlet").code, 0);
    EXPECT_EQ(run("verify levi").code, 0);
    EXPECT_EQ(run("verify nonsense").code, 2);
    EXPECT_EQ(run("verify lift-equivalence --tol 1e-30").code, 1);
}

TEST(Cli, Boundary)
{
    auto r = run("boundary --spec " + spec("ex42_n1m1") + " --target 0,1,0 --weight defining");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "t,weighted_value,running_extrapolation");
    EXPECT_NE(r.out.find("0.12900"), std::string::npos);
    EXPECT_EQ(run("boundary --spec " + spec("ex42_n1m1") + " --target 0,1,0").code, 2);
    EXPECT_EQ(run("boundary --spec " + spec("ex42_n1m1") + " --target 0,1,0 --weight w").code, 2);
    EXPECT_EQ(run("boundary --spec " + spec("ex42_n1m1") + " --target 0,0,0 --weight defining").code, 2);
}

TEST(Cli, Sample)
{
    auto a = run("sample --spec " + spec("ex43_n1m1") + " --count 50 --seed 2");
    auto b = run("sample --spec " + spec("ex43_n1m1") + " --count 50 --seed 2 --workers 2");
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(run("sample --spec " + spec("disk") + " --count 0").code, 2);
}

TEST(Cli, InputErrors)
{
    EXPECT_EQ(run("eval --spec /nonexistent.json --point 0").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("eval --spec " + spec("disk") + " --point 0,0").code, 2);
}
