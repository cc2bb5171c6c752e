#include <szego/verify.hpp>

#include <gtest/gtest.h>

#include <set>

using namespace szego;

TEST(FitLine, ExactAndLogLog) {
    const LineFit f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
    EXPECT_NEAR(f.slope, 2.0, 1e-14);
    EXPECT_NEAR(f.intercept, 1.0, 1e-14);
    EXPECT_NEAR(f.r2, 1.0, 1e-14);
    EXPECT_NEAR(fit_loglog({0.1, 0.2, 0.4}, {3e-4, 2.4e-3, 1.92e-2}).slope, 3.0, 1e-12);
    EXPECT_THROW(fit_line({1}, {1}), RangeError);
}

// Frozen by adaptive quadrature of the lens area in multiprecision.
TEST(LensOracle, FrozenValues) {
    // the closed form cancels for small r; 1e-10 relative holds down to r = 0.1
    EXPECT_NEAR(ball_lens_measure(0.2), 0.000793209117435380, 1e-10 * 0.000793209117435380);
    EXPECT_NEAR(ball_lens_measure(0.1), 4.98938964393450524e-05, 1e-10 * 4.98938964393450524e-05);
    EXPECT_NEAR(ball_lens_measure(0.5), 0.0295895324921523717, 1e-10 * 0.0295895324921523717);
    EXPECT_NEAR(ball_lens_measure(1.0), 0.391002218955770642, 1e-10 * 0.391002218955770642);
    EXPECT_EQ(ball_lens_measure(2.0), 1.0);
}

TEST(LensOracle, SmallRadiusPower) {
    // lambda(B_r) ~ r^4 / 2 near zero
    EXPECT_NEAR(ball_lens_measure(0.05) / std::pow(0.05, 4), 0.5, 1e-3);
}

TEST(Registry, NamesAreUniqueAndResolvable) {
    std::set<std::string> names;
    for (const auto& e : registry()) names.insert(e.name);
    EXPECT_EQ(names.size(), registry().size());
    EXPECT_GE(names.size(), 18u);
    for (const char* n : {"quasi_sym", "leray_mass", "reproducing", "inversion_621", "commutator_trend", "holder_rate"})
        EXPECT_TRUE(names.count(n)) << n;
    EXPECT_THROW(run_check("no_such_check", VerifyConfig{}), ConfigError);
}

TEST(Config, RefinementLadder) {
    VerifyConfig c;
    c.resolution = 12;
    EXPECT_EQ(c.refinements(), (std::vector<int>{8, 12}));
    c.resolution = 20;
    EXPECT_EQ(c.refinements(), (std::vector<int>{12, 16, 20}));
    c.ladder = {9};
    EXPECT_EQ(c.refinements(), (std::vector<int>{9}));
}

TEST(Checks, LerayMassOnBall) {
    VerifyConfig c;
    c.ladder = {8, 12};
    const VerificationReport r = run_check("leray_mass", c);
    EXPECT_TRUE(r.passed);
    EXPECT_EQ(r.mesh_trend.size(), 2u);
}

TEST(Checks, DeterministicReports) {
    VerifyConfig c;
    c.domain = make_perturbed_ball(2);
    c.samples = 2000;
    const auto a = run_check("quasi_tri", c).to_json().dump();
    const auto b = run_check("quasi_tri", c).to_json().dump();
    EXPECT_EQ(a, b);
    c.seed = 2;
    EXPECT_NE(run_check("quasi_tri", c).to_json().dump(), a);
}

TEST(Checks, ReportShape) {
    VerifyConfig c;
    c.samples = 500;
    const VerificationReport r = run_check("dist_bracket", c);
    const auto j = r.to_json();
    for (const char* k : {"check_name", "paper_anchor", "samples", "measured", "tolerance", "passed", "mesh_trend"})
        EXPECT_TRUE(j.contains(k)) << k;
    const std::string csv = reports_csv({r});
    EXPECT_EQ(csv.rfind("check,passed,key,value\n", 0), 0u);
    EXPECT_NE(csv.find("dist_bracket"), std::string::npos);
}

TEST(Checks, DaggerIdentityOnPerturbedBall) {
    VerifyConfig c;
    c.domain = make_perturbed_ball(2);
    c.ladder = {8};
    EXPECT_TRUE(run_check("dagger", c).passed);
}
