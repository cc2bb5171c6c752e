#include <szego/verify.hpp>

#include <gtest/gtest.h>

using namespace szego;

namespace {

Point P2(cplx a, cplx b) { return make_point({a, b}); }

std::vector<Domain> catalog() { return {make_ball(2), make_ellipsoid({1.0, 2.0}), make_perturbed_ball(2)}; }

}  // namespace

TEST(Rho, BallCenterAndBoundary) {
    const Domain b = make_ball(2);
    EXPECT_DOUBLE_EQ(eval_rho(b, P2(0, 0)), -1.0);
    EXPECT_DOUBLE_EQ(eval_rho(b, P2(1, 0)), 0.0);
}

TEST(Rho, EllipsoidBoundaryPoint) {
    EXPECT_NEAR(eval_rho(make_ellipsoid({1.0, 2.0}), P2(0, 1.0 / std::sqrt(2.0))), 0.0, 1e-15);
}

TEST(DelRho, BallIsConjugate) {
    const Domain b = make_ball(2);
    const Point d1 = eval_del_rho(b, P2(1, 0));
    EXPECT_NEAR(std::abs(d1[0] - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(d1[1]), 0.0, 1e-15);
    const Point d2 = eval_del_rho(b, P2(0, kI));
    EXPECT_NEAR(std::abs(d2[0]), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(d2[1] + kI), 0.0, 1e-15);
}

TEST(DelRho, UnperturbedBallMatchesBall) {
    const Domain pb = make_perturbed_ball(2, 0.0), b = make_ball(2);
    for (const auto& w : random_boundary_points(b, 50, 3)) {
        EXPECT_NEAR(eval_rho(pb, w), eval_rho(b, w), 1e-15);
        EXPECT_NEAR((eval_del_rho(pb, w) - eval_del_rho(b, w)).norm(), 0.0, 1e-15);
    }
}

TEST(Hessians, CatalogClosedForms) {
    const Point w = P2(0.5, 0.3);
    const Hessians hb = eval_hessians(make_ball(2), w);
    EXPECT_EQ(hb.holo.norm(), 0.0);
    EXPECT_NEAR((hb.mixed - SmallMat::Identity(2, 2)).norm(), 0.0, 1e-15);
    const Hessians he = eval_hessians(make_ellipsoid({1.0, 2.0}), w);
    EXPECT_EQ(he.holo.norm(), 0.0);
    EXPECT_NEAR(std::abs(he.mixed(1, 1) - 2.0), 0.0, 1e-15);
    // f = 0.1|x|^3 has f'' = 0.3 at x = 0.5; each complex second derivative is f''/4
    const Hessians hp = eval_hessians(make_perturbed_ball(2, 0.1), w);
    EXPECT_NEAR(hp.holo(0, 0).real(), 0.075, 1e-15);
    EXPECT_NEAR(hp.mixed(0, 0).real(), 1.075, 1e-15);
}

TEST(StrictPsh, CatalogMinimumEigenvalue) {
    const auto s = random_boundary_points(make_ball(2), 200, 5);
    EXPECT_NEAR(check_strict_psh(make_ball(2), s), 1.0, 1e-14);
    EXPECT_NEAR(check_strict_psh(make_ellipsoid({1.0, 2.0}), s), 1.0, 1e-14);
    const double pb = check_strict_psh(make_perturbed_ball(2), s);
    EXPECT_GT(pb, 0.9);
    EXPECT_NEAR(pb, 1.0, 1e-14);  // mixed = diag(1 + 0.15|x|, 1)
}

TEST(SmoothHessian, BallIsExact) {
    const SmoothedHessian sm = smooth_hessian(make_ball(2), 0.01, build_mesh(make_ball(2), 8).nodes);
    EXPECT_TRUE(sm.exact());
    EXPECT_EQ(sm.c_eps, 0.0);
    EXPECT_EQ(sm.sup_error, 0.0);
}

TEST(SmoothHessian, SupErrorOnSample) {
    const Domain d = make_perturbed_ball(2);
    const auto sample = build_mesh(d, 12).nodes;
    const SmoothedHessian sm = smooth_hessian(d, 0.01, sample);
    double err = 0.0;
    for (const auto& p : sample) err = std::max(err, std::abs(sm.tau(p)(0, 0) - eval_hessians(d, p).holo(0, 0)));
    EXPECT_LE(err, 0.01);
    EXPECT_GT(sm.h, 0.0);
}

TEST(SmoothHessian, TinyEpsIsUnresolvable) {
    const Domain d = make_perturbed_ball(2);
    const auto sample = random_boundary_points(d, 1000, 2);
    EXPECT_THROW(smooth_hessian(d, 1e-12, sample), UnresolvableEps);
    EXPECT_THROW(smooth_hessian(d, 0.0, sample), ConfigError);
}

TEST(Mollifier, ErrorPeaksAtOrigin) {
    const MollifiedAbs m(0.2);
    EXPECT_NEAR(m.value(0.0), 0.2 * m.m1(), 1e-14);
    Rng rng(4);
    for (int k = 0; k < 200; ++k) {
        const double x = rng.uniform(-0.5, 0.5);
        EXPECT_LE(std::abs(m.value(x) - std::abs(x)), 0.2 * m.m1() + 1e-14);
        EXPECT_NEAR(m.value(x), m.value(-x), 1e-14);
        EXPECT_LE(std::abs(m.deriv(x)), 1.0 + 1e-14);
    }
}

TEST(DomainJson, RoundTripAndErrors) {
    for (const Domain& d : catalog()) EXPECT_EQ(domain_to_json(domain_from_json(domain_to_json(d))), domain_to_json(d));
    EXPECT_THROW(domain_from_json({{"name", "ball"}, {"n", 4}}), ConfigError);
    EXPECT_THROW(domain_from_json({{"name", "torus"}}), ConfigError);
    EXPECT_THROW(make_ellipsoid({1.0, -1.0}), ConfigError);
}

TEST(BoundaryRadius, LandsOnBoundary) {
    for (const Domain& d : catalog()) {
        Rng rng(9);
        for (int k = 0; k < 100; ++k) EXPECT_NEAR(eval_rho(d, boundary_point(d, random_sphere_point(rng, 2))), 0.0, 1e-12);
    }
    const Domain b3 = make_ball(3);
    Rng rng(1);
    EXPECT_NEAR(eval_rho(b3, boundary_point(b3, random_sphere_point(rng, 3))), 0.0, 1e-12);
}

//------------------------------------------------------------------------------
// Frames, quasi-distance, Levi polynomial
//------------------------------------------------------------------------------

TEST(Frame, BallAtE1) {
    const Frame f = special_frame(make_ball(2), P2(1, 0));
    EXPECT_NEAR((f.inner_normal - P2(-1, 0)).norm(), 0.0, 1e-15);
    EXPECT_NEAR((f.e(1) - P2(-kI, 0)).norm(), 0.0, 1e-15);
    EXPECT_NEAR(f.coords(P2(1, 0)).norm(), 0.0, 1e-15);
    // <z - w, e_n> for z = (0,1): (-1)(conj(-i)) = -i
    EXPECT_NEAR(std::abs(f.coords(P2(0, 1))[1] - (-kI)), 0.0, 1e-15);
}

TEST(Frame, UnitaryWithComplexNormal) {
    for (const Domain& d : catalog())
        for (const auto& w : random_boundary_points(d, 40, 11)) {
            const Frame f = special_frame(d, w);
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) EXPECT_NEAR(std::abs(herm(f.e(j), f.e(k)) - (j == k ? 1.0 : 0.0)), 0.0, 1e-12);
            EXPECT_NEAR((f.e(1) - kI * f.inner_normal).norm(), 0.0, 1e-14);
        }
}

TEST(Frame, DegenerateGradientThrows) { EXPECT_THROW(special_frame(make_ball(2), P2(0, 0)), DegenerateGradient); }

TEST(QuasiDistance, BallClosedForms) {
    const Domain b = make_ball(2);
    EXPECT_EQ(quasi_distance(b, P2(1, 0), P2(1, 0)), 0.0);
    // (2 sin 0.05)^{1/2}
    EXPECT_NEAR(quasi_distance(b, P2(1, 0), P2(std::polar(1.0, 0.1), 0)), 0.31616188660456317, 1e-14);
    EXPECT_NEAR(quasi_distance(b, P2(1, 0), P2(-1, 0)), std::sqrt(2.0), 1e-15);
}

TEST(LeviPolynomial, BallIsOneMinusInnerProduct) {
    const Domain b = make_ball(2);
    const auto pts = random_boundary_points(b, 30, 8);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const Point& w = pts[i];
        const Point& z = pts[i + 1];
        const cplx oracle = 1.0 - (z[0] * std::conj(w[0]) + z[1] * std::conj(w[1]));
        EXPECT_NEAR(std::abs(eval_g0(b, w, z) - oracle), 0.0, 1e-14);
        EXPECT_EQ(eval_g0(b, w, w), cplx(0.0));
    }
}

TEST(LeviPolynomial, EllipsoidSubstitution) {
    EXPECT_NEAR(std::abs(eval_g0(make_ellipsoid({1.0, 2.0}), P2(1, 0), P2(0, 1.0 / std::sqrt(2.0))) - 1.0), 0.0, 1e-14);
}

TEST(LeviPolynomial, SmoothedEqualsExactOnBall) {
    const Domain b = make_ball(2);
    const SmoothedHessian sm = hessian_for(b, 0.01, {});
    const auto pts = random_boundary_points(b, 20, 12);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) EXPECT_EQ(eval_g_eps(b, sm, pts[i], pts[i + 1]), eval_g0(b, pts[i], pts[i + 1]));
}

TEST(LeviPolynomial, SmoothingErrorIsQuadratic) {
    const Domain d = make_perturbed_ball(2);
    const SmoothedHessian sm = smooth_hessian(d, 0.01, build_mesh(d, 12).nodes);
    const auto pairs = local_boundary_pairs(d, 10000, 0.25, 6);
    double c = 0.0;
    for (const auto& p : pairs) c = std::max(c, std::abs(eval_g_eps(d, sm, p.w, p.z) - eval_g0(d, p.w, p.z)) / (p.w - p.z).squaredNorm());
    // g_eps - g_0 is a Hessian difference contracted with (w - z) twice
    EXPECT_LE(c, 0.01 * 1.01);
}

TEST(LerayLevi, BallDensityConstant) {
    const Domain b = make_ball(2);
    const auto pts = random_boundary_points(b, 100, 13);
    const double ref = leray_levi_density(b, pts[0], special_frame(b, pts[0]));
    for (const auto& w : pts) EXPECT_NEAR(leray_levi_density(b, w, special_frame(b, w)), ref, 1e-8 * ref);
}

TEST(LerayLevi, EllipsoidBorderedDeterminant) {
    // Lambda = sum_j |rho_j|^2 prod_{k != j} a_k / (pi^2 |grad rho|), rho_j = a_j conj(z_j)
    const Domain e = make_ellipsoid({1.0, 2.0});
    for (const auto& w : random_boundary_points(e, 100, 14)) {
        const double r0 = std::norm(1.0 * w[0]), r1 = std::norm(2.0 * w[1]);
        const double oracle = (r0 * 2.0 + r1 * 1.0) / (kPi * kPi * 2.0 * std::sqrt(r0 + r1));
        EXPECT_NEAR(leray_levi_density(e, w, special_frame(e, w)), oracle, 1e-10 * oracle);
    }
}

TEST(Cutoff, ProfileAndSupport) {
    const Domain b = make_ball(2);
    const CutoffCalibration cal = calibration_for(b);
    const Point c = P2(1, 0);
    EXPECT_EQ(cutoff_chi_tilde(b, cal, c, 0.3, c), 1.0);
    EXPECT_EQ(cutoff_chi_tilde(b, cal, c, 0.3, P2(-1, 0)), 0.0);
    EXPECT_THROW(cutoff_chi_tilde(b, cal, c, 0.0, c), RangeError);
    // walk out along the circle until delta = 0.8 r
    const double r = 0.3;
    const double t = 2.0 * std::asin(0.5 * std::pow(0.8 * r, 2));
    const Point w = P2(std::polar(1.0, t), 0);
    const double v = cutoff_chi_tilde(b, cal, c, r, w);
    EXPECT_NEAR(quasi_distance(b, c, w), 0.8 * r, 1e-12);
    EXPECT_EQ(v, plateau(cutoff_modulus(b, c, w) / (cal.c * r * r), 0.5, 1.0));
}

TEST(Cutoff, SymmetrizedIsSymmetric) {
    for (const Domain& d : catalog()) {
        const CutoffCalibration cal = calibration_for(d);
        const auto pairs = local_boundary_pairs(d, 500, 0.5, 15);
        for (const auto& p : pairs) {
            EXPECT_EQ(cutoff_chi_sym(d, cal, p.w, p.z, 0.4), cutoff_chi_sym(d, cal, p.z, p.w, 0.4));
            if (quasi_distance(d, p.w, p.z) >= 0.4) EXPECT_EQ(cutoff_chi_sym(d, cal, p.w, p.z, 0.4), 0.0);
        }
        EXPECT_EQ(cutoff_chi_sym(d, cal, pairs[0].w, pairs[0].w, 0.4), 1.0);
    }
}

TEST(Cutoff, CalibrationInequalities) {
    const Domain d = make_perturbed_ball(2);
    const auto pilot = build_mesh(d, 12).nodes;
    const CutoffCalibration cal = calibrate_cutoff(d, pilot);
    EXPECT_NEAR(cal.c * cal.margin * cal.k_up, 1.0, 1e-14);
    Rng rng(3);
    for (int k = 0; k < 2000; ++k) {
        const Point& a = pilot[rng.index(pilot.size())];
        const Point& b = pilot[rng.index(pilot.size())];
        const double d2 = std::abs(eval_g0(d, a, b));
        if (d2 > 1e-14) EXPECT_LE(d2, cal.k_up * cutoff_modulus(d, a, b) * (1 + 1e-12));
    }
}
