#include <szego/verify.hpp>

#include <gtest/gtest.h>

using namespace szego;

namespace {

Point P2(cplx a, cplx b) { return make_point({a, b}); }

cplx ball_g(const Point& w, const Point& z) { return 1.0 - (z[0] * std::conj(w[0]) + z[1] * std::conj(w[1])); }

}  // namespace

TEST(CfDensity, BallCenterIntegratesToOne) {
    const Domain b = make_ball(2);
    const BoundaryMesh m = build_mesh(b, 12);
    const SmoothedHessian sm = exact_hessian(b);
    cplx s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        s += eval_cf_density(b, sm, m.nodes[i], P2(0, 0), m.frame(i)) * m.sigma_weights[static_cast<Eigen::Index>(i)];
    EXPECT_NEAR(std::abs(s - 1.0), 0.0, 1e-3);
}

TEST(CfDensity, BallClosedForm) {
    const Domain b = make_ball(2);
    const SmoothedHessian sm = exact_hessian(b);
    const auto ws = random_boundary_points(b, 50, 21);
    const auto zs = interior_targets(b, 50, 0.9, 22);
    for (std::size_t k = 0; k < ws.size(); ++k) {
        const Frame f = special_frame(b, ws[k]);
        const cplx density = eval_cf_density(b, sm, ws[k], zs[k], f) / leray_levi_density(b, ws[k], f);
        const cplx oracle = 1.0 / (ball_g(ws[k], zs[k]) * ball_g(ws[k], zs[k]));
        EXPECT_NEAR(std::abs(density - oracle), 0.0, 1e-10 * std::abs(oracle));
    }
}

TEST(CfDensity, EllipsoidHolomorphicInZ) {
    const Domain e = make_ellipsoid({1.0, 2.0});
    const SmoothedHessian sm = exact_hessian(e);
    const auto ws = random_boundary_points(e, 20, 23);
    const auto zs = interior_targets(e, 20, 0.4, 24);
    const double h = 1e-5;
    for (std::size_t k = 0; k < ws.size(); ++k) {
        const Frame f = special_frame(e, ws[k]);
        const auto K = [&](const Point& z) { return eval_cf_density(e, sm, ws[k], z, f); };
        for (int j = 0; j < 2; ++j) {
            Point dx = Point::Zero(2), dy = Point::Zero(2);
            dx[j] = h;
            dy[j] = cplx(0, h);
            // d/dconj(z_j) = (d/dx + i d/dy) / 2
            const cplx dbar = 0.5 * ((K(zs[k] + dx) - K(zs[k] - dx)) / (2 * h) + kI * (K(zs[k] + dy) - K(zs[k] - dy)) / (2 * h));
            EXPECT_NEAR(std::abs(dbar), 0.0, 1e-6 * std::abs(K(zs[k])));
        }
    }
}

TEST(Essential, BallValues) {
    const Domain b = make_ball(2);
    const SmoothedHessian sm = exact_hessian(b);
    for (const auto& w : random_boundary_points(b, 10, 25)) EXPECT_NEAR(std::abs(eval_essential(b, sm, w, P2(0, 0)) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(eval_essential(b, sm, P2(1, 0), P2(-1, 0)) - 0.25), 0.0, 1e-15);
    EXPECT_THROW(eval_essential(b, sm, P2(1, 0), P2(1, 0)), NearSingularity);
}

TEST(Essential, SizeComparableToDeltaPower) {
    const Domain d = make_perturbed_ball(2);
    const SmoothedHessian sm = smooth_hessian(d, 0.01, build_mesh(d, 12).nodes);
    Band band;
    for (const auto& p : local_boundary_pairs(d, 5000, 0.25, 26))
        band.add(std::abs(eval_essential(d, sm, p.w, p.z)) * std::pow(quasi_distance(d, p.w, p.z), 4));
    EXPECT_LT(band.width(), 20.0);
}

TEST(Essential, BallAdjointEqualsEssential) {
    const Domain b = make_ball(2);
    const SmoothedHessian sm = exact_hessian(b);
    const auto pts = random_boundary_points(b, 40, 27);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const cplx k = eval_essential(b, sm, pts[i], pts[i + 1]);
        EXPECT_NEAR(std::abs(eval_adjoint_essential(b, sm, pts[i], pts[i + 1]) - k), 0.0, 1e-12 * std::abs(k));
    }
}

TEST(Essential, SymmetryDefectWithinWindow) {
    const Domain d = make_perturbed_ball(2);
    const double eps = 0.01;
    const SmoothedHessian sm = smooth_hessian(d, eps, build_mesh(d, 12).nodes);
    const double iota = std::min(kLocalRadius, eps / sm.c_eps);
    double c = 0.0;
    for (const auto& p : local_boundary_pairs(d, 20000, iota, 28)) {
        const double d2 = std::abs(eval_g0(d, p.w, p.z));
        if (d2 > iota * iota) continue;
        c = std::max(c, std::abs(eval_g_eps(d, sm, p.w, p.z) - std::conj(eval_g_eps(d, sm, p.z, p.w))) / (eps * d2));
    }
    EXPECT_LT(c, 5.0);
}

TEST(Truncated, SupportPlateauAndAntisymmetry) {
    const Domain b = make_ball(2);
    const BoundaryMesh m = build_mesh(b, 12);
    const CutoffCalibration cal = calibration_for(b);
    const KernelEvaluator ev(m, exact_hessian(b), cal);
    KernelSpec t, e, a;
    t.kind = KernelKind::TruncatedEssential;
    a.kind = KernelKind::AntisymA;
    e.kind = KernelKind::Essential;
    t.s = a.s = 0.5;
    std::size_t plateau_hits = 0;
    for (std::size_t j = 1; j < m.size(); j += 3) {
        const double dl = ev.delta(j, 0);
        const cplx v = ev.value(t, j, 0);
        if (dl >= 0.5) EXPECT_EQ(v, cplx(0.0));
        if (dl <= 0.5 * cal.c_prime * 0.5) {
            EXPECT_EQ(v, ev.value(e, j, 0));
            ++plateau_hits;
        }
        EXPECT_LE(std::abs(ev.value(a, j, 0)), 1e-12 * std::max(1.0, std::abs(ev.value(e, j, 0))));
    }
    EXPECT_GT(plateau_hits, 0u);
}

TEST(Truncated, NeedsCalibration) {
    const Domain b = make_ball(2);
    const BoundaryMesh m = build_mesh(b, 8);
    const KernelEvaluator ev(m, exact_hessian(b));
    KernelSpec t;
    t.kind = KernelKind::TruncatedEssential;
    t.s = 0.5;
    EXPECT_THROW(ev.value(t, 1, 0), ConfigError);
}

TEST(DifferenceRatio, ContractAndBoundedness) {
    const Domain b = make_ball(2);
    const SmoothedHessian sm = exact_hessian(b);
    const Point w = P2(1, 0), z = P2(0, 1);
    EXPECT_FALSE(kernel_difference_ratio(b, sm, w, z, z, 4.0).has_value());
    Rng rng(29);
    double sup = 0.0;
    for (int k = 0; k < 20000; ++k) {
        const Point ww = boundary_point(b, random_sphere_point(rng, 2));
        const Point zz = near_boundary_point(b, ww, log_uniform(rng, 1e-2, 0.25), rng);
        const Point zp = near_boundary_point(b, zz, log_uniform(rng, 1e-4, 1e-1) * (zz - ww).norm(), rng);
        if (const auto v = kernel_difference_ratio(b, sm, ww, zz, zp, 4.0)) sup = std::max(sup, *v);
    }
    EXPECT_GT(sup, 0.0);
    EXPECT_LT(sup, 20.0);
}

TEST(KernelSpec, JsonRoundTripAndNames) {
    KernelSpec k;
    k.kind = KernelKind::TruncatedAdjoint;
    k.eps = 0.01;
    k.s = 0.3;
    k.measure = Measure::Omega;
    const KernelSpec r = KernelSpec::from_json(k.to_json());
    EXPECT_EQ(r.kind, k.kind);
    EXPECT_EQ(r.s, k.s);
    EXPECT_EQ(r.measure, k.measure);
    EXPECT_THROW(kernel_kind_from_name("bogus"), ConfigError);
}
