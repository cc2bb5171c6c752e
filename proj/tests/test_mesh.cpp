#include <szego/verify.hpp>

#include <gtest/gtest.h>

#include <filesystem>

using namespace szego;

namespace {

Point P2(cplx a, cplx b) { return make_point({a, b}); }

}  // namespace

TEST(Mesh, NodeCountIsResolutionCubed) {
    for (int R : {8, 9, 12}) EXPECT_EQ(build_mesh(make_ball(2), R).size(), static_cast<std::size_t>(R * R * R));
}

TEST(Mesh, BallAreaAndMass) {
    const BoundaryMesh m = build_mesh(make_ball(2), 16);
    // area of S^3 is 2 pi^2
    EXPECT_NEAR(m.sigma_weights.sum(), 19.739208802178717, 0.001 * 19.739208802178717);
    EXPECT_NEAR(m.lambda_weights.sum(), 1.0, 1e-3);
}

TEST(Mesh, EllipsoidMassIsOne) {
    // (n!/pi^n) * det(mixed) * vol = 2 * 2 * pi^2/4 / pi^2
    EXPECT_NEAR(build_mesh(make_ellipsoid({1.0, 2.0}), 16).lambda_weights.sum(), 1.0, 1e-3);
}

TEST(Mesh, NodesOnBoundaryWithUnitNormals) {
    for (const Domain& d : {make_ball(2), make_ellipsoid({1.0, 2.0}), make_perturbed_ball(2)}) {
        const BoundaryMesh m = build_mesh(d, 8);
        for (std::size_t i = 0; i < m.size(); ++i) {
            EXPECT_NEAR(eval_rho(d, m.nodes[i]), 0.0, 1e-12);
            EXPECT_NEAR(m.normals[i].norm(), 1.0, 1e-12);
            EXPECT_GT(m.lambda_weights[static_cast<Eigen::Index>(i)], 0.0);
        }
    }
}

TEST(Mesh, ResolutionContract) { EXPECT_THROW(build_mesh(make_ball(2), 7), ConfigError); }

TEST(NormalOffset, BallClosedForm) {
    const Domain b = make_ball(2);
    const Point z = normal_offset(b, P2(1, 0), 0.1);
    EXPECT_NEAR((z - P2(0.9, 0)).norm(), 0.0, 1e-15);
    for (double d : {0.1, 0.01, 0.001}) EXPECT_NEAR(eval_rho(b, normal_offset(b, P2(1, 0), d)), -2 * d + d * d, 1e-15);
    EXPECT_THROW(normal_offset(b, P2(1, 0), 0.5), RangeError);
}

TEST(NormalOffset, RhoComparableToDelta) {
    const Domain d = make_perturbed_ball(2);
    double lo = kInf, hi = 0.0;
    for (const auto& w : random_boundary_points(d, 50, 4))
        for (double t : {0.99 * delta_max(d), 1e-2, 1e-3, 1e-4}) {
            const double r = std::abs(eval_rho(d, normal_offset(d, w, t))) / t;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
    EXPECT_GT(lo, 0.5);
    EXPECT_LT(hi / lo, 3.0);
}

TEST(Integrate, MassAndOddSymmetry) {
    const BoundaryMesh m = build_mesh(make_ball(2), 12);
    EXPECT_NEAR(integrate_boundary(m, [](std::size_t) { return cplx(1.0); }, Measure::Lambda).real(), 1.0, 1e-3);
    EXPECT_NEAR(std::abs(integrate_boundary(m, [&](std::size_t i) { return m.nodes[i][0]; }, Measure::Sigma)), 0.0, 1e-12);
    EXPECT_THROW(integrate_boundary(m, [](std::size_t) { return cplx(1.0); }, Measure::Omega), ConfigError);
}

TEST(Integrate, InnerPowerScalesLikeRadius) {
    const Domain b = make_ball(2);
    const Point c = P2(1, 0);
    const GradedSample g = graded_sample(b, c);
    std::vector<double> r, v;
    for (double rad : {0.2, 0.1, 0.05, 0.025}) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.delta.size(); ++i)
            if (g.delta[i] < rad) s += std::pow(g.delta[i], -3.0) * g.weight[i];
        r.push_back(rad);
        v.push_back(s / rad);
    }
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    EXPECT_LT(*hi / *lo, 1.1);
}

TEST(BallMembers, Extremes) {
    const BoundaryMesh m = build_mesh(make_ball(2), 8);
    const BoundaryBall small = ball_members(m, 5, 1e-6);
    ASSERT_EQ(small.members.size(), 1u);
    EXPECT_EQ(small.members[0], 5u);
    EXPECT_EQ(ball_members(m, 5, 2.0).members.size(), m.size());
}

TEST(BallMembers, MassTracksLensOracle) {
    const BoundaryMesh m = build_mesh(make_ball(2), 24);
    // smaller balls hold too few uniform nodes; the graded mesh covers them
    const std::size_t c = m.size() / 3;
    for (double rad : {1.0, 0.8, 0.6, 0.45}) EXPECT_NEAR(ball_members(m, c, rad).mass(m.lambda_weights) / ball_lens_measure(rad), 1.0, 0.05) << rad;
}

TEST(GradedMesh, BallMassAndLensOracle) {
    const Domain b = make_ball(2);
    const BoundaryMesh m = build_graded_mesh(b, P2(1, 0));
    EXPECT_NEAR(m.lambda_weights.sum(), 1.0, 1e-6);
    const GradedSample g = graded_sample(b, P2(1, 0));
    for (double rad : {0.2, 0.1}) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.delta.size(); ++i)
            if (g.delta[i] < rad) s += g.weight[i];
        EXPECT_NEAR(s / ball_lens_measure(rad), 1.0, 0.02);
    }
}

TEST(ProductCells, CellMassMatchesNodeWeights) {
    const BoundaryMesh m = build_mesh(make_ball(2), 8);
    const ProductCells cells(m);
    double total = 0.0;
    const auto one = [](const Point&) { return cplx(1.0); };
    for (std::size_t c = 0; c < m.size(); c += 7) {
        const cplx v = adaptive_cell_integral(cells, c, m.nodes[(c + 200) % m.size()], one, {});
        EXPECT_NEAR(v.real(), m.lambda_weights[static_cast<Eigen::Index>(c)], 1e-3 * m.lambda_weights[static_cast<Eigen::Index>(c)]);
    }
    for (std::size_t c = 0; c < m.size(); ++c) {
        const ProductCell& pc = cells.cell(c);
        total += cells.density(c, 0.5 * (pc.t0 + pc.t1), pc.p1, pc.p2) * (pc.t1 - pc.t0) * pc.dphi * pc.dphi;
    }
    EXPECT_NEAR(total, 1.0, 1e-3);
}

TEST(MeshFile, RoundTripAndTamper) {
    const BoundaryMesh m = build_mesh(make_perturbed_ball(2), 8);
    const auto path = (std::filesystem::temp_directory_path() / "szego_mesh_test.json").string();
    save_mesh(m, path);
    const BoundaryMesh r = load_mesh(path);
    EXPECT_EQ(mesh_hash(r), mesh_hash(m));
    EXPECT_EQ(r.size(), m.size());
    EXPECT_EQ(r.nodes[17], m.nodes[17]);
    EXPECT_EQ(r.lambda_weights, m.lambda_weights);
    auto j = nlohmann::json::parse(read_text(path));
    j["resolution"] = 9;
    EXPECT_THROW(mesh_from_json(j), HashMismatch);
    std::filesystem::remove(path);
}
