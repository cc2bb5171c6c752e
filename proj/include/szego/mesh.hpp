#pragma once

#include "geometry.hpp"

#include <functional>
#include <string>

namespace szego {

enum class Measure { Sigma, Lambda, Omega };

inline std::string measure_name(Measure m) {
    switch (m) {
        case Measure::Sigma: return "sigma";
        case Measure::Lambda: return "lambda";
        case Measure::Omega: return "omega";
    }
    return "?";
}

inline Measure measure_from_name(const std::string& s) {
    if (s == "sigma") return Measure::Sigma;
    if (s == "lambda") return Measure::Lambda;
    if (s == "omega") return Measure::Omega;
    throw ConfigError("unknown measure '" + s + "'");
}

struct BoundaryMesh {
    Domain domain;
    int resolution = 0;
    std::string scheme = "product";
    std::vector<Point> nodes;
    std::vector<Point> normals;  // inner unit normals
    RVec sigma_weights;
    RVec lambda_values;   // Lambda at each node
    RVec lambda_weights;  // Lambda * sigma weight

    std::size_t size() const { return nodes.size(); }
    Frame frame(std::size_t i) const { return special_frame(domain, nodes[i]); }
};

//------------------------------------------------------------------------------
// Sphere parameterization and radial projection
//------------------------------------------------------------------------------

// Unit sphere point and its parameter derivatives. Parameters are
// (theta_1..theta_{n-1}, phi_1..phi_n).
struct SpherePatch {
    Point u;
    std::vector<Point> du;
};

inline SpherePatch sphere_patch(int n, const std::vector<double>& th, const std::vector<double>& ph) {
    RVec m(n);
    std::vector<RVec> dm(n - 1, RVec::Zero(n));
    if (n == 2) {
        m << std::cos(th[0]), std::sin(th[0]);
        dm[0] << -std::sin(th[0]), std::cos(th[0]);
    } else {
        const double c1 = std::cos(th[0]), s1 = std::sin(th[0]), c2 = std::cos(th[1]), s2 = std::sin(th[1]);
        m << c1, s1 * c2, s1 * s2;
        dm[0] << -s1, c1 * c2, c1 * s2;
        dm[1] << 0.0, -s1 * s2, s1 * c2;
    }
    SpherePatch p;
    p.u.resize(n);
    Point ph_e(n);
    for (int j = 0; j < n; ++j) {
        ph_e[j] = std::polar(1.0, ph[j]);
        p.u[j] = m[j] * ph_e[j];
    }
    for (int a = 0; a < n - 1; ++a) {
        Point d(n);
        for (int j = 0; j < n; ++j) d[j] = dm[a][j] * ph_e[j];
        p.du.push_back(d);
    }
    for (int a = 0; a < n; ++a) {
        Point d = Point::Zero(n);
        d[a] = kI * p.u[a];
        p.du.push_back(d);
    }
    return p;
}

// Real derivative of rho along v.
inline double drho(const Domain& dom, const Point& z, const Point& v) {
    return 2.0 * pair(eval_del_rho(dom, z), v).real();
}

struct SurfacePoint {
    Point z;
    std::vector<Point> tangents;
};

// z = r(u) u on {rho = 0} with tangents from implicit differentiation of r.
inline SurfacePoint project_patch(const Domain& dom, const SpherePatch& p) {
    SurfacePoint s;
    const double r = boundary_radius(dom, p.u);
    s.z = r * p.u;
    const double du_dir = drho(dom, s.z, p.u);
    for (const auto& d : p.du) {
        const double dr = -r * drho(dom, s.z, d) / du_dir;
        s.tangents.push_back(dr * p.u + r * d);
    }
    return s;
}

// Boundary point over a unit direction.
inline Point boundary_point(const Domain& dom, const Point& u) { return boundary_radius(dom, u) * u; }

inline double gram_volume(const std::vector<Point>& t) {
    const int m = static_cast<int>(t.size());
    Eigen::MatrixXd G(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) G(a, b) = herm(t[a], t[b]).real();
    const double det = G.determinant();
    if (!(det > 0.0)) throw MeshError("singular parameterization Jacobian");
    return std::sqrt(det);
}

// Unitary map sending e_1 to the unit vector c.
inline SmallMat unitary_to(const Point& c) {
    const int n = static_cast<int>(c.size());
    SmallMat U(n, n);
    U.col(0) = c / c.norm();
    int col = 1;
    for (int k = 0; k < n && col < n; ++k) {
        Point v = Point::Zero(n);
        v[k] = 1.0;
        for (int q = 0; q < col; ++q) v -= herm(v, Point(U.col(q))) * Point(U.col(q));
        if (v.norm() > 1e-6) U.col(col++) = v / v.norm();
    }
    return U;
}

struct MeshBuilder {
    Domain dom;
    BoundaryMesh mesh;
    SmallMat rot;
    bool rotate = false;

    void add(const std::vector<double>& th, const std::vector<double>& ph, double qw) {
        SpherePatch p = sphere_patch(dom.n, th, ph);
        if (rotate) {
            p.u = rot * p.u;
            for (auto& d : p.du) d = rot * d;
        }
        const SurfacePoint s = project_patch(dom, p);
        const double sw = gram_volume(s.tangents) * qw;
        const Frame f = special_frame(dom, s.z);
        const double lam = leray_levi_density(dom, s.z, f);
        mesh.nodes.push_back(s.z);
        mesh.normals.push_back(f.inner_normal);
        sw_.push_back(sw);
        lv_.push_back(lam);
    }
    BoundaryMesh finish() {
        const Eigen::Index N = static_cast<Eigen::Index>(sw_.size());
        mesh.sigma_weights = Eigen::Map<RVec>(sw_.data(), N);
        mesh.lambda_values = Eigen::Map<RVec>(lv_.data(), N);
        mesh.lambda_weights = mesh.lambda_values.cwiseProduct(mesh.sigma_weights);
        return std::move(mesh);
    }

private:
    std::vector<double> sw_, lv_;
};

// Gauss-Legendre in t = sin^2(theta) on [0, 1], mapped back to theta in [0, pi/2].
// Nodes stay away from the poles at distance O(1/R) instead of O(1/R^2).
inline Rule polar_rule(int m) {
    const Rule g = gauss_on(0.0, 1.0, m);
    Rule r;
    for (int i = 0; i < m; ++i) {
        const double th = std::asin(std::sqrt(g.x[i]));
        r.x.push_back(th);
        r.w.push_back(g.w[i] / (2.0 * std::sin(th) * std::cos(th)));
    }
    return r;
}

// Product mesh: Gauss-Legendre polar rule, periodic trapezoid in the phases.
inline BoundaryMesh build_mesh(const Domain& dom, int resolution) {
    check_dim(dom.n);
    if (resolution < 8) throw ConfigError("mesh resolution must be at least 8");
    MeshBuilder b;
    b.dom = dom;
    b.mesh.domain = dom;
    b.mesh.resolution = resolution;
    b.mesh.scheme = "product";
    const Rule th = polar_rule(resolution);
    const Rule ph = periodic_trapezoid(resolution);
    const int R = resolution;
    if (dom.n == 2) {
        b.mesh.nodes.reserve(static_cast<std::size_t>(R) * R * R);
        for (int i = 0; i < R; ++i)
            for (int j = 0; j < R; ++j)
                for (int k = 0; k < R; ++k) b.add({th.x[i]}, {ph.x[j], ph.x[k]}, th.w[i] * ph.w[j] * ph.w[k]);
    } else {
        for (int i1 = 0; i1 < R; ++i1)
            for (int i2 = 0; i2 < R; ++i2)
                for (int j1 = 0; j1 < R; ++j1)
                    for (int j2 = 0; j2 < R; ++j2)
                        for (int j3 = 0; j3 < R; ++j3)
                            b.add({th.x[i1], th.x[i2]}, {ph.x[j1], ph.x[j2], ph.x[j3]},
                                  th.w[i1] * th.w[i2] * ph.w[j1] * ph.w[j2] * ph.w[j3]);
    }
    return b.finish();
}

// Parameter cell of a product-mesh node (n = 2): t = sin^2 theta in
// [t0, t1] (cumulative Gauss weights), phases centered on the node.
struct ProductCell {
    double t0, t1, p1, p2, dphi;
};

inline ProductCell product_cell(const BoundaryMesh& m, std::size_t idx) {
    if (m.scheme != "product" || m.domain.n != 2) throw ConfigError("cell sampling needs an n = 2 product mesh");
    const int R = m.resolution;
    const Rule g = gauss_on(0.0, 1.0, R);
    const Rule ph = periodic_trapezoid(R);
    const std::size_t i = idx / (static_cast<std::size_t>(R) * R), j = (idx / R) % R, k = idx % R;
    ProductCell c{0.0, 0.0, ph.x[j], ph.x[k], 2.0 * kPi / R};
    for (std::size_t q = 0; q < i; ++q) c.t0 += g.w[q];
    c.t1 = i + 1 == static_cast<std::size_t>(R) ? 1.0 : c.t0 + g.w[i];
    return c;
}

// Euclidean radius bound of a parameter box centered at y.
inline double box_radius(const Domain& dom, const Point& y, double dth, double dp1, double dp2) {
    const double rmax = 1.0 / std::sqrt(*std::min_element(dom.a.begin(), dom.a.end()));
    return 0.75 * rmax * (dth + dp1 * std::abs(y[0]) / y.norm() + dp2 * std::abs(y[1]) / y.norm()) + 1e-12;
}

// d lambda = D(t, phi_1, phi_2) dt dphi_1 dphi_2 on the product parameterization (n = 2).
inline double lambda_param_density(const Domain& dom, double t, double p1, double p2) {
    const double th = std::asin(std::sqrt(t));
    const SurfacePoint s = project_patch(dom, sphere_patch(2, {th}, {p1, p2}));
    return gram_volume(s.tangents) / (2.0 * std::sin(th) * std::cos(th)) *
           leray_levi_density(dom, s.z, special_frame(dom, s.z));
}

// Per-cell tensor quadratic interpolant of the parameter density, through
// the 3-point Gauss nodes of each cell.
class ProductCells {
public:
    explicit ProductCells(const BoundaryMesh& m) : mesh_(&m) {
        (void)product_cell(m, 0);
        const std::size_t N = m.size();
        cells_.resize(N);
        vals_.resize(N);
        parallel_for(0, N, [&](std::size_t c) {
            cells_[c] = product_cell(m, c);
            const ProductCell& pc = cells_[c];
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    for (int e = 0; e < 3; ++e)
                        vals_[c][(a * 3 + b) * 3 + e] =
                            lambda_param_density(m.domain, pc.t0 + kX[a] * (pc.t1 - pc.t0), pc.p1 + (kX[b] - 0.5) * pc.dphi,
                                                 pc.p2 + (kX[e] - 0.5) * pc.dphi);
        });
    }

    const BoundaryMesh& mesh() const { return *mesh_; }
    const ProductCell& cell(std::size_t c) const { return cells_[c]; }

    double density(std::size_t c, double t, double p1, double p2) const {
        const ProductCell& pc = cells_[c];
        const auto lt = basis((t - pc.t0) / (pc.t1 - pc.t0));
        const auto l1 = basis((p1 - pc.p1) / pc.dphi + 0.5);
        const auto l2 = basis((p2 - pc.p2) / pc.dphi + 0.5);
        double s = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int e = 0; e < 3; ++e) s += lt[a] * l1[b] * l2[e] * vals_[c][(a * 3 + b) * 3 + e];
        return s;
    }

private:
    static constexpr double kX[3] = {0.5 - 0.3872983346207417, 0.5, 0.5 + 0.3872983346207417};
    static std::array<double, 3> basis(double x) {
        std::array<double, 3> l{};
        for (int a = 0; a < 3; ++a) {
            double v = 1.0;
            for (int b = 0; b < 3; ++b)
                if (b != a) v *= (x - kX[b]) / (kX[a] - kX[b]);
            l[a] = v;
        }
        return l;
    }
    const BoundaryMesh* mesh_;
    std::vector<ProductCell> cells_;
    std::vector<std::array<double, 27>> vals_;
};

// Adaptive midpoint integration of F(y) d lambda(y) over a product cell,
// refined toward the target z. A box is accepted once its phase width is at
// most kappa |g0(y, z)| and its theta width at most kappa |g0(y, z)|^{1/2}.
struct AdaptiveCellOptions {
    double kappa = 1.0;
    double core = 0.0;      // boxes still unresolved inside delta <~ core are dropped
    int max_depth = 24;
    double support = kInf;  // F vanishes for |y - z| >= support
};

inline cplx adaptive_cell_integral(const ProductCells& cells, std::size_t idx, const Point& z,
                                   const std::function<cplx(const Point&)>& F, const AdaptiveCellOptions& opt = {}) {
    const ProductCell& c = cells.cell(idx);
    const Domain& dom = cells.mesh().domain;
    struct Box {
        double t0, t1, p1, p2, dp1, dp2;
        int depth;
    };
    std::vector<Box> stack{{c.t0, c.t1, c.p1, c.p2, c.dphi, c.dphi, 0}};
    cplx sum = 0.0;
    while (!stack.empty()) {
        const Box b = stack.back();
        stack.pop_back();
        const double t = 0.5 * (b.t0 + b.t1);
        const double rt = std::sqrt(t);
        const double dth = std::asin(std::sqrt(b.t1)) - std::asin(std::sqrt(b.t0));
        Point u(2);
        u[0] = std::polar(std::sqrt(1.0 - t), b.p1);
        u[1] = std::polar(rt, b.p2);
        const Point y = boundary_point(dom, u);
        if (opt.support < kInf && (y - z).norm() - box_radius(dom, y, dth, b.dp1, b.dp2) >= opt.support) continue;
        const double d2 = std::abs(eval_g0(dom, y, z));
        const bool split_p = std::max(b.dp1, b.dp2) > opt.kappa * d2;
        const bool split_t = dth > opt.kappa * std::sqrt(d2);
        if (split_p || split_t) {
            // unresolved core around z is dropped; the integrands used here are O(delta^{1-2n})
            if (std::max(b.dp1, b.dp2) <= opt.kappa * opt.core * opt.core && dth <= opt.kappa * opt.core) continue;
            if (b.depth >= opt.max_depth) throw MeshError("adaptive cell integration exceeded its depth limit");
            const int nt = split_t ? 2 : 1, np = split_p ? 2 : 1;
            const double ht = (b.t1 - b.t0) / nt, hp1 = b.dp1 / np, hp2 = b.dp2 / np;
            for (int a = 0; a < nt; ++a)
                for (int q = 0; q < np; ++q)
                    for (int v = 0; v < np; ++v)
                        stack.push_back({b.t0 + a * ht, b.t0 + (a + 1) * ht, b.p1 - 0.5 * b.dp1 + (q + 0.5) * hp1,
                                         b.p2 - 0.5 * b.dp2 + (v + 0.5) * hp2, hp1, hp2, b.depth + 1});
            continue;
        }
        if (d2 == 0.0) continue;
        sum += F(y) * cells.density(idx, t, b.p1, b.p2) * (b.t1 - b.t0) * b.dp1 * b.dp2;
    }
    return sum;
}

// Mesh graded toward the boundary point over direction `center` (n = 2):
// geometric panels in theta and phi_1 around the pole, uniform phi_2.
struct GradedSpec {
    double theta_min = 1e-4;
    double phi_min = 1e-6;
    double ratio = 2.0;
    int gauss = 10;
    int phi2 = 16;
};

inline BoundaryMesh build_graded_mesh(const Domain& dom, const Point& center, const GradedSpec& g = {}) {
    if (dom.n != 2) throw ConfigError("graded meshes are implemented for n = 2");
    MeshBuilder b;
    b.dom = dom;
    b.mesh.domain = dom;
    b.mesh.scheme = "graded";
    b.rotate = true;
    b.rot = unitary_to(center);
    const Rule th = composite_gauss(geometric_breaks(g.theta_min, 0.5 * kPi, g.ratio), g.gauss);
    const Rule half = composite_gauss(geometric_breaks(g.phi_min, kPi, g.ratio), g.gauss);
    Rule ph1;
    for (std::size_t i = half.x.size(); i-- > 0;) {
        ph1.x.push_back(-half.x[i]);
        ph1.w.push_back(half.w[i]);
    }
    for (std::size_t i = 0; i < half.x.size(); ++i) {
        ph1.x.push_back(half.x[i]);
        ph1.w.push_back(half.w[i]);
    }
    const Rule ph2 = periodic_trapezoid(g.phi2);
    b.mesh.resolution = static_cast<int>(th.x.size());
    for (std::size_t i = 0; i < th.x.size(); ++i)
        for (std::size_t j = 0; j < ph1.x.size(); ++j)
            for (std::size_t k = 0; k < ph2.x.size(); ++k)
                b.add({th.x[i]}, {ph1.x[j], ph2.x[k]}, th.w[i] * ph1.w[j] * ph2.w[k]);
    return b.finish();
}

inline std::vector<Point> random_boundary_points(const Domain& dom, std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Point> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(boundary_point(dom, random_sphere_point(rng, dom.n)));
    return out;
}

//------------------------------------------------------------------------------
// Offsets, integration, balls
//------------------------------------------------------------------------------

inline double inradius_proxy(const Domain& dom) {
    double amax = *std::max_element(dom.a.begin(), dom.a.end());
    double r = 1.0 / std::sqrt(amax);
    if (dom.kind == DomainKind::PerturbedBall) {
        Point e = Point::Zero(dom.n);
        e[0] = 1.0;
        r = std::min(r, boundary_radius(dom, e));
    }
    return r;
}

inline double delta_max(const Domain& dom) { return 0.2 * inradius_proxy(dom); }

inline Point normal_offset(const Domain& dom, const Point& z, double delta) {
    if (!(delta > 0.0) || delta >= delta_max(dom))
        throw RangeError("normal offset outside (0, " + std::to_string(delta_max(dom)) + ")");
    const Point grad = complex_gradient(dom, z);
    return z - delta * grad / grad.norm();
}

inline const RVec& measure_weights(const BoundaryMesh& m, Measure meas, const RVec* omega_weights = nullptr) {
    switch (meas) {
        case Measure::Sigma: return m.sigma_weights;
        case Measure::Lambda: return m.lambda_weights;
        case Measure::Omega:
            if (!omega_weights) throw ConfigError("omega measure needs a weight vector");
            return *omega_weights;
    }
    return m.lambda_weights;
}

inline cplx integrate_boundary(const BoundaryMesh& m, const std::function<cplx(std::size_t)>& f, Measure meas,
                               const RVec* omega_weights = nullptr) {
    const RVec& w = measure_weights(m, meas, omega_weights);
    cplx s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const cplx v = f(i);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw RangeError("non-finite integrand at node " + std::to_string(i));
        s += v * w[static_cast<Eigen::Index>(i)];
    }
    return s;
}

struct BoundaryBall {
    std::size_t center = 0;
    double radius = 0.0;
    std::vector<std::size_t> members;

    double mass(const RVec& weights) const {
        double s = 0.0;
        for (auto j : members) s += weights[static_cast<Eigen::Index>(j)];
        return s;
    }
};

inline BoundaryBall ball_members(const BoundaryMesh& m, std::size_t center, double r) {
    BoundaryBall b;
    b.center = center;
    b.radius = r;
    const BasePoint bp = base_point(m.domain, m.nodes[center]);
    for (std::size_t j = 0; j < m.size(); ++j)
        if (std::sqrt(std::abs(levi_g(m.domain, bp, m.nodes[j]))) < r) b.members.push_back(j);
    return b;
}

}  // namespace szego
