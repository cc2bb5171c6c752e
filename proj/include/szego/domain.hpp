#pragma once

#include "core.hpp"
#include "quadrature.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <vector>

namespace szego {

enum class DomainKind { Ball, Ellipsoid, PerturbedBall };

// Catalog domain. Immutable after construction.
struct Domain {
    DomainKind kind = DomainKind::Ball;
    int n = 2;
    std::vector<double> a;  // ellipsoid coefficients (all ones otherwise)
    double kappa = 0.0;     // perturbation amplitude
    double mu = 0.5;        // cut-off radius; unused when chi is global

    std::string name() const {
        switch (kind) {
            case DomainKind::Ball: return "ball";
            case DomainKind::Ellipsoid: return "ellipsoid";
            case DomainKind::PerturbedBall: return "perturbed_ball";
        }
        return "?";
    }
    // Ball and ellipsoids use chi = 1 everywhere.
    bool global_chi() const { return kind != DomainKind::PerturbedBall; }
    bool smooth_hessian_exact() const { return kind != DomainKind::PerturbedBall || kappa == 0.0; }
    Point interior_witness() const { return Point::Zero(n); }
};

inline Domain make_ball(int n = 2) {
    Domain d;
    d.kind = DomainKind::Ball;
    d.n = n;
    d.a.assign(n, 1.0);
    return d;
}

inline Domain make_ellipsoid(std::vector<double> a) {
    if (a.size() < 2) throw ConfigError("ellipsoid needs at least two coefficients");
    for (double v : a)
        if (!(v > 0.0)) throw ConfigError("ellipsoid coefficients must be positive");
    Domain d;
    d.kind = DomainKind::Ellipsoid;
    d.n = static_cast<int>(a.size());
    d.a = std::move(a);
    return d;
}

inline Domain make_perturbed_ball(int n = 2, double kappa = 0.1, double mu = 0.5) {
    if (kappa < 0.0) throw ConfigError("kappa must be nonnegative");
    if (!(mu > 0.0)) throw ConfigError("mu must be positive");
    Domain d;
    d.kind = DomainKind::PerturbedBall;
    d.n = n;
    d.a.assign(n, 1.0);
    d.kappa = kappa;
    d.mu = mu;
    return d;
}

inline void check_dim(int n) {
    if (n < 2) throw ConfigError("dimension n must be at least 2");
    if (n > kMaxDim) throw ConfigError("dimension n > 3 is not supported");
}

inline Domain domain_from_json(const nlohmann::json& j) {
    const std::string name = j.value("name", std::string{});
    const int n = j.value("n", 2);
    check_dim(n);
    if (name == "ball") return make_ball(n);
    if (name == "ellipsoid") {
        std::vector<double> a = j.contains("a") ? j.at("a").get<std::vector<double>>() : std::vector<double>{};
        if (a.empty()) {
            a.assign(n, 1.0);
            a[1] = 2.0;
        }
        if (static_cast<int>(a.size()) != n) throw ConfigError("ellipsoid: length of a must equal n");
        return make_ellipsoid(a);
    }
    if (name == "perturbed_ball") return make_perturbed_ball(n, j.value("kappa", 0.1), j.value("mu", 0.5));
    throw ConfigError("unknown domain name '" + name + "'");
}

inline nlohmann::json domain_to_json(const Domain& d) {
    nlohmann::json j;
    j["name"] = d.name();
    j["n"] = d.n;
    if (d.kind == DomainKind::Ellipsoid) j["a"] = d.a;
    if (d.kind == DomainKind::PerturbedBall) {
        j["kappa"] = d.kappa;
        j["mu"] = d.mu;
    }
    return j;
}

//------------------------------------------------------------------------------
// Defining functions and derivatives (closed form)
//------------------------------------------------------------------------------

inline double eval_rho(const Domain& d, const Point& z) {
    double s = -1.0;
    for (int j = 0; j < d.n; ++j) s += d.a[j] * std::norm(z[j]);
    if (d.kind == DomainKind::PerturbedBall) {
        const double x = std::abs(z[0].real());
        s += d.kappa * x * x * x;
    }
    return s;
}

// Components d rho / d z_j.
inline Point eval_del_rho(const Domain& d, const Point& w) {
    Point r(d.n);
    for (int j = 0; j < d.n; ++j) r[j] = d.a[j] * std::conj(w[j]);
    if (d.kind == DomainKind::PerturbedBall) {
        const double x = w[0].real();
        r[0] += 1.5 * d.kappa * x * std::abs(x);
    }
    return r;
}

// Real gradient ordered (x_1, y_1, ..., x_n, y_n).
inline RealVec eval_grad_rho(const Domain& d, const Point& z) {
    const Point p = eval_del_rho(d, z);
    RealVec g(2 * d.n);
    for (int j = 0; j < d.n; ++j) {
        g[2 * j] = 2.0 * p[j].real();
        g[2 * j + 1] = -2.0 * p[j].imag();
    }
    return g;
}

// Gradient read as a complex vector: grad_j = rho_{x_j} + i rho_{y_j} = 2 conj(rho_j).
inline Point complex_gradient(const Domain& d, const Point& z) {
    return 2.0 * eval_del_rho(d, z).conjugate();
}

struct Hessians {
    SmallMat holo;   // d^2 rho / dz_j dz_k
    SmallMat mixed;  // d^2 rho / dz_j dconj(z_k)
};

inline Hessians eval_hessians(const Domain& d, const Point& w) {
    Hessians h;
    h.holo = SmallMat::Zero(d.n, d.n);
    h.mixed = SmallMat::Zero(d.n, d.n);
    for (int j = 0; j < d.n; ++j) h.mixed(j, j) = d.a[j];
    if (d.kind == DomainKind::PerturbedBall) {
        // d^2/dx^2 (kappa |x|^3) = 6 kappa |x|; each complex derivative contributes 1/2.
        const double q = 1.5 * d.kappa * std::abs(w[0].real());
        h.holo(0, 0) += q;
        h.mixed(0, 0) += q;
    }
    return h;
}

// Radius r > 0 with rho(r u) = 0 for a unit direction u.
inline double boundary_radius(const Domain& d, const Point& u) {
    double q = 0.0;
    for (int j = 0; j < d.n; ++j) q += d.a[j] * std::norm(u[j]);
    double r = 1.0 / std::sqrt(q);
    if (d.kind != DomainKind::PerturbedBall || d.kappa == 0.0) return r;
    const double c = d.kappa * std::pow(std::abs(u[0].real()), 3);
    // q r^2 + c r^3 - 1 is increasing in r > 0.
    for (int it = 0; it < 60; ++it) {
        const double f = q * r * r + c * r * r * r - 1.0;
        const double df = 2.0 * q * r + 3.0 * c * r * r;
        const double dr = f / df;
        r -= dr;
        if (std::abs(dr) < 1e-16 * r) break;
    }
    return r;
}

inline double check_strict_psh(const Domain& d, const std::vector<Point>& samples) {
    double mn = std::numeric_limits<double>::infinity();
    for (const auto& p : samples) {
        const Hessians h = eval_hessians(d, p);
        Eigen::SelfAdjointEigenSolver<SmallMat> es(h.mixed, Eigen::EigenvaluesOnly);
        mn = std::min(mn, es.eigenvalues().minCoeff());
    }
    if (!(mn > 0.0)) throw ConfigError("domain is not strictly plurisubharmonic on the sample");
    return mn;
}

//------------------------------------------------------------------------------
// Smoothed holomorphic Hessian
//------------------------------------------------------------------------------

// Mollified |x|: m(x) = (|.| * phi_h)(x) with phi_h a normalized compact bump.
class MollifiedAbs {
public:
    MollifiedAbs() = default;
    explicit MollifiedAbs(double h) : h_(h) {
        // even integrand: integrate over [0, 1], the same rule value() uses at x = 0
        const Rule g = gauss_on(0.0, 1.0, kNodes);
        double mass = 0.0, first = 0.0;
        for (int i = 0; i < kNodes; ++i) {
            mass += 2.0 * g.w[i] * bump(g.x[i]);
            first += 2.0 * g.w[i] * g.x[i] * bump(g.x[i]);
        }
        norm_ = 1.0 / mass;
        m1_ = first * norm_;
    }
    double h() const { return h_; }
    // sup_x |m(x) - |x|| = h * m1, attained at x = 0.
    double m1() const { return m1_; }

    double value(double x) const {
        if (h_ <= 0.0 || std::abs(x) >= h_) return std::abs(x);
        const double s = x / h_;
        return h_ * (piece(-1.0, s, s, -1.0) + piece(s, 1.0, s, 1.0));
    }
    // m'(x) = 2 Phi(x / h) - 1.
    double deriv(double x) const {
        if (h_ <= 0.0 || std::abs(x) >= h_) return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
        const double s = x / h_;
        const Rule g = gauss_on(-1.0, s, kNodes);
        double cdf = 0.0;
        for (int i = 0; i < kNodes; ++i) cdf += g.w[i] * bump(g.x[i]);
        return 2.0 * cdf * norm_ - 1.0;
    }

private:
    static constexpr int kNodes = 48;
    static double bump(double t) { return std::abs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0; }
    // sgn * integral over [lo, hi] of (t - s) phi(t) dt
    double piece(double lo, double hi, double s, double sgn) const {
        if (hi <= lo) return 0.0;
        const Rule g = gauss_on(lo, hi, kNodes);
        double acc = 0.0;
        for (int i = 0; i < kNodes; ++i) acc += g.w[i] * (g.x[i] - s) * bump(g.x[i]);
        return sgn * acc * norm_;
    }
    double h_ = 0.0;
    double norm_ = 1.0;
    double m1_ = 0.0;
};

struct SmoothedHessian {
    double eps = 0.0;
    double h = 0.0;          // mollification scale, 0 when the Hessian is already smooth
    double sup_error = 0.0;  // measured on the construction sample
    double c_eps = 0.0;      // sup of |grad tau| over the sample
    Domain domain;
    MollifiedAbs moll;

    bool exact() const { return h == 0.0; }

    SmallMat tau(const Point& w) const {
        SmallMat t = eval_hessians(domain, w).holo;
        if (!exact()) t(0, 0) = 1.5 * domain.kappa * moll.value(w[0].real());
        return t;
    }
    // Derivative of tau_{00} in x = Re w_1; all other entries are constant.
    double dtau_dx(const Point& w) const {
        if (exact()) return 0.0;
        return 1.5 * domain.kappa * moll.deriv(w[0].real());
    }
};

inline SmoothedHessian exact_hessian(const Domain& d) {
    SmoothedHessian s;
    s.domain = d;
    return s;
}

// Scale below which the mollifier is finer than the sample can resolve.
inline double mollifier_floor(const std::vector<Point>& sample, int n) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : sample) {
        lo = std::min(lo, p[0].real());
        hi = std::max(hi, p[0].real());
    }
    const double spacing = (hi - lo) / std::pow(static_cast<double>(std::max<std::size_t>(sample.size(), 1)), 1.0 / (2 * n - 1));
    return 1e-3 * spacing;
}

inline SmoothedHessian smooth_hessian(const Domain& d, double eps, const std::vector<Point>& sample) {
    if (!(eps > 0.0)) throw ConfigError("eps must be positive");
    SmoothedHessian s;
    s.domain = d;
    s.eps = eps;
    if (d.smooth_hessian_exact()) return s;

    auto sample_error = [&](double h) {
        MollifiedAbs m(h);
        double e = 0.0;
        for (const auto& p : sample) {
            const double x = p[0].real();
            e = std::max(e, 1.5 * d.kappa * std::abs(m.value(x) - std::abs(x)));
        }
        return e;
    };

    const double floor = mollifier_floor(sample, d.n);
    // a sample too coarse to see the kink would accept any scale
    if (eps / (1.5 * d.kappa * MollifiedAbs(1.0).m1()) < floor)
        throw UnresolvableEps("unresolvable-eps: mollification scale below sample resolution for eps = " + std::to_string(eps));
    // Grow until the test fails (or the scale covers the sample), then bisect.
    double good = 0.0, bad = 0.0, h = eps / (1.5 * d.kappa);
    if (sample_error(h) <= eps) {
        good = h;
        while (bad == 0.0) {
            h *= 2.0;
            if (h > 4.0) break;
            if (sample_error(h) <= eps) good = h;
            else bad = h;
        }
    } else {
        bad = h;
        while (good == 0.0) {
            h *= 0.5;
            if (h < floor) throw UnresolvableEps("unresolvable-eps: mollification scale below sample resolution for eps = " + std::to_string(eps));
            if (sample_error(h) <= eps) good = h;
            else bad = h;
        }
    }
    if (bad > 0.0) {
        for (int it = 0; it < 40 && bad - good > 1e-6 * good; ++it) {
            const double mid = 0.5 * (good + bad);
            if (sample_error(mid) <= eps) good = mid;
            else bad = mid;
        }
    }
    if (good < floor) throw UnresolvableEps("unresolvable-eps: mollification scale below sample resolution for eps = " + std::to_string(eps));
    s.h = good;
    s.moll = MollifiedAbs(good);
    s.sup_error = sample_error(good);
    double c = 0.0;
    for (const auto& p : sample) c = std::max(c, std::abs(s.dtau_dx(p)));
    s.c_eps = c;
    return s;
}

}  // namespace szego
