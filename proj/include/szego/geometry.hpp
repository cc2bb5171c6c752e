#pragma once

#include "levi.hpp"

#include <array>
#include <numeric>

namespace szego {

//------------------------------------------------------------------------------
// Special frames
//------------------------------------------------------------------------------

struct Frame {
    Point base;
    Point inner_normal;
    std::vector<Point> basis;  // e_1 .. e_n, e_n = i * inner_normal
    double c_w = 0.0;          // |grad rho| / 2

    int n() const { return static_cast<int>(base.size()); }
    const Point& e(int j) const { return basis[j]; }

    // Coordinates <z - w, e_j>.
    Point coords(const Point& z) const {
        const Point u = z - base;
        Point c(n());
        for (int j = 0; j < n(); ++j) c[j] = herm(u, basis[j]);
        return c;
    }

    // Real orthonormal basis of the tangent space: e_1, i e_1, ..., e_n.
    std::vector<Point> tangents() const {
        std::vector<Point> t;
        for (int j = 0; j + 1 < n(); ++j) {
            t.push_back(basis[j]);
            t.push_back(kI * basis[j]);
        }
        t.push_back(basis[n() - 1]);
        return t;
    }
};

inline constexpr double kGradFloor = 1e-10;

inline Frame special_frame(const Domain& dom, const Point& w) {
    const Point grad = complex_gradient(dom, w);
    const double g = grad.norm();
    if (g < kGradFloor) throw DegenerateGradient("degenerate gradient at frame base point");
    Frame f;
    f.base = w;
    f.inner_normal = -grad / g;
    f.c_w = 0.5 * g;
    const Point en = kI * f.inner_normal;

    // Gram-Schmidt on the standard basis, largest residual first.
    const int n = dom.n;
    std::vector<Point> resid;
    std::vector<double> size;
    for (int k = 0; k < n; ++k) {
        Point ek = Point::Zero(n);
        ek[k] = 1.0;
        Point r = ek - herm(ek, en) * en;
        size.push_back(r.norm());
        resid.push_back(r);
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return size[a] > size[b]; });
    for (int k : order) {
        if (static_cast<int>(f.basis.size()) == n - 1) break;
        Point v = resid[k];
        for (const auto& q : f.basis) v -= herm(v, q) * q;
        v -= herm(v, en) * en;
        const double nv = v.norm();
        if (nv > 1e-8) f.basis.push_back(v / nv);
    }
    f.basis.push_back(en);
    return f;
}

//------------------------------------------------------------------------------
// Forms on tangent frames
//------------------------------------------------------------------------------

// 2-form sum_{k,l} M_kl dconj(z_l) ^ dz_k evaluated on (a, b).
inline cplx two_form(const SmallMat& M, const Point& a, const Point& b) {
    cplx s = 0.0;
    for (int k = 0; k < a.size(); ++k)
        for (int l = 0; l < a.size(); ++l) s += M(k, l) * (std::conj(a[l]) * b[k] - std::conj(b[l]) * a[k]);
    return s;
}

// (alpha ^ beta^{n-1})(t_1, ..., t_{2n-1}), alpha = sum a_k dz_k.
inline cplx top_form(const Point& a, const SmallMat& M, const std::vector<Point>& t) {
    const int m = static_cast<int>(t.size());
    std::array<cplx, 5> A{};
    std::array<std::array<cplx, 5>, 5> B{};
    for (int i = 0; i < m; ++i) A[i] = pair(a, t[i]);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            B[i][j] = two_form(M, t[i], t[j]);
            B[j][i] = -B[i][j];
        }
    if (m == 3) return A[0] * B[1][2] - A[1] * B[0][2] + A[2] * B[0][1];
    if (m == 5) {
        // beta ^ beta on four vectors, then expand along alpha.
        auto bb = [&](int p, int q, int r, int s) {
            return 2.0 * (B[p][q] * B[r][s] - B[p][r] * B[q][s] + B[p][s] * B[q][r]);
        };
        cplx s = 0.0;
        for (int i = 0; i < 5; ++i) {
            std::array<int, 4> rest{};
            int c = 0;
            for (int j = 0; j < 5; ++j)
                if (j != i) rest[c++] = j;
            const double sg = (i % 2 == 0) ? 1.0 : -1.0;
            s += sg * A[i] * bb(rest[0], rest[1], rest[2], rest[3]);
        }
        return s;
    }
    throw ConfigError("top_form: unsupported dimension");
}

inline cplx two_pi_i_pow(int n) { return std::pow(2.0 * kPi * kI, n); }

// (2 pi i)^{-n} d rho ^ (dbar d rho)^{n-1} on the given tangent vectors.
inline cplx leray_levi_form(const Domain& dom, const Point& w, const std::vector<Point>& t) {
    const Point a = eval_del_rho(dom, w);
    const SmallMat M = eval_hessians(dom, w).mixed;
    return top_form(a, M, t) / two_pi_i_pow(dom.n);
}

inline double leray_levi_density(const Domain& dom, const Point& w, const Frame& frame) {
    const double v = std::abs(leray_levi_form(dom, w, frame.tangents()));
    if (!(v > 0.0) || !std::isfinite(v)) throw MeshError("singular pullback of the Leray-Levi form");
    return v;
}

// |det mixed Hessian| |grad rho|: shape of the closed formula for Lambda.
inline double leray_levi_shape(const Domain& dom, const Point& w) {
    const Hessians h = eval_hessians(dom, w);
    return std::abs(h.mixed.determinant()) * eval_grad_rho(dom, w).norm();
}

inline double leray_levi_closed_formula(const Domain& dom, const Point& w) {
    double fact = 1.0;
    for (int k = 2; k < dom.n; ++k) fact *= k;
    return fact * std::pow(4.0 * kPi, -dom.n) * leray_levi_shape(dom, w);
}

//------------------------------------------------------------------------------
// Cut-offs
//------------------------------------------------------------------------------

// Constants for chi(Im<d rho(w^), w^ - w>/(c r^2) + i|w^ - w|^2/(c r^2)).
struct CutoffCalibration {
    double c = 1.0;        // scaling inside the argument
    double c_prime = 0.0;  // plateau: chi~ = 1 for delta <= c' r
    double k_up = 1.0;     // max delta^2 / m over pilot pairs
    double k_m = 1.0;      // max m / delta^2 over pilot pairs
    double margin = 1.25;
    std::size_t pairs = 0;
};

// m(w^, w) = |Im<d rho(w^), w^ - w> + i |w^ - w|^2|
inline double cutoff_modulus(const Domain& dom, const Point& center, const Point& w) {
    const Point u = center - w;
    const double im = pair(eval_del_rho(dom, center), u).imag();
    return std::hypot(im, u.squaredNorm());
}

inline CutoffCalibration calibrate_cutoff(const Domain& dom, const std::vector<Point>& pilot, std::uint64_t seed = 7,
                                          std::size_t n_pairs = 200000, double margin = 1.25) {
    Rng rng(seed);
    CutoffCalibration cal;
    cal.margin = margin;
    double kup = 0.0, km = 0.0;
    for (std::size_t s = 0; s < n_pairs; ++s) {
        const Point& a = pilot[rng.index(pilot.size())];
        const Point& b = pilot[rng.index(pilot.size())];
        const double d2 = std::abs(eval_g0(dom, a, b));
        const double m = cutoff_modulus(dom, a, b);
        if (d2 < 1e-14 || m < 1e-14) continue;
        kup = std::max(kup, d2 / m);
        km = std::max(km, m / d2);
        ++cal.pairs;
    }
    cal.k_up = kup;
    cal.k_m = km;
    cal.c = 1.0 / (margin * kup);
    cal.c_prime = std::sqrt(cal.c / (2.0 * km));
    return cal;
}

inline double cutoff_chi_tilde(const Domain& dom, const CutoffCalibration& cal, const Point& center, double r, const Point& w) {
    if (!(r > 0.0)) throw RangeError("cut-off scale must be positive");
    if (std::sqrt(std::abs(eval_g0(dom, center, w))) >= r) return 0.0;
    return plateau(cutoff_modulus(dom, center, w) / (cal.c * r * r), 0.5, 1.0);
}

inline double cutoff_chi_sym(const Domain& dom, const CutoffCalibration& cal, const Point& w, const Point& z, double s) {
    return cutoff_chi_tilde(dom, cal, w, s, z) * cutoff_chi_tilde(dom, cal, z, s, w);
}

}  // namespace szego
