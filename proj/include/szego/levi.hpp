#pragma once

#include "domain.hpp"

namespace szego {

// Per-base-point data for the Levi denominator: w, the covector d rho(w),
// and the holomorphic Hessian in use (exact or smoothed).
struct BasePoint {
    Point w;
    Point d;
    SmallMat H;
    bool zero_hessian = true;
};

inline BasePoint base_point(const Domain& dom, const Point& w, const SmoothedHessian* sm = nullptr) {
    BasePoint b;
    b.w = w;
    b.d = eval_del_rho(dom, w);
    b.H = sm ? sm->tau(w) : eval_hessians(dom, w).holo;
    b.zero_hessian = b.H.isZero(0.0);
    return b;
}

// Levi polynomial sum d_j u_j - 1/2 sum H_jk u_j u_k with u = w - z.
inline cplx levi_polynomial(const BasePoint& b, const Point& u) {
    cplx L = pair(b.d, u);
    if (!b.zero_hessian) {
        cplx q = 0.0;
        for (int j = 0; j < u.size(); ++j)
            for (int k = 0; k < u.size(); ++k) q += b.H(j, k) * u[j] * u[k];
        L -= 0.5 * q;
    }
    return L;
}

// chi L + (1 - chi)|w - z|^2, chi a bump in |w - z| on [mu/2, mu].
inline cplx levi_g(const Domain& dom, const BasePoint& b, const Point& z) {
    const Point u = b.w - z;
    const cplx L = levi_polynomial(b, u);
    if (dom.global_chi()) return L;
    const double r = u.norm();
    if (r <= 0.5 * dom.mu) return L;
    const double chi = plateau(r, 0.5 * dom.mu, dom.mu);
    return chi * L + (1.0 - chi) * r * r;
}

inline cplx eval_g0(const Domain& dom, const Point& w, const Point& z) {
    return levi_g(dom, base_point(dom, w), z);
}

inline cplx eval_g_eps(const Domain& dom, const SmoothedHessian& sm, const Point& w, const Point& z) {
    return levi_g(dom, base_point(dom, w, &sm), z);
}

inline double quasi_distance(const Domain& dom, const Point& w, const Point& z) {
    return std::sqrt(std::abs(eval_g0(dom, w, z)));
}

}  // namespace szego
