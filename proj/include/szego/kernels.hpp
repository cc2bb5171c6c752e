#pragma once

#include "mesh.hpp"

#include <optional>

namespace szego {

enum class KernelKind {
    Identity,
    G0,
    GEps,
    CfDensity,
    Essential,
    AdjointEssential,
    TruncatedEssential,
    TruncatedAdjoint,
    AntisymA,
};

inline std::string kernel_kind_name(KernelKind k) {
    switch (k) {
        case KernelKind::Identity: return "identity";
        case KernelKind::G0: return "g0";
        case KernelKind::GEps: return "g_eps";
        case KernelKind::CfDensity: return "cf_density";
        case KernelKind::Essential: return "essential";
        case KernelKind::AdjointEssential: return "adjoint_essential";
        case KernelKind::TruncatedEssential: return "truncated_essential";
        case KernelKind::TruncatedAdjoint: return "truncated_adjoint";
        case KernelKind::AntisymA: return "antisym_A";
    }
    return "?";
}

inline KernelKind kernel_kind_from_name(const std::string& s) {
    for (auto k : {KernelKind::Identity, KernelKind::G0, KernelKind::GEps, KernelKind::CfDensity, KernelKind::Essential,
                   KernelKind::AdjointEssential, KernelKind::TruncatedEssential, KernelKind::TruncatedAdjoint,
                   KernelKind::AntisymA})
        if (kernel_kind_name(k) == s) return k;
    throw ConfigError("unknown kernel kind '" + s + "'");
}

struct KernelSpec {
    KernelKind kind = KernelKind::Essential;
    double eps = 0.0;
    double s = 0.0;
    Measure measure = Measure::Lambda;

    bool truncated() const {
        return kind == KernelKind::TruncatedEssential || kind == KernelKind::TruncatedAdjoint || kind == KernelKind::AntisymA;
    }
    void validate() const {
        if (truncated() && !(s > 0.0)) throw ConfigError("truncated kernels need s > 0");
        if (eps < 0.0) throw ConfigError("eps must be nonnegative");
    }
    nlohmann::json to_json() const {
        nlohmann::json j;
        j["kind"] = kernel_kind_name(kind);
        j["eps"] = eps;
        j["s"] = s;
        j["measure"] = measure_name(measure);
        return j;
    }
    static KernelSpec from_json(const nlohmann::json& j) {
        KernelSpec k;
        k.kind = kernel_kind_from_name(j.at("kind").get<std::string>());
        k.eps = j.value("eps", 0.0);
        k.s = j.value("s", 0.0);
        k.measure = measure_from_name(j.value("measure", std::string("lambda")));
        return k;
    }
};

inline constexpr double kSingularFloor = 1e-14;

inline cplx inv_pow(cplx g, int n) {
    if (std::abs(g) < kSingularFloor) throw NearSingularity("|g| below the near-singularity floor");
    cplx p = g;
    for (int k = 1; k < n; ++k) p *= g;
    return 1.0 / p;
}

//------------------------------------------------------------------------------
// Point-level kernels
//------------------------------------------------------------------------------

inline cplx eval_essential(const Domain& dom, const SmoothedHessian& sm, const Point& w, const Point& z) {
    return inv_pow(eval_g_eps(dom, sm, w, z), dom.n);
}

inline cplx eval_adjoint_essential(const Domain& dom, const SmoothedHessian& sm, const Point& w, const Point& z) {
    return inv_pow(std::conj(eval_g_eps(dom, sm, z, w)), dom.n);
}

// Generating form G_k(w, z) and the matrix of dbar_w G (entries dG_k / dconj(w_l)).
struct GeneratingForm {
    Point G;
    SmallMat M;
    cplx g;
};

inline GeneratingForm generating_form(const Domain& dom, const SmoothedHessian& sm, const Point& w, const Point& z) {
    const int n = dom.n;
    const Point u = w - z;
    const Point d = eval_del_rho(dom, w);
    const SmallMat tau = sm.tau(w);
    const SmallMat mixed = eval_hessians(dom, w).mixed;
    const double dtx = sm.exact() ? (dom.kind == DomainKind::PerturbedBall
                                         ? 1.5 * dom.kappa * (w[0].real() > 0 ? 1.0 : (w[0].real() < 0 ? -1.0 : 0.0))
                                         : 0.0)
                                  : sm.dtau_dx(w);
    Point L(n);
    for (int k = 0; k < n; ++k) {
        cplx s = d[k];
        for (int j = 0; j < n; ++j) s -= 0.5 * tau(j, k) * u[j];
        L[k] = s;
    }
    SmallMat ML = mixed;  // d L_k / dconj(w_l)
    ML(0, 0) -= 0.5 * (0.5 * dtx) * u[0];

    GeneratingForm out;
    const double r = u.norm();
    double chi = 1.0, dchi = 0.0;
    if (!dom.global_chi()) {
        chi = plateau(r, 0.5 * dom.mu, dom.mu);
        dchi = r > 0.0 ? plateau_deriv(r, 0.5 * dom.mu, dom.mu) : 0.0;
    }
    out.G.resize(n);
    out.M.resize(n, n);
    for (int k = 0; k < n; ++k) out.G[k] = chi * L[k] + (1.0 - chi) * std::conj(u[k]);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            const cplx dchi_l = r > 0.0 ? dchi * u[l] / (2.0 * r) : 0.0;
            out.M(k, l) = dchi_l * (L[k] - std::conj(u[k])) + chi * ML(k, l) + (k == l ? (1.0 - chi) : 0.0);
        }
    out.g = pair(out.G, u);
    return out;
}

// Density of the Cauchy-Fantappie kernel with respect to d sigma at w,
// oriented so that the Leray-Levi form pulls back positively.
inline cplx eval_cf_density(const Domain& dom, const SmoothedHessian& sm, const Point& w, const Point& z, const Frame& frame) {
    const auto t = frame.tangents();
    const cplx ll = leray_levi_form(dom, w, t);
    const cplx orient = std::abs(ll) / ll;
    const GeneratingForm gf = generating_form(dom, sm, w, z);
    return orient * top_form(gf.G, gf.M, t) / two_pi_i_pow(dom.n) * inv_pow(gf.g, dom.n);
}

// |K(w,z) - K(w,z')| delta(w,z)^{2n+1} / delta(z,z'); empty if the sample is not admissible.
inline std::optional<double> kernel_difference_ratio(const Domain& dom, const SmoothedHessian& sm, const Point& w,
                                                     const Point& z, const Point& zp, double c) {
    const double dwz = quasi_distance(dom, w, z);
    const double dzz = quasi_distance(dom, z, zp);
    if (dzz <= 0.0 || dwz < c * dzz) return std::nullopt;
    const cplx diff = eval_essential(dom, sm, w, z) - eval_essential(dom, sm, w, zp);
    return std::abs(diff) * std::pow(dwz, 2 * dom.n + 1) / dzz;
}

// Same in the first variable: |K(w,z) - K(w',z)| delta(w,z)^{2n+1} / delta(w,w').
inline std::optional<double> kernel_difference_ratio_w(const Domain& dom, const SmoothedHessian& sm, const Point& w,
                                                       const Point& wp, const Point& z, double c) {
    const double dwz = quasi_distance(dom, w, z);
    const double dww = quasi_distance(dom, w, wp);
    if (dww <= 0.0 || dwz < c * dww) return std::nullopt;
    const cplx diff = eval_essential(dom, sm, w, z) - eval_essential(dom, sm, wp, z);
    return std::abs(diff) * std::pow(dwz, 2 * dom.n + 1) / dww;
}

//------------------------------------------------------------------------------
// Node-level evaluator for assembly
//------------------------------------------------------------------------------

// Caches base-point data per node. Immutable after construction.
class KernelEvaluator {
public:
    KernelEvaluator(const BoundaryMesh& mesh, SmoothedHessian sm, std::optional<CutoffCalibration> cal = std::nullopt)
        : mesh_(&mesh), sm_(std::move(sm)), cal_(std::move(cal)) {
        const auto N = mesh.size();
        exact_.reserve(N);
        smooth_.reserve(N);
        for (std::size_t i = 0; i < N; ++i) {
            exact_.push_back(base_point(mesh.domain, mesh.nodes[i]));
            smooth_.push_back(base_point(mesh.domain, mesh.nodes[i], &sm_));
        }
    }

    const BoundaryMesh& mesh() const { return *mesh_; }
    const Domain& domain() const { return mesh_->domain; }
    const SmoothedHessian& smoothed() const { return sm_; }
    const std::optional<CutoffCalibration>& calibration() const { return cal_; }
    int n() const { return mesh_->domain.n; }

    // g_eps(node_w, node_z) and g_0(node_w, node_z)
    cplx g_eps(std::size_t w, std::size_t z) const { return levi_g(domain(), smooth_[w], mesh_->nodes[z]); }
    cplx g0(std::size_t w, std::size_t z) const { return levi_g(domain(), exact_[w], mesh_->nodes[z]); }
    double delta(std::size_t w, std::size_t z) const { return std::sqrt(std::abs(g0(w, z))); }

    double chi_tilde(std::size_t center, double r, std::size_t w) const {
        if (delta(center, w) >= r) return 0.0;
        const Point u = mesh_->nodes[center] - mesh_->nodes[w];
        const double m = std::hypot(pair(exact_[center].d, u).imag(), u.squaredNorm());
        return plateau(m / (cal().c * r * r), 0.5, 1.0);
    }
    double chi_sym(std::size_t w, std::size_t z, double s) const {
        const double a = chi_tilde(w, s, z);
        return a == 0.0 ? 0.0 : a * chi_tilde(z, s, w);
    }

    // Kernel value K(node_w, node_z) for w != z.
    cplx value(const KernelSpec& spec, std::size_t w, std::size_t z) const {
        const int n = this->n();
        switch (spec.kind) {
            case KernelKind::Identity: return w == z ? 1.0 : 0.0;
            case KernelKind::G0: return g0(w, z);
            case KernelKind::GEps: return g_eps(w, z);
            case KernelKind::CfDensity:
                return eval_cf_density(domain(), sm_, mesh_->nodes[w], mesh_->nodes[z], mesh_->frame(w)) /
                       mesh_->lambda_values[static_cast<Eigen::Index>(w)];
            case KernelKind::Essential: return inv_pow(g_eps(w, z), n);
            case KernelKind::AdjointEssential: return inv_pow(std::conj(g_eps(z, w)), n);
            case KernelKind::TruncatedEssential: {
                const double c = chi_sym(w, z, spec.s);
                return c == 0.0 ? cplx(0.0) : c * inv_pow(g_eps(w, z), n);
            }
            case KernelKind::TruncatedAdjoint: {
                const double c = chi_sym(w, z, spec.s);
                return c == 0.0 ? cplx(0.0) : c * inv_pow(std::conj(g_eps(z, w)), n);
            }
            case KernelKind::AntisymA: {
                const double c = chi_sym(w, z, spec.s);
                return c == 0.0 ? cplx(0.0) : c * (inv_pow(g_eps(w, z), n) - inv_pow(std::conj(g_eps(z, w)), n));
            }
        }
        return 0.0;
    }

private:
    const CutoffCalibration& cal() const {
        if (!cal_) throw ConfigError("truncated kernels need a cut-off calibration");
        return *cal_;
    }
    const BoundaryMesh* mesh_;
    SmoothedHessian sm_;
    std::optional<CutoffCalibration> cal_;
    std::vector<BasePoint> exact_, smooth_;
};

// Truncated and antisymmetric kernels at arbitrary points.
inline cplx eval_truncated(KernelKind kind, const Domain& dom, const SmoothedHessian& sm, const CutoffCalibration& cal,
                           const Point& w, const Point& z, double s) {
    const double chi = cutoff_chi_sym(dom, cal, w, z, s);
    if (chi == 0.0) return 0.0;
    switch (kind) {
        case KernelKind::TruncatedEssential: return chi * eval_essential(dom, sm, w, z);
        case KernelKind::TruncatedAdjoint: return chi * eval_adjoint_essential(dom, sm, w, z);
        case KernelKind::AntisymA: return chi * (eval_essential(dom, sm, w, z) - eval_adjoint_essential(dom, sm, w, z));
        default: throw ConfigError("eval_truncated: not a truncated kind");
    }
}

}  // namespace szego
