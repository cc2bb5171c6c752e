#pragma once

#include "kernels.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <functional>
#include <map>
#include <tuple>

namespace szego {

//------------------------------------------------------------------------------
// Weights and the phi catalog
//------------------------------------------------------------------------------

enum class PhiFamily { Const, Re1, Abs1 };

inline PhiFamily phi_family_from_name(const std::string& s) {
    if (s == "const") return PhiFamily::Const;
    if (s == "re1") return PhiFamily::Re1;
    if (s == "abs1") return PhiFamily::Abs1;
    throw ConfigError("unknown phi family '" + s + "'");
}

inline std::string phi_family_name(PhiFamily f) {
    switch (f) {
        case PhiFamily::Const: return "const";
        case PhiFamily::Re1: return "re1";
        case PhiFamily::Abs1: return "abs1";
    }
    return "?";
}

// omega d sigma = phi d lambda
struct WeightVector {
    RVec phi;    // per node
    RVec omega;  // phi * Lambda, density against d sigma
    RVec omega_weights;  // phi * lambda weight
};

inline double phi_value(PhiFamily f, double a, const Point& w) {
    switch (f) {
        case PhiFamily::Const: return 1.0 + a;
        case PhiFamily::Re1: return 1.0 + a * w[0].real();
        case PhiFamily::Abs1: return 1.0 + a * std::norm(w[0]);
    }
    return 1.0;
}

inline WeightVector make_weights(const BoundaryMesh& m, PhiFamily f, double a) {
    WeightVector wv;
    const auto N = static_cast<Eigen::Index>(m.size());
    wv.phi.resize(N);
    for (Eigen::Index i = 0; i < N; ++i) wv.phi[i] = phi_value(f, a, m.nodes[static_cast<std::size_t>(i)]);
    if (!(wv.phi.minCoeff() > 0.0)) throw ConfigError("phi must be strictly positive on the mesh");
    wv.omega = wv.phi.cwiseProduct(m.lambda_values);
    wv.omega_weights = wv.phi.cwiseProduct(m.lambda_weights);
    return wv;
}

//------------------------------------------------------------------------------
// Operator matrices
//------------------------------------------------------------------------------

struct OperatorMatrix {
    CMat entries;  // row i = output at node i; column j carries the weight of node j
    Measure measure = Measure::Lambda;
    RVec weights;  // diagonal of W for the inner product of `measure`
    KernelSpec spec;
    std::string assembly = "plain";
    std::string mesh_hash;

    Eigen::Index size() const { return entries.rows(); }
};

enum class Assembly { Plain, Subtraction };

// entries[i][j] = K(node_j, node_i) weight_j off the diagonal.
inline OperatorMatrix assemble(const KernelSpec& spec, const KernelEvaluator& ev, const RVec& weights,
                               Assembly mode = Assembly::Plain) {
    spec.validate();
    const auto N = static_cast<Eigen::Index>(ev.mesh().size());
    OperatorMatrix T;
    T.spec = spec;
    T.measure = spec.measure;
    T.weights = weights;
    T.assembly = mode == Assembly::Plain ? "plain" : "subtraction";
    T.entries.resize(N, N);
    if (spec.kind == KernelKind::Identity) {
        T.entries.setZero();
        for (Eigen::Index i = 0; i < N; ++i) T.entries(i, i) = weights[i];
        return T;
    }
    parallel_for(0, static_cast<std::size_t>(N), [&](std::size_t iu) {
        const auto i = static_cast<Eigen::Index>(iu);
        cplx rs = 0.0;
        for (Eigen::Index j = 0; j < N; ++j) {
            if (j == i) continue;
            cplx v;
            try {
                v = ev.value(spec, static_cast<std::size_t>(j), iu) * weights[j];
            } catch (const NearSingularity&) {
                throw NearSingularity("near-singular kernel at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
            }
            T.entries(i, j) = v;
            rs += v;
        }
        T.entries(i, i) = mode == Assembly::Plain ? cplx(0.0) : 1.0 - rs;
    });
    return T;
}

// Cauchy transform applied without storing a matrix:
// f(z) + sum_{w != z} K(w, z)[f(w) - f(z)] weight_w.
inline CVec apply_cauchy_boundary(const KernelEvaluator& ev, const RVec& weights, const KernelSpec& spec, const CVec& f) {
    const auto N = static_cast<Eigen::Index>(ev.mesh().size());
    CVec out(N);
    parallel_for(0, static_cast<std::size_t>(N), [&](std::size_t iu) {
        const auto i = static_cast<Eigen::Index>(iu);
        cplx s = f[i];
        for (Eigen::Index j = 0; j < N; ++j) {
            if (j == i) continue;
            s += ev.value(spec, static_cast<std::size_t>(j), iu) * (f[j] - f[i]) * weights[j];
        }
        out[i] = s;
    });
    return out;
}

// Interior Cauchy integral sum_w C1(w, z) f(w) d sigma(w) at arbitrary points z.
inline CVec cauchy_interior(const BoundaryMesh& m, const SmoothedHessian& sm, const std::vector<Point>& targets, const CVec& f) {
    CVec out(static_cast<Eigen::Index>(targets.size()));
    const bool simple = m.domain.global_chi() && sm.exact() && m.domain.kind != DomainKind::PerturbedBall;
    std::vector<Frame> frames;
    if (!simple) {
        frames.reserve(m.size());
        for (std::size_t j = 0; j < m.size(); ++j) frames.push_back(m.frame(j));
    }
    parallel_for(0, targets.size(), [&](std::size_t t) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < m.size(); ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            if (simple) {
                s += inv_pow(eval_g_eps(m.domain, sm, m.nodes[j], targets[t]), m.domain.n) * f[jj] * m.lambda_weights[jj];
            } else {
                s += eval_cf_density(m.domain, sm, m.nodes[j], targets[t], frames[j]) * f[jj] * m.sigma_weights[jj];
            }
        }
        out[static_cast<Eigen::Index>(t)] = s;
    });
    return out;
}

//------------------------------------------------------------------------------
// Adjoints and commutators
//------------------------------------------------------------------------------

// T* = W^{-1} T^H W for the inner product carried by T.
inline OperatorMatrix adjoint_lambda(const OperatorMatrix& T) {
    OperatorMatrix A = T;
    const auto N = T.size();
    A.entries = T.entries.adjoint();
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j) A.entries(i, j) *= T.weights[j] / T.weights[i];
    return A;
}

// T-dagger = phi^{-1} T* phi.
inline OperatorMatrix adjoint_dagger(const OperatorMatrix& T, const RVec& phi) {
    OperatorMatrix A = adjoint_lambda(T);
    const auto N = T.size();
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j) A.entries(i, j) *= phi[j] / phi[i];
    return A;
}

// [T, phi] = T diag(phi) - diag(phi) T
inline OperatorMatrix commutator(const OperatorMatrix& T, const RVec& phi) {
    OperatorMatrix C = T;
    const auto N = T.size();
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j) C.entries(i, j) *= (phi[j] - phi[i]);
    return C;
}

// Commutator [T^s, phi] with kernel K(w,z)(phi(w) - phi(z)). Cells whose
// width is not small against delta (phase) and delta^2 (complex normal)
// are integrated adaptively; the rest are point-sampled. Point sampling alone
// leaves an O(1) nearest-neighbour term because the kernel is unresolved in
// the complex normal direction on a product mesh.
inline OperatorMatrix commutator_corrected(const KernelSpec& spec, const KernelEvaluator& ev, PhiFamily f, double a,
                                           double core_fraction = 0.25, AdaptiveCellOptions opt = {}) {
    spec.validate();
    if (!spec.truncated()) throw ConfigError("corrected commutator needs a truncated kernel");
    if (!ev.calibration()) throw ConfigError("truncated kernels need a cut-off calibration");
    const BoundaryMesh& m = ev.mesh();
    const ProductCells cells(m);
    const auto N = static_cast<Eigen::Index>(m.size());
    const RVec& wts = m.lambda_weights;
    const double width = 2.0 * kPi / m.resolution;
    const CutoffCalibration& cal = *ev.calibration();
    opt.support = std::sqrt(cal.c) * spec.s;  // chi_s vanishes once |w - z|^2 >= c s^2
    opt.core = core_fraction * spec.s;
    OperatorMatrix C;
    C.spec = spec;
    C.measure = Measure::Lambda;
    C.weights = wts;
    C.assembly = "commutator_corrected";
    C.entries.resize(N, N);
    // widest theta panel of the polar rule
    double dth = 0.0;
    {
        const Rule g = gauss_on(0.0, 1.0, m.resolution);
        double t0 = 0.0;
        for (double w : g.w) {
            dth = std::max(dth, std::asin(std::sqrt(std::min(1.0, t0 + w))) - std::asin(std::sqrt(t0)));
            t0 += w;
        }
    }
    parallel_for(0, static_cast<std::size_t>(N), [&](std::size_t iu) {
        const auto i = static_cast<Eigen::Index>(iu);
        const Point& z = m.nodes[iu];
        const double pz = phi_value(f, a, z);
        auto F = [&](const Point& y) -> cplx {
            return eval_truncated(spec.kind, m.domain, ev.smoothed(), cal, y, z, spec.s) * (phi_value(f, a, y) - pz);
        };
        for (Eigen::Index j = 0; j < N; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            const double d2 = std::abs(ev.g0(ju, iu));
            if (j != i && width <= opt.kappa * d2 && dth <= opt.kappa * std::sqrt(d2)) {
                C.entries(i, j) = ev.value(spec, ju, iu) * (phi_value(f, a, m.nodes[ju]) - pz) * wts[j];
            } else {
                C.entries(i, j) = adaptive_cell_integral(cells, ju, z, F, opt);
            }
        }
    });
    return C;
}

// In place: T <- T - T*.
inline void subtract_adjoint_inplace(OperatorMatrix& T) {
    const auto N = T.size();
    for (Eigen::Index i = 0; i < N; ++i) {
        T.entries(i, i) -= std::conj(T.entries(i, i));
        for (Eigen::Index j = i + 1; j < N; ++j) {
            const cplx a = T.entries(i, j), b = T.entries(j, i);
            T.entries(i, j) = a - std::conj(b) * T.weights[j] / T.weights[i];
            T.entries(j, i) = b - std::conj(a) * T.weights[i] / T.weights[j];
        }
    }
}

//------------------------------------------------------------------------------
// Linear operators and norms
//------------------------------------------------------------------------------

// Euclidean operator with its plain conjugate transpose.
struct LinearOp {
    Eigen::Index rows = 0, cols = 0;
    std::function<CVec(const CVec&)> apply;
    std::function<CVec(const CVec&)> apply_adjoint;
};

// W^{1/2} T W^{-1/2}: an isometric copy of T acting on L^2(mu).
inline LinearOp weighted_op(const CMat& T, const RVec& w) {
    const RVec sq = w.cwiseSqrt();
    LinearOp op;
    op.rows = op.cols = T.rows();
    op.apply = [&T, sq](const CVec& x) -> CVec {
        CVec y = x.cwiseQuotient(sq.cast<cplx>());
        return (T * y).cwiseProduct(sq.cast<cplx>());
    };
    op.apply_adjoint = [&T, sq](const CVec& x) -> CVec {
        CVec y = x.cwiseProduct(sq.cast<cplx>());
        return (T.adjoint() * y).cwiseQuotient(sq.cast<cplx>());
    };
    return op;
}

struct PowerResult {
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Largest singular value by power iteration on A^H A.
inline PowerResult power_norm(const LinearOp& A, std::uint64_t seed = 1, double tol = 1e-7, int max_iter = 400) {
    Rng rng(seed);
    CVec x(A.cols);
    for (Eigen::Index i = 0; i < A.cols; ++i) x[i] = rng.cnormal();
    x.normalize();
    PowerResult r;
    double prev = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        const CVec y = A.apply(x);
        const double s = y.norm();
        r.value = s;
        r.iterations = it;
        if (s == 0.0) {
            r.converged = true;
            return r;
        }
        if (it > 3 && std::abs(s - prev) <= tol * s) {
            r.converged = true;
            return r;
        }
        prev = s;
        CVec z = A.apply_adjoint(y);
        const double nz = z.norm();
        if (nz == 0.0) {
            r.converged = true;
            return r;
        }
        x = z / nz;
    }
    return r;
}

inline constexpr Eigen::Index kDenseSvdLimit = 700;

inline double dense_spectral_norm(const CMat& M) {
    if (M.size() == 0) return 0.0;
    Eigen::MatrixXcd C = M;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(C);
    return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

struct NormBracket {
    double lower = 0.0;
    double upper = 0.0;
    double value = 0.0;  // best estimate
    bool converged = true;
};

inline double norm_1(const CMat& T, const RVec& w) {
    double best = 0.0;
    for (Eigen::Index j = 0; j < T.cols(); ++j) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < T.rows(); ++i) s += std::abs(T(i, j)) * w[i];
        best = std::max(best, s / w[j]);
    }
    return best;
}

inline double norm_inf(const CMat& T) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < T.rows(); ++i) best = std::max(best, T.row(i).cwiseAbs().sum());
    return best;
}

inline double norm_2(const CMat& T, const RVec& w, std::uint64_t seed = 1, bool* converged = nullptr) {
    if (T.rows() <= kDenseSvdLimit) {
        const RVec sq = w.cwiseSqrt();
        CMat M = sq.cast<cplx>().asDiagonal() * T * sq.cwiseInverse().cast<cplx>().asDiagonal();
        if (converged) *converged = true;
        return dense_spectral_norm(M);
    }
    const PowerResult r = power_norm(weighted_op(T, w), seed);
    if (converged) *converged = r.converged;
    return r.value;
}

// Weighted l^p norm of a vector.
inline double lp_norm(const CVec& x, const RVec& w, double p) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]), p) * w[i];
    return std::pow(s, 1.0 / p);
}

// Lower bound for the weighted p-norm by the nonlinear power method (gradient ascent
// on ||Tx||_p / ||x||_p with the duality map as the step), from several random starts.
inline double p_norm_lower(const CMat& T, const RVec& w, double p, int starts = 20, std::uint64_t seed = 3, int iters = 60) {
    const double q = p / (p - 1.0);
    auto dual = [](const CVec& v, double r) {
        CVec d(v.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            const double a = std::abs(v[i]);
            d[i] = a > 0.0 ? std::pow(a, r - 1.0) * v[i] / a : cplx(0.0);
        }
        return d;
    };
    // Adjoint of T in the pairing sum x conj(y) w.
    const CMat Tstar = w.cwiseInverse().cast<cplx>().asDiagonal() * T.adjoint() * w.cast<cplx>().asDiagonal();
    Rng rng(seed);
    double best = 0.0;
    for (int s = 0; s < starts; ++s) {
        CVec x(T.cols());
        for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.cnormal();
        if (s == 0) x.setOnes();
        x /= lp_norm(x, w, p);
        for (int it = 0; it < iters; ++it) {
            const CVec y = T * x;
            const double ny = lp_norm(y, w, p);
            best = std::max(best, ny);
            if (ny == 0.0) break;
            const CVec z = Tstar * dual(y / ny, p);
            const CVec xn = dual(z / std::max(lp_norm(z, w, q), 1e-300), q);
            const double nx = lp_norm(xn, w, p);
            if (!(nx > 0.0)) break;
            x = xn / nx;
        }
    }
    return best;
}

inline NormBracket operator_norm(const CMat& T, const RVec& w, double p, std::uint64_t seed = 1) {
    NormBracket b;
    if (!(p >= 1.0)) throw ConfigError("p must be at least 1");
    if (p == 1.0) {
        b.value = b.lower = b.upper = norm_1(T, w);
        return b;
    }
    if (std::isinf(p)) {
        b.value = b.lower = b.upper = norm_inf(T);
        return b;
    }
    bool conv = true;
    const double n2 = norm_2(T, w, seed, &conv);
    if (p == 2.0) {
        b.value = b.lower = b.upper = n2;
        b.converged = conv;
        return b;
    }
    // Riesz-Thorin between the neighbouring exact exponents.
    if (p < 2.0) {
        const double t = 2.0 - 2.0 / p;  // 1/p = (1 - t) + t / 2
        b.upper = std::pow(norm_1(T, w), 1.0 - t) * std::pow(n2, t);
    } else {
        const double t = 1.0 - 2.0 / p;  // 1/p = (1 - t) / 2
        b.upper = std::pow(n2, 1.0 - t) * std::pow(norm_inf(T), t);
    }
    b.lower = std::min(p_norm_lower(T, w, p, 20, seed), b.upper);
    b.value = b.lower;
    b.converged = conv;
    return b;
}

inline NormBracket operator_norm(const OperatorMatrix& T, double p, std::uint64_t seed = 1) {
    return operator_norm(T.entries, T.weights, p, seed);
}

//------------------------------------------------------------------------------
// Hardy space and the Szego projection
//------------------------------------------------------------------------------

inline std::vector<std::vector<int>> multi_indices(int n, int d) {
    std::vector<std::vector<int>> out;
    std::vector<int> a(n, 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == n - 1) {
            a[pos] = left;
            out.push_back(a);
            return;
        }
        for (int k = left; k >= 0; --k) {
            a[pos] = k;
            rec(pos + 1, left - k);
        }
    };
    for (int deg = 0; deg <= d; ++deg) rec(0, deg);
    return out;
}

inline cplx monomial(const Point& z, const std::vector<int>& a) {
    cplx v = 1.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        for (int k = 0; k < a[j]; ++k) v *= z[static_cast<Eigen::Index>(j)];
    return v;
}

struct HardyBasis {
    int degree_cutoff = 0;
    std::vector<std::vector<int>> alphas;
    Eigen::MatrixXcd columns;  // N x C(n + d, n)
};

inline HardyBasis hardy_basis(const BoundaryMesh& m, int d) {
    if (d < 0) throw ConfigError("degree cutoff must be nonnegative");
    HardyBasis B;
    B.degree_cutoff = d;
    B.alphas = multi_indices(m.domain.n, d);
    B.columns.resize(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(B.alphas.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t k = 0; k < B.alphas.size(); ++k)
            B.columns(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = monomial(m.nodes[i], B.alphas[k]);
    return B;
}

// P = W^{-1/2} Q Q^H W^{1/2} with Q an orthonormal basis of W^{1/2} B.
struct SzegoFactor {
    Eigen::MatrixXcd Q;
    RVec sqrt_w;
    double gram_condition = 1.0;

    CVec apply(const CVec& x) const {
        const CVec y = x.cwiseProduct(sqrt_w.cast<cplx>());
        return (Q * (Q.adjoint() * y)).cwiseQuotient(sqrt_w.cast<cplx>());
    }
    CVec apply_adjoint(const CVec& x) const {
        const CVec y = x.cwiseQuotient(sqrt_w.cast<cplx>());
        return (Q * (Q.adjoint() * y)).cwiseProduct(sqrt_w.cast<cplx>());
    }
    CMat matrix() const {
        CMat QQ = Q * Q.adjoint();
        return sqrt_w.cwiseInverse().cast<cplx>().asDiagonal() * QQ * sqrt_w.cast<cplx>().asDiagonal();
    }
};

inline constexpr double kGramConditionLimit = 1e12;

inline SzegoFactor szego_factor(const RVec& weights, const HardyBasis& basis) {
    SzegoFactor f;
    f.sqrt_w = weights.cwiseSqrt();
    const Eigen::MatrixXcd A = f.sqrt_w.cast<cplx>().asDiagonal() * basis.columns;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    const auto& sv = svd.singularValues();
    const double smin = sv[sv.size() - 1];
    f.gram_condition = smin > 0.0 ? (sv[0] / smin) * (sv[0] / smin) : std::numeric_limits<double>::infinity();
    if (!(f.gram_condition <= kGramConditionLimit))
        throw ConditioningError("Gram matrix condition number " + std::to_string(f.gram_condition) + " exceeds 1e12; lower the degree cutoff");
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(A);
    f.Q = qr.householderQ() * Eigen::MatrixXcd::Identity(A.rows(), A.cols());
    return f;
}

inline OperatorMatrix szego_project(const BoundaryMesh& m, const RVec& weights, Measure meas, const HardyBasis& basis) {
    const SzegoFactor f = szego_factor(weights, basis);
    OperatorMatrix P;
    P.entries = f.matrix();
    P.measure = meas;
    P.weights = weights;
    P.spec.kind = KernelKind::Identity;
    P.spec.measure = meas;
    P.assembly = "szego_d" + std::to_string(basis.degree_cutoff);
    (void)m;
    return P;
}

//------------------------------------------------------------------------------
// Neumann inversion
//------------------------------------------------------------------------------

struct NeumannResult {
    CVec x;
    double residual = 0.0;
    int terms = 0;
};

// Solves (I + A) x = rhs by the series sum (-A)^k rhs. `norm2` is ||A||_2 in the
// inner product of the caller; it must be below 1.
inline NeumannResult neumann_solve(const std::function<CVec(const CVec&)>& A, double norm2, const CVec& rhs,
                                   int max_terms, double tol) {
    if (!(norm2 < 1.0)) throw DivergenceRisk("Neumann series refused: ||A||_2 = " + std::to_string(norm2) + " >= 1");
    NeumannResult r;
    const double nr = std::max(rhs.norm(), 1e-300);
    r.x = rhs;
    // (I + A) sum_{m<=k} (-A)^m b - b = -(-A)^{k+1} b, so the next term is the residual.
    CVec next = -A(rhs);
    r.residual = next.norm() / nr;
    while (r.residual >= tol && r.terms < max_terms) {
        r.x += next;
        ++r.terms;
        next = -A(next);
        r.residual = next.norm() / nr;
    }
    return r;
}

inline NeumannResult neumann_invert(const OperatorMatrix& A, const CVec& rhs, int max_terms = 200, double tol = 1e-12) {
    const double n2 = operator_norm(A, 2.0).value;
    return neumann_solve([&](const CVec& v) -> CVec { return A.entries * v; }, n2, rhs, max_terms, tol);
}

//------------------------------------------------------------------------------
// Cube decomposition bound
//------------------------------------------------------------------------------

struct CubeBound {
    double bound = 0.0;  // A * N
    double A = 0.0;
    int N = 0;
    bool hypothesis_i_ok = true;
    std::size_t cubes = 0;
    std::size_t touching_pairs = 0;
};

inline CubeBound cube_partition_bound(const OperatorMatrix& T, const BoundaryMesh& m, double gamma, double p = 2.0) {
    if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
    const int n = m.domain.n;
    const int dim = 2 * n;
    CubeBound cb;
    cb.N = 1;
    for (int k = 0; k < dim; ++k) cb.N *= 3;

    using Key = std::vector<long>;
    std::map<Key, std::vector<Eigen::Index>> cubes;
    std::vector<Key> key_of(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        Key k(dim);
        for (int j = 0; j < n; ++j) {
            k[2 * j] = static_cast<long>(std::floor(m.nodes[i][j].real() / gamma));
            k[2 * j + 1] = static_cast<long>(std::floor(m.nodes[i][j].imag() / gamma));
        }
        key_of[i] = k;
        cubes[k].push_back(static_cast<Eigen::Index>(i));
    }
    cb.cubes = cubes.size();
    auto touching = [&](const Key& a, const Key& b) {
        for (int d = 0; d < dim; ++d)
            if (std::abs(a[d] - b[d]) > 1) return false;
        return true;
    };
    // Hypothesis (i): exact zeros between non-touching cubes.
    const auto Nn = T.size();
    for (Eigen::Index i = 0; i < Nn && cb.hypothesis_i_ok; ++i)
        for (Eigen::Index j = 0; j < Nn; ++j)
            if (T.entries(i, j) != cplx(0.0) && !touching(key_of[static_cast<std::size_t>(i)], key_of[static_cast<std::size_t>(j)])) {
                cb.hypothesis_i_ok = false;
                break;
            }

    std::vector<Key> offsets{Key{}};
    for (int d = 0; d < dim; ++d) {
        std::vector<Key> next;
        for (const auto& o : offsets)
            for (long s : {-1L, 0L, 1L}) {
                Key k = o;
                k.push_back(s);
                next.push_back(k);
            }
        offsets = std::move(next);
    }
    for (const auto& [kr, rows] : cubes)
        for (const auto& off : offsets) {
            Key kc = kr;
            for (int d = 0; d < dim; ++d) kc[d] += off[d];
            const auto it = cubes.find(kc);
            if (it == cubes.end()) continue;
            const auto& cols = it->second;
            ++cb.touching_pairs;
            CMat sub(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
            RVec wr(static_cast<Eigen::Index>(rows.size())), wc(static_cast<Eigen::Index>(cols.size()));
            for (std::size_t a = 0; a < rows.size(); ++a) wr[static_cast<Eigen::Index>(a)] = T.weights[rows[a]];
            for (std::size_t b = 0; b < cols.size(); ++b) wc[static_cast<Eigen::Index>(b)] = T.weights[cols[b]];
            bool nz = false;
            for (std::size_t a = 0; a < rows.size(); ++a)
                for (std::size_t b = 0; b < cols.size(); ++b) {
                    sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = T.entries(rows[a], cols[b]);
                    nz = nz || T.entries(rows[a], cols[b]) != cplx(0.0);
                }
            if (!nz) continue;
            double v;
            if (p == 2.0) {
                // ||W_r^{1/2} S W_c^{-1/2}||
                CMat M = wr.cwiseSqrt().cast<cplx>().asDiagonal() * sub * wc.cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal();
                if (M.rows() <= kDenseSvdLimit && M.cols() <= kDenseSvdLimit) v = dense_spectral_norm(M);
                else {
                    LinearOp op;
                    op.rows = M.rows();
                    op.cols = M.cols();
                    op.apply = [&M](const CVec& x) -> CVec { return M * x; };
                    op.apply_adjoint = [&M](const CVec& x) -> CVec { return M.adjoint() * x; };
                    v = power_norm(op).value;
                }
            } else if (p == 1.0) {
                v = 0.0;
                for (Eigen::Index b = 0; b < sub.cols(); ++b) {
                    double s = 0.0;
                    for (Eigen::Index a = 0; a < sub.rows(); ++a) s += std::abs(sub(a, b)) * wr[a];
                    v = std::max(v, s / wc[b]);
                }
            } else if (std::isinf(p)) {
                v = norm_inf(sub);
            } else {
                throw ConfigError("cube_partition_bound supports p in {1, 2, inf}");
            }
            cb.A = std::max(cb.A, v);
        }
    cb.bound = cb.A * cb.N;
    return cb;
}

}  // namespace szego
