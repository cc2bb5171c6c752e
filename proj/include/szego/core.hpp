#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace szego {

using cplx = std::complex<double>;

// Points and small matrices live on the stack: n never exceeds 3.
inline constexpr int kMaxDim = 3;
using Point = Eigen::Matrix<cplx, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using RealVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2 * kMaxDim, 1>;
using SmallMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using CMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr cplx kI{0.0, 1.0};

//------------------------------------------------------------------------------
// Errors
//------------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : Error { using Error::Error; };
struct DegenerateGradient : Error { using Error::Error; };
struct UnresolvableEps : Error { using Error::Error; };
struct MeshError : Error { using Error::Error; };
struct RangeError : Error { using Error::Error; };
struct NearSingularity : Error { using Error::Error; };
struct DivergenceRisk : Error { using Error::Error; };
struct ConditioningError : Error { using Error::Error; };
struct HashMismatch : Error { using Error::Error; };

// Hermitian product <u, v> = sum u_j conj(v_j).
inline cplx herm(const Point& u, const Point& v) {
    cplx s = 0.0;
    for (int j = 0; j < u.size(); ++j) s += u[j] * std::conj(v[j]);
    return s;
}

// Bilinear pairing of a covector with a vector: sum a_j v_j.
inline cplx pair(const Point& a, const Point& v) {
    cplx s = 0.0;
    for (int j = 0; j < a.size(); ++j) s += a[j] * v[j];
    return s;
}

inline Point make_point(std::initializer_list<cplx> c) {
    Point p(static_cast<Eigen::Index>(c.size()));
    int j = 0;
    for (auto v : c) p[j++] = v;
    return p;
}

//------------------------------------------------------------------------------
// Threads
//------------------------------------------------------------------------------

inline unsigned thread_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SZEGO_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return hw;
}

// Static block partition keeps results independent of scheduling.
template <class F>
void parallel_for(std::size_t begin, std::size_t end, F&& body) {
    const std::size_t total = end > begin ? end - begin : 0;
    const unsigned nt = static_cast<unsigned>(std::min<std::size_t>(thread_count(), total));
    if (nt <= 1) {
        for (std::size_t i = begin; i < end; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(nt);
    const std::size_t chunk = (total + nt - 1) / nt;
    for (unsigned t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            const std::size_t lo = begin + t * chunk;
            const std::size_t hi = std::min(end, lo + chunk);
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

//------------------------------------------------------------------------------
// Deterministic randomness
//------------------------------------------------------------------------------

// splitmix64; bit-identical everywhere, unlike std distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : s_(seed ^ 0x9E3779B97F4A7C15ull) {}
    std::uint64_t next() {
        std::uint64_t z = (s_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * uniform());
    }
    cplx cnormal() { return {normal(), normal()}; }

private:
    std::uint64_t s_;
};

// Uniform point on the unit sphere of C^n.
inline Point random_sphere_point(Rng& rng, int n) {
    Point p(n);
    for (int j = 0; j < n; ++j) p[j] = rng.cnormal();
    return p / p.norm();
}

//------------------------------------------------------------------------------
// Hashing
//------------------------------------------------------------------------------

inline std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    static const char* dig = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = dig[h & 15u];
        h >>= 4;
    }
    return out;
}

}  // namespace szego
