#pragma once

#include "core.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace szego {

struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre on [-1, 1], Newton on the three-term recurrence.
inline Rule gauss_legendre(int m) {
    static std::mutex mu;
    static std::map<int, Rule> cache;
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = cache.find(m);
        if (it != cache.end()) return it->second;
    }
    Rule r;
    r.x.resize(m);
    r.w.resize(m);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= m; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (m == 1) p0 = 1.0;
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= m; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = m * (x * p1 - p0) / (x * x - 1.0);
        r.x[i] = -x;
        r.x[m - 1 - i] = x;
        r.w[i] = r.w[m - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    if (m % 2 == 1) r.x[m / 2] = 0.0;
    std::lock_guard<std::mutex> lk(mu);
    cache.emplace(m, r);
    return r;
}

// Gauss rule mapped to [a, b].
inline Rule gauss_on(double a, double b, int m) {
    Rule g = gauss_legendre(m);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < m; ++i) {
        g.x[i] = c + h * g.x[i];
        g.w[i] *= h;
    }
    return g;
}

// Composite Gauss rule over consecutive panel breakpoints.
inline Rule composite_gauss(const std::vector<double>& breaks, int m) {
    Rule r;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        Rule g = gauss_on(breaks[p], breaks[p + 1], m);
        r.x.insert(r.x.end(), g.x.begin(), g.x.end());
        r.w.insert(r.w.end(), g.w.begin(), g.w.end());
    }
    return r;
}

// Periodic trapezoid on [a, a + 2pi).
inline Rule periodic_trapezoid(int m, double a = 0.0) {
    Rule r;
    r.x.resize(m);
    r.w.assign(m, 2.0 * kPi / m);
    for (int i = 0; i < m; ++i) r.x[i] = a + 2.0 * kPi * i / m;
    return r;
}

// Breakpoints 0, t_min, q t_min, ..., T, geometric toward 0.
inline std::vector<double> geometric_breaks(double t_min, double T, double ratio) {
    std::vector<double> b{0.0};
    double t = t_min;
    while (t < T / ratio) {
        b.push_back(t);
        t *= ratio;
    }
    b.push_back(T);
    return b;
}

//------------------------------------------------------------------------------
// Smooth transition profiles
//------------------------------------------------------------------------------

// C-infinity step: 0 for u <= 0, 1 for u >= 1.
inline double smooth_step(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1.0 - u));
    return a / (a + b);
}

inline double smooth_step_deriv(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1.0 - u));
    const double da = a / (u * u), db = -b / ((1.0 - u) * (1.0 - u));
    return (da * b - a * db) / ((a + b) * (a + b));
}

// 1 on [0, lo], 0 on [hi, inf), smooth in between.
inline double plateau(double t, double lo, double hi) { return 1.0 - smooth_step((t - lo) / (hi - lo)); }

inline double plateau_deriv(double t, double lo, double hi) {
    return -smooth_step_deriv((t - lo) / (hi - lo)) / (hi - lo);
}

}  // namespace szego
