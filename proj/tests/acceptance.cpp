// Acceptance run: one PASS/FAIL line per criterion, exit code = number of failures.
// Optional argv[1]: path for the JSON dump of every report.
#include <szego/verify.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>

using namespace szego;

namespace {

struct Tagged {
    VerificationReport r;
    std::string domain;
};

struct Criterion {
    int id;
    std::string title;
    std::function<std::vector<Tagged>()> run;
};

VerifyConfig on(const Domain& d, std::vector<int> ladder) {
    VerifyConfig c;
    c.domain = d;
    c.ladder = std::move(ladder);
    return c;
}

std::string summary(const Tagged& t) {
    const VerificationReport& r = t.r;
    std::ostringstream os;
    os.precision(4);
    os << r.check_name << " [" << t.domain << ']';
    int shown = 0;
    for (const auto& [k, v] : r.measured) {
        if (shown++ == 3) {
            os << " ...";
            break;
        }
        os << ' ' << k << '=' << v;
    }
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    const Domain ball = make_ball(2), ell = make_ellipsoid({1.0, 2.0}), pb = make_perturbed_ball(2);
    const auto each = [&](const std::string& check, std::vector<Domain> doms, const std::function<void(VerifyConfig&)>& tweak,
                          std::vector<int> ladder) {
        std::vector<Tagged> out;
        for (const Domain& d : doms) {
            VerifyConfig c = on(d, ladder);
            tweak(c);
            out.push_back({run_check(check, c), d.name()});
        }
        return out;
    };
    const auto none = [](VerifyConfig&) {};

    const std::vector<Criterion> crits{
        {1, "reproducing property, ball, degree <= 4, rel error < 1e-4 at R=24 and decreasing",
         [&] { return each("reproducing", {ball}, none, {16, 20, 24}); }},
        {2, "Leray-Levi mass of the ball = 1 +- 1e-3 at R=24", [&] { return each("leray_mass", {ball}, none, {24}); }},
        {3, "quasi-distance constants stable within 10% over two refinements",
         [&] {
             auto a = each("quasi_sym", {ball, ell, pb}, none, {12, 16, 20});
             auto b = each("quasi_tri", {ball, ell, pb}, none, {12, 16, 20});
             a.insert(a.end(), b.begin(), b.end());
             return a;
         }},
        {4, "ball measure slope 4 +- 0.2 over dyadic radii, 20 centers", [&] { return each("ball_measure", {ball, pb}, none, {}); }},
        {5, "integral estimates: exponents within 0.15, log fit R^2 > 0.98",
         [&] {
             auto a = each("int_beta", {ball, pb}, none, {});
             auto b = each("int_log", {ball, pb}, none, {});
             a.insert(a.end(), b.begin(), b.end());
             return a;
         }},
        {6, "two-sided bands: width < 20, identical within 10% over eps",
         [&] {
             std::vector<Tagged> out;
             for (const char* k : {"prop1_interior", "prop1_boundary", "corollary2"}) {
                 auto r = each(k, {pb}, none, {});
                 out.insert(out.end(), r.begin(), r.end());
             }
             return out;
         }},
        {7, "ball essential operator self-adjoint to 1e-8 at every resolution",
         [&] { return each("self_adjoint_ball", {ball}, none, {8, 12, 16, 20, 24}); }},
        {8, "identity (c) on the ball: residual < 1e-4 at R=24, degree 8, decreasing",
         [&] { return each("identity_c", {ball}, [](VerifyConfig& c) { c.degree = 8; }, {16, 20, 24}); }},
        {9, "antisymmetric part: slope in eps >= 0.4 and monotone in s",
         [&] {
             return each("antisym_trend", {pb},
                         [](VerifyConfig& c) {
                             c.eps = {0.1, 0.0464, 0.0215, 0.01};
                             c.s0 = 0.6;
                         },
                         {12, 16});
         }},
        {10, "commutator halves with s (ratio >= 2) under the cube bound",
         [&] { return each("commutator_trend", {ball}, none, {12, 16}); }},
        {11, "cube bound dominates the exact norm, zero pattern exact", [&] { return each("cube_bound", {ball, pb}, none, {12}); }},
        {12, "dagger identity 1e-12, weighted projection idempotent and self-adjoint 1e-8",
         [&] { return each("dagger", {pb}, none, {12}); }},
        {13, "inversion path: ball error < 1e-3, perturbed ball decreasing",
         [&] { return each("inversion_621", {ball}, none, {12, 16}); }},
        {14, "Holder boundary rate >= 0.20 for alpha = 0.5", [&] { return each("holder_rate", {ball, pb}, none, {}); }},
    };

    nlohmann::json dump = nlohmann::json::array();
    int fails = 0;
    for (const auto& cr : crits) {
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = true;
        std::vector<Tagged> reps;
        std::string err;
        try {
            reps = cr.run();
            for (const auto& t : reps) ok = ok && t.r.passed;
        } catch (const std::exception& e) {
            ok = false;
            err = e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        fails += ok ? 0 : 1;
        std::printf("%s criterion %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", cr.id, cr.title.c_str(), secs);
        for (const auto& t : reps) {
            std::printf("    %s %s\n", t.r.passed ? "ok  " : "FAIL", summary(t).c_str());
            if (!t.r.note.empty()) std::printf("    note: %s\n", t.r.note.c_str());
            auto j = t.r.to_json();
            j["criterion"] = cr.id;
            j["domain"] = t.domain;
            dump.push_back(j);
        }
        if (!err.empty()) std::printf("    error: %s\n", err.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", fails, crits.size());
    if (argc > 1) write_text(argv[1], dump.dump(1) + "\n");
    return fails;
}
