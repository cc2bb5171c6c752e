#include <szego/verify.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace szego;

namespace {

struct RunConfig {
    std::string domain = "ball";
    int n = 2;
    int resolution = 12;
    std::vector<int> ladder;
    std::vector<double> eps{0.1, 0.01, 0.001};
    std::vector<double> s_schedule{1.2, 0.6, 0.3, 0.15};
    int degree = 6;
    std::string measure = "lambda";
    std::string phi = "re1";
    double phi_a = 0.5;
    std::uint64_t seed = 1;
    std::size_t samples = 100000;
    int centers = 20;
    std::string out_dir = ".";
    std::string out;
    std::string mesh_path;
    std::vector<std::string> matrix_paths;
    std::string kernel = "essential";
    std::vector<double> p{1.0, 2.0, kInf};
    std::vector<std::string> checks;
    std::string report_path;
};

// --domain takes a catalog name, inline JSON or a path to a JSON file.
Domain parse_domain(const RunConfig& rc) {
    nlohmann::json j;
    if (!rc.domain.empty() && rc.domain.front() == '{') j = nlohmann::json::parse(rc.domain);
    else if (fs::exists(rc.domain)) j = nlohmann::json::parse(read_text(rc.domain));
    else j = {{"name", rc.domain == "perturbed" ? "perturbed_ball" : rc.domain}, {"n", rc.n}};
    return domain_from_json(j);
}

void validate(const RunConfig& rc) {
    if (rc.resolution < 8) throw ConfigError("resolution must be at least 8 (got " + std::to_string(rc.resolution) + ")");
    for (double e : rc.eps)
        if (!(e > 0.0 && e < 0.5)) throw ConfigError("eps values must lie in (0, 0.5)");
    if (rc.s_schedule.empty()) throw ConfigError("empty s schedule");
    for (std::size_t k = 1; k < rc.s_schedule.size(); ++k)
        if (std::abs(rc.s_schedule[k - 1] / rc.s_schedule[k] - 2.0) > 1e-9) throw ConfigError("s schedule must halve at each step");
    if (!(rc.s_schedule.front() > 0.0)) throw ConfigError("s must be positive");
    if (rc.degree < 0) throw ConfigError("degree must be nonnegative");
}

VerifyConfig verify_config(const RunConfig& rc) {
    VerifyConfig c;
    c.domain = parse_domain(rc);
    c.resolution = rc.resolution;
    c.ladder = rc.ladder;
    c.eps = rc.eps;
    c.seed = rc.seed;
    c.degree = rc.degree;
    c.s0 = rc.s_schedule.front();
    c.halvings = static_cast<int>(rc.s_schedule.size()) - 1;
    c.phi = phi_family_from_name(rc.phi);
    c.phi_a = rc.phi_a;
    c.samples = rc.samples;
    c.centers = rc.centers;
    return c;
}

std::string out_path(const RunConfig& rc, const std::string& name) {
    fs::create_directories(rc.out_dir);
    return (fs::path(rc.out_dir) / name).string();
}

void refuse_mismatch(const std::string& what_a, const std::string& a, const std::string& what_b, const std::string& b) {
    if (a != b) throw HashMismatch("refusing mixed inputs: " + what_a + " hash " + a + " vs " + what_b + " hash " + b);
}

// Mesh from --mesh (checked against the requested domain/resolution) or built fresh.
BoundaryMesh obtain_mesh(const RunConfig& rc, const Domain& dom) {
    if (rc.mesh_path.empty()) return build_mesh(dom, rc.resolution);
    BoundaryMesh m = load_mesh(rc.mesh_path);
    refuse_mismatch("mesh file", mesh_hash(m), "requested", config_hash(mesh_config(dom, rc.resolution, m.scheme)));
    return m;
}

RVec weights_for(const BoundaryMesh& m, Measure meas, const RunConfig& rc) {
    if (meas == Measure::Omega) return make_weights(m, phi_family_from_name(rc.phi), rc.phi_a).omega_weights;
    return measure_weights(m, meas);
}

nlohmann::json run_json(const RunConfig& rc, const Domain& dom, const std::string& mesh_h) {
    return {{"domain", domain_to_json(dom)}, {"resolution", rc.resolution}, {"eps", rc.eps},
            {"s_schedule", rc.s_schedule},   {"degree", rc.degree},         {"measure", rc.measure},
            {"phi", rc.phi},                 {"phi_a", rc.phi_a},           {"seed", rc.seed},
            {"mesh_hash", mesh_h}};
}

int cmd_mesh(const RunConfig& rc) {
    const Domain dom = parse_domain(rc);
    const BoundaryMesh m = build_mesh(dom, rc.resolution);
    const std::string path = rc.out.empty() ? out_path(rc, "mesh.json") : rc.out;
    save_mesh(m, path);
    std::cout << path << " nodes=" << m.size() << " hash=" << mesh_hash(m) << '\n';
    return 0;
}

OperatorMatrix build_operator(const KernelSpec& ks, const BoundaryMesh& m, const RVec& w) {
    const Domain& dom = m.domain;
    const SmoothedHessian sm = hessian_for(dom, ks.eps > 0.0 ? ks.eps : 0.1, m.nodes);
    std::optional<CutoffCalibration> cal;
    if (ks.truncated()) cal = calibrate_cutoff(dom, m.nodes);
    const KernelEvaluator ev(m, sm, cal);
    OperatorMatrix T = assemble(ks, ev, w, ks.truncated() ? Assembly::Plain : Assembly::Subtraction);
    T.mesh_hash = mesh_hash(m);
    return T;
}

int cmd_project(const RunConfig& rc) {
    const Domain dom = parse_domain(rc);
    const BoundaryMesh m = obtain_mesh(rc, dom);
    const Measure meas = measure_from_name(rc.measure);
    const RVec w = weights_for(m, meas, rc);
    const std::string h = config_hash(run_json(rc, dom, mesh_hash(m)));
    KernelSpec ks;
    ks.kind = KernelKind::Essential;
    ks.eps = rc.eps.front();
    ks.measure = meas;
    save_matrix(build_operator(ks, m, w), out_path(rc, "essential.bin"), h);
    for (double s : rc.s_schedule) {
        KernelSpec kt = ks;
        kt.kind = KernelKind::TruncatedEssential;
        kt.s = s;
        std::ostringstream name;
        name << "truncated_s" << s << ".bin";
        save_matrix(build_operator(kt, m, w), out_path(rc, name.str()), h);
    }
    OperatorMatrix P = szego_project(m, w, meas, hardy_basis(m, rc.degree));
    P.mesh_hash = mesh_hash(m);
    save_matrix(P, out_path(rc, "szego_" + rc.measure + ".bin"), h);
    std::cout << "config_hash=" << h << " mesh_hash=" << mesh_hash(m) << '\n';
    return 0;
}

int cmd_assemble(const RunConfig& rc) {
    const Domain dom = parse_domain(rc);
    const BoundaryMesh m = obtain_mesh(rc, dom);
    const Measure meas = measure_from_name(rc.measure);
    KernelSpec ks;
    ks.kind = kernel_kind_from_name(rc.kernel);
    ks.eps = rc.eps.front();
    ks.s = ks.truncated() ? rc.s_schedule.front() : 0.0;
    ks.measure = meas;
    const OperatorMatrix T = build_operator(ks, m, weights_for(m, meas, rc));
    const std::string path = rc.out.empty() ? out_path(rc, rc.kernel + ".bin") : rc.out;
    const std::string h = config_hash(run_json(rc, dom, mesh_hash(m)));
    save_matrix(T, path, h);
    std::cout << path << " N=" << T.size() << " config_hash=" << h << '\n';
    return 0;
}

std::vector<MatrixFile> load_matrices(const RunConfig& rc) {
    std::vector<MatrixFile> out;
    for (const auto& p : rc.matrix_paths) out.push_back(load_matrix(p));
    for (std::size_t k = 1; k < out.size(); ++k)
        refuse_mismatch(rc.matrix_paths[0], out[0].T.mesh_hash, rc.matrix_paths[k], out[k].T.mesh_hash);
    if (!rc.mesh_path.empty() && !out.empty())
        refuse_mismatch("mesh file", mesh_hash(load_mesh(rc.mesh_path)), rc.matrix_paths[0], out[0].T.mesh_hash);
    return out;
}

int cmd_norms(const RunConfig& rc) {
    if (rc.matrix_paths.empty()) throw ConfigError("norms needs --matrix");
    nlohmann::json all = nlohmann::json::array();
    for (const auto& mf : load_matrices(rc)) {
        nlohmann::json j;
        j["config_hash"] = mf.config_hash;
        j["mesh_hash"] = mf.T.mesh_hash;
        j["N"] = mf.T.size();
        auto norms = nlohmann::json::array();
        for (double p : rc.p) {
            const NormBracket b = operator_norm(mf.T, p, rc.seed);
            norms.push_back({{"p", std::isinf(p) ? std::string("inf") : std::to_string(p)},
                             {"lower", b.lower},
                             {"upper", b.upper},
                             {"value", b.value}});
        }
        j["norms"] = norms;
        all.push_back(j);
    }
    const std::string text = all.dump(2) + "\n";
    if (!rc.out.empty()) write_text(rc.out, text);
    std::cout << text;
    return 0;
}

int cmd_verify(const RunConfig& rc) {
    const VerifyConfig vc = verify_config(rc);
    std::string input_hash;
    if (!rc.mesh_path.empty()) {
        const BoundaryMesh m = load_mesh(rc.mesh_path);
        refuse_mismatch("mesh file", mesh_hash(m), "requested", config_hash(mesh_config(vc.domain, rc.resolution, m.scheme)));
        input_hash = mesh_hash(m);
    }
    const auto mats = load_matrices(rc);
    if (!mats.empty()) {
        if (!input_hash.empty()) refuse_mismatch("mesh file", input_hash, rc.matrix_paths[0], mats[0].T.mesh_hash);
        refuse_mismatch(rc.matrix_paths[0], mats[0].T.mesh_hash, "requested",
                        config_hash(mesh_config(vc.domain, rc.resolution, "product")));
    }
    std::vector<std::string> names = rc.checks;
    if (names.empty() || (names.size() == 1 && names[0] == "all")) {
        names.clear();
        for (const auto& e : registry()) names.push_back(e.name);
    }
    std::vector<VerificationReport> reps;
    int failed = 0;
    for (const auto& name : names) {
        VerificationReport r;
        try {
            r = run_check(name, vc);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            r.check_name = name;
            r.anchor = "error";
            r.note = e.what();
        }
        failed += r.passed ? 0 : 1;
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.check_name << (r.note.empty() ? "" : "  (" + r.note + ")") << '\n';
        reps.push_back(std::move(r));
    }
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reps) {
        nlohmann::json j = r.to_json();
        j["config_hash"] = config_hash(vc.to_json());
        arr.push_back(j);
    }
    write_text(out_path(rc, "report.json"), arr.dump(2) + "\n");
    write_text(out_path(rc, "report.csv"), reports_csv(reps));
    return std::min(failed, 99);
}

int cmd_report(const RunConfig& rc) {
    const std::string src = rc.report_path.empty() ? out_path(rc, "report.json") : rc.report_path;
    const auto arr = nlohmann::json::parse(read_text(src));
    std::ostringstream trends, measured;
    trends.precision(12);
    measured.precision(12);
    trends << "check,resolution,value\n";
    measured << "check,key,value\n";
    for (const auto& r : arr) {
        const std::string name = r.at("check_name").get<std::string>();
        for (const auto& t : r.at("mesh_trend")) trends << name << ',' << t[0].get<int>() << ',' << t[1].get<double>() << '\n';
        for (const auto& [k, v] : r.at("measured").items())
            measured << name << ",\"" << k << "\"," << (v.is_number() ? v.get<double>() : std::nan("")) << '\n';
    }
    write_text(out_path(rc, "trends.csv"), trends.str());
    write_text(out_path(rc, "measured.csv"), measured.str());
    std::cout << out_path(rc, "trends.csv") << '\n' << out_path(rc, "measured.csv") << '\n';
    return 0;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok == "inf") v.push_back(kInf);
        else v.push_back(std::stod(tok));
    }
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"szego-lab: Cauchy-Szego and Cauchy-Fantappie kernels on strongly pseudoconvex domains"};
    app.require_subcommand(1);
    RunConfig rc;
    std::string eps_s, sched_s, p_s;

    auto common = [&](CLI::App* c) {
        c->add_option("--domain", rc.domain, "ball | ellipsoid | perturbed_ball, inline JSON or a JSON file");
        c->add_option("--n", rc.n, "complex dimension (2 or 3)");
        c->add_option("--resolution", rc.resolution, "mesh resolution (>= 8)");
        c->add_option("--eps", eps_s, "comma-separated eps values");
        c->add_option("--s-schedule", sched_s, "comma-separated truncation radii, halving");
        c->add_option("--degree", rc.degree, "Hardy-space degree cutoff");
        c->add_option("--measure", rc.measure, "sigma | lambda | omega");
        c->add_option("--phi", rc.phi, "const | re1 | abs1");
        c->add_option("--phi-a", rc.phi_a, "phi amplitude");
        c->add_option("--seed", rc.seed, "random seed");
        c->add_option("--out-dir", rc.out_dir, "output directory");
        c->add_option("--out", rc.out, "output file");
        c->add_option("--mesh", rc.mesh_path, "mesh file");
    };
    auto* mesh = app.add_subcommand("mesh", "build a boundary mesh");
    auto* project = app.add_subcommand("project", "essential, truncated and Szego matrices");
    auto* assemble_c = app.add_subcommand("assemble", "one operator matrix");
    auto* norms = app.add_subcommand("norms", "operator norms of matrix files");
    auto* verify = app.add_subcommand("verify", "run verification checks");
    auto* report = app.add_subcommand("report", "CSV trend curves from a report");
    for (auto* c : {mesh, project, assemble_c, norms, verify, report}) common(c);
    assemble_c->add_option("--kernel", rc.kernel, "kernel kind");
    norms->add_option("--matrix", rc.matrix_paths, "matrix files")->expected(1, -1);
    norms->add_option("--p", p_s, "comma-separated exponents (inf allowed)");
    verify->add_option("checks", rc.checks, "check names or 'all'");
    verify->add_option("--matrix", rc.matrix_paths, "matrix files that must match the mesh")->expected(1, -1);
    verify->add_option("--samples", rc.samples, "random samples per check");
    verify->add_option("--centers", rc.centers, "ball centers for measure checks");
    verify->add_option("--ladder", rc.ladder, "refinement resolutions")->expected(1, -1);
    report->add_option("--report", rc.report_path, "report.json to read");

    CLI11_PARSE(app, argc, argv);
    try {
        if (!eps_s.empty()) rc.eps = parse_list(eps_s);
        if (!sched_s.empty()) rc.s_schedule = parse_list(sched_s);
        if (!p_s.empty()) rc.p = parse_list(p_s);
        validate(rc);
        if (*mesh) return cmd_mesh(rc);
        if (*project) return cmd_project(rc);
        if (*assemble_c) return cmd_assemble(rc);
        if (*norms) return cmd_norms(rc);
        if (*verify) return cmd_verify(rc);
        if (*report) return cmd_report(rc);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 100;
    }
    return 0;
}
