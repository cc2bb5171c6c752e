#pragma once

#include "operators.hpp"

#include <bit>
#include <fstream>

namespace szego {

// Hash of the canonical (sorted-key, compact) JSON dump.
inline std::string config_hash(const nlohmann::json& j) { return fnv1a_hex(j.dump()); }

inline nlohmann::json mesh_config(const Domain& d, int resolution, const std::string& scheme) {
    return {{"domain", domain_to_json(d)}, {"resolution", resolution}, {"scheme", scheme}};
}

inline std::string mesh_hash(const BoundaryMesh& m) { return config_hash(mesh_config(m.domain, m.resolution, m.scheme)); }

//------------------------------------------------------------------------------
// Mesh files
//------------------------------------------------------------------------------

inline nlohmann::json point_to_json(const Point& p) {
    auto a = nlohmann::json::array();
    for (Eigen::Index k = 0; k < p.size(); ++k) a.push_back({p[k].real(), p[k].imag()});
    return a;
}

inline Point point_from_json(const nlohmann::json& a) {
    Point p(static_cast<Eigen::Index>(a.size()));
    for (std::size_t k = 0; k < a.size(); ++k) p[static_cast<Eigen::Index>(k)] = cplx(a[k][0].get<double>(), a[k][1].get<double>());
    return p;
}

inline nlohmann::json mesh_to_json(const BoundaryMesh& m) {
    nlohmann::json j;
    j["domain"] = domain_to_json(m.domain);
    j["resolution"] = m.resolution;
    j["scheme"] = m.scheme;
    j["config_hash"] = mesh_hash(m);
    auto nodes = nlohmann::json::array(), normals = nlohmann::json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
        nodes.push_back(point_to_json(m.nodes[i]));
        normals.push_back(point_to_json(m.normals[i]));
    }
    j["nodes"] = std::move(nodes);
    j["normals"] = std::move(normals);
    j["sigma_weights"] = std::vector<double>(m.sigma_weights.data(), m.sigma_weights.data() + m.sigma_weights.size());
    j["lambda_values"] = std::vector<double>(m.lambda_values.data(), m.lambda_values.data() + m.lambda_values.size());
    j["lambda_weights"] = std::vector<double>(m.lambda_weights.data(), m.lambda_weights.data() + m.lambda_weights.size());
    return j;
}

inline RVec rvec_from_json(const nlohmann::json& a) {
    const auto v = a.get<std::vector<double>>();
    return Eigen::Map<const RVec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline BoundaryMesh mesh_from_json(const nlohmann::json& j) {
    BoundaryMesh m;
    m.domain = domain_from_json(j.at("domain"));
    m.resolution = j.at("resolution").get<int>();
    m.scheme = j.value("scheme", std::string("product"));
    for (const auto& p : j.at("nodes")) m.nodes.push_back(point_from_json(p));
    for (const auto& p : j.at("normals")) m.normals.push_back(point_from_json(p));
    m.sigma_weights = rvec_from_json(j.at("sigma_weights"));
    m.lambda_values = rvec_from_json(j.at("lambda_values"));
    m.lambda_weights = rvec_from_json(j.at("lambda_weights"));
    const auto N = static_cast<Eigen::Index>(m.nodes.size());
    if (m.normals.size() != m.nodes.size() || m.sigma_weights.size() != N || m.lambda_values.size() != N ||
        m.lambda_weights.size() != N)
        throw ConfigError("mesh file arrays disagree in length");
    const std::string h = j.value("config_hash", std::string());
    if (!h.empty() && h != mesh_hash(m)) throw HashMismatch("mesh file hash " + h + " does not match its content " + mesh_hash(m));
    return m;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << text;
}

inline std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read '" + path + "'");
    return std::string(std::istreambuf_iterator<char>(f), {});
}

inline void save_mesh(const BoundaryMesh& m, const std::string& path) { write_text(path, mesh_to_json(m).dump() + "\n"); }
inline BoundaryMesh load_mesh(const std::string& path) { return mesh_from_json(nlohmann::json::parse(read_text(path))); }

//------------------------------------------------------------------------------
// Matrix files: one JSON header line, then row-major little-endian complex float64.
//------------------------------------------------------------------------------

static_assert(std::endian::native == std::endian::little, "matrix files assume a little-endian host");

inline void save_matrix(const OperatorMatrix& T, const std::string& path, const std::string& cfg_hash) {
    nlohmann::json h;
    h["N"] = T.size();
    h["measure"] = measure_name(T.measure);
    h["spec"] = T.spec.to_json();
    h["assembly"] = T.assembly;
    h["weights"] = std::vector<double>(T.weights.data(), T.weights.data() + T.weights.size());
    h["mesh_hash"] = T.mesh_hash;
    h["config_hash"] = cfg_hash;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << h.dump() << '\n';
    f.write(reinterpret_cast<const char*>(T.entries.data()),
            static_cast<std::streamsize>(sizeof(cplx) * static_cast<std::size_t>(T.entries.size())));
    if (!f) throw ConfigError("short write to '" + path + "'");
}

struct MatrixFile {
    OperatorMatrix T;
    std::string config_hash;
};

inline MatrixFile load_matrix(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read '" + path + "'");
    std::string line;
    std::getline(f, line);
    const auto h = nlohmann::json::parse(line);
    MatrixFile out;
    const auto N = h.at("N").get<Eigen::Index>();
    out.T.measure = measure_from_name(h.at("measure").get<std::string>());
    out.T.spec = KernelSpec::from_json(h.at("spec"));
    out.T.assembly = h.value("assembly", std::string("plain"));
    out.T.weights = rvec_from_json(h.at("weights"));
    out.T.mesh_hash = h.value("mesh_hash", std::string());
    out.config_hash = h.value("config_hash", std::string());
    if (out.T.weights.size() != N) throw ConfigError("matrix header weights disagree with N");
    out.T.entries.resize(N, N);
    f.read(reinterpret_cast<char*>(out.T.entries.data()), static_cast<std::streamsize>(sizeof(cplx) * static_cast<std::size_t>(N * N)));
    if (!f) throw ConfigError("truncated matrix file '" + path + "'");
    return out;
}

}  // namespace szego
