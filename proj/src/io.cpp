#include "rbfh/io.hpp"

#include "rbfh/matrix_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rbfh {

json kernel_to_json(const KernelSpec& spec) {
    json j;
    j["family"] = spec.family_name();
    j["d"] = spec.dim;
    j["k"] = spec.k;
    j["k_min"] = spec.k_min;
    j["b"] = spec.b;
    j["normalize_prefactor"] = spec.scaling == KernelScaling::Exact;
    return j;
}

KernelSpec kernel_from_json(const json& j) {
    try {
        const std::string family = j.at("family").get<std::string>();
        const int d = j.at("d").get<int>();
        const int k = j.at("k").get<int>();
        const KernelScaling scaling =
            j.value("normalize_prefactor", false) ? KernelScaling::Exact : KernelScaling::Unit;
        KernelSpec spec;
        if (family == "tps") {
            spec = KernelSpec::thin_plate(d, k, scaling);
        } else if (family == "matern") {
            spec = KernelSpec::matern(d, k, j.value("b", 1.0), scaling);
        } else {
            throw std::invalid_argument("unknown kernel family '" + family + "' (expected tps or matern)");
        }
        if (j.contains("k_min") && j["k_min"].get<int>() != spec.k_min)
            throw std::invalid_argument("k_min inconsistent with kernel family " + family);
        return spec;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("kernel config: ") + e.what());
    }
}

json box_to_json(const AxisBox& b) { return json{{"lo", b.lo()}, {"hi", b.hi()}}; }

AxisBox box_from_json(const json& j) {
    return AxisBox(j.at("lo").get<std::vector<double>>(), j.at("hi").get<std::vector<double>>());
}

namespace {

json blocks_to_json(const std::vector<BlockId>& blocks) {
    json a = json::array();
    for (const auto& b : blocks) a.push_back(json::array({b.row, b.col}));
    return a;
}

std::vector<BlockId> blocks_from_json(const json& j) {
    std::vector<BlockId> out;
    for (const auto& e : j) out.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    return out;
}

const char* kind_name(HMatrix::Node::Kind k) {
    switch (k) {
    case HMatrix::Node::Kind::Dense: return "dense";
    case HMatrix::Node::Kind::LowRank: return "lowrank";
    case HMatrix::Node::Kind::Zero: return "zero";
    case HMatrix::Node::Kind::Hierarchical: break;
    }
    return "hierarchical";
}

} // namespace

json partition_to_json(const BlockPartition& p) {
    const ClusterTree& t = *p.tree;
    json clusters = json::array();
    for (const auto& c : t.nodes()) {
        clusters.push_back({{"begin", c.begin},
                            {"end", c.end},
                            {"level", c.level},
                            {"sons", json::array({c.sons[0], c.sons[1]})},
                            {"box", box_to_json(c.box)}});
    }
    json j;
    j["n"] = t.size();
    j["eta"] = p.eta;
    j["leaf_size"] = t.leaf_size();
    j["h_min"] = t.h_min();
    j["depth"] = t.depth();
    j["perm"] = t.perm();
    j["clusters"] = std::move(clusters);
    j["admissible"] = blocks_to_json(p.admissible);
    j["small"] = blocks_to_json(p.small);
    return j;
}

BlockPartition partition_from_json(const json& j) {
    try {
        std::vector<Cluster> nodes;
        const json& cl = j.at("clusters");
        for (const auto& e : cl) {
            Cluster c;
            c.begin = e.at("begin").get<std::size_t>();
            c.end = e.at("end").get<std::size_t>();
            c.level = e.at("level").get<int>();
            c.sons[0] = e.at("sons").at(0).get<int>();
            c.sons[1] = e.at("sons").at(1).get<int>();
            c.box = box_from_json(e.at("box"));
            nodes.push_back(std::move(c));
        }
        for (std::size_t id = 0; id < nodes.size(); ++id)
            for (int s : nodes[id].sons)
                if (s >= 0) {
                    if (static_cast<std::size_t>(s) >= nodes.size())
                        throw std::invalid_argument("partition: son id out of range");
                    nodes[static_cast<std::size_t>(s)].parent = static_cast<int>(id);
                }
        auto tree = std::make_shared<const ClusterTree>(ClusterTree::from_parts(
            std::move(nodes), j.at("perm").get<std::vector<std::size_t>>(), j.at("leaf_size").get<std::size_t>(),
            j.at("h_min").get<double>()));
        BlockPartition p;
        p.tree = std::move(tree);
        p.eta = j.at("eta").get<double>();
        p.admissible = blocks_from_json(j.at("admissible"));
        p.small = blocks_from_json(j.at("small"));
        return p;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("partition file: ") + e.what());
    }
}

json diagnostics_to_json(const HMatrixDiagnostics& d) {
    return json{{"rank_bound", d.rank_bound},
                {"n_adm", d.n_adm},
                {"n_small", d.n_small},
                {"storage_entries", d.storage_entries},
                {"compression_ratio", d.compression_ratio}};
}

void write_hmatrix(const HMatrix& h, const std::string& json_path, const std::string& bin_path) {
    std::ofstream bin(bin_path, std::ios::binary);
    if (!bin) throw std::runtime_error("cannot open '" + bin_path + "' for writing");
    json blocks = json::array();
    std::uint64_t offset = 0;
    for (const auto& n : h.nodes()) {
        if (n.kind == HMatrix::Node::Kind::Hierarchical) continue;
        json b{{"row", n.row}, {"col", n.col}, {"kind", kind_name(n.kind)}, {"offset", offset}};
        if (n.kind == HMatrix::Node::Kind::Dense) {
            write_matrix_binary(bin, n.dense);
            offset += matrix_binary_size(static_cast<std::uint64_t>(n.dense.rows()), static_cast<std::uint64_t>(n.dense.cols()));
        } else if (n.kind == HMatrix::Node::Kind::LowRank) {
            b["rank"] = n.lr.rank();
            write_matrix_binary(bin, n.lr.X);
            write_matrix_binary(bin, n.lr.Y);
            offset += matrix_binary_size(static_cast<std::uint64_t>(n.lr.X.rows()), static_cast<std::uint64_t>(n.lr.X.cols()));
            offset += matrix_binary_size(static_cast<std::uint64_t>(n.lr.Y.rows()), static_cast<std::uint64_t>(n.lr.Y.cols()));
        }
        blocks.push_back(std::move(b));
    }
    if (!bin) throw std::runtime_error("write failed for '" + bin_path + "'");
    json j;
    j["n"] = h.n();
    j["structure"] = h.structure() == HMatrix::Structure::LowerTriangular ? "lower" : "general";
    j["payload"] = bin_path.substr(bin_path.find_last_of('/') + 1);
    j["diagnostics"] = diagnostics_to_json(diagnostics(h));
    j["blocks"] = std::move(blocks);
    write_text_file(json_path, j.dump(2) + "\n");
}

HMatrix read_hmatrix(const std::string& json_path, const std::string& bin_path,
                     std::shared_ptr<const BlockPartition> partition) {
    const json j = json::parse(read_text_file(json_path));
    std::ifstream bin(bin_path, std::ios::binary);
    if (!bin) throw std::invalid_argument("cannot open '" + bin_path + "'");
    HMatrix h(std::move(partition));
    if (j.at("n").get<Eigen::Index>() != h.n()) throw std::invalid_argument("hmatrix file: size mismatch");
    if (j.at("structure").get<std::string>() == "lower") h.set_structure(HMatrix::Structure::LowerTriangular);
    auto& nodes = h.mutable_nodes();
    for (const auto& b : j.at("blocks")) {
        auto& node = nodes[static_cast<std::size_t>(h.leaf({b.at("row").get<int>(), b.at("col").get<int>()}))];
        const std::string kind = b.at("kind").get<std::string>();
        if (kind == "dense") {
            node.kind = HMatrix::Node::Kind::Dense;
            node.dense = read_matrix_binary(bin);
        } else if (kind == "lowrank") {
            node.kind = HMatrix::Node::Kind::LowRank;
            node.lr.X = read_matrix_binary(bin);
            node.lr.Y = read_matrix_binary(bin);
        } else if (kind == "zero") {
            node.kind = HMatrix::Node::Kind::Zero;
            node.dense.resize(0, 0);
            node.lr = {};
        } else {
            throw std::invalid_argument("hmatrix file: unknown block kind '" + kind + "'");
        }
    }
    return h;
}

json interpolant_to_json(const Interpolant& u, const std::string& node_file_hash) {
    json j;
    j["kernel"] = kernel_to_json(u.spec);
    j["n"] = u.cloud.size();
    j["unisolvent_indices"] = u.basis.node_indices;
    j["node_file_hash"] = node_file_hash;
    j["c"] = std::vector<double>(u.c.data(), u.c.data() + u.c.size());
    j["d_coeffs"] = std::vector<double>(u.d_coeffs.data(), u.d_coeffs.data() + u.d_coeffs.size());
    return j;
}

std::string point_cloud_hash(const PointCloud& cloud) {
    std::ostringstream os;
    write_points(os, cloud);
    return hex64(fnv1a64(os.str()));
}

std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::invalid_argument("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    os << text;
    if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace rbfh
