#include "rbfh/io.hpp"
#include "rbfh/matrix_io.hpp"

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <random>
#include <sstream>

using namespace rbfh;
using Eigen::MatrixXd;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("rbfh_test_io_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::shared_ptr<const BlockPartition> partition_of(const PointCloud& c, std::size_t leaf, double eta) {
    auto tree = std::make_shared<const ClusterTree>(build_cluster_tree(c, leaf));
    return std::make_shared<const BlockPartition>(build_block_partition(tree, eta));
}

MatrixXd random_matrix(Eigen::Index m, Eigen::Index n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    MatrixXd a(m, n);
    for (Eigen::Index i = 0; i < m * n; ++i) a.data()[i] = g(rng);
    return a;
}

} // namespace

TEST_CASE("FNV-1a test vectors") {
    CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
    CHECK(hex64(fnv1a64("a")) == "af63dc4c8601ec8c");
    CHECK(hex64(fnv1a64("foobar")) == "85944171f73967e8");
}

TEST_CASE("binary matrix layout") {
    MatrixXd m(2, 3);
    m << 1, 2, 3, 4, 5, 6;
    std::stringstream ss;
    write_matrix_binary(ss, m);
    const std::string bytes = ss.str();
    REQUIRE(bytes.size() == matrix_binary_size(2, 3));
    CHECK(bytes.size() == 8 + 16 + 6 * 8);
    CHECK(bytes.substr(0, 8) == "RBFMAT01");
    std::uint64_t rows = 0, cols = 0;
    std::memcpy(&rows, bytes.data() + 8, 8);
    std::memcpy(&cols, bytes.data() + 16, 8);
    CHECK(rows == 2);
    CHECK(cols == 3);
    double second = 0.0;
    std::memcpy(&second, bytes.data() + 24 + 8, 8);
    CHECK(second == 2.0); // row-major
    CHECK(read_matrix_binary(ss) == m);

    std::istringstream bad(std::string("NOTAMAT1") + std::string(16, '\0'));
    CHECK_THROWS_AS(read_matrix_binary(bad), std::invalid_argument);
}

TEST_CASE("kernel config round trip") {
    for (const KernelSpec& s : {KernelSpec::thin_plate(2, 2), KernelSpec::thin_plate(3, 3, KernelScaling::Exact),
                                KernelSpec::matern(3, 2, 1.5), KernelSpec::matern(2, 2, 0.5, KernelScaling::Exact)}) {
        const json j = kernel_to_json(s);
        const KernelSpec back = kernel_from_json(json::parse(j.dump()));
        CHECK(back.family == s.family);
        CHECK(back.dim == s.dim);
        CHECK(back.k == s.k);
        CHECK(back.k_min == s.k_min);
        CHECK(back.b == s.b);
        CHECK(back.scaling == s.scaling);
    }
    CHECK_THROWS_AS(kernel_from_json(json::parse(R"({"family":"gauss","d":2,"k":2})")), std::invalid_argument);
    CHECK_THROWS_AS(kernel_from_json(json::parse(R"({"family":"tps","d":2,"k":2,"k_min":0})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(kernel_from_json(json::parse(R"({"family":"tps","d":2})")), std::invalid_argument);
    CHECK_THROWS_AS(kernel_from_json(json::parse(R"({"family":"tps","d":4,"k":2})")), std::invalid_argument);
}

TEST_CASE("partition round trip") {
    const PointCloud c = generate_random_cloud(2, 200, AxisBox({0.0, 0.0}, {1.0, 1.0}), 3);
    auto p = partition_of(c, 12, 2.0);
    const BlockPartition back = partition_from_json(json::parse(partition_to_json(*p).dump()));
    CHECK(back.eta == p->eta);
    CHECK(back.admissible == p->admissible);
    CHECK(back.small == p->small);
    CHECK(back.tree->perm() == p->tree->perm());
    CHECK(back.tree->depth() == p->tree->depth());
    CHECK(back.tree->h_min() == p->tree->h_min());
    REQUIRE(back.tree->nodes().size() == p->tree->nodes().size());
    for (std::size_t i = 0; i < back.tree->nodes().size(); ++i) {
        const Cluster& a = back.tree->nodes()[i];
        const Cluster& b = p->tree->nodes()[i];
        CHECK(a.begin == b.begin);
        CHECK(a.end == b.end);
        CHECK(a.parent == b.parent);
        CHECK(a.box.lo() == b.box.lo());
        CHECK(a.box.hi() == b.box.hi());
    }
    const PartitionDiagnostics d = validate_partition(back, c.size());
    CHECK(d.is_partition);
    CHECK(d.conditions_hold);
    CHECK_THROWS_AS(partition_from_json(json::parse(R"({"clusters":[]})")), std::invalid_argument);
}

TEST_CASE("H-matrix round trip") {
    const fs::path dir = scratch_dir("hmatrix");
    const PointCloud c = generate_uniform_grid(2, 12, AxisBox({0.0, 0.0}, {1.0, 1.0}));
    auto p = partition_of(c, 8, 2.0);
    const MatrixXd m = random_matrix(144, 144, 5);
    MatrixXd spd = m * m.transpose() + 144.0 * MatrixXd::Identity(144, 144);

    for (bool factor : {false, true}) {
        const HMatrix h = factor ? hcholesky(compress(spd, p, Truncation::tolerance(1e-14)), Truncation::fixed_rank(4))
                                 : compress(m, p, Truncation::fixed_rank(3));
        const std::string js = (dir / "h.json").string(), bin = (dir / "h.bin").string();
        write_hmatrix(h, js, bin);
        const HMatrix back = read_hmatrix(js, bin, p);
        CHECK(back.structure() == h.structure());
        CHECK(back.reconstruct() == h.reconstruct());
        CHECK(storage_entries(back) == storage_entries(h));

        const json idx = json::parse(read_text_file(js));
        CHECK(idx.at("structure") == (factor ? "lower" : "general"));
        CHECK(idx.at("diagnostics").at("storage_entries") == storage_entries(h));
        CHECK(idx.at("blocks").size() == p->admissible.size() + p->small.size());
        std::uint64_t payload = 0;
        for (const auto& b : idx.at("blocks")) {
            CHECK(b.at("offset").get<std::uint64_t>() == payload);
            const auto& node = h.nodes()[static_cast<std::size_t>(h.leaf({b.at("row"), b.at("col")}))];
            if (b.at("kind") == "dense")
                payload += matrix_binary_size(static_cast<std::uint64_t>(node.dense.rows()), static_cast<std::uint64_t>(node.dense.cols()));
            else if (b.at("kind") == "lowrank")
                payload += matrix_binary_size(static_cast<std::uint64_t>(node.lr.X.rows()), static_cast<std::uint64_t>(node.lr.X.cols())) +
                           matrix_binary_size(static_cast<std::uint64_t>(node.lr.Y.rows()), static_cast<std::uint64_t>(node.lr.Y.cols()));
        }
        CHECK(fs::file_size(bin) == payload);
    }
    fs::remove_all(dir);
}

TEST_CASE("diagnostics JSON fields") {
    const PointCloud c = generate_uniform_grid(2, 8, AxisBox({0.0, 0.0}, {1.0, 1.0}));
    auto p = partition_of(c, 8, 2.0);
    const json j = diagnostics_to_json(diagnostics(compress(random_matrix(64, 64, 1), p, Truncation::fixed_rank(2))));
    for (const char* key : {"rank_bound", "n_adm", "n_small", "storage_entries", "compression_ratio"})
        CHECK(j.contains(key));
}

TEST_CASE("interpolant export") {
    const auto prob = make_problem(generate_uniform_grid(2, 5, AxisBox({0.0, 0.0}, {1.0, 1.0})), KernelSpec::thin_plate(2, 2));
    Eigen::VectorXd f(25);
    for (Eigen::Index i = 0; i < 25; ++i) f[i] = std::sin(static_cast<double>(i));
    const Interpolant u = solve(prob, f).u;
    const std::string hash = point_cloud_hash(prob.cloud);
    CHECK(hash.size() == 16);
    std::ostringstream pts;
    write_points(pts, prob.cloud);
    CHECK(hash == hex64(fnv1a64(pts.str())));

    const json j = json::parse(interpolant_to_json(u, hash).dump());
    CHECK(j.at("node_file_hash") == hash);
    CHECK(j.at("kernel").at("family") == "tps");
    CHECK(j.at("c").size() == 25);
    CHECK(j.at("d_coeffs").size() == 3);
    CHECK(j.at("c").at(7).get<double>() == u.c[7]);
    CHECK(j.at("unisolvent_indices").get<std::vector<std::size_t>>() == u.basis.node_indices);
}

TEST_CASE("text files") {
    const fs::path dir = scratch_dir("text");
    write_text_file((dir / "a.txt").string(), "hello\n");
    CHECK(read_text_file((dir / "a.txt").string()) == "hello\n");
    CHECK_THROWS_AS(read_text_file((dir / "missing.txt").string()), std::invalid_argument);
    CHECK_THROWS_AS(write_text_file((dir / "no" / "such" / "dir.txt").string(), "x"), std::runtime_error);
    fs::remove_all(dir);
}
