#include "commands.hpp"

#include "rbfh/assembly.hpp"
#include "rbfh/clustering.hpp"
#include "rbfh/matrix_io.hpp"
#include "rbfh/oracle.hpp"
#include "rbfh/solver.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rbfh::cli {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Truncation parse_truncation(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("--trunc must be 'tol:EPS' or 'rank:R', got '" + s + "'");
    const std::string mode = s.substr(0, colon), value = s.substr(colon + 1);
    try {
        std::size_t used = 0;
        if (mode == "tol") {
            const double eps = std::stod(value, &used);
            if (used != value.size() || !(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("");
            return Truncation::tolerance(eps);
        }
        if (mode == "rank") {
            const int r = std::stoi(value, &used);
            if (used != value.size() || r < 0) throw std::invalid_argument("");
            return Truncation::fixed_rank(r);
        }
    } catch (const std::exception&) {
        throw std::invalid_argument("--trunc: bad value '" + value + "'");
    }
    throw std::invalid_argument("--trunc mode must be 'tol' or 'rank', got '" + mode + "'");
}

KernelSpec kernel_spec(const RunConfig& cfg) {
    json j;
    if (!cfg.config_file.empty()) {
        try {
            j = json::parse(read_text_file(cfg.config_file));
        } catch (const json::exception& e) {
            throw std::invalid_argument("config file: " + std::string(e.what()));
        }
        if (j.contains("kernel")) j = j["kernel"];
    } else {
        j = {{"family", cfg.kernel}, {"d", cfg.d}, {"k", cfg.k}, {"b", cfg.b},
             {"normalize_prefactor", cfg.normalize_prefactor}};
        if (cfg.k_min) j["k_min"] = *cfg.k_min;
    }
    return kernel_from_json(j);
}

PointCloud load_points(const RunConfig& cfg) {
    if (!cfg.points_file.empty()) return read_points_file(cfg.points_file);
    if (cfg.d < 1) throw std::invalid_argument("--d must be positive");
    const auto dim = static_cast<std::size_t>(cfg.d);
    if (cfg.random_count > 0) return generate_random_cloud(dim, cfg.random_count, AxisBox::unit(dim), cfg.seed);
    return generate_graded_grid(dim, cfg.n, cfg.beta, AxisBox::unit(dim));
}

json config_json(const RunConfig& cfg) {
    json j;
    if (!cfg.config_file.empty()) {
        j["kernel_config"] = hex64(fnv1a64(read_text_file(cfg.config_file)));
    } else {
        j["kernel"] = {{"family", cfg.kernel}, {"d", cfg.d}, {"k", cfg.k}, {"b", cfg.b},
                       {"normalize_prefactor", cfg.normalize_prefactor}};
        if (cfg.k_min) j["kernel"]["k_min"] = *cfg.k_min;
    }
    if (!cfg.points_file.empty()) {
        j["points"] = hex64(fnv1a64(read_text_file(cfg.points_file)));
    } else {
        j["grid"] = {{"d", cfg.d}, {"n", cfg.n}, {"beta", cfg.beta}, {"random_count", cfg.random_count}};
    }
    if (!cfg.data_file.empty()) j["data"] = hex64(fnv1a64(read_text_file(cfg.data_file)));
    j["eta"] = cfg.eta;
    j["leaf_size"] = cfg.leaf_size;
    j["rmax"] = cfg.rmax;
    j["gamma"] = cfg.gamma;
    j["trunc"] = cfg.trunc;
    j["precision"] = cfg.precision;
    j["method"] = cfg.method;
    j["ranks"] = cfg.ranks;
    j["seed"] = cfg.seed;
    return j;
}

std::string config_hash(const RunConfig& cfg) { return hex64(fnv1a64(config_json(cfg).dump())); }

namespace {

std::string out_path(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out);
    return (std::filesystem::path(cfg.out) / name).string();
}

json manifest(const RunConfig& cfg, const std::string& command) {
    json m;
    m["version"] = kVersion;
    m["command"] = command;
    m["config_hash"] = config_hash(cfg);
    m["config"] = config_json(cfg);
    m["N"] = nullptr;
    m["h_min"] = nullptr;
    m["depth"] = nullptr;
    m["sparsity_constant"] = nullptr;
    m["precision"] = cfg.precision;
    m["oracle_residual"] = nullptr;
    return m;
}

void write_manifest(const RunConfig& cfg, const std::string& command, const json& m) {
    write_text_file(out_path(cfg, "manifest_" + command + ".json"), m.dump(2) + "\n");
}

struct Partitioned {
    std::shared_ptr<const ClusterTree> tree;
    std::shared_ptr<const BlockPartition> partition;
};

Partitioned make_partition(const RunConfig& cfg, const PointCloud& cloud) {
    if (cfg.leaf_size < 1) throw std::invalid_argument("--leaf-size must be at least 1");
    if (!(cfg.eta > 0.0)) throw std::invalid_argument("--eta must be positive");
    auto tree = std::make_shared<const ClusterTree>(build_cluster_tree(cloud, cfg.leaf_size));
    return {tree, std::make_shared<const BlockPartition>(build_block_partition(tree, cfg.eta))};
}

void record_structure(json& m, const PointCloud& cloud, const Partitioned& pt) {
    m["N"] = cloud.size();
    m["h_min"] = cloud.sep_distance();
    m["depth"] = pt.tree->depth();
    m["sparsity_constant"] = sparsity_constant(*pt.partition);
}

std::ostringstream csv_stream() {
    std::ostringstream os;
    os << std::setprecision(17);
    return os;
}

} // namespace

int cmd_gen_points(const RunConfig& cfg, std::ostream& log) {
    const PointCloud cloud = load_points(cfg);
    const std::string path = out_path(cfg, "points.txt");
    write_points_file(path, cloud);
    json m = manifest(cfg, "gen-points");
    m["N"] = cloud.size();
    m["h_min"] = cloud.size() > 1 ? json(cloud.sep_distance()) : json(nullptr);
    m["points_hash"] = point_cloud_hash(cloud);
    write_manifest(cfg, "gen-points", m);
    log << "wrote " << cloud.size() << " points to " << path << "\n";
    return 0;
}

int cmd_assemble(const RunConfig& cfg, std::ostream& log) {
    const InterpolationProblem prob = make_problem(load_points(cfg), kernel_spec(cfg));
    write_matrix_binary_file(out_path(cfg, "A.bin"), prob.sys.A);
    write_matrix_binary_file(out_path(cfg, "B.bin"), prob.sys.B);
    if (prob.sys.n() <= 500) {
        std::ostringstream a = csv_stream(), b = csv_stream();
        write_matrix_csv(a, prob.sys.A);
        write_matrix_csv(b, prob.sys.B);
        write_text_file(out_path(cfg, "A.csv"), a.str());
        write_text_file(out_path(cfg, "B.csv"), b.str());
    }
    json m = manifest(cfg, "assemble");
    m["N"] = prob.cloud.size();
    m["h_min"] = prob.cloud.sep_distance();
    m["N_min"] = prob.sys.n_min();
    m["kernel"] = kernel_to_json(prob.spec);
    m["unisolvent_indices"] = prob.basis.node_indices;
    m["points_hash"] = point_cloud_hash(prob.cloud);
    write_manifest(cfg, "assemble", m);
    log << "assembled A (" << prob.sys.n() << "x" << prob.sys.n() << ") and B (" << prob.sys.n_min() << "x"
        << prob.sys.n() << ")\n";
    return 0;
}

int cmd_partition(const RunConfig& cfg, std::ostream& log) {
    const PointCloud cloud = load_points(cfg);
    const Partitioned pt = make_partition(cfg, cloud);
    write_text_file(out_path(cfg, "partition.json"), partition_to_json(*pt.partition).dump(2) + "\n");
    const PartitionDiagnostics diag = validate_partition(*pt.partition, cloud.size());
    json m = manifest(cfg, "partition");
    record_structure(m, cloud, pt);
    m["is_partition"] = diag.is_partition;
    m["conditions_hold"] = diag.conditions_hold;
    m["n_adm"] = diag.n_adm;
    m["n_small"] = diag.n_small;
    write_manifest(cfg, "partition", m);
    log << "partition: " << diag.n_adm << " admissible, " << diag.n_small << " small, depth " << pt.tree->depth()
        << ", sparsity constant " << diag.sparsity_constant << (diag.is_partition ? "" : " (INVALID)") << "\n";
    if (!diag.is_partition || !diag.conditions_hold) throw std::runtime_error("partition failed validation");
    return 0;
}

int cmd_spectra(const RunConfig& cfg, std::ostream& log) {
    if (cfg.rmax < 0) throw std::invalid_argument("--rmax must be nonnegative");
    const Precision precision = parse_precision(cfg.precision);
    const InterpolationProblem prob = make_problem(load_points(cfg), kernel_spec(cfg));
    const Partitioned pt = make_partition(cfg, prob.cloud);
    const InverseBlocks inv = dense_inverse(prob.sys, precision);
    const SpectrumReport rep = blockwise_spectra(inv.S11, *pt.partition, cfg.rmax);

    std::ostringstream csv = csv_stream();
    csv << "r,bound,max_sigma\n";
    if (!rep.blocks.empty())
        for (int r = 0; r <= cfg.rmax; ++r) csv << r << ',' << rep.bound(r) << ',' << rep.max_sigma(r + 1) << '\n';
    write_text_file(out_path(cfg, "spectra.csv"), csv.str());

    json m = manifest(cfg, "spectra");
    record_structure(m, prob.cloud, pt);
    m["oracle_residual"] = inv.residual;
    m["residual_tolerance"] = inv.tolerance;
    m["valid"] = inv.valid();
    m["condition_estimate"] = inv.condition_estimate;
    m["n_adm"] = pt.partition->admissible.size();
    m["rows"] = rep.blocks.empty() ? 0 : cfg.rmax + 1;
    m["decay_fit"] = nullptr;
    if (inv.valid() && !rep.blocks.empty()) {
        try {
            const DecayFit fit = decay_fit(rep, 1, cfg.rmax);
            m["decay_fit"] = {{"r_lo", 1}, {"r_hi", cfg.rmax}, {"slope", fit.slope}, {"intercept", fit.intercept},
                              {"r2", fit.r2}, {"points", fit.points}};
        } catch (const std::invalid_argument&) {
            // too few nonzero bound values for a fit
        }
    }
    write_manifest(cfg, "spectra", m);
    if (!inv.valid())
        log << "warning: inverse residual " << inv.residual << " exceeds " << inv.tolerance
            << " (condition estimate " << inv.condition_estimate << "); run marked invalid\n";
    log << "spectra: " << rep.blocks.size() << " admissible blocks, " << (rep.blocks.empty() ? 0 : cfg.rmax + 1)
        << " rows\n";
    return 0;
}

int cmd_hchol(const RunConfig& cfg, std::ostream& log) {
    if (!(cfg.gamma > 0.0)) throw std::invalid_argument("--gamma must be positive");
    const Truncation trunc = parse_truncation(cfg.trunc);
    std::vector<int> ranks = cfg.ranks;
    if (ranks.empty())
        for (int r = 2; r <= cfg.rmax; r += 2) ranks.push_back(r);
    for (int r : ranks)
        if (r < 0) throw std::invalid_argument("--ranks must be nonnegative");
    std::sort(ranks.begin(), ranks.end());
    ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());

    const InterpolationProblem prob = make_problem(load_points(cfg), kernel_spec(cfg));
    const Partitioned pt = make_partition(cfg, prob.cloud);
    const MatrixXd m_aug = augmented_lagrangian(prob.sys, cfg.gamma);
    const HMatrix factor = hcholesky(compress(m_aug, pt.partition, Truncation::tolerance(1e-14)), trunc);

    auto error_of = [&](const HMatrix& l) {
        const auto e = [&](const VectorXd& v) { return VectorXd(v - apply_inverse(l, m_aug * v)); };
        const auto et = [&](const VectorXd& v) { return VectorXd(v - m_aug * apply_inverse(l, v)); };
        return est_spectral_norm(e, et, m_aug.rows(), 100, 1e-6, cfg.seed);
    };

    std::ostringstream csv = csv_stream();
    csv << "rank,error_estimate,iterations,converged,storage_entries\n";
    for (int r : ranks) {
        const HMatrix lr = truncate(factor, Truncation::fixed_rank(r));
        const NormEstimate est = error_of(lr);
        csv << r << ',' << est.value << ',' << est.iterations << ',' << (est.converged ? 1 : 0) << ','
            << storage_entries(lr) << '\n';
    }
    write_text_file(out_path(cfg, "hchol.csv"), csv.str());

    const NormEstimate floor = error_of(factor);
    json m = manifest(cfg, "hchol");
    record_structure(m, prob.cloud, pt);
    m["gamma"] = cfg.gamma;
    m["factor_rank_bound"] = factor.rank_bound();
    m["untruncated_error_estimate"] = floor.value;
    m["factor_diagnostics"] = diagnostics_to_json(diagnostics(factor));
    write_manifest(cfg, "hchol", m);
    log << "hchol: " << ranks.size() << " ranks, untruncated error estimate " << floor.value << "\n";
    return 0;
}

int cmd_solve(const RunConfig& cfg, std::ostream& log) {
    if (cfg.data_file.empty()) throw std::invalid_argument("solve needs --data");
    DataSet data = read_data_file(cfg.data_file);
    const InterpolationProblem prob = make_problem(data.cloud, kernel_spec(cfg));
    SolveOptions opts;
    opts.method = parse_solve_method(cfg.method);
    opts.gamma = cfg.gamma;
    opts.eta = cfg.eta;
    opts.leaf_size = cfg.leaf_size;
    opts.trunc = parse_truncation(cfg.trunc);
    const SolveResult res = solve(prob, data.f, opts);

    write_text_file(out_path(cfg, "interpolant.json"),
                    interpolant_to_json(res.u, point_cloud_hash(prob.cloud)).dump(2) + "\n");
    json m = manifest(cfg, "solve");
    m["N"] = prob.cloud.size();
    m["h_min"] = prob.cloud.size() > 1 ? json(prob.cloud.sep_distance()) : json(nullptr);
    if (opts.method == SolveMethod::HCholesky) {
        const Partitioned pt = make_partition(cfg, prob.cloud);
        record_structure(m, prob.cloud, pt);
    }
    m["method"] = to_string(opts.method);
    m["interpolation_residual"] = res.report.interpolation_residual;
    m["constraint_residual"] = res.report.constraint_residual;
    m["refinement_steps"] = res.report.refinement_steps;
    try {
        m["energy"] = energy(res.u, prob.sys);
    } catch (const std::domain_error&) {
        m["energy"] = nullptr;
    }
    write_manifest(cfg, "solve", m);
    log << "solve (" << to_string(opts.method) << "): interpolation residual " << res.report.interpolation_residual
        << ", constraint residual " << res.report.constraint_residual << "\n";
    return 0;
}

int cmd_bench(const RunConfig& cfg, std::ostream& log) {
    using clock = std::chrono::steady_clock;
    auto secs = [](clock::time_point a, clock::time_point b) { return std::chrono::duration<double>(b - a).count(); };
    const Truncation trunc = parse_truncation(cfg.trunc);

    auto t0 = clock::now();
    const InterpolationProblem prob = make_problem(load_points(cfg), kernel_spec(cfg));
    auto t1 = clock::now();
    const Partitioned pt = make_partition(cfg, prob.cloud);
    const MatrixXd m_aug = augmented_lagrangian(prob.sys, cfg.gamma);
    const HMatrix h = compress(m_aug, pt.partition, trunc);
    auto t2 = clock::now();
    const VectorXd v = VectorXd::Ones(h.n());
    const VectorXd y = matvec(h, v);
    auto t3 = clock::now();
    const HMatrix l = hcholesky(h, trunc);
    auto t4 = clock::now();

    json m = manifest(cfg, "bench");
    record_structure(m, prob.cloud, pt);
    m["matrix"] = diagnostics_to_json(diagnostics(h));
    m["factor"] = diagnostics_to_json(diagnostics(l));
    m["matvec_rel_error"] = (y - m_aug * v).norm() / (m_aug * v).norm();
    write_manifest(cfg, "bench", m);
    // timings vary between runs, so they only go to the log
    log << std::setprecision(4) << "assemble " << secs(t0, t1) << " s, compress " << secs(t1, t2) << " s, matvec "
        << secs(t2, t3) << " s, hcholesky " << secs(t3, t4) << " s\n";
    return 0;
}

int run_command(const std::string& name, const RunConfig& cfg, std::ostream& log, std::ostream& err) {
    try {
        if (name == "gen-points") return cmd_gen_points(cfg, log);
        if (name == "assemble") return cmd_assemble(cfg, log);
        if (name == "partition") return cmd_partition(cfg, log);
        if (name == "spectra") return cmd_spectra(cfg, log);
        if (name == "hchol") return cmd_hchol(cfg, log);
        if (name == "solve") return cmd_solve(cfg, log);
        if (name == "bench") return cmd_bench(cfg, log);
        err << "error: unknown command '" << name << "'\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace rbfh::cli
