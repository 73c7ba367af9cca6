#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using rbfh::cli::RunConfig;
    RunConfig cfg;
    int k_min = -1;

    CLI::App app{"RBF interpolation with hierarchical-matrix compression"};
    app.set_version_flag("--version", rbfh::cli::kVersion);
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--kernel", cfg.kernel, "Kernel family: tps or matern")->capture_default_str();
        sub->add_option("--d", cfg.d, "Spatial dimension")->capture_default_str();
        sub->add_option("--k", cfg.k, "Order k (k > d/2)")->capture_default_str();
        sub->add_option("--kmin", k_min, "Lowest derivative order (checked against the family)");
        sub->add_option("--b", cfg.b, "Matern parameter b > 0")->capture_default_str();
        sub->add_flag("--normalize-prefactor", cfg.normalize_prefactor, "Keep the exact kernel constants");
        sub->add_option("--config", cfg.config_file, "JSON kernel config (overrides kernel flags)");
        sub->add_option("--points", cfg.points_file, "Point file ('d N' header); default: generated grid");
        sub->add_option("--n", cfg.n, "Grid points per axis")->capture_default_str();
        sub->add_option("--beta", cfg.beta, "Grading exponent (>= 1)")->capture_default_str();
        sub->add_option("--random", cfg.random_count, "Use N uniform random points instead of a grid");
        sub->add_option("--eta", cfg.eta, "Admissibility constant")->capture_default_str();
        sub->add_option("--leaf-size", cfg.leaf_size, "Cluster leaf size")->capture_default_str();
        sub->add_option("--rmax", cfg.rmax, "Largest rank for spectra / rank sweep")->capture_default_str();
        sub->add_option("--gamma", cfg.gamma, "Augmented Lagrangian weight")->capture_default_str();
        sub->add_option("--trunc", cfg.trunc, "Truncation: tol:EPS or rank:R")->capture_default_str();
        sub->add_option("--precision", cfg.precision, "Oracle precision: double or dd")->capture_default_str();
        sub->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
        sub->add_option("--out", cfg.out, "Output directory")->capture_default_str();
    };

    struct Sub {
        const char* name;
        const char* help;
    };
    const Sub subs[] = {
        {"gen-points", "Write a point cloud"},
        {"assemble", "Assemble A and B"},
        {"partition", "Build and validate the block partition"},
        {"spectra", "Blockwise singular values of the exact inverse block S11"},
        {"hchol", "H-Cholesky rank sweep of the augmented system"},
        {"solve", "Solve an interpolation problem"},
        {"bench", "Time assembly, compression, matvec and H-Cholesky"},
    };
    for (const auto& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        add_common(sub);
        if (std::string(s.name) == "solve") {
            sub->add_option("--data", cfg.data_file, "Data file ('d N' header, lines 'x_1 .. x_d f')");
            sub->add_option("--method", cfg.method, "dense or hchol")->capture_default_str();
        }
        if (std::string(s.name) == "hchol") sub->add_option("--ranks", cfg.ranks, "Explicit rank list")->delimiter(',');
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (k_min >= 0) cfg.k_min = k_min;
    return rbfh::cli::run_command(app.get_subcommands().front()->get_name(), cfg, std::cout, std::cerr);
}
