#pragma once

#include "rbfh/hmatrix.hpp"
#include "rbfh/io.hpp"
#include "rbfh/kernels.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rbfh::cli {

inline constexpr const char* kVersion = "1.0.0";

struct RunConfig {
    // kernel
    std::string kernel = "tps";
    int d = 2;
    int k = 2;
    std::optional<int> k_min;
    double b = 1.0;
    bool normalize_prefactor = false;
    std::string config_file; // JSON kernel config, overrides the kernel flags
    // points
    std::string points_file;
    std::string data_file;
    std::size_t n = 15;
    double beta = 1.0;
    std::size_t random_count = 0; // > 0: uniform random cloud instead of a grid
    // partition
    double eta = 2.0;
    std::size_t leaf_size = 32;
    // modes
    int rmax = 20;
    double gamma = 1.0;
    std::string trunc = "tol:1e-12";
    std::string precision = "double";
    std::string method = "dense";
    std::vector<int> ranks;
    unsigned long long seed = 0;
    std::string out = ".";
};

/// "tol:EPS" or "rank:R".
Truncation parse_truncation(const std::string& s);

KernelSpec kernel_spec(const RunConfig& cfg);
PointCloud load_points(const RunConfig& cfg);

/// Canonical JSON of every field that influences results (paths excluded).
json config_json(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);

/// Each command writes its files under cfg.out, prints a short summary to `log`
/// and returns 0. Validation problems throw std::invalid_argument, numerical
/// failures std::runtime_error (mapped to exit codes 2 and 1 by run_command).
int cmd_gen_points(const RunConfig& cfg, std::ostream& log);
int cmd_assemble(const RunConfig& cfg, std::ostream& log);
int cmd_partition(const RunConfig& cfg, std::ostream& log);
int cmd_spectra(const RunConfig& cfg, std::ostream& log);
int cmd_hchol(const RunConfig& cfg, std::ostream& log);
int cmd_solve(const RunConfig& cfg, std::ostream& log);
int cmd_bench(const RunConfig& cfg, std::ostream& log);

/// Dispatch by subcommand name with exit-code mapping: 0 ok, 2 validation, 1 computation.
int run_command(const std::string& name, const RunConfig& cfg, std::ostream& log, std::ostream& err);

} // namespace rbfh::cli
