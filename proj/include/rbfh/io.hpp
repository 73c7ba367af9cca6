#pragma once

#include "rbfh/clustering.hpp"
#include "rbfh/hmatrix.hpp"
#include "rbfh/kernels.hpp"
#include "rbfh/oracle.hpp"
#include "rbfh/solver.hpp"

#include <json.hpp>

#include <string>

namespace rbfh {

using json = nlohmann::ordered_json;

/// {"family": "tps"|"matern", "d", "k", "k_min", "b", "normalize_prefactor"}.
json kernel_to_json(const KernelSpec& spec);
/// Missing k_min/b fall back to the family defaults; inconsistent values throw
/// std::invalid_argument.
KernelSpec kernel_from_json(const json& j);

json box_to_json(const AxisBox& b);
AxisBox box_from_json(const json& j);

/// Cluster ranges and boxes, permutation, eta, leaf size and both block lists.
json partition_to_json(const BlockPartition& p);
BlockPartition partition_from_json(const json& j);

json diagnostics_to_json(const HMatrixDiagnostics& d);

/// Index in JSON, block payloads as consecutive binary matrices in `bin_path`
/// (dense leaves: one matrix; low-rank leaves: X then Y).
void write_hmatrix(const HMatrix& h, const std::string& json_path, const std::string& bin_path);
HMatrix read_hmatrix(const std::string& json_path, const std::string& bin_path,
                     std::shared_ptr<const BlockPartition> partition);

/// {c, d_coeffs, kernel, unisolvent_indices, node_file_hash}.
json interpolant_to_json(const Interpolant& u, const std::string& node_file_hash);

/// FNV-1a of the canonical point-file text (17 significant digits).
std::string point_cloud_hash(const PointCloud& cloud);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace rbfh
