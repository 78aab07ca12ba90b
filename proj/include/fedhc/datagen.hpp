#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedhc/model.hpp"

namespace fedhc {

enum class PartitionScheme { iid, dirichlet };

struct PartitionSpec {
    int n_clients = 1;
    PartitionScheme scheme = PartitionScheme::iid;
    double dirichlet_alpha = 0.5;
    std::uint64_t seed = 0;
};

// Gaussian blobs: class means at seeded random unit directions scaled by
// class_separation, unit-variance samples around them. Rows are class-major.
DataShard synth_blobs(int n_classes, int n_features, int samples_per_class,
                      double class_separation, std::uint64_t seed);

// Standard big-endian IDX pair (images magic 0x803, labels 0x801).
// Pixels are scaled to [0, 1] by dividing by 255.
DataShard load_idx(const std::string& images_path, const std::string& labels_path);

// Index-level split: every sample lands in exactly one client.
//   iid:       seeded shuffle, contiguous near-equal chunks (sizes differ <= 1)
//   dirichlet: per-class client proportions ~ Dirichlet(alpha), largest-remainder
//              rounding; empty clients repaired from the largest one
// Indices inside each client are sorted ascending.
std::vector<std::vector<int>> partition_indices(const std::vector<int>& labels, int n_classes,
                                                const PartitionSpec& spec);

std::vector<DataShard> partition(const DataShard& shard, int n_classes, const PartitionSpec& spec);

// Row subset of a shard, in index order.
DataShard subset(const DataShard& shard, const std::vector<int>& indices);

} // namespace fedhc
