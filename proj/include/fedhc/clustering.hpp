#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "fedhc/geometry.hpp"

namespace fedhc {

// Result of one Lloyd run over satellite positions. `wcss_history` records
// the within-cluster sum of squares after each iteration so callers can
// check the non-increase property.
struct ClusterAssignment {
    int k = 0;
    std::map<int, int> assignment;  // satellite id -> cluster index
    std::vector<Position3> centroids;
    std::map<int, int> ps;          // cluster index -> elected satellite id (non-empty clusters only)
    int iterations_used = 0;
    std::vector<double> wcss_history;
};

struct ReclusterPolicy {
    double dropout_threshold = 0.3; // Z
};

// Lloyd k-means over 3-D positions, seeded initial centroids drawn without
// replacement from the input points. Ties in the assignment step go to the
// lowest cluster index; an emptied cluster is re-seeded once per iteration at
// the point farthest from its nearest centroid. After Lloyd converges, a
// single-point local search runs (with Lloyd re-applied after accepted moves)
// so the returned partition cannot be improved by moving one point.
// Deterministic given the seed.
ClusterAssignment kmeans_cluster(const std::map<int, Position3>& positions, int k,
                                 double eps_km2 = 1e-6, int max_iter = 100,
                                 std::uint64_t seed = 0);

// Nearest member to each centroid, ties broken by lowest satellite id.
// Throws Error(EmptyCluster) when a cluster in [0, k) has no members.
std::map<int, int> elect_parameter_servers(const ClusterAssignment& assignment,
                                           const std::map<int, Position3>& positions);

// departed / cluster size. Throws Error(InvalidCount) unless
// 0 <= departed <= cluster_size and cluster_size >= 1.
double dropout_rate(int departed, int cluster_size);

// Strict comparison: re-cluster only when the rate exceeds the threshold.
bool should_recluster(double rate, const ReclusterPolicy& policy);

// General-dimension variant used for clustering clients by label histogram.
// Same algorithm and tie-breaking as kmeans_cluster.
struct VectorClusterAssignment {
    int k = 0;
    std::map<int, int> assignment;
    std::vector<std::vector<double>> centroids;
    int iterations_used = 0;
    std::vector<double> wcss_history;
};

VectorClusterAssignment kmeans_vectors(const std::map<int, std::vector<double>>& points, int k,
                                       double eps = 1e-6, int max_iter = 100,
                                       std::uint64_t seed = 0);

} // namespace fedhc
