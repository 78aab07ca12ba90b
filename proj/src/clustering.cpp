#include "fedhc/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fedhc/errors.hpp"
#include "fedhc/rng.hpp"

namespace fedhc {

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// Nearest centroid by squared distance; ties go to the lowest index.
int nearest_centroid(const std::vector<double>& p, const std::vector<std::vector<double>>& centroids) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < static_cast<int>(centroids.size()); ++j) {
        double d = sq_dist(p, centroids[j]);
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return best;
}

double wcss(const std::vector<std::vector<double>>& pts, const std::vector<int>& assign,
            const std::vector<std::vector<double>>& centroids) {
    double s = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) s += sq_dist(pts[i], centroids[assign[i]]);
    return s;
}

struct CoreResult {
    std::vector<int> assign;
    std::vector<std::vector<double>> centroids;
    int iterations = 0;
    std::vector<double> wcss_history;
};

// Lloyd iterations followed by a single-point local search. The polish keeps the
// returned partition stable under any single-point reassignment, which plain
// Lloyd does not guarantee; after each accepted move Lloyd re-runs so the
// nearest-centroid and centroid-equals-mean properties still hold on exit.
CoreResult kmeans_core(const std::vector<std::vector<double>>& pts, int k, double eps,
                       int max_iter, std::uint64_t seed) {
    int n = static_cast<int>(pts.size());
    std::size_t dim = pts.front().size();

    // seeded draw of k distinct points as initial centroids
    Rng rng(Rng::mix(seed, Rng::tag("kmeans-init")));
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<std::vector<double>> centroids;
    centroids.reserve(k);
    for (int j = 0; j < k; ++j) centroids.push_back(pts[order[j]]);

    std::vector<int> assign(n, 0);
    std::vector<int> counts(k, 0);
    CoreResult out;

    // one assignment + update pass; returns true when the squared centroid
    // displacement drops below eps
    auto lloyd_pass = [&]() {
        for (int i = 0; i < n; ++i) assign[i] = nearest_centroid(pts[i], centroids);

        // Re-seed each emptied cluster once at the point farthest from its
        // nearest centroid, then reassign. Degenerate inputs (all points
        // identical) can still leave clusters empty; those stay empty.
        counts.assign(k, 0);
        for (int a : assign) ++counts[a];
        bool reseeded = false;
        for (int j = 0; j < k; ++j) {
            if (counts[j] != 0) continue;
            int far_idx = 0;
            double far_d = -1.0;
            for (int i = 0; i < n; ++i) {
                double d = sq_dist(pts[i], centroids[nearest_centroid(pts[i], centroids)]);
                if (d > far_d) {
                    far_d = d;
                    far_idx = i;
                }
            }
            centroids[j] = pts[far_idx];
            reseeded = true;
        }
        if (reseeded) {
            for (int i = 0; i < n; ++i) assign[i] = nearest_centroid(pts[i], centroids);
            counts.assign(k, 0);
            for (int a : assign) ++counts[a];
        }

        // centroid update: mean of members; empty clusters keep their centroid
        std::vector<std::vector<double>> next(k, std::vector<double>(dim, 0.0));
        for (int i = 0; i < n; ++i)
            for (std::size_t c = 0; c < dim; ++c) next[assign[i]][c] += pts[i][c];
        double shift_sq = 0.0;
        for (int j = 0; j < k; ++j) {
            if (counts[j] == 0) {
                next[j] = centroids[j];
            } else {
                for (std::size_t c = 0; c < dim; ++c) next[j][c] /= counts[j];
            }
            shift_sq += sq_dist(next[j], centroids[j]);
        }
        centroids = next;
        ++out.iterations;
        out.wcss_history.push_back(wcss(pts, assign, centroids));
        return shift_sq < eps;
    };

    auto run_lloyd = [&]() {
        for (int iter = 0; iter < max_iter; ++iter)
            if (lloyd_pass()) break;
    };

    // one sweep of exact-cost single-point moves; source clusters never empty
    auto polish_pass = [&]() {
        bool moved = false;
        for (int i = 0; i < n; ++i) {
            int a = assign[i];
            if (counts[a] <= 1) continue;
            double removal =
                counts[a] / (counts[a] - 1.0) * sq_dist(pts[i], centroids[a]);
            for (int b = 0; b < k; ++b) {
                if (b == a) continue;
                double addition = counts[b] / (counts[b] + 1.0) * sq_dist(pts[i], centroids[b]);
                if (addition < removal - 1e-12 * (1.0 + removal)) {
                    for (std::size_t c = 0; c < dim; ++c) {
                        centroids[a][c] = (counts[a] * centroids[a][c] - pts[i][c]) / (counts[a] - 1);
                        centroids[b][c] = (counts[b] * centroids[b][c] + pts[i][c]) / (counts[b] + 1);
                    }
                    --counts[a];
                    ++counts[b];
                    assign[i] = b;
                    moved = true;
                    break;
                }
            }
        }
        return moved;
    };

    run_lloyd();
    for (int guard = 0; guard < 100; ++guard) {
        if (!polish_pass()) break;
        run_lloyd();
    }

    out.assign = assign;
    out.centroids = centroids;
    return out;
}

void check_inputs(std::size_t n, int k, double eps) {
    if (n == 0) throw Error(ErrorCode::EmptyInput, "no points to cluster");
    if (k < 1 || static_cast<std::size_t>(k) > n)
        throw Error(ErrorCode::InvalidK,
                    "k=" + std::to_string(k) + " invalid for " + std::to_string(n) + " points");
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be > 0");
}

} // namespace

ClusterAssignment kmeans_cluster(const std::map<int, Position3>& positions, int k, double eps_km2,
                                 int max_iter, std::uint64_t seed) {
    check_inputs(positions.size(), k, eps_km2);

    std::vector<int> ids;
    std::vector<std::vector<double>> pts;
    ids.reserve(positions.size());
    pts.reserve(positions.size());
    for (const auto& [id, p] : positions) {
        ids.push_back(id);
        pts.push_back({p.x, p.y, p.z});
    }

    CoreResult core = kmeans_core(pts, k, eps_km2, max_iter, seed);

    ClusterAssignment result;
    result.k = k;
    result.iterations_used = core.iterations;
    result.wcss_history = std::move(core.wcss_history);
    for (std::size_t i = 0; i < ids.size(); ++i) result.assignment[ids[i]] = core.assign[i];
    result.centroids.reserve(k);
    for (const auto& c : core.centroids) result.centroids.push_back({c[0], c[1], c[2]});

    // PS election for the non-empty clusters
    std::vector<double> best_d(k, std::numeric_limits<double>::infinity());
    for (const auto& [id, cluster] : result.assignment) {
        double d = euclidean_distance(positions.at(id), result.centroids[cluster]);
        // near-ties keep the incumbent (lowest id), so exactly symmetric
        // configurations elect the same head after a coordinate translation
        if (!result.ps.count(cluster) || d < best_d[cluster] - 1e-9 * (1.0 + best_d[cluster])) {
            best_d[cluster] = d;
            result.ps[cluster] = id;
        }
    }
    return result;
}

std::map<int, int> elect_parameter_servers(const ClusterAssignment& assignment,
                                           const std::map<int, Position3>& positions) {
    std::map<int, int> ps;
    std::vector<double> best_d(assignment.k, std::numeric_limits<double>::infinity());
    for (const auto& [id, cluster] : assignment.assignment) {
        auto it = positions.find(id);
        if (it == positions.end())
            throw Error(ErrorCode::InvalidArgument,
                        "no position for satellite " + std::to_string(id));
        double d = euclidean_distance(it->second, assignment.centroids[cluster]);
        // ids iterate ascending; near-ties keep the incumbent (lowest id)
        if (!ps.count(cluster) || d < best_d[cluster] - 1e-9 * (1.0 + best_d[cluster])) {
            best_d[cluster] = d;
            ps[cluster] = id;
        }
    }
    for (int j = 0; j < assignment.k; ++j)
        if (!ps.count(j))
            throw Error(ErrorCode::EmptyCluster, "cluster " + std::to_string(j) + " has no members");
    return ps;
}

double dropout_rate(int departed, int cluster_size) {
    if (cluster_size < 1)
        throw Error(ErrorCode::InvalidCount, "cluster size must be >= 1");
    if (departed < 0 || departed > cluster_size)
        throw Error(ErrorCode::InvalidCount,
                    "departed count " + std::to_string(departed) + " outside [0, " +
                        std::to_string(cluster_size) + "]");
    return static_cast<double>(departed) / static_cast<double>(cluster_size);
}

bool should_recluster(double rate, const ReclusterPolicy& policy) {
    return rate > policy.dropout_threshold;
}

VectorClusterAssignment kmeans_vectors(const std::map<int, std::vector<double>>& points, int k,
                                       double eps, int max_iter, std::uint64_t seed) {
    check_inputs(points.size(), k, eps);

    std::vector<int> ids;
    std::vector<std::vector<double>> pts;
    std::size_t dim = points.begin()->second.size();
    for (const auto& [id, v] : points) {
        if (v.size() != dim)
            throw Error(ErrorCode::ShapeMismatch, "inconsistent point dimensions");
        ids.push_back(id);
        pts.push_back(v);
    }

    CoreResult core = kmeans_core(pts, k, eps, max_iter, seed);

    VectorClusterAssignment result;
    result.k = k;
    result.iterations_used = core.iterations;
    result.wcss_history = std::move(core.wcss_history);
    result.centroids = std::move(core.centroids);
    for (std::size_t i = 0; i < ids.size(); ++i) result.assignment[ids[i]] = core.assign[i];
    return result;
}

} // namespace fedhc
