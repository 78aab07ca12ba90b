#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "fedhc/config.hpp"
#include "fedhc/costmodel.hpp"
#include "fedhc/datagen.hpp"

namespace fedhc {

// Per-ground-round record. The cluster-level vectors follow cluster index
// order and are kept in memory only; metrics.csv carries the scalars.
struct RoundMetrics {
    int round = 0; // 1-based
    int clusters = 0;
    int participating = 0;
    bool reclustered = false;
    CostReport cost;
    double loss = 0.0;     // global model on the held-out set
    double accuracy = 0.0; // global model on the held-out set
    std::vector<double> cluster_loss;
    std::vector<double> cluster_accuracy;
    std::vector<int> participating_clusters;
};

struct RunResult {
    ModelParams final_model;
    std::vector<RoundMetrics> rounds;
    int rounds_executed = 0;
    bool reached_target = false;
    int rounds_to_target = 0; // rounds_executed when reached, else the configured maximum
    double total_tc_sum_s = 0.0;
    double total_tc_parallel_s = 0.0;
    double total_e_tr_j = 0.0;
    double total_e_agg_j = 0.0;
    double total_e_c_j = 0.0;
    double final_accuracy = 0.0;
    int recluster_events = 0;
    std::uint64_t partition_hash = 0;
    std::uint64_t config_hash = 0;
};

// One cluster's live state inside a run.
struct ClusterRuntime {
    std::vector<int> members; // ascending satellite ids
    int departed = 0;         // since this cluster was formed
    int ps = -1;
    Position3 centroid;
    ModelParams model;
};

// Everything a run mutates; exposed so cluster churn can be unit-tested.
struct SimState {
    SimConfig config;
    std::map<int, Satellite> satellites; // all configured, effective wire sizes resolved
    std::map<int, DataShard> shards;     // all configured
    std::set<int> active;
    std::vector<ClusterRuntime> clusters;
    std::map<int, ModelParams> pending_warm; // first-round start models for joiners
    ModelParams global_model;
    ModelParams meta_model;
    DataShard holdout;
    ModelSpec model_spec;
    double t_s = 0.0;
    int ground_round = 0;
    int recluster_count = 0;
    int join_count = 0;
    std::uint64_t partition_hash = 0;
    std::vector<char> churn_fired;
};

// Builds data, initial clustering and models for a validated config.
SimState init_state(const SimConfig& config);

// Re-runs the initial clustering only (used to script churn against the
// exact clusters a run will see).
ClusterAssignment initial_clustering(const SimConfig& config);

// leave: drop the satellite from its cluster and count the departure
// (the cluster head is re-elected if it left). join: attach to the
// nearest-centroid cluster with a warm-start model pending.
void apply_churn(SimState& state, const ChurnEvent& event);

// Full re-cluster + head re-election when any cluster's dropout rate
// exceeds the threshold; cluster models restart from the warm-start policy.
bool recluster_if_needed(SimState& state);

RunResult run(const SimConfig& config);

struct SweepRow {
    Method method = Method::fedhc;
    int k = 1;
    int rounds_to_target = 0;
    bool reached = false;
    double tc_sum_total_s = 0.0;
    double tc_parallel_total_s = 0.0;
    double e_c_total_j = 0.0;
    double objective = 0.0;
};

// One run per (method, K) with a shared seed; the centralized method runs
// once since K does not affect it. Rows sorted by (method name, K).
std::vector<SweepRow> sweep_k(const SimConfig& base, const std::vector<int>& k_values,
                              const std::vector<Method>& methods);

// --- output files ---

std::string metrics_to_csv(const RunResult& result);
std::string summary_to_json(const SimConfig& config, const RunResult& result);
std::string manifest_to_json(const SimConfig& config, const RunResult& result,
                             const std::string& config_path, const std::string& out_dir);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);
std::string sweep_to_markdown(const std::vector<SweepRow>& rows);

void write_run_outputs(const SimConfig& config, const RunResult& result,
                       const std::string& out_dir, const std::string& config_path);

// Tidy (round, metric, value) pass-through of a run directory's metrics.csv.
// Throws Error(MissingMetrics) when the file is absent or has no data rows.
std::string plotdata_from_dir(const std::string& run_dir);

} // namespace fedhc
