#pragma once

#include <vector>

#include "fedhc/model.hpp"

namespace fedhc {

struct MetaConfig {
    double inner_lr = 1e-3;  // alpha
    double meta_lr = 1e-3;   // beta
    int tasks_per_update = 5;
    int inner_steps = 1;
};

// One full-batch gradient step on the task: w - alpha * grad(w).
// Identical code path to local_train_sgd with one epoch and a full batch.
ModelParams inner_adapt(const ModelParams& params, const DataShard& task, double alpha);

// First-order meta update: adapt per task (inner_steps composed steps), then
// step the initialization against the summed post-adaptation gradients,
// w - beta * sum_i grad(w_i'). Tasks are consumed in list order.
ModelParams meta_update(const ModelParams& params, const std::vector<DataShard>& tasks,
                        const MetaConfig& cfg);

enum class WarmStartPolicy { meta, cluster_copy, fresh };

// Initialization handed to satellites entering a (new) cluster:
//   meta         -> one meta_update of meta_model over the sampled tasks
//                   (meta_model unchanged when tasks is empty)
//   cluster_copy -> the target cluster's current model
//   fresh        -> init_params(spec)
ModelParams warm_start(const ModelParams& target_cluster_model, const ModelParams& meta_model,
                       WarmStartPolicy policy, const std::vector<DataShard>& tasks,
                       const MetaConfig& cfg, const ModelSpec& spec);

} // namespace fedhc
