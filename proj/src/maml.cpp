#include "fedhc/maml.hpp"

#include "fedhc/errors.hpp"

namespace fedhc {

ModelParams inner_adapt(const ModelParams& params, const DataShard& task, double alpha) {
    if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "inner learning rate must be > 0");
    return local_train_sgd(params, task, alpha, 1, task.n_samples, 0);
}

ModelParams meta_update(const ModelParams& params, const std::vector<DataShard>& tasks,
                        const MetaConfig& cfg) {
    if (tasks.empty()) throw Error(ErrorCode::EmptyTaskList, "meta update needs at least one task");
    if (cfg.meta_lr < 0.0) throw Error(ErrorCode::InvalidArgument, "meta learning rate must be >= 0");
    if (cfg.inner_steps < 1) throw Error(ErrorCode::InvalidArgument, "inner_steps must be >= 1");
    if (cfg.meta_lr == 0.0) return params;

    std::vector<double> summed(params.values.size(), 0.0);
    for (const DataShard& task : tasks) {
        ModelParams adapted = params;
        for (int s = 0; s < cfg.inner_steps; ++s) adapted = inner_adapt(adapted, task, cfg.inner_lr);
        std::vector<double> g = gradient(adapted, task);
        for (std::size_t i = 0; i < summed.size(); ++i) summed[i] += g[i];
    }

    ModelParams out = params;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= cfg.meta_lr * summed[i];
    return out;
}

ModelParams warm_start(const ModelParams& target_cluster_model, const ModelParams& meta_model,
                       WarmStartPolicy policy, const std::vector<DataShard>& tasks,
                       const MetaConfig& cfg, const ModelSpec& spec) {
    switch (policy) {
        case WarmStartPolicy::cluster_copy:
            return target_cluster_model;
        case WarmStartPolicy::fresh:
            return init_params(spec);
        case WarmStartPolicy::meta:
            if (tasks.empty()) return meta_model;
            return meta_update(meta_model, tasks, cfg);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown warm start policy");
}

} // namespace fedhc
