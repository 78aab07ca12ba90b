#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace fedhc {

// Flat parameter vector for a softmax-regression or MLP classifier.
// Layout per layer l: weight matrix (dims[l+1] x dims[l], row-major), then
// bias (dims[l+1]). `size_bits` is the wire size used by the cost model.
struct ModelParams {
    std::vector<double> values;
    std::vector<int> layer_dims; // {in, hidden..., out}
    std::int64_t size_bits = 0;  // 0 means 32 * values.size()

    std::int64_t wire_bits() const {
        return size_bits > 0 ? size_bits : 32 * static_cast<std::int64_t>(values.size());
    }
};

// One client's local dataset: row-major feature matrix + class labels.
struct DataShard {
    int n_samples = 0;
    int n_features = 0;
    std::vector<float> features; // n_samples * n_features
    std::vector<int> labels;     // class indices
    int owner = -1;              // satellite id, -1 when unassigned

    const float* row(int i) const { return features.data() + static_cast<std::size_t>(i) * n_features; }
};

enum class ModelKind { softmax_regression, mlp };

struct ModelSpec {
    ModelKind kind = ModelKind::softmax_regression;
    int n_features = 1;
    int n_classes = 2;
    std::vector<int> hidden_dims; // mlp only
    std::uint64_t seed = 0;

    std::vector<int> layer_dims() const;
};

int param_count(const std::vector<int>& layer_dims);

// Uniform(-s, s) weights with s = sqrt(6 / (fan_in + fan_out)), zero biases.
// Deterministic given spec.seed.
ModelParams init_params(const ModelSpec& spec);

// Mean cross-entropy over the shard. Throws Error(ShapeMismatch) when the
// shard's feature width does not match the model input.
double loss(const ModelParams& params, const DataShard& shard);

// Full-batch gradient of the mean cross-entropy, natural sample order.
std::vector<double> gradient(const ModelParams& params, const DataShard& shard);

// Mini-batch SGD: `epochs` seeded-shuffle passes; each batch's gradient is
// accumulated over ascending sample indices so a full batch reproduces the
// unshuffled gradient bit for bit. lr == 0 or epochs == 0 returns the input.
ModelParams local_train_sgd(const ModelParams& params, const DataShard& shard, double lr,
                            int epochs, int batch_size, std::uint64_t seed);

// w = sum_i (D_i / sum D) * w_i; inputs consumed in the given order.
ModelParams aggregate_size_weighted(
    const std::vector<std::pair<ModelParams, double>>& params_and_sizes);

// p_i = (1/L_i) / sum_j (1/L_j). All losses must be > 0.
std::vector<double> quality_weights(const std::vector<double>& losses);

ModelParams aggregate_quality_weighted(
    const std::vector<std::pair<ModelParams, double>>& params_and_losses);

// Fraction of samples whose argmax prediction (ties -> lowest class) matches.
double accuracy(const ModelParams& params, const DataShard& shard);

int predict(const ModelParams& params, const float* row);

} // namespace fedhc
