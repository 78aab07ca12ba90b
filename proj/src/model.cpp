#include "fedhc/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fedhc/errors.hpp"
#include "fedhc/rng.hpp"

namespace fedhc {

namespace {

void check_shard(const ModelParams& params, const DataShard& shard) {
    if (shard.n_samples <= 0)
        throw Error(ErrorCode::ShapeMismatch, "empty data shard");
    if (params.layer_dims.size() < 2)
        throw Error(ErrorCode::ShapeMismatch, "model needs at least input and output dims");
    if (shard.n_features != params.layer_dims.front())
        throw Error(ErrorCode::ShapeMismatch,
                    "shard has " + std::to_string(shard.n_features) + " features, model expects " +
                        std::to_string(params.layer_dims.front()));
    if (static_cast<int>(params.values.size()) != param_count(params.layer_dims))
        throw Error(ErrorCode::ShapeMismatch, "parameter vector length does not match layer dims");
}

void check_same_shape(const ModelParams& a, const ModelParams& b) {
    if (a.layer_dims != b.layer_dims || a.values.size() != b.values.size())
        throw Error(ErrorCode::ShapeMismatch, "parameter vectors differ in shape");
}

// Per-layer views into the flat vector.
struct LayerView {
    const double* w; // out x in, row-major
    const double* b; // out
    int in, out;
};

std::vector<LayerView> layer_views(const ModelParams& p) {
    std::vector<LayerView> views;
    const double* ptr = p.values.data();
    for (std::size_t l = 0; l + 1 < p.layer_dims.size(); ++l) {
        LayerView v;
        v.in = p.layer_dims[l];
        v.out = p.layer_dims[l + 1];
        v.w = ptr;
        ptr += static_cast<std::size_t>(v.in) * v.out;
        v.b = ptr;
        ptr += v.out;
        views.push_back(v);
    }
    return views;
}

// Forward pass for one sample; fills per-layer activations (input excluded).
// Hidden layers use tanh, the last layer leaves raw logits.
void forward_sample(const std::vector<LayerView>& layers, const float* x,
                    std::vector<std::vector<double>>& acts) {
    std::vector<double> cur(layers.front().in);
    for (int j = 0; j < layers.front().in; ++j) cur[j] = x[j];
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const LayerView& lv = layers[l];
        std::vector<double>& out = acts[l];
        out.assign(lv.out, 0.0);
        for (int o = 0; o < lv.out; ++o) {
            const double* wrow = lv.w + static_cast<std::size_t>(o) * lv.in;
            double s = lv.b[o];
            for (int j = 0; j < lv.in; ++j) s += wrow[j] * cur[j];
            out[o] = s;
        }
        if (l + 1 < layers.size())
            for (double& v : out) v = std::tanh(v);
        cur = out;
    }
}

// logits -> probabilities in place, returns log-sum-exp for the loss.
double softmax_inplace(std::vector<double>& z) {
    double zmax = -std::numeric_limits<double>::infinity();
    for (double v : z)
        if (v > zmax) zmax = v;
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        sum += v;
    }
    double lse = zmax + std::log(sum);
    for (double& v : z) v /= sum;
    return lse;
}

// Mean cross-entropy and gradient over the given sample indices.
// grad may be null when only the loss is needed.
double loss_and_grad(const ModelParams& params, const DataShard& shard,
                     const std::vector<int>& indices, std::vector<double>* grad) {
    check_shard(params, shard);
    int n_classes = params.layer_dims.back();
    auto layers = layer_views(params);
    if (grad) grad->assign(params.values.size(), 0.0);

    // gradient views mirror the parameter layout
    std::vector<double*> gw(layers.size()), gb(layers.size());
    if (grad) {
        double* ptr = grad->data();
        for (std::size_t l = 0; l < layers.size(); ++l) {
            gw[l] = ptr;
            ptr += static_cast<std::size_t>(layers[l].in) * layers[l].out;
            gb[l] = ptr;
            ptr += layers[l].out;
        }
    }

    std::vector<std::vector<double>> acts(layers.size());
    double total = 0.0;
    double inv_n = 1.0 / static_cast<double>(indices.size());

    for (int idx : indices) {
        int y = shard.labels[idx];
        if (y < 0 || y >= n_classes)
            throw Error(ErrorCode::ShapeMismatch,
                        "label " + std::to_string(y) + " outside [0, " +
                            std::to_string(n_classes) + ")");
        const float* x = shard.row(idx);
        forward_sample(layers, x, acts);

        std::vector<double> probs = acts.back();
        double logit_y = probs[y];
        double lse = softmax_inplace(probs);
        total += lse - logit_y;

        if (!grad) continue;

        // backprop: delta at the output is (p - onehot) / n
        std::vector<double> delta(probs);
        delta[y] -= 1.0;
        for (double& d : delta) d *= inv_n;

        for (int l = static_cast<int>(layers.size()) - 1; l >= 0; --l) {
            const LayerView& lv = layers[l];
            const std::vector<double>* below =
                l > 0 ? &acts[l - 1] : nullptr; // input layer handled separately
            for (int o = 0; o < lv.out; ++o) {
                double d = delta[o];
                gb[l][o] += d;
                double* gwrow = gw[l] + static_cast<std::size_t>(o) * lv.in;
                if (below) {
                    for (int j = 0; j < lv.in; ++j) gwrow[j] += d * (*below)[j];
                } else {
                    for (int j = 0; j < lv.in; ++j) gwrow[j] += d * x[j];
                }
            }
            if (l > 0) {
                std::vector<double> prev(lv.in, 0.0);
                for (int o = 0; o < lv.out; ++o) {
                    const double* wrow = lv.w + static_cast<std::size_t>(o) * lv.in;
                    for (int j = 0; j < lv.in; ++j) prev[j] += wrow[j] * delta[o];
                }
                // d tanh(z) = 1 - tanh(z)^2, and acts[l-1] holds tanh(z)
                for (int j = 0; j < lv.in; ++j) prev[j] *= 1.0 - acts[l - 1][j] * acts[l - 1][j];
                delta = std::move(prev);
            }
        }
    }
    return total * inv_n;
}

std::vector<int> all_indices(const DataShard& shard) {
    std::vector<int> idx(shard.n_samples);
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
}

} // namespace

std::vector<int> ModelSpec::layer_dims() const {
    std::vector<int> dims;
    dims.push_back(n_features);
    if (kind == ModelKind::mlp)
        for (int h : hidden_dims) dims.push_back(h);
    dims.push_back(n_classes);
    return dims;
}

int param_count(const std::vector<int>& layer_dims) {
    int n = 0;
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l)
        n += layer_dims[l] * layer_dims[l + 1] + layer_dims[l + 1];
    return n;
}

ModelParams init_params(const ModelSpec& spec) {
    if (spec.n_features < 1 || spec.n_classes < 2)
        throw Error(ErrorCode::InvalidArgument, "model spec needs n_features >= 1, n_classes >= 2");
    ModelParams p;
    p.layer_dims = spec.layer_dims();
    p.values.reserve(param_count(p.layer_dims));
    Rng rng(Rng::mix(spec.seed, Rng::tag("init-params")));
    for (std::size_t l = 0; l + 1 < p.layer_dims.size(); ++l) {
        int fan_in = p.layer_dims[l];
        int fan_out = p.layer_dims[l + 1];
        double s = std::sqrt(6.0 / (fan_in + fan_out));
        for (int i = 0; i < fan_in * fan_out; ++i) p.values.push_back(rng.uniform(-s, s));
        for (int i = 0; i < fan_out; ++i) p.values.push_back(0.0);
    }
    return p;
}

double loss(const ModelParams& params, const DataShard& shard) {
    return loss_and_grad(params, shard, all_indices(shard), nullptr);
}

std::vector<double> gradient(const ModelParams& params, const DataShard& shard) {
    std::vector<double> g;
    loss_and_grad(params, shard, all_indices(shard), &g);
    return g;
}

ModelParams local_train_sgd(const ModelParams& params, const DataShard& shard, double lr,
                            int epochs, int batch_size, std::uint64_t seed) {
    check_shard(params, shard);
    if (lr < 0.0) throw Error(ErrorCode::InvalidArgument, "learning rate must be >= 0");
    if (epochs < 0) throw Error(ErrorCode::InvalidArgument, "epochs must be >= 0");
    if (batch_size < 1) throw Error(ErrorCode::InvalidArgument, "batch_size must be >= 1");
    if (lr == 0.0 || epochs == 0) return params;

    ModelParams w = params;
    Rng rng(Rng::mix(seed, Rng::tag("sgd-shuffle")));
    std::vector<int> order = all_indices(shard);
    std::vector<double> g;
    for (int e = 0; e < epochs; ++e) {
        rng.shuffle(order);
        for (int start = 0; start < shard.n_samples; start += batch_size) {
            int end = std::min(start + batch_size, shard.n_samples);
            std::vector<int> batch(order.begin() + start, order.begin() + end);
            // ascending order inside the batch keeps the summation deterministic
            // and makes a full batch identical to the unshuffled gradient
            std::sort(batch.begin(), batch.end());
            loss_and_grad(w, shard, batch, &g);
            for (std::size_t i = 0; i < w.values.size(); ++i) w.values[i] -= lr * g[i];
        }
    }
    return w;
}

ModelParams aggregate_size_weighted(
    const std::vector<std::pair<ModelParams, double>>& params_and_sizes) {
    if (params_and_sizes.empty())
        throw Error(ErrorCode::EmptyInput, "nothing to aggregate");
    double total = 0.0;
    for (const auto& [p, size] : params_and_sizes) {
        check_same_shape(params_and_sizes.front().first, p);
        if (size < 0.0) throw Error(ErrorCode::InvalidArgument, "negative client size");
        total += size;
    }
    if (!(total > 0.0)) throw Error(ErrorCode::AllZeroSizes, "all client sizes are zero");

    ModelParams out = params_and_sizes.front().first;
    out.values.assign(out.values.size(), 0.0);
    for (const auto& [p, size] : params_and_sizes) {
        double w = size / total;
        for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += w * p.values[i];
    }
    return out;
}

std::vector<double> quality_weights(const std::vector<double>& losses) {
    if (losses.empty()) throw Error(ErrorCode::EmptyInput, "no losses");
    double denom = 0.0;
    for (double l : losses) {
        if (!(l > 0.0)) throw Error(ErrorCode::NonPositiveLoss, "loss values must be > 0");
        denom += 1.0 / l;
    }
    std::vector<double> p;
    p.reserve(losses.size());
    for (double l : losses) p.push_back((1.0 / l) / denom);
    return p;
}

ModelParams aggregate_quality_weighted(
    const std::vector<std::pair<ModelParams, double>>& params_and_losses) {
    std::vector<double> losses;
    losses.reserve(params_and_losses.size());
    for (const auto& [p, l] : params_and_losses) losses.push_back(l);
    std::vector<double> weights = quality_weights(losses);

    std::vector<std::pair<ModelParams, double>> weighted;
    weighted.reserve(params_and_losses.size());
    for (std::size_t i = 0; i < params_and_losses.size(); ++i)
        weighted.emplace_back(params_and_losses[i].first, weights[i]);
    return aggregate_size_weighted(weighted);
}

double accuracy(const ModelParams& params, const DataShard& shard) {
    check_shard(params, shard);
    int correct = 0;
    for (int i = 0; i < shard.n_samples; ++i)
        if (predict(params, shard.row(i)) == shard.labels[i]) ++correct;
    return static_cast<double>(correct) / shard.n_samples;
}

int predict(const ModelParams& params, const float* row) {
    auto layers = layer_views(params);
    std::vector<std::vector<double>> acts(layers.size());
    forward_sample(layers, row, acts);
    const std::vector<double>& logits = acts.back();
    int best = 0;
    for (int c = 1; c < static_cast<int>(logits.size()); ++c)
        if (logits[c] > logits[best]) best = c; // strict > keeps the lowest index on ties
    return best;
}

} // namespace fedhc
