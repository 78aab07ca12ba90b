#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fedhc/clustering.hpp"
#include "fedhc/constellation.hpp"
#include "fedhc/datagen.hpp"
#include "fedhc/maml.hpp"
#include "fedhc/model.hpp"

namespace fedhc {

enum class Method { fedhc, c_fedavg, h_base, fedce };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

struct ChurnEvent {
    double time_s = -1.0;   // fires once simulated time passes this, or
    int ground_round = -1;  // fires when this ground round starts (1-based)
    int sat_id = -1;
    bool join = false;      // false = leave
};

struct BlobSpec {
    int n_classes = 4;
    int n_features = 8;
    int samples_per_class = 250;
    double class_separation = 3.0;
};

struct MnistSpec {
    std::string images;
    std::string labels;
    int max_samples = 0; // 0 = all
};

struct LabelNoiseSpec {
    double client_fraction = 0.0; // share of clients whose shards get noisy labels
    double flip_prob = 0.0;       // per-sample flip probability on those clients
};

struct DataSpec {
    bool use_mnist = false;
    BlobSpec blobs;
    MnistSpec mnist;
    PartitionScheme scheme = PartitionScheme::iid;
    double dirichlet_alpha = 0.5;
    double holdout_fraction = 0.2;
    LabelNoiseSpec label_noise;
};

struct TrainingSpec {
    double lr = 0.01;
    int local_epochs = 1;  // lambda
    int batch_size = 64;
    int cluster_rounds = 5; // m, per ground round
    int ground_rounds = 20; // M
    double target_accuracy = 0.8;
    bool quality_weighting = true; // inverse-loss weights at the cluster head
    bool ps_trains = true;
};

struct CostSpec {
    double noise_power_w = 1e-10;
    double epsilon0 = 1e-10;
    double inter_round_gap_s = 0.0;
    double objective_weight = 0.5; // psi
};

struct KmeansSpec {
    double eps_km2 = 1e-6;
    int max_iter = 100;
};

struct SimConfig {
    std::uint64_t seed = 1;
    Method method = Method::fedhc;
    int k = 3;

    std::vector<Satellite> satellites;
    std::vector<int> inactive_at_start;
    std::vector<GroundStation> ground_stations;
    bool earth_rotation = true;

    ModelKind model_kind = ModelKind::softmax_regression;
    std::vector<int> hidden_dims;
    std::uint64_t model_init_seed = 0; // 0 = derived from seed

    DataSpec data;
    TrainingSpec training;

    ReclusterPolicy recluster;
    WarmStartPolicy warm_start = WarmStartPolicy::meta;
    MetaConfig meta;

    CostSpec cost;
    KmeansSpec kmeans;
    std::vector<ChurnEvent> churn;
};

// Parses and validates; unknown keys are errors. Throws Error(ConfigError)
// with a message naming the offending field.
SimConfig load_config_file(const std::string& path);
SimConfig load_config_string(const std::string& json_text);

// Canonical JSON round-trip of a config (satellites fully materialized).
std::string config_to_json(const SimConfig& config);

// FNV-1a over the canonical serialization.
std::uint64_t config_hash(const SimConfig& config);

void validate_config(const SimConfig& config);

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ULL);

} // namespace fedhc
