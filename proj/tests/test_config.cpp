#include <doctest.h>

#include <string>

#include "fedhc/config.hpp"
#include "fedhc/errors.hpp"

using namespace fedhc;

namespace {

std::string minimal_config(const std::string& extra = "") {
    return R"({
      "seed": 5,
      "method": "fedhc",
      "k": 2,
      "constellation": {
        "walker": {"planes": 2, "sats_per_plane": 3, "altitude_km": 1300.0, "inclination_deg": 53.0}
      },
      "ground_stations": [{"id": 0, "latitude_deg": 0.0, "longitude_deg": 0.0, "min_elevation_deg": 10.0}])" +
           extra + "\n}";
}

} // namespace

TEST_CASE("minimal config parses with defaults applied") {
    SimConfig cfg = load_config_string(minimal_config());
    CHECK(cfg.seed == 5);
    CHECK(cfg.method == Method::fedhc);
    CHECK(cfg.k == 2);
    CHECK(cfg.satellites.size() == 6);
    CHECK(cfg.training.lr == doctest::Approx(0.01));
    CHECK(cfg.training.batch_size == 64);
    CHECK(cfg.meta.inner_lr == doctest::Approx(1e-3));
    CHECK(cfg.meta.meta_lr == doctest::Approx(1e-3));
    CHECK(cfg.ground_stations[0].min_elevation_deg == doctest::Approx(10.0));
    CHECK(cfg.satellites[0].altitude_km == doctest::Approx(1300.0));
    CHECK(cfg.satellites[0].inclination_deg == doctest::Approx(53.0));
}

TEST_CASE("unknown keys are rejected, naming the field") {
    std::string text = minimal_config(R"(, "trainng": {})");
    try {
        load_config_string(text);
        FAIL("expected a config error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigError);
        CHECK(std::string(e.what()).find("trainng") != std::string::npos);
    }

    std::string nested = minimal_config(R"(, "training": {"lrr": 0.1})");
    try {
        load_config_string(nested);
        FAIL("expected a config error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("lrr") != std::string::npos);
    }
}

TEST_CASE("k larger than the constellation names the field") {
    std::string text = minimal_config();
    text.replace(text.find("\"k\": 2"), 6, "\"k\": 9");
    try {
        load_config_string(text);
        FAIL("expected a config error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigError);
        std::string msg = e.what();
        CHECK(msg.find("k:") != std::string::npos);
        CHECK(msg.find("9") != std::string::npos);
        CHECK(msg.find("6") != std::string::npos);
    }
}

TEST_CASE("config round-trips through its canonical serialization") {
    std::string text = minimal_config(R"(,
      "model": {"kind": "mlp", "hidden_dims": [8], "init_seed": 3},
      "data": {"source": "blobs",
               "blobs": {"n_classes": 5, "n_features": 7, "samples_per_class": 40, "class_separation": 2.5},
               "partition": {"scheme": "dirichlet", "dirichlet_alpha": 0.3},
               "holdout_fraction": 0.25,
               "label_noise": {"client_fraction": 0.4, "flip_prob": 0.3}},
      "training": {"lr": 0.07, "local_epochs": 2, "batch_size": 8, "cluster_rounds": 4,
                   "ground_rounds": 9, "target_accuracy": 0.75, "quality_weighting": false,
                   "ps_trains": false},
      "recluster": {"dropout_threshold": 0.25, "warm_start": "cluster_copy"},
      "meta": {"inner_lr": 0.002, "meta_lr": 0.004, "tasks_per_update": 3, "inner_steps": 2},
      "cost": {"noise_power_w": 2e-10, "epsilon0": 3e-10, "inter_round_gap_s": 5.0, "objective_weight": 0.7},
      "kmeans": {"eps_km2": 1e-5, "max_iter": 55},
      "churn": [{"ground_round": 2, "sat": 1, "event": "leave"},
                {"time_s": 9.5, "sat": 1, "event": "join"}])");
    SimConfig a = load_config_string(text);
    SimConfig b = load_config_string(config_to_json(a));
    CHECK(config_to_json(a) == config_to_json(b));
    CHECK(config_hash(a) == config_hash(b));

    CHECK(b.model_kind == ModelKind::mlp);
    CHECK(b.hidden_dims == std::vector<int>{8});
    CHECK(b.data.scheme == PartitionScheme::dirichlet);
    CHECK(b.data.label_noise.flip_prob == doctest::Approx(0.3));
    CHECK(b.training.quality_weighting == false);
    CHECK(b.warm_start == WarmStartPolicy::cluster_copy);
    CHECK(b.churn.size() == 2);
    CHECK(b.churn[0].ground_round == 2);
    CHECK(b.churn[1].join);
    CHECK(b.cost.inter_round_gap_s == doctest::Approx(5.0));
}

TEST_CASE("explicit satellites and overrides") {
    std::string text = R"({
      "seed": 1, "k": 1,
      "constellation": {
        "defaults": {"cpu_freq_hz": 5e8},
        "satellites": [
          {"id": 3, "altitude_km": 900.0, "phase_deg": 10.0},
          {"id": 4, "altitude_km": 900.0, "phase_deg": 20.0, "cpu_freq_hz": 7e8}
        ]
      },
      "ground_stations": [{"latitude_deg": 0.0, "longitude_deg": 0.0}]
    })";
    SimConfig cfg = load_config_string(text);
    REQUIRE(cfg.satellites.size() == 2);
    CHECK(cfg.satellites[0].id == 3);
    CHECK(cfg.satellites[0].cpu_freq_hz == doctest::Approx(5e8)); // from defaults
    CHECK(cfg.satellites[1].cpu_freq_hz == doctest::Approx(7e8)); // explicit
}

TEST_CASE("plane overrides reach every satellite of the plane") {
    std::string text = R"({
      "seed": 1, "k": 2,
      "constellation": {
        "walker": {"planes": 2, "sats_per_plane": 2, "altitude_km": 1300.0, "inclination_deg": 53.0},
        "overrides": [{"plane": 1, "cpu_freq_hz": 1e8}]
      },
      "ground_stations": [{"latitude_deg": 0.0, "longitude_deg": 0.0}]
    })";
    SimConfig cfg = load_config_string(text);
    REQUIRE(cfg.satellites.size() == 4);
    CHECK(cfg.satellites[0].cpu_freq_hz == doctest::Approx(1e9));
    CHECK(cfg.satellites[1].cpu_freq_hz == doctest::Approx(1e9));
    CHECK(cfg.satellites[2].cpu_freq_hz == doctest::Approx(1e8));
    CHECK(cfg.satellites[3].cpu_freq_hz == doctest::Approx(1e8));
}

TEST_CASE("a zero held-out fraction is rejected up front") {
    std::string text = minimal_config(R"(, "data": {"holdout_fraction": 0.0})");
    CHECK_THROWS_AS(load_config_string(text), Error);
}

TEST_CASE("malformed documents fail closed") {
    CHECK_THROWS_AS(load_config_string("not json"), Error);
    CHECK_THROWS_AS(load_config_string("[1,2,3]"), Error);
    CHECK_THROWS_AS(load_config_string("{}"), Error); // no constellation
    CHECK_THROWS_AS(load_config_string(minimal_config(R"(, "method": "nonsense")")), Error);
    CHECK_THROWS_AS(
        load_config_string(minimal_config(R"(, "churn": [{"sat": 0, "event": "leave"}])")),
        Error); // churn without a schedule
    CHECK_THROWS_AS(
        load_config_string(minimal_config(R"(, "churn": [{"ground_round": 1, "sat": 77, "event": "leave"}])")),
        Error); // unknown satellite
}
