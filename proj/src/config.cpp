#include "fedhc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fedhc/errors.hpp"

namespace fedhc {

using nlohmann::json;

const char* method_name(Method m) {
    switch (m) {
        case Method::fedhc: return "fedhc";
        case Method::c_fedavg: return "c_fedavg";
        case Method::h_base: return "h_base";
        case Method::fedce: return "fedce";
    }
    return "unknown";
}

Method method_from_name(const std::string& name) {
    if (name == "fedhc") return Method::fedhc;
    if (name == "c_fedavg") return Method::c_fedavg;
    if (name == "h_base") return Method::h_base;
    if (name == "fedce") return Method::fedce;
    throw Error(ErrorCode::ConfigError,
                "method: unknown value '" + name + "' (expected fedhc|c_fedavg|h_base|fedce)");
}

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
    throw Error(ErrorCode::ConfigError, field + ": " + why);
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key())) bad(where.empty() ? it.key() : where + "." + it.key(),
                                        "unknown key");
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        bad(key, std::string("bad value (") + e.what() + ")");
    }
}

Satellite parse_satellite_fields(const json& j, const Satellite& defaults, const std::string& where) {
    reject_unknown(j, {"id", "altitude_km", "inclination_deg", "raan_deg", "phase_deg",
                       "cpu_freq_hz", "cycles_per_sample", "tx_power_w", "bandwidth_hz",
                       "channel_gain", "upload_bits", "model_bits", "plane", "sat"},
                   where);
    Satellite s = defaults;
    s.id = get_or(j, "id", s.id);
    s.altitude_km = get_or(j, "altitude_km", s.altitude_km);
    s.inclination_deg = get_or(j, "inclination_deg", s.inclination_deg);
    s.raan_deg = get_or(j, "raan_deg", s.raan_deg);
    s.phase_deg = get_or(j, "phase_deg", s.phase_deg);
    s.cpu_freq_hz = get_or(j, "cpu_freq_hz", s.cpu_freq_hz);
    s.cycles_per_sample = get_or(j, "cycles_per_sample", s.cycles_per_sample);
    s.tx_power_w = get_or(j, "tx_power_w", s.tx_power_w);
    s.bandwidth_hz = get_or(j, "bandwidth_hz", s.bandwidth_hz);
    s.channel_gain = get_or(j, "channel_gain", s.channel_gain);
    s.upload_bits = get_or(j, "upload_bits", s.upload_bits);
    s.model_bits = get_or(j, "model_bits", s.model_bits);
    return s;
}

std::vector<Satellite> parse_constellation(const json& j) {
    reject_unknown(j, {"walker", "satellites", "defaults", "overrides", "inactive_at_start"},
                   "constellation");

    Satellite defaults;
    if (j.contains("defaults"))
        defaults = parse_satellite_fields(j.at("defaults"), defaults, "constellation.defaults");

    std::vector<Satellite> sats;
    if (j.contains("walker")) {
        const json& w = j.at("walker");
        reject_unknown(w,
                       {"planes", "sats_per_plane", "altitude_km", "inclination_deg", "raan0_deg",
                        "raan_spacing_deg", "phase0_deg", "phase_spacing_deg",
                        "inter_plane_phase_offset_deg"},
                       "constellation.walker");
        WalkerSpec spec;
        spec.planes = get_or(w, "planes", spec.planes);
        spec.sats_per_plane = get_or(w, "sats_per_plane", spec.sats_per_plane);
        spec.altitude_km = get_or(w, "altitude_km", spec.altitude_km);
        spec.inclination_deg = get_or(w, "inclination_deg", spec.inclination_deg);
        spec.raan0_deg = get_or(w, "raan0_deg", spec.raan0_deg);
        spec.raan_spacing_deg = get_or(w, "raan_spacing_deg", spec.raan_spacing_deg);
        spec.phase0_deg = get_or(w, "phase0_deg", spec.phase0_deg);
        spec.phase_spacing_deg = get_or(w, "phase_spacing_deg", spec.phase_spacing_deg);
        spec.inter_plane_phase_offset_deg =
            get_or(w, "inter_plane_phase_offset_deg", spec.inter_plane_phase_offset_deg);
        sats = make_walker(spec, defaults);
    }
    if (j.contains("satellites")) {
        if (!sats.empty()) bad("constellation.satellites", "give either walker or satellites, not both");
        int next_id = 0;
        for (const json& sj : j.at("satellites")) {
            Satellite s = parse_satellite_fields(sj, defaults, "constellation.satellites[]");
            if (!sj.contains("id")) s.id = next_id;
            next_id = s.id + 1;
            sats.push_back(s);
        }
    }
    if (sats.empty()) bad("constellation", "needs a walker generator or an explicit satellite list");

    // targeted parameter overrides by plane index (walker) or satellite id
    if (j.contains("overrides")) {
        int planes = j.contains("walker") ? get_or(j.at("walker"), "planes", 1) : 0;
        int per_plane = planes > 0 ? static_cast<int>(sats.size()) / planes : 0;
        for (const json& ov : j.at("overrides")) {
            if (ov.contains("plane")) {
                if (per_plane == 0) bad("constellation.overrides", "plane override without walker");
                int p = ov.at("plane").get<int>();
                if (p < 0 || p >= planes) bad("constellation.overrides.plane", "out of range");
                for (int s = 0; s < per_plane; ++s) {
                    int idx = p * per_plane + s;
                    sats[idx] = parse_satellite_fields(ov, sats[idx], "constellation.overrides[]");
                }
            } else if (ov.contains("sat")) {
                int id = ov.at("sat").get<int>();
                bool found = false;
                for (Satellite& s : sats)
                    if (s.id == id) {
                        s = parse_satellite_fields(ov, s, "constellation.overrides[]");
                        found = true;
                    }
                if (!found) bad("constellation.overrides.sat", "no satellite with id " + std::to_string(id));
            } else {
                bad("constellation.overrides", "entry needs a 'plane' or 'sat' selector");
            }
        }
    }
    return sats;
}

SimConfig parse_config(const json& root) {
    reject_unknown(root,
                   {"seed", "method", "k", "constellation", "ground_stations", "earth_rotation",
                    "model", "data", "training", "recluster", "meta", "cost", "kmeans", "churn"},
                   "");

    SimConfig cfg;
    cfg.seed = get_or<std::uint64_t>(root, "seed", cfg.seed);
    if (root.contains("method")) cfg.method = method_from_name(root.at("method").get<std::string>());
    cfg.k = get_or(root, "k", cfg.k);

    if (!root.contains("constellation")) bad("constellation", "missing section");
    cfg.satellites = parse_constellation(root.at("constellation"));
    if (root.at("constellation").contains("inactive_at_start"))
        cfg.inactive_at_start =
            root.at("constellation").at("inactive_at_start").get<std::vector<int>>();

    if (!root.contains("ground_stations")) bad("ground_stations", "missing section");
    for (const json& gj : root.at("ground_stations")) {
        reject_unknown(gj, {"id", "latitude_deg", "longitude_deg", "min_elevation_deg"},
                       "ground_stations[]");
        GroundStation gs;
        gs.id = get_or(gj, "id", static_cast<int>(cfg.ground_stations.size()));
        gs.latitude_deg = get_or(gj, "latitude_deg", 0.0);
        gs.longitude_deg = get_or(gj, "longitude_deg", 0.0);
        gs.min_elevation_deg = get_or(gj, "min_elevation_deg", 10.0);
        cfg.ground_stations.push_back(gs);
    }
    cfg.earth_rotation = get_or(root, "earth_rotation", cfg.earth_rotation);

    if (root.contains("model")) {
        const json& m = root.at("model");
        reject_unknown(m, {"kind", "hidden_dims", "init_seed"}, "model");
        std::string kind = get_or<std::string>(m, "kind", "softmax_regression");
        if (kind == "softmax_regression")
            cfg.model_kind = ModelKind::softmax_regression;
        else if (kind == "mlp")
            cfg.model_kind = ModelKind::mlp;
        else
            bad("model.kind", "expected softmax_regression or mlp");
        cfg.hidden_dims = get_or(m, "hidden_dims", cfg.hidden_dims);
        cfg.model_init_seed = get_or<std::uint64_t>(m, "init_seed", 0);
    }

    if (root.contains("data")) {
        const json& d = root.at("data");
        reject_unknown(d, {"source", "blobs", "mnist", "partition", "holdout_fraction", "label_noise"},
                       "data");
        std::string source = get_or<std::string>(d, "source", "blobs");
        if (source == "mnist")
            cfg.data.use_mnist = true;
        else if (source != "blobs")
            bad("data.source", "expected blobs or mnist");
        if (d.contains("blobs")) {
            const json& b = d.at("blobs");
            reject_unknown(b, {"n_classes", "n_features", "samples_per_class", "class_separation"},
                           "data.blobs");
            cfg.data.blobs.n_classes = get_or(b, "n_classes", cfg.data.blobs.n_classes);
            cfg.data.blobs.n_features = get_or(b, "n_features", cfg.data.blobs.n_features);
            cfg.data.blobs.samples_per_class =
                get_or(b, "samples_per_class", cfg.data.blobs.samples_per_class);
            cfg.data.blobs.class_separation =
                get_or(b, "class_separation", cfg.data.blobs.class_separation);
        }
        if (d.contains("mnist")) {
            const json& m = d.at("mnist");
            reject_unknown(m, {"images", "labels", "max_samples"}, "data.mnist");
            cfg.data.mnist.images = get_or<std::string>(m, "images", "");
            cfg.data.mnist.labels = get_or<std::string>(m, "labels", "");
            cfg.data.mnist.max_samples = get_or(m, "max_samples", 0);
        }
        if (d.contains("partition")) {
            const json& p = d.at("partition");
            reject_unknown(p, {"scheme", "dirichlet_alpha"}, "data.partition");
            std::string scheme = get_or<std::string>(p, "scheme", "iid");
            if (scheme == "iid")
                cfg.data.scheme = PartitionScheme::iid;
            else if (scheme == "dirichlet")
                cfg.data.scheme = PartitionScheme::dirichlet;
            else
                bad("data.partition.scheme", "expected iid or dirichlet");
            cfg.data.dirichlet_alpha = get_or(p, "dirichlet_alpha", cfg.data.dirichlet_alpha);
        }
        cfg.data.holdout_fraction = get_or(d, "holdout_fraction", cfg.data.holdout_fraction);
        if (d.contains("label_noise")) {
            const json& ln = d.at("label_noise");
            reject_unknown(ln, {"client_fraction", "flip_prob"}, "data.label_noise");
            cfg.data.label_noise.client_fraction =
                get_or(ln, "client_fraction", cfg.data.label_noise.client_fraction);
            cfg.data.label_noise.flip_prob = get_or(ln, "flip_prob", cfg.data.label_noise.flip_prob);
        }
    }

    if (root.contains("training")) {
        const json& t = root.at("training");
        reject_unknown(t,
                       {"lr", "local_epochs", "batch_size", "cluster_rounds", "ground_rounds",
                        "target_accuracy", "quality_weighting", "ps_trains"},
                       "training");
        cfg.training.lr = get_or(t, "lr", cfg.training.lr);
        cfg.training.local_epochs = get_or(t, "local_epochs", cfg.training.local_epochs);
        cfg.training.batch_size = get_or(t, "batch_size", cfg.training.batch_size);
        cfg.training.cluster_rounds = get_or(t, "cluster_rounds", cfg.training.cluster_rounds);
        cfg.training.ground_rounds = get_or(t, "ground_rounds", cfg.training.ground_rounds);
        cfg.training.target_accuracy = get_or(t, "target_accuracy", cfg.training.target_accuracy);
        cfg.training.quality_weighting =
            get_or(t, "quality_weighting", cfg.training.quality_weighting);
        cfg.training.ps_trains = get_or(t, "ps_trains", cfg.training.ps_trains);
    }

    if (root.contains("recluster")) {
        const json& r = root.at("recluster");
        reject_unknown(r, {"dropout_threshold", "warm_start"}, "recluster");
        cfg.recluster.dropout_threshold =
            get_or(r, "dropout_threshold", cfg.recluster.dropout_threshold);
        std::string ws = get_or<std::string>(r, "warm_start", "meta");
        if (ws == "meta")
            cfg.warm_start = WarmStartPolicy::meta;
        else if (ws == "cluster_copy")
            cfg.warm_start = WarmStartPolicy::cluster_copy;
        else if (ws == "fresh")
            cfg.warm_start = WarmStartPolicy::fresh;
        else
            bad("recluster.warm_start", "expected meta, cluster_copy or fresh");
    }

    if (root.contains("meta")) {
        const json& m = root.at("meta");
        reject_unknown(m, {"inner_lr", "meta_lr", "tasks_per_update", "inner_steps"}, "meta");
        cfg.meta.inner_lr = get_or(m, "inner_lr", cfg.meta.inner_lr);
        cfg.meta.meta_lr = get_or(m, "meta_lr", cfg.meta.meta_lr);
        cfg.meta.tasks_per_update = get_or(m, "tasks_per_update", cfg.meta.tasks_per_update);
        cfg.meta.inner_steps = get_or(m, "inner_steps", cfg.meta.inner_steps);
    }

    if (root.contains("cost")) {
        const json& c = root.at("cost");
        reject_unknown(c, {"noise_power_w", "epsilon0", "inter_round_gap_s", "objective_weight"},
                       "cost");
        cfg.cost.noise_power_w = get_or(c, "noise_power_w", cfg.cost.noise_power_w);
        cfg.cost.epsilon0 = get_or(c, "epsilon0", cfg.cost.epsilon0);
        cfg.cost.inter_round_gap_s = get_or(c, "inter_round_gap_s", cfg.cost.inter_round_gap_s);
        cfg.cost.objective_weight = get_or(c, "objective_weight", cfg.cost.objective_weight);
    }

    if (root.contains("kmeans")) {
        const json& k = root.at("kmeans");
        reject_unknown(k, {"eps_km2", "max_iter"}, "kmeans");
        cfg.kmeans.eps_km2 = get_or(k, "eps_km2", cfg.kmeans.eps_km2);
        cfg.kmeans.max_iter = get_or(k, "max_iter", cfg.kmeans.max_iter);
    }

    if (root.contains("churn")) {
        for (const json& ej : root.at("churn")) {
            reject_unknown(ej, {"time_s", "ground_round", "sat", "event"}, "churn[]");
            ChurnEvent ev;
            ev.time_s = get_or(ej, "time_s", -1.0);
            ev.ground_round = get_or(ej, "ground_round", -1);
            if (!ej.contains("sat")) bad("churn[].sat", "missing satellite id");
            ev.sat_id = ej.at("sat").get<int>();
            std::string kind = get_or<std::string>(ej, "event", "leave");
            if (kind == "leave")
                ev.join = false;
            else if (kind == "join")
                ev.join = true;
            else
                bad("churn[].event", "expected leave or join");
            if (ev.time_s < 0.0 && ev.ground_round < 0)
                bad("churn[]", "needs time_s or ground_round");
            cfg.churn.push_back(ev);
        }
    }

    validate_config(cfg);
    return cfg;
}

} // namespace

void validate_config(const SimConfig& cfg) {
    int n_sats = static_cast<int>(cfg.satellites.size());
    if (cfg.k < 1) bad("k", "must be >= 1");
    if (cfg.k > n_sats)
        bad("k", "K=" + std::to_string(cfg.k) + " exceeds satellite count " + std::to_string(n_sats));
    if (cfg.ground_stations.empty()) bad("ground_stations", "at least one required");
    if (!(cfg.training.target_accuracy > 0.0) || cfg.training.target_accuracy > 1.0)
        bad("training.target_accuracy", "must be in (0, 1]");
    if (cfg.training.cluster_rounds < 1) bad("training.cluster_rounds", "must be >= 1");
    if (cfg.training.ground_rounds < 1) bad("training.ground_rounds", "must be >= 1");
    if (cfg.training.batch_size < 1) bad("training.batch_size", "must be >= 1");
    if (cfg.training.local_epochs < 0) bad("training.local_epochs", "must be >= 0");
    if (cfg.training.lr < 0.0) bad("training.lr", "must be >= 0");
    if (cfg.recluster.dropout_threshold < 0.0 || cfg.recluster.dropout_threshold > 1.0)
        bad("recluster.dropout_threshold", "must be in [0, 1]");
    if (!(cfg.meta.inner_lr > 0.0)) bad("meta.inner_lr", "must be > 0");
    if (cfg.meta.meta_lr < 0.0) bad("meta.meta_lr", "must be >= 0");
    if (cfg.meta.tasks_per_update < 1) bad("meta.tasks_per_update", "must be >= 1");
    if (cfg.meta.inner_steps < 1) bad("meta.inner_steps", "must be >= 1");
    if (!(cfg.data.holdout_fraction > 0.0) || cfg.data.holdout_fraction >= 1.0)
        bad("data.holdout_fraction", "must be in (0, 1); the stop rule evaluates on held-out data");
    if (cfg.data.label_noise.client_fraction < 0.0 || cfg.data.label_noise.client_fraction > 1.0)
        bad("data.label_noise.client_fraction", "must be in [0, 1]");
    if (cfg.data.label_noise.flip_prob < 0.0 || cfg.data.label_noise.flip_prob > 1.0)
        bad("data.label_noise.flip_prob", "must be in [0, 1]");
    if (!(cfg.cost.noise_power_w > 0.0)) bad("cost.noise_power_w", "must be > 0");
    if (!(cfg.cost.epsilon0 > 0.0)) bad("cost.epsilon0", "must be > 0");
    if (cfg.cost.objective_weight < 0.0 || cfg.cost.objective_weight > 1.0)
        bad("cost.objective_weight", "must be in [0, 1]");
    if (!(cfg.kmeans.eps_km2 > 0.0)) bad("kmeans.eps_km2", "must be > 0");
    if (cfg.kmeans.max_iter < 1) bad("kmeans.max_iter", "must be >= 1");
    for (int h : cfg.hidden_dims)
        if (h < 1) bad("model.hidden_dims", "layer widths must be >= 1");
    if (!cfg.data.use_mnist) {
        if (cfg.data.blobs.n_classes < 2) bad("data.blobs.n_classes", "must be >= 2");
        if (cfg.data.blobs.n_features < 1) bad("data.blobs.n_features", "must be >= 1");
        if (cfg.data.blobs.samples_per_class < 1) bad("data.blobs.samples_per_class", "must be >= 1");
        if (cfg.data.blobs.class_separation < 0.0) bad("data.blobs.class_separation", "must be >= 0");
    }

    std::set<int> ids;
    for (const Satellite& s : cfg.satellites) {
        if (!ids.insert(s.id).second)
            bad("constellation", "duplicate satellite id " + std::to_string(s.id));
        try {
            validate_satellite(s);
        } catch (const Error& e) {
            bad("constellation", e.what());
        }
    }
    for (int id : cfg.inactive_at_start)
        if (!ids.count(id))
            bad("constellation.inactive_at_start", "unknown satellite id " + std::to_string(id));
    for (const GroundStation& gs : cfg.ground_stations) {
        try {
            validate_ground_station(gs);
        } catch (const Error& e) {
            bad("ground_stations", e.what());
        }
    }
    for (const ChurnEvent& ev : cfg.churn) {
        if (!ids.count(ev.sat_id))
            bad("churn[].sat", "unknown satellite id " + std::to_string(ev.sat_id));
        if (ev.ground_round == 0) bad("churn[].ground_round", "rounds are numbered from 1");
    }
    if (cfg.data.use_mnist && (cfg.data.mnist.images.empty() || cfg.data.mnist.labels.empty()))
        bad("data.mnist", "images and labels paths required when source is mnist");
}

SimConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_config_string(ss.str());
}

SimConfig load_config_string(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw Error(ErrorCode::ConfigError, "config root must be an object");
    return parse_config(root);
}

std::string config_to_json(const SimConfig& cfg) {
    json root;
    root["seed"] = cfg.seed;
    root["method"] = method_name(cfg.method);
    root["k"] = cfg.k;
    root["earth_rotation"] = cfg.earth_rotation;

    json sats = json::array();
    for (const Satellite& s : cfg.satellites) {
        json sj;
        sj["id"] = s.id;
        sj["altitude_km"] = s.altitude_km;
        sj["inclination_deg"] = s.inclination_deg;
        sj["raan_deg"] = s.raan_deg;
        sj["phase_deg"] = s.phase_deg;
        sj["cpu_freq_hz"] = s.cpu_freq_hz;
        sj["cycles_per_sample"] = s.cycles_per_sample;
        sj["tx_power_w"] = s.tx_power_w;
        sj["bandwidth_hz"] = s.bandwidth_hz;
        sj["channel_gain"] = s.channel_gain;
        sj["upload_bits"] = s.upload_bits;
        sj["model_bits"] = s.model_bits;
        sats.push_back(sj);
    }
    root["constellation"]["satellites"] = sats;
    if (!cfg.inactive_at_start.empty())
        root["constellation"]["inactive_at_start"] = cfg.inactive_at_start;

    json gss = json::array();
    for (const GroundStation& gs : cfg.ground_stations) {
        json gj;
        gj["id"] = gs.id;
        gj["latitude_deg"] = gs.latitude_deg;
        gj["longitude_deg"] = gs.longitude_deg;
        gj["min_elevation_deg"] = gs.min_elevation_deg;
        gss.push_back(gj);
    }
    root["ground_stations"] = gss;

    root["model"]["kind"] = cfg.model_kind == ModelKind::mlp ? "mlp" : "softmax_regression";
    root["model"]["hidden_dims"] = cfg.hidden_dims;
    root["model"]["init_seed"] = cfg.model_init_seed;

    root["data"]["source"] = cfg.data.use_mnist ? "mnist" : "blobs";
    root["data"]["blobs"]["n_classes"] = cfg.data.blobs.n_classes;
    root["data"]["blobs"]["n_features"] = cfg.data.blobs.n_features;
    root["data"]["blobs"]["samples_per_class"] = cfg.data.blobs.samples_per_class;
    root["data"]["blobs"]["class_separation"] = cfg.data.blobs.class_separation;
    if (cfg.data.use_mnist) {
        root["data"]["mnist"]["images"] = cfg.data.mnist.images;
        root["data"]["mnist"]["labels"] = cfg.data.mnist.labels;
        root["data"]["mnist"]["max_samples"] = cfg.data.mnist.max_samples;
    }
    root["data"]["partition"]["scheme"] =
        cfg.data.scheme == PartitionScheme::iid ? "iid" : "dirichlet";
    root["data"]["partition"]["dirichlet_alpha"] = cfg.data.dirichlet_alpha;
    root["data"]["holdout_fraction"] = cfg.data.holdout_fraction;
    root["data"]["label_noise"]["client_fraction"] = cfg.data.label_noise.client_fraction;
    root["data"]["label_noise"]["flip_prob"] = cfg.data.label_noise.flip_prob;

    root["training"]["lr"] = cfg.training.lr;
    root["training"]["local_epochs"] = cfg.training.local_epochs;
    root["training"]["batch_size"] = cfg.training.batch_size;
    root["training"]["cluster_rounds"] = cfg.training.cluster_rounds;
    root["training"]["ground_rounds"] = cfg.training.ground_rounds;
    root["training"]["target_accuracy"] = cfg.training.target_accuracy;
    root["training"]["quality_weighting"] = cfg.training.quality_weighting;
    root["training"]["ps_trains"] = cfg.training.ps_trains;

    root["recluster"]["dropout_threshold"] = cfg.recluster.dropout_threshold;
    root["recluster"]["warm_start"] = cfg.warm_start == WarmStartPolicy::meta ? "meta"
                                      : cfg.warm_start == WarmStartPolicy::cluster_copy
                                          ? "cluster_copy"
                                          : "fresh";

    root["meta"]["inner_lr"] = cfg.meta.inner_lr;
    root["meta"]["meta_lr"] = cfg.meta.meta_lr;
    root["meta"]["tasks_per_update"] = cfg.meta.tasks_per_update;
    root["meta"]["inner_steps"] = cfg.meta.inner_steps;

    root["cost"]["noise_power_w"] = cfg.cost.noise_power_w;
    root["cost"]["epsilon0"] = cfg.cost.epsilon0;
    root["cost"]["inter_round_gap_s"] = cfg.cost.inter_round_gap_s;
    root["cost"]["objective_weight"] = cfg.cost.objective_weight;

    root["kmeans"]["eps_km2"] = cfg.kmeans.eps_km2;
    root["kmeans"]["max_iter"] = cfg.kmeans.max_iter;

    if (!cfg.churn.empty()) {
        json churn = json::array();
        for (const ChurnEvent& ev : cfg.churn) {
            json ej;
            if (ev.time_s >= 0.0) ej["time_s"] = ev.time_s;
            if (ev.ground_round >= 0) ej["ground_round"] = ev.ground_round;
            ej["sat"] = ev.sat_id;
            ej["event"] = ev.join ? "join" : "leave";
            churn.push_back(ej);
        }
        root["churn"] = churn;
    }
    return root.dump(2);
}

std::uint64_t config_hash(const SimConfig& config) {
    std::string canonical = config_to_json(config);
    return fnv1a(canonical.data(), canonical.size());
}

} // namespace fedhc
