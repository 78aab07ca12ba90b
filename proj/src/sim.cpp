#include "fedhc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "fedhc/costmodel.hpp"
#include "fedhc/errors.hpp"
#include "fedhc/maml.hpp"
#include "fedhc/rng.hpp"

namespace fedhc {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

LinkParams link_of(const Satellite& sat, const SimConfig& cfg) {
    LinkParams l;
    l.bandwidth_hz = sat.bandwidth_hz;
    l.tx_power_w = sat.tx_power_w;
    l.channel_gain = sat.channel_gain;
    l.noise_power_w = cfg.cost.noise_power_w;
    return l;
}

// Post-training losses can underflow to exactly zero late in a run; clamp so
// the inverse-loss weights stay defined.
double clamp_loss(double l) { return l > 1e-12 ? l : 1e-12; }

std::map<int, Position3> active_positions(const SimState& st) {
    std::map<int, Position3> pos;
    for (int id : st.active) pos[id] = propagate(st.satellites.at(id), st.t_s);
    return pos;
}

std::map<int, std::vector<double>> label_histograms(const SimState& st) {
    int n_classes = st.model_spec.n_classes;
    std::map<int, std::vector<double>> hist;
    for (int id : st.active) {
        const DataShard& s = st.shards.at(id);
        std::vector<double> h(n_classes, 0.0);
        for (int y : s.labels) h[y] += 1.0;
        if (s.n_samples > 0)
            for (double& v : h) v /= s.n_samples;
        hist[id] = h;
    }
    return hist;
}

double sq_dist_vec(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// Fills members / ps / centroid of st.clusters according to the method.
void cluster_satellites(SimState& st) {
    const SimConfig& cfg = st.config;
    if (st.active.empty()) throw Error(ErrorCode::EmptyInput, "no active satellites to cluster");
    int k = cfg.method == Method::c_fedavg ? 1 : cfg.k;
    k = std::min<int>(k, static_cast<int>(st.active.size()));

    std::map<int, Position3> pos = active_positions(st);
    std::vector<ClusterRuntime> clusters(k);

    auto fill_from_assignment = [&](const std::map<int, int>& assignment) {
        for (const auto& [id, c] : assignment) clusters[c].members.push_back(id);
        for (int j = 0; j < k; ++j) {
            ClusterRuntime& cl = clusters[j];
            if (cl.members.empty()) continue;
            Position3 sum{};
            for (int id : cl.members) sum = sum + pos[id];
            cl.centroid = (1.0 / cl.members.size()) * sum;
        }
    };

    switch (cfg.method) {
        case Method::fedhc:
        case Method::c_fedavg: {
            ClusterAssignment a =
                kmeans_cluster(pos, k, cfg.kmeans.eps_km2, cfg.kmeans.max_iter,
                               Rng::mix(cfg.seed ^ Rng::tag("position-kmeans"), st.recluster_count));
            for (const auto& [id, c] : a.assignment) clusters[c].members.push_back(id);
            for (int j = 0; j < k; ++j) {
                clusters[j].centroid = a.centroids[j];
                if (a.ps.count(j)) clusters[j].ps = a.ps.at(j);
            }
            break;
        }
        case Method::h_base: {
            // seeded random partition, dealt round-robin
            std::vector<int> ids(st.active.begin(), st.active.end());
            Rng rng(Rng::mix(cfg.seed ^ Rng::tag("random-partition"), st.recluster_count));
            rng.shuffle(ids);
            for (std::size_t i = 0; i < ids.size(); ++i)
                clusters[i % k].members.push_back(ids[i]);
            for (ClusterRuntime& cl : clusters) std::sort(cl.members.begin(), cl.members.end());
            std::map<int, int> assignment;
            for (int j = 0; j < k; ++j)
                for (int id : clusters[j].members) assignment[id] = j;
            // recompute centroids, then elect the nearest member as head
            for (ClusterRuntime& cl : clusters) cl.members.clear();
            fill_from_assignment(assignment);
            break;
        }
        case Method::fedce: {
            VectorClusterAssignment a = kmeans_vectors(
                label_histograms(st), k, 1e-9, cfg.kmeans.max_iter,
                Rng::mix(cfg.seed ^ Rng::tag("histogram-kmeans"), st.recluster_count));
            fill_from_assignment(a.assignment);
            break;
        }
    }

    // position-based head election for the methods that have none yet
    if (cfg.method != Method::fedhc && cfg.method != Method::c_fedavg) {
        std::map<int, std::vector<double>> hist;
        if (cfg.method == Method::fedce) hist = label_histograms(st);
        for (ClusterRuntime& cl : clusters) {
            if (cl.members.empty()) continue;
            if (cfg.method == Method::fedce) {
                // histogram medoid: member closest to all others in label space
                double best = std::numeric_limits<double>::infinity();
                for (int id : cl.members) {
                    double total = 0.0;
                    for (int other : cl.members) total += sq_dist_vec(hist[id], hist[other]);
                    if (total < best) {
                        best = total;
                        cl.ps = id;
                    }
                }
            } else {
                double best = std::numeric_limits<double>::infinity();
                for (int id : cl.members) {
                    double d = euclidean_distance(pos[id], cl.centroid);
                    if (d < best) {
                        best = d;
                        cl.ps = id;
                    }
                }
            }
        }
    }

    st.clusters = std::move(clusters);
}

std::vector<DataShard> sample_tasks(const SimState& st, Rng& rng) {
    std::vector<DataShard> tasks;
    for (const ClusterRuntime& cl : st.clusters) {
        if (cl.members.empty()) continue;
        if (static_cast<int>(tasks.size()) >= st.config.meta.tasks_per_update) break;
        int pick = static_cast<int>(rng.bounded(cl.members.size()));
        tasks.push_back(st.shards.at(cl.members[pick]));
    }
    return tasks;
}

void assign_warm_models(SimState& st, const std::vector<ClusterRuntime>& old_clusters,
                        const std::map<int, int>& old_assignment) {
    const SimConfig& cfg = st.config;
    switch (cfg.warm_start) {
        case WarmStartPolicy::meta: {
            Rng rng(Rng::mix(cfg.seed ^ Rng::tag("warm-tasks"), st.recluster_count));
            std::vector<DataShard> tasks = sample_tasks(st, rng);
            ModelParams warm =
                warm_start(st.global_model, st.meta_model, WarmStartPolicy::meta, tasks, cfg.meta,
                           st.model_spec);
            for (ClusterRuntime& cl : st.clusters) cl.model = warm;
            break;
        }
        case WarmStartPolicy::cluster_copy: {
            for (ClusterRuntime& cl : st.clusters) {
                auto it = cl.ps >= 0 ? old_assignment.find(cl.ps) : old_assignment.end();
                const ModelParams& inherited =
                    it != old_assignment.end() ? old_clusters[it->second].model : st.global_model;
                cl.model = warm_start(inherited, st.meta_model, WarmStartPolicy::cluster_copy, {},
                                      cfg.meta, st.model_spec);
            }
            break;
        }
        case WarmStartPolicy::fresh: {
            ModelSpec fresh = st.model_spec;
            fresh.seed = Rng::mix(cfg.seed ^ Rng::tag("fresh-init"), st.recluster_count);
            ModelParams w =
                warm_start(st.global_model, st.meta_model, WarmStartPolicy::fresh, {}, cfg.meta, fresh);
            for (ClusterRuntime& cl : st.clusters) cl.model = w;
            break;
        }
    }
}

void fire_due_churn(SimState& st) {
    const SimConfig& cfg = st.config;
    for (std::size_t i = 0; i < cfg.churn.size(); ++i) {
        if (st.churn_fired[i]) continue;
        const ChurnEvent& ev = cfg.churn[i];
        bool due = (ev.ground_round >= 0 && st.ground_round >= ev.ground_round) ||
                   (ev.time_s >= 0.0 && st.t_s >= ev.time_s);
        if (!due) continue;
        st.churn_fired[i] = 1;
        apply_churn(st, ev);
    }
}

// Sum of member sizes, used as the cluster weight at the ground station.
double cluster_data_size(const SimState& st, const ClusterRuntime& cl) {
    double d = 0.0;
    for (int id : cl.members) d += static_cast<double>(st.shards.at(id).n_samples);
    return d;
}

void check_conservation(const SimState& st) {
    std::set<int> seen;
    for (const ClusterRuntime& cl : st.clusters)
        for (int id : cl.members)
            if (!seen.insert(id).second)
                throw std::logic_error("satellite " + std::to_string(id) + " in two clusters");
    if (seen != st.active)
        throw std::logic_error("cluster membership does not cover the active satellites");
}

} // namespace

ClusterAssignment initial_clustering(const SimConfig& config) {
    SimState st = init_state(config);
    ClusterAssignment a;
    a.k = static_cast<int>(st.clusters.size());
    for (int j = 0; j < a.k; ++j) {
        const ClusterRuntime& cl = st.clusters[j];
        for (int id : cl.members) a.assignment[id] = j;
        a.centroids.push_back(cl.centroid);
        if (cl.ps >= 0) a.ps[j] = cl.ps;
    }
    return a;
}

SimState init_state(const SimConfig& config) {
    validate_config(config);
    SimState st;
    st.config = config;
    const SimConfig& cfg = st.config;

    for (const Satellite& s : cfg.satellites) st.satellites[s.id] = s;
    for (const Satellite& s : cfg.satellites) st.active.insert(s.id);
    for (int id : cfg.inactive_at_start) st.active.erase(id);
    if (st.active.empty()) throw Error(ErrorCode::ConfigError, "constellation: no active satellites");

    // dataset -> held-out split -> per-satellite shards; none of this depends
    // on the method or K, so every baseline consumes identical data
    DataShard full;
    int n_classes = 0;
    if (cfg.data.use_mnist) {
        full = load_idx(cfg.data.mnist.images, cfg.data.mnist.labels);
        if (cfg.data.mnist.max_samples > 0 && full.n_samples > cfg.data.mnist.max_samples) {
            std::vector<int> head(cfg.data.mnist.max_samples);
            for (int i = 0; i < cfg.data.mnist.max_samples; ++i) head[i] = i;
            full = subset(full, head);
        }
        for (int y : full.labels) n_classes = std::max(n_classes, y + 1);
    } else {
        full = synth_blobs(cfg.data.blobs.n_classes, cfg.data.blobs.n_features,
                           cfg.data.blobs.samples_per_class, cfg.data.blobs.class_separation,
                           Rng::mix(cfg.seed, Rng::tag("dataset")));
        n_classes = cfg.data.blobs.n_classes;
    }

    std::vector<int> order(full.n_samples);
    for (int i = 0; i < full.n_samples; ++i) order[i] = i;
    Rng holdout_rng(Rng::mix(cfg.seed, Rng::tag("holdout")));
    holdout_rng.shuffle(order);
    int n_holdout = static_cast<int>(cfg.data.holdout_fraction * full.n_samples);
    if (n_holdout < 1) n_holdout = 1;
    if (n_holdout >= full.n_samples)
        throw Error(ErrorCode::ConfigError, "data: dataset too small to hold out evaluation samples");
    std::vector<int> holdout_idx(order.begin(), order.begin() + n_holdout);
    std::vector<int> train_idx(order.begin() + n_holdout, order.end());
    std::sort(holdout_idx.begin(), holdout_idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    st.holdout = subset(full, holdout_idx);
    DataShard train = subset(full, train_idx);

    PartitionSpec pspec;
    pspec.n_clients = static_cast<int>(st.satellites.size());
    pspec.scheme = cfg.data.scheme;
    pspec.dirichlet_alpha = cfg.data.dirichlet_alpha;
    pspec.seed = Rng::mix(cfg.seed, Rng::tag("partition"));
    std::vector<DataShard> shards = partition(train, n_classes, pspec);

    // optional label noise on a seeded subset of clients; the held-out set
    // stays clean so quality differences show up in the evaluation
    if (cfg.data.label_noise.client_fraction > 0.0 && cfg.data.label_noise.flip_prob > 0.0) {
        Rng noise_rng(Rng::mix(cfg.seed, Rng::tag("label-noise")));
        std::vector<int> client_order(pspec.n_clients);
        for (int i = 0; i < pspec.n_clients; ++i) client_order[i] = i;
        noise_rng.shuffle(client_order);
        int n_noisy = static_cast<int>(std::lround(cfg.data.label_noise.client_fraction *
                                                   pspec.n_clients));
        for (int c = 0; c < n_noisy; ++c) {
            DataShard& s = shards[client_order[c]];
            for (int& y : s.labels) {
                if (noise_rng.unit() < cfg.data.label_noise.flip_prob) {
                    int offset = 1 + static_cast<int>(noise_rng.bounded(n_classes - 1));
                    y = (y + offset) % n_classes;
                }
            }
        }
    }

    std::vector<int> sat_ids;
    for (const auto& [id, s] : st.satellites) sat_ids.push_back(id);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t c = 0; c < shards.size(); ++c) {
        DataShard& s = shards[c];
        s.owner = sat_ids[c];
        st.satellites[s.owner].local_data_size = s.n_samples;
        h = fnv1a(&s.owner, sizeof s.owner, h);
        h = fnv1a(&s.n_samples, sizeof s.n_samples, h);
        h = fnv1a(s.labels.data(), s.labels.size() * sizeof(int), h);
        h = fnv1a(s.features.data(), s.features.size() * sizeof(float), h);
        st.shards[s.owner] = std::move(s);
    }
    st.partition_hash = h;

    st.model_spec.kind = cfg.model_kind;
    st.model_spec.n_features = full.n_features;
    st.model_spec.n_classes = n_classes;
    st.model_spec.hidden_dims = cfg.hidden_dims;
    st.model_spec.seed =
        cfg.model_init_seed != 0 ? cfg.model_init_seed : Rng::mix(cfg.seed, Rng::tag("model-init"));

    st.global_model = init_params(st.model_spec);
    st.meta_model = st.global_model;

    // resolve wire sizes now that the parameter count is known
    std::int64_t default_bits = 32 * static_cast<std::int64_t>(st.global_model.values.size());
    for (auto& [id, sat] : st.satellites) {
        if (sat.model_bits == 0) sat.model_bits = default_bits;
        if (sat.upload_bits == 0) sat.upload_bits = sat.model_bits;
    }

    st.churn_fired.assign(cfg.churn.size(), 0);

    cluster_satellites(st);
    for (ClusterRuntime& cl : st.clusters) cl.model = st.global_model;
    check_conservation(st);
    return st;
}

void apply_churn(SimState& st, const ChurnEvent& ev) {
    if (!st.satellites.count(ev.sat_id))
        throw Error(ErrorCode::UnknownSatellite,
                    "churn event for unconfigured satellite " + std::to_string(ev.sat_id));

    if (!ev.join) {
        if (!st.active.count(ev.sat_id))
            throw Error(ErrorCode::UnknownSatellite,
                        "leave event for inactive satellite " + std::to_string(ev.sat_id));
        st.active.erase(ev.sat_id);
        for (ClusterRuntime& cl : st.clusters) {
            auto it = std::find(cl.members.begin(), cl.members.end(), ev.sat_id);
            if (it == cl.members.end()) continue;
            cl.members.erase(it);
            ++cl.departed;
            if (cl.ps == ev.sat_id) {
                // head left: re-elect the nearest remaining member
                cl.ps = -1;
                double best = std::numeric_limits<double>::infinity();
                for (int id : cl.members) {
                    double d = euclidean_distance(propagate(st.satellites.at(id), st.t_s), cl.centroid);
                    if (d < best) {
                        best = d;
                        cl.ps = id;
                    }
                }
            }
            return;
        }
        return;
    }

    if (st.active.count(ev.sat_id))
        throw Error(ErrorCode::DuplicateJoin,
                    "join event for already active satellite " + std::to_string(ev.sat_id));
    st.active.insert(ev.sat_id);

    // attach to the nearest-centroid cluster
    Position3 pos = propagate(st.satellites.at(ev.sat_id), st.t_s);
    int best_cluster = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < st.clusters.size(); ++j) {
        double d = euclidean_distance(pos, st.clusters[j].centroid);
        if (d < best) {
            best = d;
            best_cluster = static_cast<int>(j);
        }
    }
    ClusterRuntime& cl = st.clusters[best_cluster];
    cl.members.insert(std::lower_bound(cl.members.begin(), cl.members.end(), ev.sat_id), ev.sat_id);
    if (cl.ps < 0) cl.ps = ev.sat_id;

    ++st.join_count;
    std::vector<DataShard> tasks;
    if (st.config.warm_start == WarmStartPolicy::meta) {
        Rng rng(Rng::mix(st.config.seed ^ Rng::tag("join-tasks"), st.join_count));
        tasks = sample_tasks(st, rng);
    }
    ModelSpec spec = st.model_spec;
    if (st.config.warm_start == WarmStartPolicy::fresh)
        spec.seed = Rng::mix(st.config.seed ^ Rng::tag("join-fresh"), st.join_count);
    st.pending_warm[ev.sat_id] =
        warm_start(cl.model, st.meta_model, st.config.warm_start, tasks, st.config.meta, spec);
}

bool recluster_if_needed(SimState& st) {
    bool fire = false;
    for (const ClusterRuntime& cl : st.clusters) {
        int formed_size = static_cast<int>(cl.members.size()) + cl.departed;
        if (formed_size == 0 || cl.departed == 0) continue;
        if (should_recluster(dropout_rate(cl.departed, formed_size), st.config.recluster)) {
            fire = true;
            break;
        }
    }
    if (!fire) return false;

    std::vector<ClusterRuntime> old_clusters = st.clusters;
    std::map<int, int> old_assignment;
    for (std::size_t j = 0; j < old_clusters.size(); ++j)
        for (int id : old_clusters[j].members) old_assignment[id] = static_cast<int>(j);

    ++st.recluster_count;
    cluster_satellites(st);
    assign_warm_models(st, old_clusters, old_assignment);
    check_conservation(st);
    return true;
}

RunResult run(const SimConfig& config) {
    SimState st = init_state(config);
    const SimConfig& cfg = st.config;

    RunResult res;
    res.partition_hash = st.partition_hash;
    res.config_hash = config_hash(cfg);

    for (int g = 1; g <= cfg.training.ground_rounds; ++g) {
        st.ground_round = g;
        RoundMetrics rm;
        rm.round = g;

        for (int r = 1; r <= cfg.training.cluster_rounds; ++r) {
            fire_due_churn(st);
            if (recluster_if_needed(st)) rm.reclustered = true;
            check_conservation(st);

            bool last_round = r == cfg.training.cluster_rounds;

            // local training + head aggregation, clusters in index order
            std::vector<ClusterTime> times;
            std::vector<int> trained_clusters;
            std::vector<TxClient> tx;
            std::vector<AggClient> agg;
            for (std::size_t j = 0; j < st.clusters.size(); ++j) {
                ClusterRuntime& cl = st.clusters[j];
                if (cl.members.empty()) continue;

                std::vector<std::pair<ModelParams, double>> by_size;
                std::vector<std::pair<ModelParams, double>> by_loss;
                ClusterTime ct;
                for (int id : cl.members) {
                    const Satellite& sat = st.satellites.at(id);
                    const DataShard& shard = st.shards.at(id);

                    ModelParams start = cl.model;
                    auto pending = st.pending_warm.find(id);
                    if (pending != st.pending_warm.end()) {
                        start = pending->second;
                        st.pending_warm.erase(pending);
                    }

                    bool trains = shard.n_samples > 0 && (cfg.training.ps_trains || id != cl.ps);
                    ModelParams w_i =
                        trains ? local_train_sgd(start, shard, cfg.training.lr,
                                                 cfg.training.local_epochs, cfg.training.batch_size,
                                                 Rng::mix(cfg.seed ^ Rng::tag("local-train"), id,
                                                          static_cast<std::uint64_t>(g) * 1000 + r))
                               : start;
                    if (!trains) continue;

                    double l_i = loss(w_i, shard);
                    by_size.emplace_back(w_i, static_cast<double>(shard.n_samples));
                    by_loss.emplace_back(std::move(w_i), clamp_loss(l_i));

                    double t_cmp = compute_time(static_cast<double>(shard.n_samples),
                                                sat.cycles_per_sample, sat.cpu_freq_hz);
                    double rate = tx_rate(link_of(sat, cfg));
                    double t_com = comm_time(static_cast<double>(sat.upload_bits), rate);
                    ct.member_times_s.push_back(t_cmp + t_com);
                    tx.push_back({static_cast<double>(sat.model_bits), rate, sat.tx_power_w});
                    agg.push_back({sat.cpu_freq_hz, t_cmp});
                }
                if (ct.member_times_s.empty()) continue;

                bool quality = cfg.method == Method::fedhc && cfg.training.quality_weighting;
                cl.model = quality ? aggregate_quality_weighted(by_loss)
                                   : aggregate_size_weighted(by_size);

                rm.cost.t_max_member_s = std::max(
                    rm.cost.t_max_member_s,
                    *std::max_element(ct.member_times_s.begin(), ct.member_times_s.end()));
                times.push_back(std::move(ct));
                trained_clusters.push_back(static_cast<int>(j));
            }

            if (last_round) {
                // heads upload to the ground station once the slowest cluster
                // finishes this round's member phase
                double member_wall = 0.0;
                for (const ClusterTime& ct : times)
                    member_wall = std::max(member_wall,
                                           *std::max_element(ct.member_times_s.begin(),
                                                             ct.member_times_s.end()));
                double t_agg = st.t_s + member_wall;

                for (std::size_t idx = 0; idx < trained_clusters.size(); ++idx) {
                    int j = trained_clusters[idx];
                    const ClusterRuntime& cl = st.clusters[j];
                    if (cl.ps < 0) continue;
                    const Satellite& ps_sat = st.satellites.at(cl.ps);
                    Position3 ps_pos = propagate(ps_sat, t_agg);
                    bool seen = false;
                    for (const GroundStation& gs : cfg.ground_stations)
                        if (visible(ps_pos, gs, t_agg, cfg.earth_rotation)) {
                            seen = true;
                            break;
                        }
                    if (!seen) continue;

                    double rate = tx_rate(link_of(ps_sat, cfg));
                    double up = comm_time(static_cast<double>(ps_sat.model_bits), rate);
                    times[idx].ps_comm_s = up;
                    rm.cost.t_ps_comm_s += up;
                    tx.push_back({static_cast<double>(ps_sat.model_bits), rate, ps_sat.tx_power_w});
                    rm.participating_clusters.push_back(j);
                }
                if (rm.participating_clusters.empty())
                    throw Error(ErrorCode::NoVisiblePS,
                                "no cluster head visible to any ground station at t=" +
                                    std::to_string(t_agg));
            }

            if (!times.empty()) {
                RoundTime rt = round_total_time(times);
                rm.cost.tc_sum_s += rt.sum_s;
                rm.cost.tc_parallel_s += rt.parallel_s;
                st.t_s += rt.parallel_s;
            }
            rm.cost.e_tr_j += energy_tr(tx);
            rm.cost.e_agg_j += energy_agg(agg, EnergyParams{cfg.cost.epsilon0});
        }

        // ground aggregation over the visible heads, size-weighted
        std::vector<std::pair<ModelParams, double>> by_cluster_size;
        for (int j : rm.participating_clusters)
            by_cluster_size.emplace_back(st.clusters[j].model,
                                         cluster_data_size(st, st.clusters[j]));
        st.global_model = aggregate_size_weighted(by_cluster_size);
        for (int j : rm.participating_clusters) st.clusters[j].model = st.global_model;

        // meta state follows the fresh global model, one update per ground round
        Rng task_rng(Rng::mix(cfg.seed ^ Rng::tag("meta-tasks"), static_cast<std::uint64_t>(g)));
        std::vector<DataShard> tasks = sample_tasks(st, task_rng);
        if (!tasks.empty() && cfg.meta.meta_lr > 0.0)
            st.meta_model = meta_update(st.global_model, tasks, cfg.meta);
        else
            st.meta_model = st.global_model;

        for (double v : st.global_model.values)
            if (!std::isfinite(v)) throw std::logic_error("global model diverged to non-finite values");

        rm.cost.e_c_j = energy_total(rm.cost.e_tr_j, rm.cost.e_agg_j);
        rm.clusters = 0;
        for (const ClusterRuntime& cl : st.clusters)
            if (!cl.members.empty()) ++rm.clusters;
        rm.participating = static_cast<int>(rm.participating_clusters.size());
        rm.accuracy = accuracy(st.global_model, st.holdout);
        rm.loss = loss(st.global_model, st.holdout);
        if (std::isnan(rm.accuracy) || std::isnan(rm.loss))
            throw std::logic_error("held-out evaluation produced NaN");
        for (const ClusterRuntime& cl : st.clusters) {
            if (cl.members.empty()) continue;
            rm.cluster_loss.push_back(loss(cl.model, st.holdout));
            rm.cluster_accuracy.push_back(accuracy(cl.model, st.holdout));
        }

        res.rounds.push_back(rm);
        st.t_s += cfg.cost.inter_round_gap_s;

        if (rm.accuracy >= cfg.training.target_accuracy) {
            res.reached_target = true;
            break;
        }
    }

    res.rounds_executed = static_cast<int>(res.rounds.size());
    res.rounds_to_target = res.reached_target ? res.rounds_executed : cfg.training.ground_rounds;
    for (const RoundMetrics& rm : res.rounds) {
        res.total_tc_sum_s += rm.cost.tc_sum_s;
        res.total_tc_parallel_s += rm.cost.tc_parallel_s;
        res.total_e_tr_j += rm.cost.e_tr_j;
        res.total_e_agg_j += rm.cost.e_agg_j;
        res.total_e_c_j += rm.cost.e_c_j;
        res.recluster_events += rm.reclustered ? 1 : 0;
    }
    res.final_accuracy = res.rounds.empty() ? 0.0 : res.rounds.back().accuracy;
    res.final_model = st.global_model;
    return res;
}

std::vector<SweepRow> sweep_k(const SimConfig& base, const std::vector<int>& k_values,
                              const std::vector<Method>& methods) {
    std::vector<Method> ms = methods;
    std::sort(ms.begin(), ms.end(),
              [](Method a, Method b) { return std::string(method_name(a)) < method_name(b); });
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    std::vector<int> ks = k_values;
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

    std::vector<SweepRow> rows;
    for (Method m : ms) {
        std::vector<int> run_ks = m == Method::c_fedavg ? std::vector<int>{1} : ks;
        for (int k : run_ks) {
            SimConfig cfg = base;
            cfg.method = m;
            cfg.k = k;
            validate_config(cfg);
            RunResult r = run(cfg);
            SweepRow row;
            row.method = m;
            row.k = k;
            row.rounds_to_target = r.rounds_to_target;
            row.reached = r.reached_target;
            row.tc_sum_total_s = r.total_tc_sum_s;
            row.tc_parallel_total_s = r.total_tc_parallel_s;
            row.e_c_total_j = r.total_e_c_j;
            rows.push_back(row);
        }
    }

    // normalize the scalarized objective against the centralized run when
    // present, otherwise against the worst observed totals
    double t_base = 0.0, e_base = 0.0;
    for (const SweepRow& row : rows) {
        if (row.method == Method::c_fedavg) {
            t_base = row.tc_sum_total_s;
            e_base = row.e_c_total_j;
        }
    }
    if (!(t_base > 0.0) || !(e_base > 0.0)) {
        for (const SweepRow& row : rows) {
            t_base = std::max(t_base, row.tc_sum_total_s);
            e_base = std::max(e_base, row.e_c_total_j);
        }
    }
    for (SweepRow& row : rows)
        row.objective = objective(row.tc_sum_total_s, row.e_c_total_j, base.cost.objective_weight,
                                  t_base, e_base);

    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        std::string an = method_name(a.method), bn = method_name(b.method);
        if (an != bn) return an < bn;
        return a.k < b.k;
    });
    return rows;
}

std::string metrics_to_csv(const RunResult& result) {
    std::ostringstream out;
    out << "round,clusters,participating,reclustered,t_max_member,t_ps_comm,"
           "t_c_sum,t_c_parallel,e_tr,e_agg,e_c,loss,accuracy\n";
    for (const RoundMetrics& rm : result.rounds) {
        out << rm.round << ',' << rm.clusters << ',' << rm.participating << ','
            << (rm.reclustered ? 1 : 0) << ',' << fmt(rm.cost.t_max_member_s) << ','
            << fmt(rm.cost.t_ps_comm_s) << ',' << fmt(rm.cost.tc_sum_s) << ',' << fmt(rm.cost.tc_parallel_s) << ','
            << fmt(rm.cost.e_tr_j) << ',' << fmt(rm.cost.e_agg_j) << ',' << fmt(rm.cost.e_c_j) << ','
            << fmt(rm.loss) << ',' << fmt(rm.accuracy) << '\n';
    }
    return out.str();
}

std::string summary_to_json(const SimConfig& config, const RunResult& result) {
    nlohmann::json j;
    j["method"] = method_name(config.method);
    j["k"] = config.k;
    j["seed"] = config.seed;
    j["rounds_executed"] = result.rounds_executed;
    j["reached_target"] = result.reached_target;
    j["rounds_to_target"] = result.rounds_to_target;
    j["final_accuracy"] = result.final_accuracy;
    j["recluster_events"] = result.recluster_events;
    j["totals"]["t_c_sum"] = result.total_tc_sum_s;
    j["totals"]["t_c_parallel"] = result.total_tc_parallel_s;
    j["totals"]["e_tr"] = result.total_e_tr_j;
    j["totals"]["e_agg"] = result.total_e_agg_j;
    j["totals"]["e_c"] = result.total_e_c_j;
    j["partition_hash"] = result.partition_hash;
    j["config_hash"] = result.config_hash;
    j["config"] = nlohmann::json::parse(config_to_json(config));
    return j.dump(2) + "\n";
}

std::string manifest_to_json(const SimConfig& config, const RunResult& result,
                             const std::string& config_path, const std::string& out_dir) {
    nlohmann::json j;
    j["config_path"] = config_path;
    j["out_dir"] = out_dir;
    j["seed"] = config.seed;
    j["config_hash"] = result.config_hash;
    j["partition_hash"] = result.partition_hash;
    return j.dump(2) + "\n";
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "method,k,rounds_to_target,t_c_total,e_c_total,objective,t_c_parallel_total,reached\n";
    for (const SweepRow& r : rows) {
        out << method_name(r.method) << ',' << r.k << ',' << r.rounds_to_target << ','
            << fmt(r.tc_sum_total_s) << ',' << fmt(r.e_c_total_j) << ',' << fmt(r.objective) << ','
            << fmt(r.tc_parallel_total_s) << ',' << (r.reached ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string sweep_to_markdown(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "| method | K | rounds to target | T_c total (s) | E_c total (J) | objective |\n";
    out << "|---|---|---|---|---|---|\n";
    char buf[64];
    for (const SweepRow& r : rows) {
        out << "| " << method_name(r.method) << " | " << r.k << " | " << r.rounds_to_target
            << (r.reached ? "" : "*");
        std::snprintf(buf, sizeof buf, "%.6g", r.tc_sum_total_s);
        out << " | " << buf;
        std::snprintf(buf, sizeof buf, "%.6g", r.e_c_total_j);
        out << " | " << buf;
        std::snprintf(buf, sizeof buf, "%.4f", r.objective);
        out << " | " << buf << " |\n";
    }
    out << "\n*did not reach the target within the round budget\n";
    return out.str();
}

void write_run_outputs(const SimConfig& config, const RunResult& result,
                       const std::string& out_dir, const std::string& config_path) {
    std::filesystem::create_directories(out_dir);
    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream f(out_dir + "/" + name, std::ios::binary);
        if (!f) throw Error(ErrorCode::IoError, "cannot write " + out_dir + "/" + name);
        f << content;
    };
    write("metrics.csv", metrics_to_csv(result));
    write("summary.json", summary_to_json(config, result));
    write("manifest.json", manifest_to_json(config, result, config_path, out_dir));
}

std::string plotdata_from_dir(const std::string& run_dir) {
    std::ifstream in(run_dir + "/metrics.csv");
    if (!in) throw Error(ErrorCode::MissingMetrics, "no metrics.csv in " + run_dir);
    std::string header;
    if (!std::getline(in, header))
        throw Error(ErrorCode::MissingMetrics, "empty metrics.csv in " + run_dir);

    std::vector<std::string> columns;
    std::stringstream hs(header);
    std::string cell;
    while (std::getline(hs, cell, ',')) columns.push_back(cell);

    std::ostringstream out;
    out << "round,metric,value\n";
    std::string line;
    bool any = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != columns.size())
            throw Error(ErrorCode::MissingMetrics, "malformed metrics.csv row in " + run_dir);
        any = true;
        // cells pass through verbatim; no reparsing or reformatting
        for (std::size_t c = 1; c < columns.size(); ++c)
            out << cells[0] << ',' << columns[c] << ',' << cells[c] << '\n';
    }
    if (!any) throw Error(ErrorCode::MissingMetrics, "metrics.csv has no data rows in " + run_dir);
    return out.str();
}

} // namespace fedhc
