#pragma once

#include <vector>

namespace fedhc {

struct LinkParams {
    double bandwidth_hz = 2e7;   // B
    double tx_power_w = 10.0;    // P0
    double channel_gain = 1e-8;  // h
    double noise_power_w = 1e-10;
};

struct EnergyParams {
    double epsilon0 = 1e-10; // hardware coefficient, J per (cycle/s * s)
};

// Per-cluster inputs for one synchronous round: the total per-member times
// (compute + upload) and the head's uplink time to the ground station.
struct ClusterTime {
    std::vector<double> member_times_s;
    double ps_comm_s = 0.0;
};

struct RoundTime {
    // sum over clusters of (slowest member + head uplink)
    double sum_s = 0.0;
    // same per-cluster terms reduced with max instead: the wallclock when
    // clusters run concurrently
    double parallel_s = 0.0;
};

// Time / energy ledger for one aggregation round. e_c_j is maintained as
// exactly e_tr_j + e_agg_j.
struct CostReport {
    double t_max_member_s = 0.0; // slowest single (compute + upload) observed
    double t_ps_comm_s = 0.0;    // summed head uplink times
    double tc_sum_s = 0.0;       // per-cluster reduction, summed
    double tc_parallel_s = 0.0;  // per-cluster reduction, max (wallclock)
    double e_tr_j = 0.0;
    double e_agg_j = 0.0;
    double e_c_j = 0.0;
};

// Shannon-style rate in nats: B * ln(1 + P0 h / N0), bits/s as configured.
double tx_rate(const LinkParams& link);

// samples * cycles-per-sample / frequency
double compute_time(double samples, double cycles_per_sample, double cpu_freq_hz);

// payload / rate; a zero rate marks an unreachable client.
double comm_time(double payload_bits, double rate_bps);

RoundTime round_total_time(const std::vector<ClusterTime>& clusters);

struct TxClient {
    double payload_bits = 0.0;
    double rate_bps = 0.0;
    double tx_power_w = 0.0;
};

// sum of P0 * bits / rate over clients
double energy_tr(const std::vector<TxClient>& clients);

struct AggClient {
    double cpu_freq_hz = 0.0;
    double compute_s = 0.0;
};

// sum of epsilon0 * f * t over training clients
double energy_agg(const std::vector<AggClient>& clients, const EnergyParams& energy);

double energy_total(double e_tr, double e_agg);

// Scalarized ranking of a (time, energy) pair against baselines:
// psi * T/T_base + (1 - psi) * E/E_base.
double objective(double t_c, double e_c, double psi, double t_base, double e_base);

} // namespace fedhc
