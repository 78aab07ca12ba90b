#include "fedhc/costmodel.hpp"

#include <algorithm>
#include <cmath>

#include "fedhc/errors.hpp"

namespace fedhc {

double tx_rate(const LinkParams& link) {
    if (!(link.bandwidth_hz > 0.0))
        throw Error(ErrorCode::InvalidArgument, "bandwidth must be > 0");
    if (!(link.noise_power_w > 0.0))
        throw Error(ErrorCode::InvalidArgument, "noise power must be > 0");
    if (!(link.tx_power_w > 0.0))
        throw Error(ErrorCode::InvalidArgument, "tx power must be > 0");
    if (link.channel_gain < 0.0)
        throw Error(ErrorCode::InvalidArgument, "channel gain must be >= 0");
    return link.bandwidth_hz * std::log(1.0 + link.tx_power_w * link.channel_gain / link.noise_power_w);
}

double compute_time(double samples, double cycles_per_sample, double cpu_freq_hz) {
    if (!(cpu_freq_hz > 0.0)) throw Error(ErrorCode::ZeroFrequency, "cpu frequency must be > 0");
    return samples * cycles_per_sample / cpu_freq_hz;
}

double comm_time(double payload_bits, double rate_bps) {
    if (!(rate_bps > 0.0)) throw Error(ErrorCode::ZeroRate, "transmission rate must be > 0");
    return payload_bits / rate_bps;
}

RoundTime round_total_time(const std::vector<ClusterTime>& clusters) {
    RoundTime rt;
    for (const ClusterTime& c : clusters) {
        if (c.member_times_s.empty())
            throw Error(ErrorCode::EmptyCluster, "cluster with no member times");
        double slowest = *std::max_element(c.member_times_s.begin(), c.member_times_s.end());
        double total = slowest + c.ps_comm_s;
        rt.sum_s += total;
        rt.parallel_s = std::max(rt.parallel_s, total);
    }
    return rt;
}

double energy_tr(const std::vector<TxClient>& clients) {
    double e = 0.0;
    for (const TxClient& c : clients) {
        if (!(c.rate_bps > 0.0)) throw Error(ErrorCode::ZeroRate, "client with zero rate");
        e += c.tx_power_w * c.payload_bits / c.rate_bps;
    }
    return e;
}

double energy_agg(const std::vector<AggClient>& clients, const EnergyParams& energy) {
    if (!(energy.epsilon0 > 0.0))
        throw Error(ErrorCode::InvalidArgument, "epsilon0 must be > 0");
    double e = 0.0;
    for (const AggClient& c : clients) e += energy.epsilon0 * c.cpu_freq_hz * c.compute_s;
    return e;
}

double energy_total(double e_tr, double e_agg) {
    if (e_tr < 0.0 || e_agg < 0.0)
        throw Error(ErrorCode::InvalidArgument, "energy terms must be >= 0");
    return e_tr + e_agg;
}

double objective(double t_c, double e_c, double psi, double t_base, double e_base) {
    if (psi < 0.0 || psi > 1.0) throw Error(ErrorCode::InvalidWeight, "psi must be in [0, 1]");
    if (!(t_base > 0.0) || !(e_base > 0.0))
        throw Error(ErrorCode::InvalidWeight, "normalization baselines must be > 0");
    return psi * (t_c / t_base) + (1.0 - psi) * (e_c / e_base);
}

} // namespace fedhc
