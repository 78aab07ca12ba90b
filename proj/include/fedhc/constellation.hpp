#pragma once

#include <cstdint>
#include <vector>

#include "fedhc/geometry.hpp"

namespace fedhc {

constexpr double kEarthRadiusKm = 6371.0;
constexpr double kMuKm3PerS2 = 3.986004418e5;
constexpr double kSiderealDayS = 86164.0;

// One LEO satellite: circular-orbit elements plus the compute / link / data
// parameters used by the cost model.
struct Satellite {
    int id = 0;

    double altitude_km = 1300.0;
    double inclination_deg = 53.0;
    double raan_deg = 0.0;  // right ascension of ascending node
    double phase_deg = 0.0; // initial anomaly along the orbit

    double cpu_freq_hz = 1e9;        // f_i
    double cycles_per_sample = 1e4;  // per-sample training cost
    double tx_power_w = 10.0;
    double bandwidth_hz = 2e7;
    double channel_gain = 1e-8;
    std::int64_t local_data_size = 0; // samples, filled in from the partition
    std::int64_t upload_bits = 0;     // 0 = use model_bits
    std::int64_t model_bits = 0;      // 0 = 32 bits per parameter
};

struct GroundStation {
    int id = 0;
    double latitude_deg = 0.0;
    double longitude_deg = 0.0;
    double min_elevation_deg = 10.0;
};

// Throws Error(InvalidArgument) when fields are out of range
// (altitude outside [500, 2000] km, non-positive rates, ...).
void validate_satellite(const Satellite& sat);
void validate_ground_station(const GroundStation& gs);

double orbital_period_s(const Satellite& sat);

// Uniform circular orbit in one inertial Earth-centered frame:
// anomaly grows linearly with t, the orbital plane is fixed by
// inclination and RAAN.
Position3 propagate(const Satellite& sat, double t_s);

// Ground station surface position at time t; when rotating, longitude
// advances at the sidereal rate.
Position3 ground_station_position(const GroundStation& gs, double t_s, bool rotating = true);

// Elevation of a satellite above the local horizon of a surface point, degrees.
double elevation_deg(const Position3& sat_pos, const Position3& gs_pos);

bool visible(const Position3& sat_pos, const GroundStation& gs, double t_s, bool rotating = true);

struct WalkerSpec {
    int planes = 1;
    int sats_per_plane = 1;
    double altitude_km = 1300.0;
    double inclination_deg = 53.0;
    // Defaults give the usual even spread; override to build compact segments.
    double raan0_deg = 0.0;
    double raan_spacing_deg = -1.0;  // -1 = 360 / planes
    double phase0_deg = 0.0;
    double phase_spacing_deg = -1.0; // -1 = 360 / sats_per_plane
    double inter_plane_phase_offset_deg = 0.0;
};

// Generates planes * sats_per_plane satellites with ids 0..n-1; compute and
// link parameters are copied from `defaults` (id is overwritten).
std::vector<Satellite> make_walker(const WalkerSpec& spec, const Satellite& defaults);

} // namespace fedhc
