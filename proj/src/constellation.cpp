#include "fedhc/constellation.hpp"

#include <cmath>
#include <string>

#include "fedhc/errors.hpp"

namespace fedhc {

void validate_satellite(const Satellite& sat) {
    if (sat.altitude_km < 500.0 || sat.altitude_km > 2000.0)
        throw Error(ErrorCode::InvalidArgument,
                    "satellite " + std::to_string(sat.id) + ": altitude_km " +
                        std::to_string(sat.altitude_km) + " outside LEO range [500, 2000]");
    if (!(sat.cpu_freq_hz > 0.0))
        throw Error(ErrorCode::InvalidArgument,
                    "satellite " + std::to_string(sat.id) + ": cpu_freq_hz must be > 0");
    if (!(sat.bandwidth_hz > 0.0))
        throw Error(ErrorCode::InvalidArgument,
                    "satellite " + std::to_string(sat.id) + ": bandwidth_hz must be > 0");
    if (!(sat.cycles_per_sample > 0.0))
        throw Error(ErrorCode::InvalidArgument,
                    "satellite " + std::to_string(sat.id) + ": cycles_per_sample must be > 0");
    if (!(sat.tx_power_w > 0.0))
        throw Error(ErrorCode::InvalidArgument,
                    "satellite " + std::to_string(sat.id) + ": tx_power_w must be > 0");
    if (sat.channel_gain < 0.0)
        throw Error(ErrorCode::InvalidArgument,
                    "satellite " + std::to_string(sat.id) + ": channel_gain must be >= 0");
    if (sat.local_data_size < 0)
        throw Error(ErrorCode::InvalidArgument,
                    "satellite " + std::to_string(sat.id) + ": local_data_size must be >= 0");
}

void validate_ground_station(const GroundStation& gs) {
    if (gs.min_elevation_deg < 0.0 || gs.min_elevation_deg >= 90.0)
        throw Error(ErrorCode::InvalidArgument,
                    "ground station " + std::to_string(gs.id) +
                        ": min_elevation_deg must be in [0, 90)");
    if (gs.latitude_deg < -90.0 || gs.latitude_deg > 90.0)
        throw Error(ErrorCode::InvalidArgument,
                    "ground station " + std::to_string(gs.id) + ": latitude_deg out of range");
}

double orbital_period_s(const Satellite& sat) {
    double r = kEarthRadiusKm + sat.altitude_km;
    return 2.0 * 3.14159265358979323846 * std::sqrt(r * r * r / kMuKm3PerS2);
}

Position3 propagate(const Satellite& sat, double t_s) {
    double r = kEarthRadiusKm + sat.altitude_km;
    double period = orbital_period_s(sat);
    double anomaly = deg2rad(sat.phase_deg) + 2.0 * 3.14159265358979323846 * (t_s / period);

    // position in the orbital plane
    double xp = r * std::cos(anomaly);
    double yp = r * std::sin(anomaly);

    // tilt by inclination (rotation about x), then swing the node (rotation about z)
    double inc = deg2rad(sat.inclination_deg);
    double raan = deg2rad(sat.raan_deg);
    double x1 = xp;
    double y1 = yp * std::cos(inc);
    double z1 = yp * std::sin(inc);
    return {x1 * std::cos(raan) - y1 * std::sin(raan),
            x1 * std::sin(raan) + y1 * std::cos(raan), z1};
}

Position3 ground_station_position(const GroundStation& gs, double t_s, bool rotating) {
    double lon = deg2rad(gs.longitude_deg);
    if (rotating)
        lon += 2.0 * 3.14159265358979323846 * (t_s / kSiderealDayS);
    double lat = deg2rad(gs.latitude_deg);
    return {kEarthRadiusKm * std::cos(lat) * std::cos(lon),
            kEarthRadiusKm * std::cos(lat) * std::sin(lon), kEarthRadiusKm * std::sin(lat)};
}

double elevation_deg(const Position3& sat_pos, const Position3& gs_pos) {
    Position3 to_sat = sat_pos - gs_pos;
    double range = norm(to_sat);
    double zenith = norm(gs_pos);
    // angle above the horizon = 90 deg minus the angle from local zenith
    double sin_el = dot(to_sat, gs_pos) / (range * zenith);
    if (sin_el > 1.0) sin_el = 1.0;
    if (sin_el < -1.0) sin_el = -1.0;
    return rad2deg(std::asin(sin_el));
}

bool visible(const Position3& sat_pos, const GroundStation& gs, double t_s, bool rotating) {
    Position3 gs_pos = ground_station_position(gs, t_s, rotating);
    return elevation_deg(sat_pos, gs_pos) >= gs.min_elevation_deg;
}

std::vector<Satellite> make_walker(const WalkerSpec& spec, const Satellite& defaults) {
    if (spec.planes < 1 || spec.sats_per_plane < 1)
        throw Error(ErrorCode::InvalidArgument, "walker spec needs planes >= 1 and sats_per_plane >= 1");
    double raan_step =
        spec.raan_spacing_deg >= 0.0 ? spec.raan_spacing_deg : 360.0 / spec.planes;
    double phase_step =
        spec.phase_spacing_deg >= 0.0 ? spec.phase_spacing_deg : 360.0 / spec.sats_per_plane;

    std::vector<Satellite> sats;
    sats.reserve(static_cast<std::size_t>(spec.planes) * spec.sats_per_plane);
    int id = 0;
    for (int p = 0; p < spec.planes; ++p) {
        for (int s = 0; s < spec.sats_per_plane; ++s) {
            Satellite sat = defaults;
            sat.id = id++;
            sat.altitude_km = spec.altitude_km;
            sat.inclination_deg = spec.inclination_deg;
            sat.raan_deg = spec.raan0_deg + raan_step * p;
            sat.phase_deg =
                spec.phase0_deg + phase_step * s + spec.inter_plane_phase_offset_deg * p;
            sats.push_back(sat);
        }
    }
    return sats;
}

} // namespace fedhc
