#pragma once

#include <cmath>

namespace fedhc {

// Earth-centered position, kilometres.
struct Position3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline Position3 operator+(const Position3& a, const Position3& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
}

inline Position3 operator-(const Position3& a, const Position3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
}

inline Position3 operator*(double s, const Position3& p) {
    return {s * p.x, s * p.y, s * p.z};
}

inline double dot(const Position3& a, const Position3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline double norm(const Position3& p) { return std::sqrt(dot(p, p)); }

inline double euclidean_distance(const Position3& a, const Position3& b) {
    return norm(a - b);
}

inline double deg2rad(double deg) { return deg * 3.14159265358979323846 / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / 3.14159265358979323846; }

} // namespace fedhc
