#pragma once

#include <stdexcept>

namespace commutesim {

constexpr double kEarthRadiusM = 6371000.0;
constexpr double kPi = 3.14159265358979323846;

/// WGS84 coordinate in degrees.
struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;
};

inline bool operator==(const GeoPoint& a, const GeoPoint& b) {
    return a.lat == b.lat && a.lon == b.lon;
}
inline bool operator!=(const GeoPoint& a, const GeoPoint& b) { return !(a == b); }

/// Throws std::invalid_argument if lat/lon are outside valid ranges.
void validate_point(const GeoPoint& p, const char* context);

double deg2rad(double deg);

/// Great-circle distance in meters (haversine, spherical earth).
double haversine_m(const GeoPoint& a, const GeoPoint& b);

/// Initial bearing from `from` to `to`, clockwise from true north, in [0, 360).
double initial_bearing_deg(const GeoPoint& from, const GeoPoint& to);

/// Point at the given bearing and great-circle distance from `start`.
GeoPoint destination_point(const GeoPoint& start, double bearing_deg, double distance_m);

/// Index of the circle segment containing `p`, seen from `center`.
/// Segment 0 starts at north; indices grow clockwise. p == center maps to 0.
int bearing_segment(const GeoPoint& center, const GeoPoint& p, int n_segments);

/// Walking distance model: great-circle distance times a detour factor.
double walking_distance_m(const GeoPoint& a, const GeoPoint& b, double detour_factor = 1.0);

}  // namespace commutesim
