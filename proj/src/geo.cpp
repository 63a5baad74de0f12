#include "commutesim/geo.hpp"

#include <cmath>
#include <string>

namespace commutesim {

void validate_point(const GeoPoint& p, const char* context) {
    if (!(p.lat >= -90.0 && p.lat <= 90.0)) {
        throw std::invalid_argument(std::string(context) + ": latitude " +
                                    std::to_string(p.lat) + " outside [-90, 90]");
    }
    if (!(p.lon >= -180.0 && p.lon <= 180.0)) {
        throw std::invalid_argument(std::string(context) + ": longitude " +
                                    std::to_string(p.lon) + " outside [-180, 180]");
    }
}

double deg2rad(double deg) { return deg * kPi / 180.0; }

double haversine_m(const GeoPoint& a_in, const GeoPoint& b_in) {
    // evaluate in a canonical argument order so dist(A,B) == dist(B,A) bit for bit
    const bool swap = (b_in.lat < a_in.lat) || (b_in.lat == a_in.lat && b_in.lon < a_in.lon);
    const GeoPoint& a = swap ? b_in : a_in;
    const GeoPoint& b = swap ? a_in : b_in;
    const double dlat = deg2rad(b.lat - a.lat);
    const double dlon = deg2rad(b.lon - a.lon);
    const double lat1 = deg2rad(a.lat);
    const double lat2 = deg2rad(b.lat);
    const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                     std::sin(dlon / 2) * std::sin(dlon / 2) * std::cos(lat1) * std::cos(lat2);
    return 2.0 * kEarthRadiusM * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

double initial_bearing_deg(const GeoPoint& from, const GeoPoint& to) {
    const double lat1 = deg2rad(from.lat);
    const double lat2 = deg2rad(to.lat);
    const double dlon = deg2rad(to.lon - from.lon);
    const double y = std::sin(dlon) * std::cos(lat2);
    const double x = std::cos(lat1) * std::sin(lat2) - std::sin(lat1) * std::cos(lat2) * std::cos(dlon);
    double deg = std::atan2(y, x) * 180.0 / kPi;
    deg = std::fmod(deg + 360.0, 360.0);
    if (deg >= 360.0) deg = 0.0;
    return deg;
}

GeoPoint destination_point(const GeoPoint& start, double bearing_deg, double distance_m) {
    const double delta = distance_m / kEarthRadiusM;
    const double theta = deg2rad(bearing_deg);
    const double lat1 = deg2rad(start.lat);
    const double lon1 = deg2rad(start.lon);
    const double lat2 =
        std::asin(std::sin(lat1) * std::cos(delta) + std::cos(lat1) * std::sin(delta) * std::cos(theta));
    const double lon2 =
        lon1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(lat1),
                          std::cos(delta) - std::sin(lat1) * std::sin(lat2));
    GeoPoint p{lat2 * 180.0 / kPi, lon2 * 180.0 / kPi};
    if (p.lon > 180.0) p.lon -= 360.0;
    if (p.lon < -180.0) p.lon += 360.0;
    return p;
}

int bearing_segment(const GeoPoint& center, const GeoPoint& p, int n_segments) {
    if (n_segments < 1) throw std::invalid_argument("bearing_segment: n_segments must be >= 1");
    if (p == center) return 0;
    const double bearing = initial_bearing_deg(center, p);
    int idx = static_cast<int>(std::floor(bearing / (360.0 / n_segments)));
    return idx % n_segments;
}

double walking_distance_m(const GeoPoint& a, const GeoPoint& b, double detour_factor) {
    return haversine_m(a, b) * detour_factor;
}

}  // namespace commutesim
