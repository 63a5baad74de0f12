#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "commutesim/geo.hpp"
#include "commutesim/rng.hpp"

namespace commutesim {

struct CampusLocation {
    std::string id;
    GeoPoint position;
};

/// Preferred-arrival density on a 5-minute grid. Weights sum to 1.
struct ArrivalDensity {
    std::vector<int64_t> grid_s;
    std::vector<double> weights;

    void validate() const;  // throws std::runtime_error on malformed data
};

/// Staying-time distributions keyed by the arrival-time quartile. Arrivals on
/// a boundary belong to the higher quartile.
struct StayQuartileTable {
    std::vector<int64_t> upper_bounds_s;                  // four increasing boundaries
    std::vector<std::map<int64_t, double>> stay_minutes;  // per quartile: minutes -> probability

    void validate() const;
    int quartile_of(int64_t arrival_s) const;  // throws if arrival is outside the domain
};

struct DistributionFile {
    ArrivalDensity density;
    StayQuartileTable quartiles;

    static DistributionFile load(const std::filesystem::path& path);
    static DistributionFile parse(const std::string& text, const std::string& origin);
};

struct ScenarioRow {
    int64_t agent_id = 0;
    GeoPoint home;
    std::string campus_id;
    int64_t arrival_s = 0;
    int64_t departure_s = 0;
    int64_t submission_s = 0;
    GeoPoint parking;
};

struct DemandScenario {
    std::vector<CampusLocation> campuses;
    std::vector<ScenarioRow> rows;
    uint64_t seed = 0;
    std::string config_digest;

    const CampusLocation& campus(const std::string& id) const;
    GeoPoint campus_centroid() const;

    std::string serialize() const;
    void save(const std::filesystem::path& path) const;
    static DemandScenario parse(const std::string& text, const std::string& origin);
    static DemandScenario load(const std::filesystem::path& path);
};

struct ScenarioGenConfig {
    std::vector<CampusLocation> campuses;
    std::vector<double> campus_shares;  // aligned with campuses, sums to 1
    int64_t agent_count = 0;
    double inner_radius_km = 2.0;
    double outer_radius_km = 25.0;
    ArrivalDensity density;
    StayQuartileTable quartiles;
    std::string config_digest;
};

/// Uniform-by-area sample over the annulus [inner_km, outer_km] around center.
std::vector<GeoPoint> sample_homes(const GeoPoint& center, double inner_km, double outer_km,
                                   int64_t n, Rng& rng);

/// Verbatim home locations from a CSV file with a `lat,lon` header.
std::vector<GeoPoint> load_homes_file(const std::filesystem::path& path);

int64_t sample_arrival(const ArrivalDensity& density, Rng& rng);
int64_t sample_stay(const StayQuartileTable& table, int64_t arrival_s, Rng& rng);

/// Uniform whole-minute offset 30..360 minutes before the arrival, clamped at 0.
int64_t sample_submission(int64_t arrival_s, Rng& rng);

DemandScenario generate_scenario(const ScenarioGenConfig& config, uint64_t seed);

}  // namespace commutesim
