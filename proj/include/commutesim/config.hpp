#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "commutesim/geo.hpp"
#include "commutesim/scenario.hpp"

namespace commutesim {

struct DepotSpec {
    GeoPoint position;
    int64_t capacity = 0;
};

struct CampusShare {
    CampusLocation location;
    double share = 0.0;
};

/// Full parameter set. Every key must be present in the loaded file; there are
/// no silent defaults. The shipped configs/default.cfg carries the documented
/// base values.
struct RunConfig {
    struct Run {
        uint64_t seed = 0;
        std::string out_dir;
    } run;

    struct Routing {
        std::string backend;  // "beeline" | "graph"
        std::string graph_file;
        double driving_speed_kmh = 0;
        double detour_factor = 0;
        double walking_detour_factor = 0;
    } routing;

    struct Demand {
        double inner_radius_km = 0;
        double outer_radius_km = 0;
        int64_t flexible_time_min = 0;
        int64_t stop_time_min = 0;
    } demand;

    struct Generate {
        int64_t agent_count = 0;
        std::vector<CampusShare> campuses;
        std::string distribution_file;
    } generate;

    struct VehicleCfg {
        int64_t seats = 0;
        double fuel_l_per_km = 0;
        double co2_rate = 0;  // g/km for the student car, g/l for the shuttle
        double fuel_price_eur_per_l = 0;
    };
    VehicleCfg student_vehicle;
    VehicleCfg shuttle_vehicle;

    struct Ridesharing {
        double log_base = 0;
        double accepted_walking_distance_m = 0;
        double similarity_weight_time_per_min = 0;
        double similarity_weight_distance_per_km = 0;
        double lost_penalty_eur = 0;
        double walking_speed_mps = 0;
    } ridesharing;

    struct Ridepooling {
        double log_base = 0;
        int64_t fleet_size = 0;
        int64_t circle_segments = 0;
        double exclusion_radius_m = 0;
        bool depots_auto = true;
        std::vector<DepotSpec> depots;
    } ridepooling;

    std::string digest;        // hash of the loaded file
    std::filesystem::path base_dir;  // directory of the config file, for relative paths

    std::filesystem::path resolve(const std::string& relative) const;
};

/// Parses and validates a config file. Unknown keys, missing keys, type
/// mismatches and constraint violations are all errors naming the key.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::string& origin);

/// Assigns one `section.key` value, reusing the loader's parsing/validation.
/// Used by the sweep harness. Throws on unknown keys.
void set_config_key(RunConfig& config, const std::string& dotted_key, const std::string& value);

/// Cross-field validation (radii ordering, share sums, positivity).
void validate_config(const RunConfig& config);

struct SweepAxis {
    std::string key;  // dotted section.key
    std::vector<std::string> values;
};

struct SweepSpec {
    std::vector<SweepAxis> axes;
    std::vector<uint64_t> seeds;

    static SweepSpec load(const std::filesystem::path& path);
    static SweepSpec parse(const std::string& text, const std::string& origin);
    size_t total_runs() const;
};

uint64_t fnv1a64(const std::string& bytes);
std::string digest_hex(const std::string& bytes);

/// Builds the generator input from a validated config (loads the distribution file).
ScenarioGenConfig make_gen_config(const RunConfig& config);

}  // namespace commutesim
