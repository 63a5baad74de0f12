#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "commutesim/core.hpp"

namespace commutesim {

double ride_co2_g(double distance_m, const VehicleParams& vehicle);
double ride_fuel_cost_eur(double distance_m, const VehicleParams& vehicle);

/// Metric totals for one lost-passenger accounting variant. The `incl`
/// variant counts direct car trips home for lost passengers (plus the cost
/// penalty); the `excl` variant drops those trips entirely.
struct VariantTotals {
    double distance_m = 0;
    int64_t duration_s = 0;
    double co2_g = 0;
    double fuel_eur = 0;
    int64_t rides = 0;
    int64_t rides_multi = 0;  // rides carrying more than one agent
    double avg_occupancy = 0;
    double avg_co2_agent_g = 0;
    double avg_co2_ride_g = 0;
    double avg_fuel_agent_eur = 0;
    double avg_fuel_ride_eur = 0;
    std::optional<double> pct_distance, pct_time, pct_co2, pct_fuel;
};

struct DaySummary {
    std::string mode;
    int64_t agents = 0;
    uint64_t seed = 0;
    std::string config_digest;
    VariantTotals incl;  // * variant
    VariantTotals excl;  // ** variant; equals incl when nobody is lost
    double empty_m = 0;
    int64_t lost = 0;
    int64_t driving = 0;
};

struct AgentAggregate {
    int64_t rides = 0;
    double distance_m = 0;
    int64_t in_vehicle_s = 0;
    double co2_g = 0;
    double fuel_eur = 0;
};

/// Per-agent attribution: a ride's emissions/cost split equally among everyone
/// aboard; distance/time measured between each agent's board and exit.
std::map<int64_t, AgentAggregate> aggregate_agents(const std::vector<Ride>& rides);

DaySummary summarize(const std::string& mode_name, const ModeOutput& output,
                     const std::vector<Agent>& agents, const RunConfig& config,
                     const DaySummary* baseline);

/// Writes rideResults.csv, agentResults.csv and summarizedResults.csv into
/// out_dir. Fixed formats: meters 1 decimal, euros 2 decimals, grams integer.
void write_results(const DaySummary& summary, const ModeOutput& output,
                   const std::vector<Agent>& agents, const std::filesystem::path& out_dir);

/// One summarizedResults.csv with a row per mode, percentages against the
/// EverybodyDrives row when present.
void write_combined_summary(const std::vector<DaySummary>& summaries,
                            const std::filesystem::path& out_dir);

std::string summary_header();
std::string summary_row(const DaySummary& s);

}  // namespace commutesim
