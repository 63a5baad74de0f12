#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "commutesim/geo.hpp"
#include "commutesim/routing.hpp"

namespace commutesim {

constexpr int64_t kFarFuture = 7LL * 86400;  // effectively unbounded within one day
constexpr int kMaxSolverStops = 14;

struct TimeWindow {
    int64_t earliest = 0;
    int64_t latest = kFarFuture;

    bool contains(int64_t t) const { return t >= earliest && t <= latest; }
    bool overlaps(const TimeWindow& o) const { return earliest <= o.latest && o.earliest <= latest; }
    int64_t center() const { return (earliest + latest) / 2; }
};

enum class StopKind { pickup, dropoff };

struct Stop {
    GeoPoint location;
    TimeWindow window;
    StopKind kind = StopKind::dropoff;
    int64_t agent_id = 0;
    int64_t service_time_s = 0;
    bool must_be_last = false;  // e.g. the driver leaves the vehicle here
};

/// Maximum accepted in-vehicle time: direct minutes x mapped to
/// x + log_base(x), back in seconds. For x <= 1 minute the log term is zero.
struct RideTimeBudget {
    int64_t direct_time_s = 0;
    double log_base = 1.4;
};

double accepted_ride_time_s(const RideTimeBudget& budget);

struct Schedule {
    GeoPoint start_location;
    int64_t start_time_s = 0;
    std::vector<Stop> stops;          // in visit order
    std::vector<int64_t> arrival_s;   // aligned with stops
    int64_t total_travel_s = 0;       // driving only, no service time
    double total_distance_m = 0.0;

    int64_t end_time_s() const {
        if (stops.empty()) return start_time_s;
        return arrival_s.back() + stops.back().service_time_s;
    }
    GeoPoint end_location() const { return stops.empty() ? start_location : stops.back().location; }
};

enum class InfeasibleReason { window, no_wait, budget, precedence, diary };

std::string to_string(InfeasibleReason r);

struct SolveOptions {
    std::optional<int64_t> fixed_start_s;    // pin the ride start exactly
    std::optional<TimeWindow> start_window;  // constrain the ride start
    int64_t min_start_s = 0;                 // never start before this instant
};

struct SolveResult {
    std::optional<Schedule> schedule;
    InfeasibleReason reason = InfeasibleReason::window;

    bool feasible() const { return schedule.has_value(); }
};

/// Exact search over stop orderings (subset dynamic program with Pareto
/// labels). Rules enforced:
///   - a pickup precedes its agent's dropoff,
///   - no waiting: arrival at each stop is exactly previous departure plus
///     leg travel time; arriving before a window opens is infeasible,
///   - every arrival lies inside its stop's window,
///   - per-agent in-vehicle time stays within the agent's budget (an agent
///     without a pickup stop boards at the ride start; an agent without a
///     dropoff stop exits at the final stop),
///   - a must_be_last stop is visited last.
/// Among feasible orderings the one with minimal total travel time wins; ties
/// break toward the lexicographically smallest stop-index sequence. When the
/// start time is free, the latest feasible start is chosen.
/// Throws std::invalid_argument for more than kMaxSolverStops stops.
SolveResult solve_schedule(const GeoPoint& start, const std::vector<Stop>& stops,
                           const std::map<int64_t, RideTimeBudget>& budgets, const Router& router,
                           const SolveOptions& opts = {});

struct BudgetCheck {
    std::vector<int64_t> violators;     // agents whose in-vehicle time exceeds the budget
    std::vector<int64_t> inconsistent;  // budget entries with no matching agent in the schedule

    bool all_pass() const { return violators.empty() && inconsistent.empty(); }
};

BudgetCheck check_budgets(const Schedule& schedule, const std::map<int64_t, RideTimeBudget>& budgets);

}  // namespace commutesim
