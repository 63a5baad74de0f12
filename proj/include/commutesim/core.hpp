#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "commutesim/config.hpp"
#include "commutesim/routing.hpp"
#include "commutesim/scenario.hpp"
#include "commutesim/solver.hpp"

namespace commutesim {

enum class VehicleKind { private_car, shuttle };

struct VehicleParams {
    int64_t seats = 0;
    double fuel_l_per_km = 0;
    double co2_rate = 0;  // g/km for private cars, g/l for shuttles
    double fuel_price_eur_per_l = 0;
    VehicleKind kind = VehicleKind::private_car;
};

VehicleParams student_vehicle(const RunConfig& config);
VehicleParams shuttle_vehicle(const RunConfig& config);

struct TravelRequest {
    int64_t agent_id = 0;
    int64_t arrival_s = 0;      // T_A
    int64_t departure_s = 0;    // T_D
    int64_t submission_s = 0;
    TimeWindow arrival_window;    // [T_A - FM, T_A + FM]
    TimeWindow departure_window;  // [T_D, T_D + 2 FM]
    GeoPoint parking;
};

struct Agent {
    int64_t id = 0;
    GeoPoint home;
    std::string campus_id;
    GeoPoint campus_pos;
    TravelRequest request;
    VehicleParams car;
    // direct drive, cached from the routing backend at build time
    double direct_to_m = 0;
    int64_t direct_to_s = 0;
    double direct_back_m = 0;
    int64_t direct_back_s = 0;
};

/// Materializes agents from a scenario: windows from the flexible time, the
/// private car from config, direct routes cached. Validates campus references
/// and annulus membership.
std::vector<Agent> build_agents(const DemandScenario& scenario, const RunConfig& config,
                                const Router& router);

// ---------------------------------------------------------------------------
// events

enum class EventKind : int {
    arrival_request = 0,
    departure_request = 1,
    paired_request = 2,
    ride_start = 3,
};

struct Event {
    int64_t time_s = 0;
    EventKind kind = EventKind::arrival_request;
    int64_t payload = 0;   // agent id or match id
    uint64_t version = 0;  // disambiguates superseded ride-start events

    friend bool operator<(const Event& a, const Event& b) {
        if (a.time_s != b.time_s) return a.time_s < b.time_s;
        if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
        if (a.payload != b.payload) return a.payload < b.payload;
        return a.version < b.version;
    }
};

/// Time-ordered queue; ties resolve by (kind, payload, version). Handlers may
/// push future events while the loop runs; pushing into the past is an error.
class EventQueue {
public:
    void push(const Event& e);
    bool empty() const { return events_.empty(); }
    size_t size() const { return events_.size(); }
    int64_t current_time() const { return current_time_; }

private:
    friend int64_t event_loop(EventQueue& queue, const std::function<void(const Event&)>& handler);
    std::multiset<Event> events_;
    int64_t current_time_ = -1;
    bool running_ = false;
};

/// Drains the queue in timestamp order; returns the number of events handled.
int64_t event_loop(EventQueue& queue, const std::function<void(const Event&)>& handler);

// ---------------------------------------------------------------------------
// rides

enum class Direction { to_campus, homebound, mixed };
enum class RideKind { normal, lost_home };

struct RideStop {
    GeoPoint pos;
    int64_t arrival_s = 0;
    int64_t service_s = 0;
    StopKind kind = StopKind::dropoff;
    int64_t agent_id = 0;
};

struct Participation {
    int64_t agent_id = 0;
    int board_stop = -1;  // -1: aboard from the ride start
    int exit_stop = 0;
    bool is_driver = false;
};

struct Ride {
    int64_t id = 0;
    Direction direction = Direction::to_campus;
    RideKind kind = RideKind::normal;
    VehicleParams vehicle;
    std::optional<int64_t> driver;      // private-car rides
    std::optional<int64_t> shuttle_id;  // pooled rides
    GeoPoint start_pos;
    int64_t start_s = 0;
    std::vector<RideStop> stops;
    std::vector<Route> legs;  // legs[i] runs into stops[i]
    std::vector<Participation> riders;

    double distance_m() const;
    int64_t end_s() const;
    int64_t duration_s() const { return end_s() - start_s; }
    int onboard_during_leg(size_t leg) const;
    int max_onboard() const;
    /// Distance split by whether anyone is aboard. revenue + empty == total.
    double revenue_distance_m() const;
    double empty_distance_m() const;
    int64_t board_time(const Participation& p) const;      // departure from the boarding point
    int64_t exit_time(const Participation& p) const;       // arrival at the exit stop
};

/// Builds stops/legs/arrivals of a ride from a solved schedule.
Ride ride_from_schedule(const Schedule& schedule, const Router& router);

// ---------------------------------------------------------------------------
// mode output and the central constraint referee

struct AgentExtra {
    double walk_m = 0;
    double walk_s = 0;
    bool lost = false;
    bool drove_self = false;
};

struct ShuttleDayRow {
    int64_t vehicle_id = 0;
    int64_t rides = 0;
    int64_t passengers = 0;
    double distance_m = 0;
    double empty_distance_m = 0;
    int64_t time_s = 0;
};

struct ModeOutput {
    std::vector<Ride> rides;
    std::map<int64_t, AgentExtra> agent_extras;
    double extra_empty_distance_m = 0;  // depot legs outside passenger rides
    int64_t extra_empty_time_s = 0;
    std::vector<ShuttleDayRow> shuttle_rows;
    std::vector<int64_t> excluded_agents;  // e.g. unreachable homes on a graph backend

    int64_t lost_count() const;
    int64_t driving_count() const;
};

struct ConstraintViolation {
    std::string category;  // window | capacity | walking | budget
    int64_t agent_id = 0;
    int64_t ride_id = 0;
    std::string detail;
};

struct ConstraintReport {
    std::vector<ConstraintViolation> violations;
    int64_t rides_checked = 0;

    bool ok() const { return violations.empty(); }
};

/// Mode-agnostic referee: realized arrival/departure window containment, seat
/// capacity at every instant, walking-distance limit, and per-leg ride-time
/// budgets with the given log base.
ConstraintReport check_ride_constraints(const ModeOutput& output, const std::vector<Agent>& agents,
                                        const RunConfig& config, const Router& router,
                                        double budget_log_base);

/// Two solo private-car rides with ED semantics: arrive exactly at T_A,
/// depart exactly at T_D. Used by the baseline mode and by fallbacks.
std::vector<Ride> solo_round_trip(const Agent& agent, const Router& router, int64_t first_ride_id);

}  // namespace commutesim
