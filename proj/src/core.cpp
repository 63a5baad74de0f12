#include "commutesim/core.hpp"

#include <algorithm>
#include <cmath>

namespace commutesim {

VehicleParams student_vehicle(const RunConfig& config) {
    VehicleParams v;
    v.seats = config.student_vehicle.seats;
    v.fuel_l_per_km = config.student_vehicle.fuel_l_per_km;
    v.co2_rate = config.student_vehicle.co2_rate;
    v.fuel_price_eur_per_l = config.student_vehicle.fuel_price_eur_per_l;
    v.kind = VehicleKind::private_car;
    return v;
}

VehicleParams shuttle_vehicle(const RunConfig& config) {
    VehicleParams v;
    v.seats = config.shuttle_vehicle.seats;
    v.fuel_l_per_km = config.shuttle_vehicle.fuel_l_per_km;
    v.co2_rate = config.shuttle_vehicle.co2_rate;
    v.fuel_price_eur_per_l = config.shuttle_vehicle.fuel_price_eur_per_l;
    v.kind = VehicleKind::shuttle;
    return v;
}

std::vector<Agent> build_agents(const DemandScenario& scenario, const RunConfig& config,
                                const Router& router) {
    const int64_t fm = config.demand.flexible_time_min * 60;
    const GeoPoint centroid = scenario.campus_centroid();
    const double inner_m = config.demand.inner_radius_km * 1000.0 - 1.0;
    const double outer_m = config.demand.outer_radius_km * 1000.0 + 1.0;

    std::vector<Agent> agents;
    agents.reserve(scenario.rows.size());
    for (const ScenarioRow& row : scenario.rows) {
        Agent a;
        a.id = row.agent_id;
        a.home = row.home;
        a.campus_id = row.campus_id;
        a.campus_pos = scenario.campus(row.campus_id).position;  // throws on unknown id

        const double centroid_dist = haversine_m(a.home, centroid);
        if (centroid_dist < inner_m || centroid_dist > outer_m) {
            throw std::runtime_error("agent " + std::to_string(a.id) + " home lies " +
                                     std::to_string(centroid_dist / 1000.0) +
                                     " km from the campus centroid, outside the service annulus");
        }

        a.request.agent_id = a.id;
        a.request.arrival_s = row.arrival_s;
        a.request.departure_s = row.departure_s;
        a.request.submission_s = row.submission_s;
        a.request.arrival_window = TimeWindow{row.arrival_s - fm, row.arrival_s + fm};
        a.request.departure_window = TimeWindow{row.departure_s, row.departure_s + 2 * fm};
        a.request.parking = row.parking;
        a.car = student_vehicle(config);

        Route to = router.route(a.home, a.campus_pos);
        Route back = router.route(a.campus_pos, a.home);
        a.direct_to_m = to.distance_m;
        a.direct_to_s = to.duration_s;
        a.direct_back_m = back.distance_m;
        a.direct_back_s = back.duration_s;
        agents.push_back(std::move(a));
    }
    std::sort(agents.begin(), agents.end(), [](const Agent& x, const Agent& y) { return x.id < y.id; });
    return agents;
}

void EventQueue::push(const Event& e) {
    if (running_ && e.time_s < current_time_) {
        throw std::logic_error("event pushed into the past: t=" + std::to_string(e.time_s) +
                               " current=" + std::to_string(current_time_));
    }
    events_.insert(e);
}

int64_t event_loop(EventQueue& queue, const std::function<void(const Event&)>& handler) {
    int64_t processed = 0;
    queue.running_ = true;
    while (!queue.events_.empty()) {
        Event e = *queue.events_.begin();
        queue.events_.erase(queue.events_.begin());
        queue.current_time_ = e.time_s;
        handler(e);
        ++processed;
    }
    queue.running_ = false;
    queue.current_time_ = -1;
    return processed;
}

double Ride::distance_m() const {
    double d = 0;
    for (const Route& leg : legs) d += leg.distance_m;
    return d;
}

int64_t Ride::end_s() const {
    if (stops.empty()) return start_s;
    return stops.back().arrival_s + stops.back().service_s;
}

int Ride::onboard_during_leg(size_t leg) const {
    int count = 0;
    for (const Participation& p : riders) {
        if (static_cast<int>(leg) > p.board_stop && static_cast<int>(leg) <= p.exit_stop) ++count;
    }
    return count;
}

int Ride::max_onboard() const {
    int best = 0;
    for (size_t i = 0; i < legs.size(); ++i) best = std::max(best, onboard_during_leg(i));
    return best;
}

double Ride::revenue_distance_m() const {
    double d = 0;
    for (size_t i = 0; i < legs.size(); ++i) {
        if (onboard_during_leg(i) > 0) d += legs[i].distance_m;
    }
    return d;
}

double Ride::empty_distance_m() const {
    double d = 0;
    for (size_t i = 0; i < legs.size(); ++i) {
        if (onboard_during_leg(i) == 0) d += legs[i].distance_m;
    }
    return d;
}

int64_t Ride::board_time(const Participation& p) const {
    if (p.board_stop < 0) return start_s;
    return stops[p.board_stop].arrival_s + stops[p.board_stop].service_s;
}

int64_t Ride::exit_time(const Participation& p) const { return stops[p.exit_stop].arrival_s; }

Ride ride_from_schedule(const Schedule& schedule, const Router& router) {
    Ride ride;
    ride.start_pos = schedule.start_location;
    ride.start_s = schedule.start_time_s;
    GeoPoint prev = schedule.start_location;
    for (size_t i = 0; i < schedule.stops.size(); ++i) {
        const Stop& s = schedule.stops[i];
        RideStop rs;
        rs.pos = s.location;
        rs.arrival_s = schedule.arrival_s[i];
        rs.service_s = s.service_time_s;
        rs.kind = s.kind;
        rs.agent_id = s.agent_id;
        ride.stops.push_back(rs);
        ride.legs.push_back(router.route(prev, s.location));
        prev = s.location;
    }
    return ride;
}

int64_t ModeOutput::lost_count() const {
    int64_t n = 0;
    for (const auto& [id, extra] : agent_extras) {
        if (extra.lost) ++n;
    }
    return n;
}

int64_t ModeOutput::driving_count() const {
    int64_t n = 0;
    for (const auto& [id, extra] : agent_extras) {
        if (extra.drove_self) ++n;
    }
    return n;
}

ConstraintReport check_ride_constraints(const ModeOutput& output, const std::vector<Agent>& agents,
                                        const RunConfig& config, const Router& router,
                                        double budget_log_base) {
    (void)router;
    ConstraintReport report;
    std::map<int64_t, const Agent*> by_id;
    for (const Agent& a : agents) by_id[a.id] = &a;

    for (const Ride& ride : output.rides) {
        ++report.rides_checked;
        if (ride.max_onboard() > ride.vehicle.seats) {
            report.violations.push_back({"capacity", 0, ride.id,
                                         "onboard " + std::to_string(ride.max_onboard()) + " > seats " +
                                             std::to_string(ride.vehicle.seats)});
        }
        if (ride.direction == Direction::mixed) continue;  // no default mode emits mixed rides
        for (const Participation& p : ride.riders) {
            auto it = by_id.find(p.agent_id);
            if (it == by_id.end()) {
                report.violations.push_back({"window", p.agent_id, ride.id, "unknown agent in ride"});
                continue;
            }
            const Agent& agent = *it->second;
            if (ride.direction == Direction::to_campus) {
                const int64_t realized_arrival = ride.exit_time(p);
                if (!agent.request.arrival_window.contains(realized_arrival)) {
                    report.violations.push_back(
                        {"window", p.agent_id, ride.id,
                         "arrival " + std::to_string(realized_arrival) + " outside window"});
                }
            } else {
                const int64_t realized_departure = ride.board_time(p);
                // departure means leaving campus: boarding arrival, before service
                const int64_t board_arrival =
                    (p.board_stop < 0) ? ride.start_s : ride.stops[p.board_stop].arrival_s;
                (void)realized_departure;
                if (!agent.request.departure_window.contains(board_arrival)) {
                    report.violations.push_back(
                        {"window", p.agent_id, ride.id,
                         "departure " + std::to_string(board_arrival) + " outside window"});
                }
            }
            const int64_t in_vehicle = ride.exit_time(p) - ride.board_time(p);
            const int64_t direct = (ride.direction == Direction::to_campus) ? agent.direct_to_s
                                                                            : agent.direct_back_s;
            const double budget = accepted_ride_time_s({direct, budget_log_base});
            if (static_cast<double>(in_vehicle) > budget + 1e-6) {
                report.violations.push_back({"budget", p.agent_id, ride.id,
                                             "in-vehicle " + std::to_string(in_vehicle) + " s > budget " +
                                                 std::to_string(budget) + " s"});
            }
        }
    }
    for (const auto& [agent_id, extra] : output.agent_extras) {
        if (extra.walk_m > config.ridesharing.accepted_walking_distance_m + 1e-6) {
            report.violations.push_back({"walking", agent_id, 0,
                                         "walked " + std::to_string(extra.walk_m) + " m > limit"});
        }
    }
    return report;
}

std::vector<Ride> solo_round_trip(const Agent& agent, const Router& router, int64_t first_ride_id) {
    std::vector<Ride> rides;

    Route to = router.route(agent.home, agent.campus_pos);
    Ride campus;
    campus.id = first_ride_id;
    campus.direction = Direction::to_campus;
    campus.vehicle = agent.car;
    campus.driver = agent.id;
    campus.start_pos = agent.home;
    campus.start_s = agent.request.arrival_s - to.duration_s;
    campus.stops.push_back(
        {agent.campus_pos, agent.request.arrival_s, 0, StopKind::dropoff, agent.id});
    campus.legs.push_back(to);
    campus.riders.push_back({agent.id, -1, 0, true});
    rides.push_back(std::move(campus));

    Route back = router.route(agent.campus_pos, agent.home);
    Ride home;
    home.id = first_ride_id + 1;
    home.direction = Direction::homebound;
    home.vehicle = agent.car;
    home.driver = agent.id;
    home.start_pos = agent.campus_pos;
    home.start_s = agent.request.departure_s;
    home.stops.push_back({agent.home, agent.request.departure_s + back.duration_s, 0,
                          StopKind::dropoff, agent.id});
    home.legs.push_back(back);
    home.riders.push_back({agent.id, -1, 0, true});
    rides.push_back(std::move(home));
    return rides;
}

}  // namespace commutesim
