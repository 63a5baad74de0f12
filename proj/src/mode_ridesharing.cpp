#include "commutesim/mode_ridesharing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace commutesim {

std::vector<int64_t> rank_candidates(int64_t request_center_s, const GeoPoint& request_home,
                                     const std::vector<CandidateAnchor>& anchors,
                                     double weight_time_per_min, double weight_distance_per_km,
                                     size_t cap) {
    struct Scored {
        double score;
        int64_t id;
    };
    std::vector<Scored> scored;
    scored.reserve(anchors.size());
    for (const CandidateAnchor& a : anchors) {
        const double minutes =
            std::abs(static_cast<double>(request_center_s - a.window_center_s)) / 60.0;
        const double km = haversine_m(request_home, a.driver_home) / 1000.0;
        scored.push_back({weight_time_per_min * minutes + weight_distance_per_km * km, a.match_id});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& x, const Scored& y) {
        if (x.score != y.score) return x.score < y.score;
        return x.id < y.id;
    });
    if (scored.size() > cap) scored.resize(cap);
    std::vector<int64_t> out;
    out.reserve(scored.size());
    for (const Scored& s : scored) out.push_back(s.id);
    return out;
}

std::vector<Event> split_requests(const std::vector<Agent>& agents, Rng& rng) {
    std::vector<Event> events;
    events.reserve(agents.size() * 2);
    for (const Agent& a : agents) {  // sorted by id: fixed draw order
        events.push_back({a.request.submission_s, EventKind::arrival_request, a.id, 0});
        const int64_t offset_min = rng.uniform_int(30, 120);
        int64_t dep_submission = a.request.departure_s - offset_min * 60;
        // never reveal the return request before the arrival request
        dep_submission = std::max(dep_submission, a.request.submission_s);
        events.push_back({dep_submission, EventKind::departure_request, a.id, 0});
    }
    std::sort(events.begin(), events.end());
    return events;
}

const Agent& RidesharingMode::agent(int64_t id) const {
    auto it = agents_by_id_.find(id);
    if (it == agents_by_id_.end()) throw std::logic_error("unknown agent id " + std::to_string(id));
    return *it->second;
}

void RidesharingMode::prepare_mode(const std::vector<Agent>& agents) {
    agents_ = &agents;
    agents_by_id_.clear();
    for (const Agent& a : agents) agents_by_id_[a.id] = &a;

    Rng rng(config_->run.seed);
    for (const Event& e : split_requests(agents, rng)) queue_.push(e);
}

void RidesharingMode::start_mode() {
    event_loop(queue_, [this](const Event& e) {
        expire_waitlist(e.time_s);
        switch (e.kind) {
            case EventKind::arrival_request: handle_arrival(e.payload, e.time_s); break;
            case EventKind::departure_request: handle_departure(e.payload, e.time_s); break;
            case EventKind::ride_start: handle_ride_start(e.payload, e.version); break;
            default: throw std::logic_error("unexpected event kind in ridesharing");
        }
    });
    finalize_day();
}

void RidesharingMode::push_ride_start(const RsMatch& match) {
    queue_.push({match.ride_start, EventKind::ride_start, match.id, match.version});
}

std::optional<RidesharingMode::JoinResult> RidesharingMode::best_feasible_join(const Agent& a,
                                                                               Direction direction,
                                                                               int64_t now) {
    const auto& rs = config_->ridesharing;
    const TimeWindow& request_window = (direction == Direction::to_campus)
                                           ? a.request.arrival_window
                                           : a.request.departure_window;

    std::vector<int64_t>& open_ids =
        (direction == Direction::to_campus) ? open_to_campus_ : open_homebound_;
    std::vector<CandidateAnchor> anchors;
    size_t kept = 0;
    for (size_t i = 0; i < open_ids.size(); ++i) {
        const RsMatch& m = matches_.at(open_ids[i]);
        if (!m.open(config_->student_vehicle.seats)) continue;  // drop closed matches
        open_ids[kept++] = open_ids[i];
        anchors.push_back({m.id, m.anchor_window.center(), m.driver_home});
    }
    open_ids.resize(kept);
    const std::vector<int64_t> ranked =
        rank_candidates(request_window.center(), a.home, anchors, rs.similarity_weight_time_per_min,
                        rs.similarity_weight_distance_per_km);

    std::optional<JoinResult> best;
    for (int64_t match_id : ranked) {
        const RsMatch& m = matches_.at(match_id);
        const double walk =
            walking_distance_m(a.home, m.driver_home, config_->routing.walking_detour_factor);
        if (walk > rs.accepted_walking_distance_m) continue;
        bool overlap = false;
        for (const Stop& s : m.stops) {
            if (request_window.overlaps(s.window)) {
                overlap = true;
                break;
            }
        }
        if (!overlap) continue;

        std::vector<Stop> stops = m.stops;
        Stop extra;
        extra.location = a.campus_pos;
        extra.agent_id = a.id;
        extra.service_time_s = config_->demand.stop_time_min * 60;
        if (direction == Direction::to_campus) {
            extra.kind = StopKind::dropoff;
            extra.window = a.request.arrival_window;
        } else {
            extra.kind = StopKind::pickup;
            extra.window = a.request.departure_window;
        }
        stops.push_back(extra);

        std::map<int64_t, RideTimeBudget> budgets = m.budgets;
        budgets[a.id] = {direction == Direction::to_campus ? a.direct_to_s : a.direct_back_s,
                         rs.log_base};

        SolveOptions opts;
        opts.min_start_s = now;
        opts.start_window = m.start_window;
        SolveResult res = solve_schedule(m.start_pos, stops, budgets, *router_, opts);
        if (!res.feasible()) continue;

        if (!best || walk < best->walk_m ||
            (walk == best->walk_m && match_id < best->match_id)) {
            best = JoinResult{match_id, walk, std::move(*res.schedule), std::move(stops),
                              std::move(budgets)};
        }
    }
    return best;
}

void RidesharingMode::apply_join(const Agent& a, JoinResult&& join) {
    RsMatch& m = matches_.at(join.match_id);
    m.passengers.push_back(a.id);
    m.stops = std::move(join.stops);
    m.budgets = std::move(join.budgets);
    m.schedule = std::move(join.schedule);
    m.ride_start = m.schedule.start_time_s;
    m.version += 1;
    push_ride_start(m);
    output_.agent_extras[a.id].walk_m += join.walk_m;
    output_.agent_extras[a.id].walk_s +=
        join.walk_m / config_->ridesharing.walking_speed_mps;
}

void RidesharingMode::create_driver_match(const Agent& a, Direction direction, int64_t now) {
    RsMatch m;
    m.id = next_match_id_++;
    m.direction = direction;
    m.driver = a.id;
    m.driver_home = a.home;

    Stop terminal;
    terminal.agent_id = a.id;
    terminal.kind = StopKind::dropoff;
    terminal.service_time_s = 0;
    terminal.must_be_last = true;
    SolveOptions opts;
    opts.min_start_s = now;
    if (direction == Direction::to_campus) {
        m.start_pos = a.home;
        m.anchor_window = a.request.arrival_window;
        terminal.location = a.campus_pos;
        terminal.window = a.request.arrival_window;
        m.budgets[a.id] = {a.direct_to_s, config_->ridesharing.log_base};
    } else {
        m.start_pos = a.campus_pos;
        m.anchor_window = a.request.departure_window;
        m.start_window = a.request.departure_window;
        opts.start_window = m.start_window;
        terminal.location = a.home;
        terminal.window = TimeWindow{};  // the driver's own home: no deadline
        m.budgets[a.id] = {a.direct_back_s, config_->ridesharing.log_base};
    }
    m.stops.push_back(terminal);

    SolveResult res = solve_schedule(m.start_pos, m.stops, m.budgets, *router_, opts);
    if (!res.feasible()) {
        // the agent cannot even serve the own request under match semantics;
        // fall back to a plain direct drive and keep them out of matching
        solo_direct_.insert(a.id);
        output_.agent_extras[a.id].drove_self = true;
        if (direction == Direction::to_campus) {
            Ride ride = solo_round_trip(a, *router_, next_ride_id_)[0];
            ride.id = next_ride_id_++;
            output_.rides.push_back(std::move(ride));
        } else {
            Ride ride = solo_round_trip(a, *router_, next_ride_id_)[1];
            ride.id = next_ride_id_++;
            output_.rides.push_back(std::move(ride));
        }
        return;
    }
    m.schedule = std::move(*res.schedule);
    m.ride_start = m.schedule.start_time_s;
    if (direction == Direction::to_campus) inbound_drivers_.insert(a.id);
    output_.agent_extras[a.id].drove_self = true;
    push_ride_start(m);
    matches_.emplace(m.id, std::move(m));
}

void RidesharingMode::handle_arrival(int64_t agent_id, int64_t now) {
    const Agent& a = agent(agent_id);
    auto join = best_feasible_join(a, Direction::to_campus, now);
    if (join) {
        apply_join(a, std::move(*join));
    } else {
        create_driver_match(a, Direction::to_campus, now);
    }
}

void RidesharingMode::handle_departure(int64_t agent_id, int64_t now) {
    const Agent& a = agent(agent_id);
    if (inbound_drivers_.count(agent_id)) {
        // drivers take the own car back and open a new homebound match
        create_driver_match(a, Direction::homebound, now);
        rescan_waitlist(now);
        return;
    }
    if (solo_direct_.count(agent_id)) {
        Ride ride = solo_round_trip(a, *router_, next_ride_id_)[1];
        ride.id = next_ride_id_++;
        output_.rides.push_back(std::move(ride));
        return;
    }
    auto join = best_feasible_join(a, Direction::homebound, now);
    if (join) {
        apply_join(a, std::move(*join));
    } else {
        waitlist_.push_back({agent_id, a.request.departure_window.latest});
    }
}

void RidesharingMode::handle_ride_start(int64_t match_id, uint64_t version) {
    auto it = matches_.find(match_id);
    if (it == matches_.end()) return;
    RsMatch& m = it->second;
    if (m.frozen || m.version != version) return;  // superseded by a later join
    m.frozen = true;

    Ride ride = ride_from_schedule(m.schedule, *router_);
    ride.id = next_ride_id_++;
    ride.direction = m.direction;
    ride.vehicle = agent(m.driver).car;
    ride.driver = m.driver;

    auto stop_index = [&](int64_t agent_id, StopKind kind) {
        for (size_t i = 0; i < ride.stops.size(); ++i) {
            if (ride.stops[i].agent_id == agent_id && ride.stops[i].kind == kind) {
                return static_cast<int>(i);
            }
        }
        throw std::logic_error("stop not found for agent " + std::to_string(agent_id));
    };

    const int terminal = static_cast<int>(ride.stops.size()) - 1;
    if (m.direction == Direction::to_campus) {
        ride.riders.push_back({m.driver, -1, stop_index(m.driver, StopKind::dropoff), true});
        for (int64_t p : m.passengers) {
            ride.riders.push_back({p, -1, stop_index(p, StopKind::dropoff), false});
        }
    } else {
        ride.riders.push_back({m.driver, -1, terminal, true});
        for (int64_t p : m.passengers) {
            ride.riders.push_back({p, stop_index(p, StopKind::pickup), terminal, false});
        }
    }
    output_.rides.push_back(std::move(ride));
}

void RidesharingMode::expire_waitlist(int64_t now) {
    auto it = waitlist_.begin();
    while (it != waitlist_.end()) {
        if (now > it->expiry_s) {
            lost_.insert(it->agent_id);
            output_.agent_extras[it->agent_id].lost = true;
            it = waitlist_.erase(it);
        } else {
            ++it;
        }
    }
}

void RidesharingMode::rescan_waitlist(int64_t now) {
    auto it = waitlist_.begin();
    while (it != waitlist_.end()) {  // submission order: entries were appended in event order
        const Agent& a = agent(it->agent_id);
        auto join = best_feasible_join(a, Direction::homebound, now);
        if (join) {
            apply_join(a, std::move(*join));
            it = waitlist_.erase(it);
        } else {
            ++it;
        }
    }
}

void RidesharingMode::finalize_day() {
    for (const WaitingListEntry& entry : waitlist_) {
        lost_.insert(entry.agent_id);
        output_.agent_extras[entry.agent_id].lost = true;
    }
    waitlist_.clear();

    // lost passengers get a direct trip home charged under the * variant
    for (int64_t agent_id : lost_) {
        const Agent& a = agent(agent_id);
        Ride ride = solo_round_trip(a, *router_, next_ride_id_)[1];
        ride.id = next_ride_id_++;
        ride.kind = RideKind::lost_home;
        output_.rides.push_back(std::move(ride));
    }
}

void RidesharingMode::write_additional_results(const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::ofstream out(out_dir / "ridesharingExtra.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write ridesharingExtra.csv");
    out << "# config_digest," << config_->digest << "\n";
    out << "agent_id,walking_distance_m,walking_time_s,lost\n";
    for (const Agent& a : *agents_) {
        AgentExtra extra;
        auto it = output_.agent_extras.find(a.id);
        if (it != output_.agent_extras.end()) extra = it->second;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.1f,%.1f", extra.walk_m, extra.walk_s);
        out << a.id << "," << buf << "," << (extra.lost ? 1 : 0) << "\n";
    }
}

}  // namespace commutesim
