#pragma once

#include <map>
#include <optional>
#include <vector>

#include "commutesim/mode.hpp"

namespace commutesim {

/// One open grouping of requests on a private car. Passengers board at the
/// driver's home for campus trips and are returned there on the way back.
struct RsMatch {
    int64_t id = 0;
    Direction direction = Direction::to_campus;
    int64_t driver = 0;
    GeoPoint driver_home;
    GeoPoint start_pos;
    TimeWindow anchor_window;                 // driver window; similarity anchor
    std::optional<TimeWindow> start_window;   // homebound: the driver's W_D
    std::vector<int64_t> passengers;
    std::vector<Stop> stops;
    std::map<int64_t, RideTimeBudget> budgets;
    Schedule schedule;
    int64_t ride_start = 0;
    uint64_t version = 0;
    bool frozen = false;

    bool open(int64_t seats) const {
        return !frozen && static_cast<int64_t>(passengers.size()) < seats - 1;
    }
};

struct WaitingListEntry {
    int64_t agent_id = 0;
    int64_t expiry_s = 0;  // departure_window.latest
};

struct CandidateAnchor {
    int64_t match_id = 0;
    int64_t window_center_s = 0;
    GeoPoint driver_home;
};

/// Similarity ranking: w_t per minute of window-center difference plus w_d per
/// km between the homes, ascending, capped. Ties break toward lower match ids.
std::vector<int64_t> rank_candidates(int64_t request_center_s, const GeoPoint& request_home,
                                     const std::vector<CandidateAnchor>& anchors,
                                     double weight_time_per_min, double weight_distance_per_km,
                                     size_t cap = 20);

/// Splits each agent's paired request into an arrival event at the scenario
/// submission time and a departure event 30..120 whole minutes before T_D.
std::vector<Event> split_requests(const std::vector<Agent>& agents, Rng& rng);

class RidesharingMode : public MobilityMode {
public:
    RidesharingMode(const RunConfig& config, const Router& router)
        : MobilityMode("ridesharing", config, router) {}

    void prepare_mode(const std::vector<Agent>& agents) override;
    void start_mode() override;
    void write_additional_results(const std::filesystem::path& out_dir) override;
    double budget_log_base() const override { return config_->ridesharing.log_base; }

    const std::map<int64_t, RsMatch>& matches() const { return matches_; }
    const std::vector<WaitingListEntry>& waiting_list() const { return waitlist_; }

private:
    struct JoinResult {
        int64_t match_id = 0;
        double walk_m = 0;
        Schedule schedule;
        std::vector<Stop> stops;
        std::map<int64_t, RideTimeBudget> budgets;
    };

    void handle_arrival(int64_t agent_id, int64_t now);
    void handle_departure(int64_t agent_id, int64_t now);
    void handle_ride_start(int64_t match_id, uint64_t version);
    std::optional<JoinResult> best_feasible_join(const Agent& agent, Direction direction,
                                                 int64_t now);
    void apply_join(const Agent& agent, JoinResult&& join);
    void create_driver_match(const Agent& agent, Direction direction, int64_t now);
    void expire_waitlist(int64_t now);
    void rescan_waitlist(int64_t now);
    void finalize_day();
    void push_ride_start(const RsMatch& match);
    const Agent& agent(int64_t id) const;

    std::map<int64_t, const Agent*> agents_by_id_;
    std::map<int64_t, RsMatch> matches_;
    std::vector<int64_t> open_to_campus_;   // compacted lazily as matches close
    std::vector<int64_t> open_homebound_;
    std::vector<WaitingListEntry> waitlist_;
    std::set<int64_t> inbound_drivers_;
    std::set<int64_t> solo_direct_;  // agents whose own solo schedule was infeasible
    std::set<int64_t> lost_;
    EventQueue queue_;
    int64_t next_match_id_ = 1;
    int64_t next_ride_id_ = 1;
};

}  // namespace commutesim
