#pragma once

// Independent brute-force reference implementations used by the test suites.
// These deliberately avoid the production search code paths: the schedule
// oracle enumerates raw permutations and the routing oracle enumerates all
// simple paths.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "commutesim/rng.hpp"
#include "commutesim/road_graph.hpp"
#include "commutesim/routing.hpp"
#include "commutesim/solver.hpp"

namespace testoracle {

struct BruteResult {
    bool feasible = false;
    int64_t best_travel_s = 0;
    int64_t best_start_s = 0;
    std::vector<int> best_order;
};

inline BruteResult brute_force_schedule(const commutesim::GeoPoint& start,
                                        const std::vector<commutesim::Stop>& stops,
                                        const std::map<int64_t, commutesim::RideTimeBudget>& budgets,
                                        const commutesim::Router& router,
                                        const commutesim::SolveOptions& opts = {}) {
    using namespace commutesim;
    BruteResult out;
    const int n = static_cast<int>(stops.size());
    if (n == 0) {
        out.feasible = true;
        return out;
    }

    std::vector<GeoPoint> pts;
    pts.push_back(start);
    for (const Stop& s : stops) pts.push_back(s.location);
    std::vector<std::vector<int64_t>> dur(n + 1, std::vector<int64_t>(n + 1, 0));
    std::vector<std::vector<double>> dist(n + 1, std::vector<double>(n + 1, 0.0));
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            if (i == j) continue;
            Route r = router.route(pts[i], pts[j]);
            dur[i][j] = r.duration_s;
            dist[i][j] = r.distance_m;
        }
    }

    int64_t base_lo = opts.min_start_s;
    int64_t base_hi = std::numeric_limits<int64_t>::max() / 4;
    if (opts.start_window) {
        base_lo = std::max(base_lo, opts.start_window->earliest);
        base_hi = std::min(base_hi, opts.start_window->latest);
    }
    if (opts.fixed_start_s) {
        base_lo = std::max(base_lo, *opts.fixed_start_s);
        base_hi = std::min(base_hi, *opts.fixed_start_s);
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    do {
        // precedence and terminal-position rules
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            const Stop& s = stops[order[i]];
            if (s.must_be_last && i != n - 1) ok = false;
            if (s.kind == StopKind::dropoff) {
                for (int j = i + 1; j < n && ok; ++j) {
                    if (stops[order[j]].kind == StopKind::pickup &&
                        stops[order[j]].agent_id == s.agent_id) {
                        ok = false;
                    }
                }
            }
        }
        if (!ok) continue;

        // rigid chain offsets
        std::vector<int64_t> offset(n, 0);
        int64_t c = 0, travel = 0;
        int prev = -1;
        for (int i = 0; i < n; ++i) {
            const int idx = order[i];
            const int64_t service = (prev < 0) ? 0 : stops[prev].service_time_s;
            c += service + dur[prev + 1][idx + 1];
            travel += dur[prev + 1][idx + 1];
            offset[i] = c;
            prev = idx;
        }
        int64_t lo = base_lo, hi = base_hi;
        for (int i = 0; i < n; ++i) {
            lo = std::max(lo, stops[order[i]].window.earliest - offset[i]);
            hi = std::min(hi, stops[order[i]].window.latest - offset[i]);
        }
        if (lo > hi) continue;

        // per-agent in-vehicle budgets
        bool budgets_ok = true;
        for (const auto& [agent, budget] : budgets) {
            int pickup_pos = -1, dropoff_pos = -1;
            for (int i = 0; i < n; ++i) {
                if (stops[order[i]].agent_id != agent) continue;
                if (stops[order[i]].kind == StopKind::pickup) pickup_pos = i;
                if (stops[order[i]].kind == StopKind::dropoff) dropoff_pos = i;
            }
            if (pickup_pos < 0 && dropoff_pos < 0) continue;
            const int64_t board =
                (pickup_pos >= 0) ? offset[pickup_pos] + stops[order[pickup_pos]].service_time_s : 0;
            const int64_t exit = (dropoff_pos >= 0) ? offset[dropoff_pos] : offset[n - 1];
            if (static_cast<double>(exit - board) > accepted_ride_time_s(budget) + 1e-9) {
                budgets_ok = false;
                break;
            }
        }
        if (!budgets_ok) continue;

        if (!out.feasible || travel < out.best_travel_s ||
            (travel == out.best_travel_s &&
             std::lexicographical_compare(order.begin(), order.end(), out.best_order.begin(),
                                          out.best_order.end()))) {
            out.feasible = true;
            out.best_travel_s = travel;
            out.best_start_s = hi;
            out.best_order = order;
        }
    } while (std::next_permutation(order.begin(), order.end()));
    return out;
}

struct RandomInstance {
    commutesim::GeoPoint start;
    std::vector<commutesim::Stop> stops;
    std::map<int64_t, commutesim::RideTimeBudget> budgets;
    commutesim::SolveOptions opts;
};

/// Random stop sets with a mix of paired pickup/dropoffs, dropoff-only agents,
/// tight and wide windows, shared by the solver unit tests and the acceptance
/// oracle run.
inline RandomInstance make_random_instance(commutesim::Rng& rng, int max_stops) {
    using namespace commutesim;
    RandomInstance inst;
    inst.start = GeoPoint{49.7880, 9.9360};

    const int n_agents = 1 + static_cast<int>(rng.uniform_int(0, (max_stops / 2) - 1));
    int64_t next_agent = 100;
    for (int a = 0; a < n_agents; ++a) {
        const int64_t agent = next_agent++;
        const bool paired = rng.uniform() < 0.5;
        const int64_t t_center = 28800 + rng.uniform_int(0, 7200);
        const int64_t half = 300 + rng.uniform_int(0, 900);

        Stop drop;
        drop.location = destination_point(inst.start, rng.uniform() * 360.0,
                                          500.0 + rng.uniform() * 12000.0);
        drop.kind = StopKind::dropoff;
        drop.agent_id = agent;
        drop.service_time_s = 60;
        drop.window = TimeWindow{t_center - half, t_center + half};

        if (paired && static_cast<int>(inst.stops.size()) + 2 <= max_stops) {
            Stop pick;
            pick.location = destination_point(inst.start, rng.uniform() * 360.0,
                                              500.0 + rng.uniform() * 12000.0);
            pick.kind = StopKind::pickup;
            pick.agent_id = agent;
            pick.service_time_s = 60;
            pick.window = (rng.uniform() < 0.5)
                              ? TimeWindow{}
                              : TimeWindow{t_center - half - 2400, t_center + half};
            inst.stops.push_back(pick);
            inst.stops.push_back(drop);
        } else if (static_cast<int>(inst.stops.size()) + 1 <= max_stops) {
            inst.stops.push_back(drop);
        }
        if (rng.uniform() < 0.7) {
            inst.budgets[agent] =
                RideTimeBudget{600 + rng.uniform_int(0, 1800), rng.uniform() < 0.5 ? 1.4 : 1.2};
        }
    }
    if (!inst.stops.empty() && rng.uniform() < 0.3) {
        inst.stops.back().must_be_last = true;
        // keep it well-defined: only valid when that stop is a dropoff; it is.
    }
    if (rng.uniform() < 0.3) {
        inst.opts.start_window = commutesim::TimeWindow{27000, 33000};
    }
    inst.opts.min_start_s = 25200;
    return inst;
}

/// Minimal duration over all simple paths between two nodes (by node index).
inline std::optional<double> enumerate_shortest_duration(const commutesim::RoadGraph& g, int from,
                                                         int to) {
    std::optional<double> best;
    std::vector<bool> visited(g.node_count(), false);
    std::vector<std::pair<int, double>> stack;

    std::function<void(int, double)> dfs = [&](int u, double d) {
        if (u == to) {
            if (!best || d < *best) best = d;
            return;
        }
        visited[u] = true;
        for (const auto& e : g.edges_from(u)) {
            if (!visited[e.to]) dfs(e.to, d + e.time_s);
        }
        visited[u] = false;
    };
    dfs(from, 0.0);
    return best;
}

}  // namespace testoracle
