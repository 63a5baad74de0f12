#include "commutesim/routing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace commutesim {

BeelineRouter::BeelineRouter(double driving_speed_mps, double detour_factor)
    : speed_mps_(driving_speed_mps), detour_(detour_factor) {
    if (speed_mps_ <= 0) throw std::invalid_argument("driving speed must be positive");
    if (detour_ < 1.0) throw std::invalid_argument("detour factor must be >= 1");
}

Route BeelineRouter::route(const GeoPoint& from, const GeoPoint& to) const {
    Route r;
    r.origin = from;
    r.destination = to;
    r.distance_m = haversine_m(from, to) * detour_;
    r.duration_s = static_cast<int64_t>(std::llround(r.distance_m / speed_mps_));
    r.waypoints = {from, to};
    return r;
}

GraphRouter::GraphRouter(RoadGraph graph) : graph_(std::move(graph)) {}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieEps = 1e-6;

// Dijkstra by duration; pq ordered by (dist, node id) for determinism.
std::vector<double> dijkstra(const RoadGraph& g, int source, bool reverse) {
    std::vector<double> dist(g.node_count(), kInf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[source] = 0.0;
    pq.push({0.0, source});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u] + kTieEps) continue;
        const auto& edges = reverse ? g.edges_into(u) : g.edges_from(u);
        for (const auto& e : edges) {
            const double nd = d + e.time_s;
            if (nd < dist[e.to] - kTieEps) {
                dist[e.to] = nd;
                pq.push({nd, e.to});
            }
        }
    }
    return dist;
}

}  // namespace

Route GraphRouter::route(const GeoPoint& from, const GeoPoint& to) const {
    if (!graph_.within_service_area(from) || !graph_.within_service_area(to)) {
        throw std::invalid_argument("route endpoint outside the graph's service area");
    }
    const int s = graph_.nearest_node(from);
    const int t = graph_.nearest_node(to);

    Route r;
    r.origin = from;
    r.destination = to;
    if (s == t) {
        r.waypoints = {graph_.node_pos(s)};
        return r;
    }

    const std::vector<double> fwd = dijkstra(graph_, s, false);
    if (fwd[t] == kInf) {
        throw UnreachableError("no path between nodes " + std::to_string(graph_.node_id(s)) + " and " +
                               std::to_string(graph_.node_id(t)));
    }
    const std::vector<double> bwd = dijkstra(graph_, t, true);
    const double total = fwd[t];

    // Walk the shortest-path DAG from s, always taking the smallest next node
    // id that still lies on some optimal path. This realizes the
    // lexicographically-smallest minimal-duration node sequence.
    double duration = 0.0;
    double distance = 0.0;
    int u = s;
    r.waypoints.push_back(graph_.node_pos(s));
    while (u != t) {
        int next = -1;
        const RoadGraph::Edge* next_edge = nullptr;
        for (const auto& e : graph_.edges_from(u)) {
            if (std::abs(duration + e.time_s + bwd[e.to] - total) <= kTieEps) {
                if (next == -1 || graph_.node_id(e.to) < graph_.node_id(next)) {
                    next = e.to;
                    next_edge = &e;
                }
            }
        }
        if (next == -1) throw std::logic_error("shortest-path reconstruction failed");
        duration += next_edge->time_s;
        distance += next_edge->length_m;
        u = next;
        r.waypoints.push_back(graph_.node_pos(u));
    }
    r.distance_m = distance;
    r.duration_s = static_cast<int64_t>(std::llround(duration));
    return r;
}

}  // namespace commutesim
