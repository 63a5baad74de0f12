#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "commutesim/geo.hpp"
#include "commutesim/road_graph.hpp"

namespace commutesim {

struct Route {
    GeoPoint origin;
    GeoPoint destination;
    double distance_m = 0.0;
    int64_t duration_s = 0;
    std::vector<GeoPoint> waypoints;
};

struct UnreachableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Deterministic, traffic-free travel time/distance provider. Implementations
/// are immutable after construction and safe for concurrent reads.
class Router {
public:
    virtual ~Router() = default;
    virtual Route route(const GeoPoint& from, const GeoPoint& to) const = 0;
};

/// Great-circle distance scaled by a detour factor, driven at constant speed.
class BeelineRouter : public Router {
public:
    BeelineRouter(double driving_speed_mps, double detour_factor);
    Route route(const GeoPoint& from, const GeoPoint& to) const override;

private:
    double speed_mps_;
    double detour_;
};

/// Minimal-duration path on a road graph. Endpoints snap to the nearest node.
/// Among equal-duration paths the lexicographically smallest node-id sequence
/// wins, which makes results reproducible across runs.
class GraphRouter : public Router {
public:
    explicit GraphRouter(RoadGraph graph);
    Route route(const GeoPoint& from, const GeoPoint& to) const override;
    const RoadGraph& graph() const { return graph_; }

private:
    RoadGraph graph_;
};

}  // namespace commutesim
