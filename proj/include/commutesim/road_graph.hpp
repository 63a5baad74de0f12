#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "commutesim/geo.hpp"

namespace commutesim {

/// Directed road network. Node ids come from the input file; internally nodes
/// are compacted to indices. Only the largest strongly connected component is
/// kept; nodes outside it are listed in `rejected_nodes`.
class RoadGraph {
public:
    struct Edge {
        int to = 0;            // node index
        double length_m = 0.0;
        double time_s = 0.0;   // length / speed
    };

    /// Line format: `N <id> <lat> <lon>` and `E <from> <to> <length_m> <speed_kmh>`.
    /// `#` starts a comment. Throws std::runtime_error on parse/validation errors.
    static RoadGraph load(const std::filesystem::path& file);
    static RoadGraph parse(const std::string& text, const std::string& origin);

    size_t node_count() const { return ids_.size(); }
    size_t edge_count() const { return edge_total_; }
    int64_t node_id(int idx) const { return ids_[idx]; }
    const GeoPoint& node_pos(int idx) const { return pos_[idx]; }
    const std::vector<Edge>& edges_from(int idx) const { return adj_[idx]; }
    const std::vector<Edge>& edges_into(int idx) const { return radj_[idx]; }
    const std::vector<int64_t>& rejected_nodes() const { return rejected_; }

    /// Index of the node nearest to p (great-circle). Ties go to the smaller id.
    int nearest_node(const GeoPoint& p) const;

    /// Bounding box of kept nodes, expanded by a margin in meters.
    bool within_service_area(const GeoPoint& p, double margin_m = 50000.0) const;

private:
    std::vector<int64_t> ids_;       // sorted ascending; index -> original id
    std::vector<GeoPoint> pos_;
    std::vector<std::vector<Edge>> adj_;
    std::vector<std::vector<Edge>> radj_;
    std::vector<int64_t> rejected_;
    size_t edge_total_ = 0;
    double min_lat_ = 0, max_lat_ = 0, min_lon_ = 0, max_lon_ = 0;
};

}  // namespace commutesim
