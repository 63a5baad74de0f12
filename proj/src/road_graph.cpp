#include "commutesim/road_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace commutesim {

namespace {

struct RawEdge {
    int64_t from, to;
    double length_m, speed_kmh;
};

// Iterative Tarjan SCC; returns component id per node.
std::vector<int> strongly_connected_components(size_t n, const std::vector<std::vector<int>>& adj,
                                               int& component_count) {
    std::vector<int> index(n, -1), lowlink(n, 0), comp(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    int next_index = 0;
    component_count = 0;

    struct Frame {
        int v;
        size_t child;
    };
    for (size_t root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::vector<Frame> call;
        call.push_back({static_cast<int>(root), 0});
        while (!call.empty()) {
            Frame& f = call.back();
            int v = f.v;
            if (f.child == 0) {
                index[v] = lowlink[v] = next_index++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            bool descended = false;
            while (f.child < adj[v].size()) {
                int w = adj[v][f.child++];
                if (index[w] == -1) {
                    call.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) lowlink[v] = std::min(lowlink[v], index[w]);
            }
            if (descended) continue;
            if (lowlink[v] == index[v]) {
                while (true) {
                    int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = component_count;
                    if (w == v) break;
                }
                ++component_count;
            }
            call.pop_back();
            if (!call.empty()) {
                int parent = call.back().v;
                lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
            }
        }
    }
    return comp;
}

}  // namespace

RoadGraph RoadGraph::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("graph file not found: " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), file.string());
}

RoadGraph RoadGraph::parse(const std::string& text, const std::string& origin) {
    std::map<int64_t, GeoPoint> raw_nodes;
    std::vector<RawEdge> raw_edges;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        auto fail = [&](const std::string& why) {
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": " + why);
        };
        if (tag == "N") {
            int64_t id;
            GeoPoint p;
            if (!(ls >> id >> p.lat >> p.lon)) fail("malformed node line");
            validate_point(p, "graph node");
            if (raw_nodes.count(id)) fail("duplicate node id " + std::to_string(id));
            raw_nodes[id] = p;
        } else if (tag == "E") {
            RawEdge e;
            if (!(ls >> e.from >> e.to >> e.length_m >> e.speed_kmh)) fail("malformed edge line");
            if (e.length_m <= 0) fail("edge length must be positive");
            if (e.speed_kmh <= 0) fail("edge speed must be positive");
            raw_edges.push_back(e);
        } else {
            fail("unknown record tag '" + tag + "'");
        }
    }
    if (raw_nodes.empty()) throw std::runtime_error(origin + ": empty graph (no nodes)");
    for (const RawEdge& e : raw_edges) {
        if (!raw_nodes.count(e.from) || !raw_nodes.count(e.to)) {
            throw std::runtime_error(origin + ": edge " + std::to_string(e.from) + " -> " +
                                     std::to_string(e.to) + " references a missing node");
        }
    }

    // Compact ids, run SCC, keep the largest component (ties: the one holding
    // the smallest node id).
    std::vector<int64_t> all_ids;
    all_ids.reserve(raw_nodes.size());
    for (const auto& [id, p] : raw_nodes) all_ids.push_back(id);
    std::map<int64_t, int> id2idx;
    for (size_t i = 0; i < all_ids.size(); ++i) id2idx[all_ids[i]] = static_cast<int>(i);

    std::vector<std::vector<int>> plain_adj(all_ids.size());
    for (const RawEdge& e : raw_edges) plain_adj[id2idx[e.from]].push_back(id2idx[e.to]);

    int ncomp = 0;
    std::vector<int> comp = strongly_connected_components(all_ids.size(), plain_adj, ncomp);
    std::vector<size_t> comp_size(ncomp, 0);
    for (int c : comp) comp_size[c]++;
    int keep = 0;
    for (int c = 1; c < ncomp; ++c) {
        if (comp_size[c] > comp_size[keep]) keep = c;
    }
    if (ncomp > 1) {
        // tie-break by smallest contained node id
        size_t best = comp_size[keep];
        for (size_t i = 0; i < all_ids.size(); ++i) {
            if (comp_size[comp[i]] == best) {
                keep = comp[i];
                break;
            }
        }
    }

    RoadGraph g;
    std::map<int64_t, int> kept_idx;
    for (size_t i = 0; i < all_ids.size(); ++i) {
        if (comp[i] == keep) {
            kept_idx[all_ids[i]] = static_cast<int>(g.ids_.size());
            g.ids_.push_back(all_ids[i]);
            g.pos_.push_back(raw_nodes[all_ids[i]]);
        } else {
            g.rejected_.push_back(all_ids[i]);
        }
    }
    g.adj_.resize(g.ids_.size());
    g.radj_.resize(g.ids_.size());

    // Deduplicate parallel edges to the fastest (then shortest) one.
    std::map<std::pair<int, int>, Edge> best_edge;
    for (const RawEdge& e : raw_edges) {
        auto fi = kept_idx.find(e.from);
        auto ti = kept_idx.find(e.to);
        if (fi == kept_idx.end() || ti == kept_idx.end()) continue;
        Edge edge{ti->second, e.length_m, e.length_m / (e.speed_kmh / 3.6)};
        auto key = std::make_pair(fi->second, ti->second);
        auto it = best_edge.find(key);
        if (it == best_edge.end() || edge.time_s < it->second.time_s ||
            (edge.time_s == it->second.time_s && edge.length_m < it->second.length_m)) {
            best_edge[key] = edge;
        }
    }
    for (const auto& [key, edge] : best_edge) {
        g.adj_[key.first].push_back(edge);
        Edge rev = edge;
        rev.to = key.first;
        g.radj_[edge.to].push_back(rev);
        ++g.edge_total_;
    }

    g.min_lat_ = g.max_lat_ = g.pos_[0].lat;
    g.min_lon_ = g.max_lon_ = g.pos_[0].lon;
    for (const GeoPoint& p : g.pos_) {
        g.min_lat_ = std::min(g.min_lat_, p.lat);
        g.max_lat_ = std::max(g.max_lat_, p.lat);
        g.min_lon_ = std::min(g.min_lon_, p.lon);
        g.max_lon_ = std::max(g.max_lon_, p.lon);
    }
    return g;
}

int RoadGraph::nearest_node(const GeoPoint& p) const {
    int best = 0;
    double best_d = haversine_m(p, pos_[0]);
    for (size_t i = 1; i < pos_.size(); ++i) {
        const double d = haversine_m(p, pos_[i]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

bool RoadGraph::within_service_area(const GeoPoint& p, double margin_m) const {
    const double margin_lat = margin_m / 111320.0;
    const double margin_lon = margin_m / (111320.0 * std::max(0.1, std::cos(deg2rad((min_lat_ + max_lat_) / 2))));
    return p.lat >= min_lat_ - margin_lat && p.lat <= max_lat_ + margin_lat &&
           p.lon >= min_lon_ - margin_lon && p.lon <= max_lon_ + margin_lon;
}

}  // namespace commutesim
