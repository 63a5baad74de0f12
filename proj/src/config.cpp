#include "commutesim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace commutesim {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, const std::string& key) {
    try {
        size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::runtime_error("config key '" + key + "': expected a number, got '" + v + "'");
    }
}

int64_t to_int(const std::string& v, const std::string& key) {
    try {
        size_t used = 0;
        int64_t d = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::runtime_error("config key '" + key + "': expected an integer, got '" + v + "'");
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<CampusShare> parse_campuses(const std::string& value, const std::string& key) {
    std::vector<CampusShare> out;
    for (const std::string& part : split(value, ';')) {
        if (trim(part).empty()) continue;
        auto fields = split(trim(part), ':');
        if (fields.size() != 4) {
            throw std::runtime_error("config key '" + key +
                                     "': campus entries need id:lat:lon:share, got '" + part + "'");
        }
        CampusShare c;
        c.location.id = trim(fields[0]);
        c.location.position.lat = to_double(trim(fields[1]), key);
        c.location.position.lon = to_double(trim(fields[2]), key);
        c.share = to_double(trim(fields[3]), key);
        validate_point(c.location.position, "campus");
        out.push_back(c);
    }
    if (out.empty()) throw std::runtime_error("config key '" + key + "': no campus entries");
    return out;
}

void parse_depots(const std::string& value, RunConfig::Ridepooling& rp, const std::string& key) {
    rp.depots.clear();
    if (trim(value) == "auto") {
        rp.depots_auto = true;
        return;
    }
    rp.depots_auto = false;
    for (const std::string& part : split(value, ';')) {
        if (trim(part).empty()) continue;
        auto fields = split(trim(part), ':');
        if (fields.size() != 3) {
            throw std::runtime_error("config key '" + key +
                                     "': depot entries need lat:lon:capacity, got '" + part + "'");
        }
        DepotSpec d;
        d.position.lat = to_double(trim(fields[0]), key);
        d.position.lon = to_double(trim(fields[1]), key);
        d.capacity = to_int(trim(fields[2]), key);
        validate_point(d.position, "depot");
        if (d.capacity < 1) throw std::runtime_error("config key '" + key + "': depot capacity must be >= 1");
        rp.depots.push_back(d);
    }
    if (rp.depots.empty()) throw std::runtime_error("config key '" + key + "': no depot entries");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& schema() {
    static const std::map<std::string, Setter> s = {
        {"run.seed",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.run.seed = static_cast<uint64_t>(to_int(v, k));
         }},
        {"run.out_dir", [](RunConfig& c, const std::string& v, const std::string&) { c.run.out_dir = v; }},

        {"routing.backend",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             if (v != "beeline" && v != "graph") {
                 throw std::runtime_error("config key '" + k + "': backend must be 'beeline' or 'graph'");
             }
             c.routing.backend = v;
         }},
        {"routing.graph_file",
         [](RunConfig& c, const std::string& v, const std::string&) { c.routing.graph_file = v; }},
        {"routing.driving_speed_kmh",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.routing.driving_speed_kmh = to_double(v, k);
         }},
        {"routing.detour_factor",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.routing.detour_factor = to_double(v, k);
         }},
        {"routing.walking_detour_factor",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.routing.walking_detour_factor = to_double(v, k);
         }},

        {"demand.inner_radius_km",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.demand.inner_radius_km = to_double(v, k);
         }},
        {"demand.outer_radius_km",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.demand.outer_radius_km = to_double(v, k);
         }},
        {"demand.flexible_time_min",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.demand.flexible_time_min = to_int(v, k);
         }},
        {"demand.stop_time_min",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.demand.stop_time_min = to_int(v, k);
         }},

        {"generate.agent_count",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.generate.agent_count = to_int(v, k);
         }},
        {"generate.campuses",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.generate.campuses = parse_campuses(v, k);
         }},
        {"generate.distribution_file",
         [](RunConfig& c, const std::string& v, const std::string&) {
             c.generate.distribution_file = v;
         }},

        {"student_vehicle.seats",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.student_vehicle.seats = to_int(v, k);
         }},
        {"student_vehicle.fuel_l_per_km",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.student_vehicle.fuel_l_per_km = to_double(v, k);
         }},
        {"student_vehicle.co2_g_per_km",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.student_vehicle.co2_rate = to_double(v, k);
         }},
        {"student_vehicle.fuel_price_eur_per_l",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.student_vehicle.fuel_price_eur_per_l = to_double(v, k);
         }},

        {"shuttle_vehicle.seats",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.shuttle_vehicle.seats = to_int(v, k);
         }},
        {"shuttle_vehicle.fuel_l_per_km",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.shuttle_vehicle.fuel_l_per_km = to_double(v, k);
         }},
        {"shuttle_vehicle.co2_g_per_l",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.shuttle_vehicle.co2_rate = to_double(v, k);
         }},
        {"shuttle_vehicle.fuel_price_eur_per_l",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.shuttle_vehicle.fuel_price_eur_per_l = to_double(v, k);
         }},

        {"ridesharing.log_base",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.ridesharing.log_base = to_double(v, k);
         }},
        {"ridesharing.accepted_walking_distance_m",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.ridesharing.accepted_walking_distance_m = to_double(v, k);
         }},
        {"ridesharing.similarity_weight_time_per_min",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.ridesharing.similarity_weight_time_per_min = to_double(v, k);
         }},
        {"ridesharing.similarity_weight_distance_per_km",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.ridesharing.similarity_weight_distance_per_km = to_double(v, k);
         }},
        {"ridesharing.lost_penalty_eur",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.ridesharing.lost_penalty_eur = to_double(v, k);
         }},
        {"ridesharing.walking_speed_mps",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.ridesharing.walking_speed_mps = to_double(v, k);
         }},

        {"ridepooling.log_base",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.ridepooling.log_base = to_double(v, k);
         }},
        {"ridepooling.fleet_size",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.ridepooling.fleet_size = to_int(v, k);
         }},
        {"ridepooling.circle_segments",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.ridepooling.circle_segments = to_int(v, k);
         }},
        {"ridepooling.exclusion_radius_m",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.ridepooling.exclusion_radius_m = to_double(v, k);
         }},
        {"ridepooling.depots",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             parse_depots(v, c.ridepooling, k);
         }},
    };
    return s;
}

void require_positive(double v, const std::string& key) {
    if (!(v > 0)) throw std::runtime_error("config key '" + key + "' must be positive");
}

}  // namespace

std::filesystem::path RunConfig::resolve(const std::string& relative) const {
    std::filesystem::path p(relative);
    if (p.is_absolute() || base_dir.empty()) return p;
    return base_dir / p;
}

uint64_t fnv1a64(const std::string& bytes) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string digest_hex(const std::string& bytes) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
    RunConfig config;
    config.digest = digest_hex(text);

    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto fail = [&](const std::string& why) {
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": " + why);
        };
        if (line.front() == '[') {
            if (line.back() != ']') fail("malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        const std::string key = section + "." + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto it = schema().find(key);
        if (it == schema().end()) fail("unknown config key '" + key + "'");
        if (!seen.insert(key).second) fail("duplicate config key '" + key + "'");
        it->second(config, value, key);
    }
    for (const auto& [key, setter] : schema()) {
        if (!seen.count(key)) {
            throw std::runtime_error(origin + ": missing config key '" + key + "'");
        }
    }
    validate_config(config);
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("config file not found: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    RunConfig config = parse_config(buf.str(), path.string());
    config.base_dir = path.parent_path();
    return config;
}

void set_config_key(RunConfig& config, const std::string& dotted_key, const std::string& value) {
    auto it = schema().find(dotted_key);
    if (it == schema().end()) {
        throw std::runtime_error("unknown config key '" + dotted_key + "'");
    }
    it->second(config, value, dotted_key);
    validate_config(config);
}

void validate_config(const RunConfig& c) {
    require_positive(c.routing.driving_speed_kmh, "routing.driving_speed_kmh");
    if (c.routing.detour_factor < 1.0) {
        throw std::runtime_error("config key 'routing.detour_factor' must be >= 1");
    }
    if (c.routing.walking_detour_factor < 1.0) {
        throw std::runtime_error("config key 'routing.walking_detour_factor' must be >= 1");
    }
    if (c.routing.backend == "graph" && c.routing.graph_file.empty()) {
        throw std::runtime_error("config key 'routing.graph_file' required for the graph backend");
    }
    if (!(c.demand.inner_radius_km >= 0) || !(c.demand.inner_radius_km < c.demand.outer_radius_km)) {
        throw std::runtime_error(
            "config keys 'demand.inner_radius_km'/'demand.outer_radius_km': need 0 <= inner < outer");
    }
    if (c.demand.flexible_time_min < 0) {
        throw std::runtime_error("config key 'demand.flexible_time_min' must be >= 0");
    }
    if (c.demand.stop_time_min < 0) {
        throw std::runtime_error("config key 'demand.stop_time_min' must be >= 0");
    }
    if (c.generate.agent_count < 0) {
        throw std::runtime_error("config key 'generate.agent_count' must be >= 0");
    }
    double share_total = 0.0;
    std::set<std::string> campus_ids;
    for (const auto& cs : c.generate.campuses) {
        if (cs.share < 0) throw std::runtime_error("config key 'generate.campuses': negative share");
        if (!campus_ids.insert(cs.location.id).second) {
            throw std::runtime_error("config key 'generate.campuses': duplicate id " + cs.location.id);
        }
        share_total += cs.share;
    }
    if (std::abs(share_total - 1.0) > 1e-9) {
        throw std::runtime_error("config key 'generate.campuses': shares sum to " +
                                 std::to_string(share_total) + ", expected 1");
    }
    for (const char* key : {"student_vehicle", "shuttle_vehicle"}) {
        const auto& v = (std::string(key) == "student_vehicle") ? c.student_vehicle : c.shuttle_vehicle;
        if (v.seats < 1) throw std::runtime_error("config key '" + std::string(key) + ".seats' must be >= 1");
        require_positive(v.fuel_l_per_km, std::string(key) + ".fuel_l_per_km");
        require_positive(v.co2_rate, std::string(key) + ".co2_*");
        require_positive(v.fuel_price_eur_per_l, std::string(key) + ".fuel_price_eur_per_l");
    }
    if (c.ridesharing.log_base <= 1.0) {
        throw std::runtime_error("config key 'ridesharing.log_base' must be > 1");
    }
    if (c.ridepooling.log_base <= 1.0) {
        throw std::runtime_error("config key 'ridepooling.log_base' must be > 1");
    }
    if (c.ridesharing.accepted_walking_distance_m < 0 || c.ridesharing.lost_penalty_eur < 0 ||
        c.ridesharing.similarity_weight_time_per_min < 0 ||
        c.ridesharing.similarity_weight_distance_per_km < 0) {
        throw std::runtime_error("config section 'ridesharing': negative parameter");
    }
    require_positive(c.ridesharing.walking_speed_mps, "ridesharing.walking_speed_mps");
    if (c.ridepooling.fleet_size < 0) {
        throw std::runtime_error("config key 'ridepooling.fleet_size' must be >= 0");
    }
    if (c.ridepooling.circle_segments < 1) {
        throw std::runtime_error("config key 'ridepooling.circle_segments' must be >= 1");
    }
    if (c.ridepooling.exclusion_radius_m < 0) {
        throw std::runtime_error("config key 'ridepooling.exclusion_radius_m' must be >= 0");
    }
}

SweepSpec SweepSpec::parse(const std::string& text, const std::string& origin) {
    SweepSpec spec;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto fail = [&](const std::string& why) {
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": " + why);
        };
        if (line.rfind("axis ", 0) == 0) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) fail("axis lines need 'axis <key> = v1,v2,...'");
            SweepAxis axis;
            axis.key = trim(line.substr(5, eq - 5));
            if (schema().find(axis.key) == schema().end()) {
                fail("swept key '" + axis.key + "' is not a config key");
            }
            for (const std::string& v : split(line.substr(eq + 1), ',')) {
                if (!trim(v).empty()) axis.values.push_back(trim(v));
            }
            if (axis.values.empty()) fail("axis '" + axis.key + "' has no values");
            spec.axes.push_back(axis);
        } else if (line.rfind("seeds", 0) == 0) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) fail("seeds line needs 'seeds = s1,s2,...'");
            for (const std::string& v : split(line.substr(eq + 1), ',')) {
                if (!trim(v).empty()) {
                    spec.seeds.push_back(static_cast<uint64_t>(to_int(trim(v), "seeds")));
                }
            }
        } else {
            fail("unknown sweep directive: " + line);
        }
    }
    if (spec.axes.empty()) throw std::runtime_error(origin + ": sweep spec has no axes");
    if (spec.seeds.empty()) spec.seeds.push_back(0);
    return spec;
}

SweepSpec SweepSpec::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("sweep spec not found: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

size_t SweepSpec::total_runs() const {
    size_t n = seeds.size();
    for (const auto& axis : axes) n *= axis.values.size();
    return n;
}

ScenarioGenConfig make_gen_config(const RunConfig& config) {
    ScenarioGenConfig gen;
    for (const auto& cs : config.generate.campuses) {
        gen.campuses.push_back(cs.location);
        gen.campus_shares.push_back(cs.share);
    }
    gen.agent_count = config.generate.agent_count;
    gen.inner_radius_km = config.demand.inner_radius_km;
    gen.outer_radius_km = config.demand.outer_radius_km;
    DistributionFile dist = DistributionFile::load(config.resolve(config.generate.distribution_file));
    gen.density = dist.density;
    gen.quartiles = dist.quartiles;
    gen.config_digest = config.digest;
    return gen;
}

}  // namespace commutesim
