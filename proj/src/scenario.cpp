#include "commutesim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace commutesim {

namespace {

constexpr int64_t kDay = 86400;

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("cannot parse " + what + " from '" + s + "'");
    }
}

int64_t parse_int(const std::string& s, const std::string& what) {
    try {
        size_t used = 0;
        int64_t v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("cannot parse " + what + " from '" + s + "'");
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("file not found: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << content;
}

std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.7f", v);
    return buf;
}

}  // namespace

void ArrivalDensity::validate() const {
    if (grid_s.empty()) throw std::runtime_error("arrival density: empty grid");
    if (grid_s.size() != weights.size()) {
        throw std::runtime_error("arrival density: grid/weight size mismatch");
    }
    double total = 0.0;
    for (size_t i = 0; i < grid_s.size(); ++i) {
        if (grid_s[i] < 0 || grid_s[i] >= kDay) {
            throw std::runtime_error("arrival density: grid timestamp outside [0, 86400)");
        }
        if (i > 0 && grid_s[i] - grid_s[i - 1] != 300) {
            throw std::runtime_error("arrival density: grid must be strictly increasing in 300 s steps");
        }
        if (weights[i] < 0.0) throw std::runtime_error("arrival density: negative weight");
        total += weights[i];
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::runtime_error("arrival density: weights sum to " + std::to_string(total) +
                                 ", expected 1");
    }
}

void StayQuartileTable::validate() const {
    if (upper_bounds_s.size() != 4 || stay_minutes.size() != 4) {
        throw std::runtime_error("stay table: exactly four quartiles required");
    }
    for (size_t q = 0; q < 4; ++q) {
        if (q > 0 && upper_bounds_s[q] <= upper_bounds_s[q - 1]) {
            throw std::runtime_error("stay table: quartile boundaries must increase");
        }
        if (stay_minutes[q].empty()) {
            throw std::runtime_error("stay table: quartile " + std::to_string(q + 1) +
                                     " has no staying-time distribution");
        }
        double total = 0.0;
        for (const auto& [minutes, prob] : stay_minutes[q]) {
            if (minutes <= 0) throw std::runtime_error("stay table: staying times must be positive");
            if (prob < 0.0) throw std::runtime_error("stay table: negative probability");
            total += prob;
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw std::runtime_error("stay table: quartile " + std::to_string(q + 1) +
                                     " probabilities sum to " + std::to_string(total));
        }
    }
}

int StayQuartileTable::quartile_of(int64_t arrival_s) const {
    for (size_t q = 0; q < upper_bounds_s.size(); ++q) {
        if (arrival_s < upper_bounds_s[q]) return static_cast<int>(q);
    }
    throw std::runtime_error("stay table: arrival " + std::to_string(arrival_s) +
                             " outside the table's domain");
}

DistributionFile DistributionFile::load(const std::filesystem::path& path) {
    return parse(read_file(path), path.string());
}

DistributionFile DistributionFile::parse(const std::string& text, const std::string& origin) {
    DistributionFile out;
    out.quartiles.upper_bounds_s.assign(4, 0);
    out.quartiles.stay_minutes.resize(4);
    std::vector<bool> bound_seen(4, false);

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_csv(line);
        auto fail = [&](const std::string& why) {
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": " + why);
        };
        if (!header_seen) {
            if (fields.empty() || fields[0] != "record") fail("expected header starting with 'record'");
            header_seen = true;
            continue;
        }
        if (fields[0] == "density") {
            if (fields.size() != 3) fail("density rows need 3 fields");
            out.density.grid_s.push_back(parse_int(fields[1], "density timestamp"));
            out.density.weights.push_back(parse_double(fields[2], "density weight"));
        } else if (fields[0] == "quartile_upper") {
            if (fields.size() != 3) fail("quartile_upper rows need 3 fields");
            const int64_t q = parse_int(fields[1], "quartile index");
            if (q < 1 || q > 4) fail("quartile index must be 1..4");
            out.quartiles.upper_bounds_s[q - 1] = parse_int(fields[2], "quartile bound");
            bound_seen[q - 1] = true;
        } else if (fields[0] == "stay") {
            if (fields.size() != 4) fail("stay rows need 4 fields");
            const int64_t q = parse_int(fields[1], "quartile index");
            if (q < 1 || q > 4) fail("quartile index must be 1..4");
            const int64_t minutes = parse_int(fields[2], "staying minutes");
            out.quartiles.stay_minutes[q - 1][minutes] = parse_double(fields[3], "stay probability");
        } else {
            fail("unknown record type '" + fields[0] + "'");
        }
    }
    for (int q = 0; q < 4; ++q) {
        if (!bound_seen[q]) {
            throw std::runtime_error(origin + ": missing quartile_upper record for quartile " +
                                     std::to_string(q + 1));
        }
    }
    out.density.validate();
    out.quartiles.validate();

    // cross checks: sampling must stay inside one simulated day
    if (out.density.grid_s.back() >= out.quartiles.upper_bounds_s.back()) {
        throw std::runtime_error(origin + ": arrival grid extends past the stay table domain");
    }
    for (int q = 0; q < 4; ++q) {
        int64_t worst_arrival = -1;
        for (int64_t t : out.density.grid_s) {
            if (out.quartiles.quartile_of(t) == q) worst_arrival = std::max(worst_arrival, t);
        }
        if (worst_arrival < 0) continue;
        const int64_t max_stay = out.quartiles.stay_minutes[q].rbegin()->first * 60;
        if (worst_arrival + max_stay >= kDay) {
            throw std::runtime_error(origin + ": quartile " + std::to_string(q + 1) +
                                     " allows departures past the end of the day");
        }
    }
    return out;
}

const CampusLocation& DemandScenario::campus(const std::string& id) const {
    for (const auto& c : campuses) {
        if (c.id == id) return c;
    }
    throw std::runtime_error("unknown campus id: " + id);
}

GeoPoint DemandScenario::campus_centroid() const {
    if (campuses.empty()) throw std::runtime_error("scenario has no campus locations");
    GeoPoint c{0, 0};
    for (const auto& loc : campuses) {
        c.lat += loc.position.lat;
        c.lon += loc.position.lon;
    }
    c.lat /= static_cast<double>(campuses.size());
    c.lon /= static_cast<double>(campuses.size());
    return c;
}

std::string DemandScenario::serialize() const {
    std::string out;
    out += "# seed," + std::to_string(seed) + "\n";
    out += "# digest," + config_digest + "\n";
    for (const auto& c : campuses) {
        out += "# campus," + c.id + "," + fmt_coord(c.position.lat) + "," +
               fmt_coord(c.position.lon) + "\n";
    }
    out += "agent_id,home_lat,home_lon,campus_id,arrival_s,departure_s,submission_s,parking_lat,parking_lon\n";
    for (const auto& r : rows) {
        out += std::to_string(r.agent_id) + "," + fmt_coord(r.home.lat) + "," +
               fmt_coord(r.home.lon) + "," + r.campus_id + "," + std::to_string(r.arrival_s) + "," +
               std::to_string(r.departure_s) + "," + std::to_string(r.submission_s) + "," +
               fmt_coord(r.parking.lat) + "," + fmt_coord(r.parking.lon) + "\n";
    }
    return out;
}

void DemandScenario::save(const std::filesystem::path& path) const { write_file(path, serialize()); }

DemandScenario DemandScenario::parse(const std::string& text, const std::string& origin) {
    DemandScenario s;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    std::set<int64_t> ids;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fail = [&](const std::string& why) {
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": " + why);
        };
        if (line[0] == '#') {
            auto fields = split_csv(line.substr(1).find_first_not_of(' ') == std::string::npos
                                        ? ""
                                        : line.substr(line.find_first_not_of(" #")));
            if (fields.empty()) continue;
            if (fields[0] == "seed" && fields.size() == 2) {
                s.seed = static_cast<uint64_t>(parse_int(fields[1], "seed"));
            } else if (fields[0] == "digest" && fields.size() == 2) {
                s.config_digest = fields[1];
            } else if (fields[0] == "campus") {
                if (fields.size() != 4) fail("campus metadata needs id,lat,lon");
                CampusLocation c;
                c.id = fields[1];
                c.position.lat = parse_double(fields[2], "campus lat");
                c.position.lon = parse_double(fields[3], "campus lon");
                validate_point(c.position, "campus");
                for (const auto& prev : s.campuses) {
                    if (prev.id == c.id) fail("duplicate campus id " + c.id);
                    if (prev.position == c.position) fail("campus positions must be distinct");
                }
                s.campuses.push_back(c);
            }
            continue;
        }
        if (!header_seen) {
            if (line.rfind("agent_id,", 0) != 0) fail("expected scenario header row");
            header_seen = true;
            continue;
        }
        auto fields = split_csv(line);
        if (fields.size() != 9) fail("expected 9 fields");
        ScenarioRow r;
        r.agent_id = parse_int(fields[0], "agent id");
        r.home.lat = parse_double(fields[1], "home lat");
        r.home.lon = parse_double(fields[2], "home lon");
        r.campus_id = fields[3];
        r.arrival_s = parse_int(fields[4], "arrival");
        r.departure_s = parse_int(fields[5], "departure");
        r.submission_s = parse_int(fields[6], "submission");
        r.parking.lat = parse_double(fields[7], "parking lat");
        r.parking.lon = parse_double(fields[8], "parking lon");
        validate_point(r.home, "agent home");
        validate_point(r.parking, "parking");
        if (!ids.insert(r.agent_id).second) fail("duplicate agent id " + std::to_string(r.agent_id));
        if (r.departure_s <= r.arrival_s) fail("departure must come after arrival");
        if (r.submission_s >= r.arrival_s) fail("submission must precede arrival");
        if (r.arrival_s < 0 || r.departure_s >= kDay || r.submission_s < 0) {
            fail("timestamps must lie within one simulated day");
        }
        s.campus(r.campus_id);  // throws if unknown
        s.rows.push_back(r);
    }
    if (!header_seen) throw std::runtime_error(origin + ": missing scenario header row");
    return s;
}

DemandScenario DemandScenario::load(const std::filesystem::path& path) {
    return parse(read_file(path), path.string());
}

std::vector<GeoPoint> sample_homes(const GeoPoint& center, double inner_km, double outer_km,
                                   int64_t n, Rng& rng) {
    if (!(inner_km >= 0) || !(inner_km < outer_km)) {
        throw std::invalid_argument("annulus radii must satisfy 0 <= inner < outer");
    }
    if (n < 0) throw std::invalid_argument("sample size must be nonnegative");
    const double r1 = inner_km * 1000.0;
    const double r2 = outer_km * 1000.0;
    std::vector<GeoPoint> out;
    out.reserve(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
        const double u = rng.uniform();
        const double r = std::sqrt(r1 * r1 + u * (r2 * r2 - r1 * r1));
        const double bearing = rng.uniform() * 360.0;
        out.push_back(destination_point(center, bearing, r));
    }
    return out;
}

std::vector<GeoPoint> load_homes_file(const std::filesystem::path& path) {
    std::istringstream in(read_file(path));
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    std::vector<GeoPoint> out;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line.rfind("lat,", 0) != 0) {
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": expected 'lat,lon' header");
            }
            header_seen = true;
            continue;
        }
        auto fields = split_csv(line);
        if (fields.size() != 2) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": malformed home row");
        }
        GeoPoint p{parse_double(fields[0], "home lat"), parse_double(fields[1], "home lon")};
        validate_point(p, "home");
        out.push_back(p);
    }
    return out;
}

int64_t sample_arrival(const ArrivalDensity& density, Rng& rng) {
    return density.grid_s[rng.pick_weighted(density.weights)];
}

int64_t sample_stay(const StayQuartileTable& table, int64_t arrival_s, Rng& rng) {
    const auto& dist = table.stay_minutes[table.quartile_of(arrival_s)];
    std::vector<double> weights;
    weights.reserve(dist.size());
    for (const auto& [minutes, prob] : dist) weights.push_back(prob);
    auto it = dist.begin();
    std::advance(it, rng.pick_weighted(weights));
    return it->first * 60;
}

int64_t sample_submission(int64_t arrival_s, Rng& rng) {
    const int64_t minutes_before = rng.uniform_int(30, 360);
    return std::max<int64_t>(0, arrival_s - minutes_before * 60);
}

DemandScenario generate_scenario(const ScenarioGenConfig& config, uint64_t seed) {
    if (config.campuses.empty()) throw std::runtime_error("generate: no campus locations");
    if (config.campuses.size() != config.campus_shares.size()) {
        throw std::runtime_error("generate: campus shares must align with campus locations");
    }
    double share_total = 0.0;
    for (double s : config.campus_shares) {
        if (s < 0.0) throw std::runtime_error("generate: negative campus share");
        share_total += s;
    }
    if (std::abs(share_total - 1.0) > 1e-9) {
        throw std::runtime_error("generate: campus shares sum to " + std::to_string(share_total));
    }
    config.density.validate();
    config.quartiles.validate();

    DemandScenario scenario;
    scenario.campuses = config.campuses;
    scenario.seed = seed;
    scenario.config_digest = config.config_digest;

    Rng rng(seed);
    const GeoPoint centroid = scenario.campus_centroid();
    std::vector<GeoPoint> homes =
        sample_homes(centroid, config.inner_radius_km, config.outer_radius_km, config.agent_count, rng);

    for (int64_t i = 0; i < config.agent_count; ++i) {
        ScenarioRow r;
        r.agent_id = i + 1;
        r.home = homes[static_cast<size_t>(i)];
        const size_t campus_idx = rng.pick_weighted(config.campus_shares);
        r.campus_id = config.campuses[campus_idx].id;
        r.parking = config.campuses[campus_idx].position;
        r.arrival_s = sample_arrival(config.density, rng);
        r.departure_s = r.arrival_s + sample_stay(config.quartiles, r.arrival_s, rng);
        r.submission_s = sample_submission(r.arrival_s, rng);
        scenario.rows.push_back(r);
    }
    return scenario;
}

}  // namespace commutesim
