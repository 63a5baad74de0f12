#include "commutesim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace commutesim {

namespace {

std::string fmt(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string fmt_grams(double g) { return std::to_string(static_cast<long long>(std::llround(g))); }

std::string fmt_opt_pct(const std::optional<double>& v) { return v ? fmt(*v, 2) : std::string(); }

const char* to_string(Direction d) {
    switch (d) {
        case Direction::to_campus: return "to_campus";
        case Direction::homebound: return "homebound";
        case Direction::mixed: return "mixed";
    }
    return "?";
}

const char* to_string(RideKind k) {
    return k == RideKind::normal ? "normal" : "lost_home";
}

void open_out(std::ofstream& out, const std::filesystem::path& path) {
    out.open(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write result file: " + path.string());
}

VariantTotals compute_variant(const std::vector<Ride>& rides, const ModeOutput& output,
                              const std::vector<Agent>& agents, const RunConfig& config,
                              bool include_lost_home) {
    VariantTotals t;
    const VehicleParams shuttle = shuttle_vehicle(config);
    for (const Ride& r : rides) {
        if (!include_lost_home && r.kind == RideKind::lost_home) continue;
        t.distance_m += r.distance_m();
        t.duration_s += r.duration_s();
        t.co2_g += ride_co2_g(r.distance_m(), r.vehicle);
        t.fuel_eur += ride_fuel_cost_eur(r.distance_m(), r.vehicle);
        t.rides += 1;
        if (r.riders.size() > 1) t.rides_multi += 1;
    }
    // depot and repositioning legs outside passenger rides are shuttle legs
    t.distance_m += output.extra_empty_distance_m;
    t.duration_s += output.extra_empty_time_s;
    t.co2_g += ride_co2_g(output.extra_empty_distance_m, shuttle);
    t.fuel_eur += ride_fuel_cost_eur(output.extra_empty_distance_m, shuttle);

    if (include_lost_home) {
        t.fuel_eur += static_cast<double>(output.lost_count()) * config.ridesharing.lost_penalty_eur;
    }
    const auto n_agents = static_cast<double>(agents.size());
    if (t.rides > 0) {
        t.avg_occupancy = 2.0 * n_agents / static_cast<double>(t.rides);
        t.avg_co2_ride_g = t.co2_g / static_cast<double>(t.rides);
        t.avg_fuel_ride_eur = t.fuel_eur / static_cast<double>(t.rides);
    }
    if (!agents.empty()) {
        t.avg_co2_agent_g = t.co2_g / n_agents;
        t.avg_fuel_agent_eur = t.fuel_eur / n_agents;
    }
    return t;
}

void fill_percentages(VariantTotals& t, const DaySummary& baseline) {
    const VariantTotals& b = baseline.incl;
    if (b.distance_m > 0) t.pct_distance = t.distance_m / b.distance_m * 100.0;
    if (b.duration_s > 0) t.pct_time = static_cast<double>(t.duration_s) / b.duration_s * 100.0;
    if (b.co2_g > 0) t.pct_co2 = t.co2_g / b.co2_g * 100.0;
    if (b.fuel_eur > 0) t.pct_fuel = t.fuel_eur / b.fuel_eur * 100.0;
}

}  // namespace

double ride_co2_g(double distance_m, const VehicleParams& vehicle) {
    const double km = distance_m / 1000.0;
    if (vehicle.kind == VehicleKind::private_car) return km * vehicle.co2_rate;
    return km * vehicle.fuel_l_per_km * vehicle.co2_rate;  // rate is g per liter
}

double ride_fuel_cost_eur(double distance_m, const VehicleParams& vehicle) {
    const double km = distance_m / 1000.0;
    return km * vehicle.fuel_l_per_km * vehicle.fuel_price_eur_per_l;
}

std::map<int64_t, AgentAggregate> aggregate_agents(const std::vector<Ride>& rides) {
    std::map<int64_t, AgentAggregate> out;
    for (const Ride& r : rides) {
        if (r.riders.empty()) continue;
        const double share = 1.0 / static_cast<double>(r.riders.size());
        const double co2 = ride_co2_g(r.distance_m(), r.vehicle);
        const double fuel = ride_fuel_cost_eur(r.distance_m(), r.vehicle);
        for (const Participation& p : r.riders) {
            AgentAggregate& agg = out[p.agent_id];
            agg.rides += 1;
            agg.co2_g += co2 * share;
            agg.fuel_eur += fuel * share;
            agg.in_vehicle_s += r.exit_time(p) - r.board_time(p);
            for (int leg = p.board_stop + 1; leg <= p.exit_stop; ++leg) {
                agg.distance_m += r.legs[leg].distance_m;
            }
        }
    }
    return out;
}

DaySummary summarize(const std::string& mode_name, const ModeOutput& output,
                     const std::vector<Agent>& agents, const RunConfig& config,
                     const DaySummary* baseline) {
    DaySummary s;
    s.mode = mode_name;
    s.agents = static_cast<int64_t>(agents.size());
    s.seed = config.run.seed;
    s.config_digest = config.digest;
    s.lost = output.lost_count();
    s.driving = output.driving_count();
    s.incl = compute_variant(output.rides, output, agents, config, true);
    s.excl = compute_variant(output.rides, output, agents, config, false);
    for (const Ride& r : output.rides) s.empty_m += r.empty_distance_m();
    s.empty_m += output.extra_empty_distance_m;
    if (baseline) {
        fill_percentages(s.incl, *baseline);
        fill_percentages(s.excl, *baseline);
    }
    return s;
}

std::string summary_header() {
    return "mode,agents,seed,config_digest,"
           "distance_km,time_min,co2_kg,fuel_eur,empty_km,lost,driving,rides,rides_multi,"
           "avg_occupancy,avg_co2_per_agent_kg,avg_co2_per_ride_kg,avg_fuel_per_agent_eur,"
           "avg_fuel_per_ride_eur,pct_distance,pct_time,pct_co2,pct_fuel,"
           "distance_km_excl,time_min_excl,co2_kg_excl,fuel_eur_excl,rides_excl,"
           "avg_occupancy_excl,avg_co2_per_agent_kg_excl,avg_co2_per_ride_kg_excl,"
           "avg_fuel_per_agent_eur_excl,avg_fuel_per_ride_eur_excl,"
           "pct_distance_excl,pct_time_excl,pct_co2_excl,pct_fuel_excl";
}

std::string summary_row(const DaySummary& s) {
    auto variant_cols = [](const VariantTotals& t) {
        return fmt(t.distance_m / 1000.0, 1) + "," + fmt(t.duration_s / 60.0, 1) + "," +
               fmt(t.co2_g / 1000.0, 2) + "," + fmt(t.fuel_eur, 2);
    };
    auto variant_avgs = [](const VariantTotals& t) {
        return fmt(t.avg_occupancy, 2) + "," + fmt(t.avg_co2_agent_g / 1000.0, 2) + "," +
               fmt(t.avg_co2_ride_g / 1000.0, 2) + "," + fmt(t.avg_fuel_agent_eur, 2) + "," +
               fmt(t.avg_fuel_ride_eur, 2);
    };
    auto variant_pcts = [](const VariantTotals& t) {
        return fmt_opt_pct(t.pct_distance) + "," + fmt_opt_pct(t.pct_time) + "," +
               fmt_opt_pct(t.pct_co2) + "," + fmt_opt_pct(t.pct_fuel);
    };
    std::string row = s.mode + "," + std::to_string(s.agents) + "," + std::to_string(s.seed) + "," +
                      s.config_digest + ",";
    row += variant_cols(s.incl) + "," + fmt(s.empty_m / 1000.0, 1) + "," + std::to_string(s.lost) +
           "," + std::to_string(s.driving) + "," + std::to_string(s.incl.rides) + "," +
           std::to_string(s.incl.rides_multi) + "," + variant_avgs(s.incl) + "," +
           variant_pcts(s.incl) + ",";
    row += variant_cols(s.excl) + "," + std::to_string(s.excl.rides) + "," + variant_avgs(s.excl) +
           "," + variant_pcts(s.excl);
    return row;
}

void write_results(const DaySummary& summary, const ModeOutput& output,
                   const std::vector<Agent>& agents, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);

    {
        std::ofstream out;
        open_out(out, out_dir / "rideResults.csv");
        out << "# config_digest," << summary.config_digest << "\n";
        out << "# seed," << summary.seed << "\n";
        out << "ride_id,mode,direction,kind,vehicle,driver,shuttle_id,start_s,end_s,"
               "start_lat,start_lon,end_lat,end_lon,distance_m,duration_s,co2_g,fuel_cost_eur,"
               "passengers,max_onboard,agents,stops\n";
        std::vector<const Ride*> rides;
        for (const Ride& r : output.rides) rides.push_back(&r);
        std::sort(rides.begin(), rides.end(),
                  [](const Ride* a, const Ride* b) { return a->id < b->id; });
        for (const Ride* rp : rides) {
            const Ride& r = *rp;
            const GeoPoint end = r.stops.empty() ? r.start_pos : r.stops.back().pos;
            std::string agent_list, stop_list;
            for (const Participation& p : r.riders) {
                if (!agent_list.empty()) agent_list += ';';
                agent_list += std::to_string(p.agent_id);
            }
            for (const RideStop& st : r.stops) {
                if (!stop_list.empty()) stop_list += ';';
                stop_list += std::string(st.kind == StopKind::pickup ? "pickup" : "dropoff") + ":" +
                             std::to_string(st.agent_id) + ":" + fmt(st.pos.lat, 7) + ":" +
                             fmt(st.pos.lon, 7) + ":" + std::to_string(st.arrival_s);
            }
            out << r.id << "," << summary.mode << "," << to_string(r.direction) << ","
                << to_string(r.kind) << ","
                << (r.vehicle.kind == VehicleKind::private_car ? "private" : "shuttle") << ","
                << (r.driver ? std::to_string(*r.driver) : std::string()) << ","
                << (r.shuttle_id ? std::to_string(*r.shuttle_id) : std::string()) << ","
                << r.start_s << "," << r.end_s() << "," << fmt(r.start_pos.lat, 7) << ","
                << fmt(r.start_pos.lon, 7) << "," << fmt(end.lat, 7) << "," << fmt(end.lon, 7)
                << "," << fmt(r.distance_m(), 1) << "," << r.duration_s() << ","
                << fmt_grams(ride_co2_g(r.distance_m(), r.vehicle)) << ","
                << fmt(ride_fuel_cost_eur(r.distance_m(), r.vehicle), 2) << "," << r.riders.size()
                << "," << r.max_onboard() << "," << agent_list << "," << stop_list << "\n";
        }
    }

    {
        std::ofstream out;
        open_out(out, out_dir / "agentResults.csv");
        out << "# config_digest," << summary.config_digest << "\n";
        out << "# seed," << summary.seed << "\n";
        out << "agent_id,rides,distance_m,in_vehicle_s,walk_m,walk_s,co2_g,fuel_cost_eur,lost,"
               "drove_self\n";
        auto aggregates = aggregate_agents(output.rides);
        for (const Agent& a : agents) {
            const AgentAggregate agg = aggregates.count(a.id) ? aggregates.at(a.id) : AgentAggregate{};
            AgentExtra extra;
            auto it = output.agent_extras.find(a.id);
            if (it != output.agent_extras.end()) extra = it->second;
            out << a.id << "," << agg.rides << "," << fmt(agg.distance_m, 1) << ","
                << agg.in_vehicle_s << "," << fmt(extra.walk_m, 1) << "," << fmt(extra.walk_s, 1)
                << "," << fmt_grams(agg.co2_g) << "," << fmt(agg.fuel_eur, 2) << ","
                << (extra.lost ? 1 : 0) << "," << (extra.drove_self ? 1 : 0) << "\n";
        }
    }

    {
        std::ofstream out;
        open_out(out, out_dir / "summarizedResults.csv");
        out << "# config_digest," << summary.config_digest << "\n";
        out << "# seed," << summary.seed << "\n";
        out << "# walking_model,beeline_times_factor\n";
        out << summary_header() << "\n";
        out << summary_row(summary) << "\n";
    }
}

void write_combined_summary(const std::vector<DaySummary>& summaries,
                            const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::ofstream out;
    open_out(out, out_dir / "summarizedResults.csv");
    if (!summaries.empty()) {
        out << "# config_digest," << summaries.front().config_digest << "\n";
        out << "# seed," << summaries.front().seed << "\n";
    }
    out << "# walking_model,beeline_times_factor\n";
    out << summary_header() << "\n";
    for (const DaySummary& s : summaries) out << summary_row(s) << "\n";
}

}  // namespace commutesim
