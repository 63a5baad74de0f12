#include "commutesim/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace commutesim {

double accepted_ride_time_s(const RideTimeBudget& budget) {
    if (budget.log_base <= 1.0) throw std::invalid_argument("ride-time budget log base must be > 1");
    const double x_min = static_cast<double>(budget.direct_time_s) / 60.0;
    double out_min = x_min;
    if (x_min > 1.0) out_min += std::log(x_min) / std::log(budget.log_base);
    return out_min * 60.0;
}

std::string to_string(InfeasibleReason r) {
    switch (r) {
        case InfeasibleReason::window: return "window";
        case InfeasibleReason::no_wait: return "no-wait";
        case InfeasibleReason::budget: return "budget";
        case InfeasibleReason::precedence: return "precedence";
        case InfeasibleReason::diary: return "diary";
    }
    return "?";
}

namespace {

constexpr int64_t kHuge = std::numeric_limits<int64_t>::max() / 4;
constexpr double kBudgetEps = 1e-9;

struct Matrix {
    int n = 0;  // stops + 1; index 0 is the start position
    std::array<std::array<int64_t, kMaxSolverStops + 1>, kMaxSolverStops + 1> dur{};
    std::array<std::array<double, kMaxSolverStops + 1>, kMaxSolverStops + 1> dist{};
};

Matrix build_matrix(const GeoPoint& start, const std::vector<Stop>& stops, const Router& router) {
    Matrix m;
    m.n = static_cast<int>(stops.size()) + 1;
    std::vector<GeoPoint> pts;
    pts.push_back(start);
    for (const Stop& s : stops) pts.push_back(s.location);
    for (int i = 0; i < m.n; ++i) {
        for (int j = 0; j < m.n; ++j) {
            if (i == j) {
                m.dur[i][j] = 0;
                m.dist[i][j] = 0.0;
            } else {
                Route r = router.route(pts[i], pts[j]);
                m.dur[i][j] = r.duration_s;
                m.dist[i][j] = r.distance_m;
            }
        }
    }
    return m;
}

struct StopMeta {
    int pickup_of = -1;   // slot of the budgeted agent this stop picks up
    int dropoff_of = -1;  // slot of the budgeted agent this stop drops off
    int precedes = -1;    // stop index of the pickup that must precede this dropoff
};

struct Problem {
    const std::vector<Stop>* stops;
    Matrix matrix;
    int n = 0;
    int full_mask = 0;
    int must_last = -1;  // stop index flagged must_be_last, or -1
    std::vector<StopMeta> meta;
    std::vector<double> budget_limit_s;     // per agent slot
    std::vector<int64_t> initial_board;     // slots aboard at ride start (board offset 0)
    int64_t base_lo = 0;
    int64_t base_hi = kHuge;
};

struct Label {
    int64_t tau = 0;  // travel time so far
    int64_t c = 0;    // arrival offset at current stop, relative to ride start
    int64_t lo = 0;
    int64_t hi = 0;
    uint64_t path = 0;  // nibble-packed stop sequence (stop index + 1)
    std::array<int32_t, kMaxSolverStops> board_off{};  // per agent slot; -1 = not aboard
};

// l1 dominates l2 when every completion of l2 can be mirrored from l1 with a
// start shifted by delta = tau2 - tau1 at no extra travel cost.
bool dominates(const Label& a, const Label& b, const std::vector<int>& aboard_slots) {
    if (a.tau > b.tau) return false;
    const int64_t delta = b.tau - a.tau;
    if (a.lo > b.lo + delta) return false;
    if (a.hi < b.hi + delta) return false;
    for (int slot : aboard_slots) {
        // elapsed-aboard comparison: (c - board_off) must not be larger in a
        if (a.c - a.board_off[slot] > b.c - b.board_off[slot]) return false;
    }
    if (a.tau == b.tau && a.lo == b.lo && a.hi == b.hi) {
        bool all_eq = true;
        for (int slot : aboard_slots) {
            if (a.c - a.board_off[slot] != b.c - b.board_off[slot]) {
                all_eq = false;
                break;
            }
        }
        if (all_eq) return a.path <= b.path;  // keep the lexicographically smaller order
    }
    return true;
}

Problem build_problem(const GeoPoint& start, const std::vector<Stop>& stops,
                      const std::map<int64_t, RideTimeBudget>& budgets, const Router& router,
                      const SolveOptions& opts) {
    if (stops.size() > kMaxSolverStops) {
        throw std::invalid_argument("solve_schedule: stop count " + std::to_string(stops.size()) +
                                    " exceeds the bound of " + std::to_string(kMaxSolverStops));
    }
    Problem p;
    p.stops = &stops;
    p.n = static_cast<int>(stops.size());
    p.full_mask = (1 << p.n) - 1;
    p.matrix = build_matrix(start, stops, router);
    p.meta.resize(p.n);

    // Agent slots are allocated only for budgeted agents; others are
    // unconstrained and need no tracking.
    std::map<int64_t, int> slot_of;
    std::map<int64_t, int> pickup_stop, dropoff_stop;
    for (int i = 0; i < p.n; ++i) {
        const Stop& s = stops[i];
        if (s.must_be_last) {
            if (p.must_last != -1) throw std::invalid_argument("solve_schedule: multiple must_be_last stops");
            p.must_last = i;
        }
        auto& table = (s.kind == StopKind::pickup) ? pickup_stop : dropoff_stop;
        if (table.count(s.agent_id)) {
            throw std::invalid_argument("solve_schedule: duplicate stop kind for agent " +
                                        std::to_string(s.agent_id));
        }
        table[s.agent_id] = i;
    }
    for (int i = 0; i < p.n; ++i) {
        const Stop& s = stops[i];
        if (s.kind == StopKind::dropoff) {
            auto it = pickup_stop.find(s.agent_id);
            if (it != pickup_stop.end()) p.meta[i].precedes = it->second;
        }
        auto bit = budgets.find(s.agent_id);
        if (bit == budgets.end()) continue;
        if (!slot_of.count(s.agent_id)) {
            slot_of[s.agent_id] = static_cast<int>(p.budget_limit_s.size());
            p.budget_limit_s.push_back(accepted_ride_time_s(bit->second));
        }
        const int slot = slot_of[s.agent_id];
        if (s.kind == StopKind::pickup) {
            p.meta[i].pickup_of = slot;
        } else {
            p.meta[i].dropoff_of = slot;
            if (!pickup_stop.count(s.agent_id)) {
                p.initial_board.push_back(slot);  // boards at the ride start
            }
        }
    }

    p.base_lo = opts.min_start_s;
    p.base_hi = kHuge;
    if (opts.start_window) {
        p.base_lo = std::max(p.base_lo, opts.start_window->earliest);
        p.base_hi = std::min(p.base_hi, opts.start_window->latest);
    }
    if (opts.fixed_start_s) {
        p.base_lo = std::max(p.base_lo, *opts.fixed_start_s);
        p.base_hi = std::min(p.base_hi, *opts.fixed_start_s);
    }
    return p;
}

// Agents (slots) aboard once `mask` has been visited.
std::vector<int> aboard_after(const Problem& p, int mask) {
    std::vector<bool> aboard(p.budget_limit_s.size(), false);
    for (int slot : p.initial_board) aboard[slot] = true;
    for (int i = 0; i < p.n; ++i) {
        if (!(mask & (1 << i))) continue;
        if (p.meta[i].pickup_of >= 0) aboard[p.meta[i].pickup_of] = true;
        if (p.meta[i].dropoff_of >= 0) aboard[p.meta[i].dropoff_of] = false;
    }
    std::vector<int> out;
    for (size_t s = 0; s < aboard.size(); ++s) {
        if (aboard[s]) out.push_back(static_cast<int>(s));
    }
    return out;
}

// Core labeling search. Returns the best complete label, if any.
std::optional<Label> search(const Problem& p, bool use_budgets) {
    const int n = p.n;
    if (p.base_lo > p.base_hi) return std::nullopt;

    std::vector<std::vector<Label>> buckets(static_cast<size_t>(p.full_mask + 1) * n);
    auto bucket = [&](int mask, int last) -> std::vector<Label>& {
        return buckets[static_cast<size_t>(mask) * n + last];
    };
    std::vector<std::vector<int>> aboard_cache(p.full_mask + 1);
    std::vector<bool> aboard_cached(p.full_mask + 1, false);
    auto aboard_of = [&](int mask) -> const std::vector<int>& {
        if (!aboard_cached[mask]) {
            aboard_cache[mask] = aboard_after(p, mask);
            aboard_cached[mask] = true;
        }
        return aboard_cache[mask];
    };

    auto try_insert = [&](int mask, int last, Label&& lab) {
        auto& vec = bucket(mask, last);
        const auto& aboard = aboard_of(mask);
        for (const Label& ex : vec) {
            if (dominates(ex, lab, aboard)) return;
        }
        vec.erase(std::remove_if(vec.begin(), vec.end(),
                                 [&](const Label& ex) { return dominates(lab, ex, aboard); }),
                  vec.end());
        vec.push_back(std::move(lab));
    };

    auto arrive = [&](const Label& from, int from_stop, int k, int new_mask) -> std::optional<Label> {
        const Stop& stop = (*p.stops)[k];
        Label nl = from;
        const int64_t service = (from_stop < 0) ? 0 : (*p.stops)[from_stop].service_time_s;
        const int64_t travel = p.matrix.dur[from_stop + 1][k + 1];
        nl.tau += travel;
        nl.c += service + travel;
        nl.lo = std::max(nl.lo, stop.window.earliest - nl.c);
        nl.hi = std::min(nl.hi, stop.window.latest - nl.c);
        if (nl.lo > nl.hi) return std::nullopt;
        if (use_budgets) {
            for (int slot : aboard_of(new_mask & ~(1 << k))) {
                // everyone aboard before reaching k, including whoever k drops off
                if (static_cast<double>(nl.c - nl.board_off[slot]) >
                    p.budget_limit_s[slot] + kBudgetEps) {
                    return std::nullopt;
                }
            }
        }
        if (p.meta[k].pickup_of >= 0) {
            nl.board_off[p.meta[k].pickup_of] = static_cast<int32_t>(nl.c + stop.service_time_s);
        }
        nl.path = (nl.path << 4) | static_cast<uint64_t>(k + 1);
        return nl;
    };

    // seed labels
    for (int f = 0; f < n; ++f) {
        if (p.meta[f].precedes >= 0) continue;             // dropoff before its pickup
        if (p.must_last == f && n > 1) continue;           // terminal stop cannot lead
        Label seed;
        seed.tau = 0;
        seed.c = 0;
        seed.lo = p.base_lo;
        seed.hi = p.base_hi;
        seed.board_off.fill(0);
        auto lab = arrive(seed, -1, f, 1 << f);
        if (lab) try_insert(1 << f, f, std::move(*lab));
    }

    for (int mask = 1; mask < p.full_mask; ++mask) {
        for (int last = 0; last < n; ++last) {
            if (!(mask & (1 << last))) continue;
            auto& vec = bucket(mask, last);
            if (vec.empty()) continue;
            for (int k = 0; k < n; ++k) {
                if (mask & (1 << k)) continue;
                const int new_mask = mask | (1 << k);
                if (p.meta[k].precedes >= 0 && !(mask & (1 << p.meta[k].precedes))) continue;
                if (p.must_last >= 0 && k != p.must_last && new_mask == p.full_mask) continue;
                if (p.must_last == k && new_mask != p.full_mask) continue;
                for (const Label& lab : vec) {
                    auto nl = arrive(lab, last, k, new_mask);
                    if (nl) try_insert(new_mask, k, std::move(*nl));
                }
            }
        }
    }

    const Label* best = nullptr;
    for (int last = 0; last < n; ++last) {
        for (const Label& lab : bucket(p.full_mask, last)) {
            if (!best || lab.tau < best->tau || (lab.tau == best->tau && lab.path < best->path)) {
                best = &lab;
            }
        }
    }
    if (!best) return std::nullopt;
    return *best;
}

// Relaxed feasibility probe: the vehicle may idle before a window opens.
// Used only to classify why the strict search failed.
bool waiting_feasible(const Problem& p, bool relax_precedence) {
    if (p.base_lo > p.base_hi) return false;
    const int n = p.n;
    constexpr int64_t kUnset = std::numeric_limits<int64_t>::max();
    std::vector<int64_t> best(static_cast<size_t>(p.full_mask + 1) * n, kUnset);
    auto cell = [&](int mask, int last) -> int64_t& {
        return best[static_cast<size_t>(mask) * n + last];
    };
    for (int f = 0; f < n; ++f) {
        if (!relax_precedence && p.meta[f].precedes >= 0) continue;
        if (!relax_precedence && p.must_last == f && n > 1) continue;
        const Stop& s = (*p.stops)[f];
        int64_t arr = std::max(p.base_lo + p.matrix.dur[0][f + 1], s.window.earliest);
        if (arr > s.window.latest) continue;
        cell(1 << f, f) = std::min(cell(1 << f, f), arr);
    }
    for (int mask = 1; mask <= p.full_mask; ++mask) {
        for (int last = 0; last < n; ++last) {
            if (!(mask & (1 << last))) continue;
            const int64_t arr = cell(mask, last);
            if (arr == kUnset) continue;
            if (mask == p.full_mask) return true;
            for (int k = 0; k < n; ++k) {
                if (mask & (1 << k)) continue;
                if (!relax_precedence) {
                    if (p.meta[k].precedes >= 0 && !(mask & (1 << p.meta[k].precedes))) continue;
                    const int new_mask = mask | (1 << k);
                    if (p.must_last >= 0 && k != p.must_last && new_mask == p.full_mask) continue;
                    if (p.must_last == k && new_mask != p.full_mask) continue;
                }
                const Stop& s = (*p.stops)[k];
                int64_t dep = arr + (*p.stops)[last].service_time_s;
                int64_t nxt = std::max(dep + p.matrix.dur[last + 1][k + 1], s.window.earliest);
                if (nxt > s.window.latest) continue;
                int64_t& slot = cell(mask | (1 << k), k);
                slot = std::min(slot, nxt);
            }
        }
    }
    return false;
}

Schedule materialize(const Problem& p, const GeoPoint& start, const Label& label) {
    Schedule sched;
    sched.start_location = start;
    sched.start_time_s = label.hi;  // latest feasible start
    const int n = p.n;
    std::vector<int> order(n);
    uint64_t path = label.path;
    for (int i = n - 1; i >= 0; --i) {
        order[i] = static_cast<int>(path & 0xF) - 1;
        path >>= 4;
    }
    int64_t c = 0;
    int prev = -1;
    for (int idx : order) {
        const int64_t service = (prev < 0) ? 0 : (*p.stops)[prev].service_time_s;
        c += service + p.matrix.dur[prev + 1][idx + 1];
        sched.total_distance_m += p.matrix.dist[prev + 1][idx + 1];
        sched.stops.push_back((*p.stops)[idx]);
        sched.arrival_s.push_back(sched.start_time_s + c);
        prev = idx;
    }
    sched.total_travel_s = label.tau;
    return sched;
}

}  // namespace

SolveResult solve_schedule(const GeoPoint& start, const std::vector<Stop>& stops,
                           const std::map<int64_t, RideTimeBudget>& budgets, const Router& router,
                           const SolveOptions& opts) {
    SolveResult result;
    if (stops.empty()) {
        Schedule sched;
        sched.start_location = start;
        sched.start_time_s = opts.fixed_start_s ? *opts.fixed_start_s : opts.min_start_s;
        if (opts.start_window) {
            sched.start_time_s = std::max(sched.start_time_s, opts.start_window->earliest);
        }
        result.schedule = sched;
        return result;
    }

    Problem p = build_problem(start, stops, budgets, router, opts);
    auto best = search(p, /*use_budgets=*/true);
    if (best) {
        result.schedule = materialize(p, start, *best);
        return result;
    }

    // Classification ladder: relax one rule at a time and report the first
    // relaxation that makes the instance feasible.
    if (search(p, /*use_budgets=*/false)) {
        result.reason = InfeasibleReason::budget;
    } else if (waiting_feasible(p, /*relax_precedence=*/false)) {
        result.reason = InfeasibleReason::no_wait;
    } else if (waiting_feasible(p, /*relax_precedence=*/true)) {
        result.reason = InfeasibleReason::precedence;
    } else {
        result.reason = InfeasibleReason::window;
    }
    return result;
}

BudgetCheck check_budgets(const Schedule& schedule, const std::map<int64_t, RideTimeBudget>& budgets) {
    BudgetCheck out;
    for (const auto& [agent, budget] : budgets) {
        int pickup = -1, dropoff = -1;
        for (size_t i = 0; i < schedule.stops.size(); ++i) {
            if (schedule.stops[i].agent_id != agent) continue;
            if (schedule.stops[i].kind == StopKind::pickup) pickup = static_cast<int>(i);
            if (schedule.stops[i].kind == StopKind::dropoff) dropoff = static_cast<int>(i);
        }
        if (pickup < 0 && dropoff < 0) {
            out.inconsistent.push_back(agent);
            continue;
        }
        const int64_t board = (pickup >= 0)
                                  ? schedule.arrival_s[pickup] + schedule.stops[pickup].service_time_s
                                  : schedule.start_time_s;
        const int64_t exit =
            (dropoff >= 0) ? schedule.arrival_s[dropoff] : schedule.arrival_s.back();
        const double in_vehicle = static_cast<double>(exit - board);
        if (in_vehicle > accepted_ride_time_s(budget) + 1e-9) out.violators.push_back(agent);
    }
    return out;
}

}  // namespace commutesim
