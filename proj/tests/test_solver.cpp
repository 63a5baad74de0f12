#include "doctest.h"

#include <cmath>

#include "commutesim/rng.hpp"
#include "commutesim/solver.hpp"
#include "oracles.hpp"

using namespace commutesim;

namespace {

const GeoPoint kStart{49.7880, 9.9360};
const double kSpeed = 50.0 / 3.6;

BeelineRouter make_router() { return BeelineRouter(kSpeed, 1.0); }

// point whose beeline travel time from kStart is `seconds`
GeoPoint point_at_seconds(double seconds, double bearing = 90.0) {
    return destination_point(kStart, bearing, seconds * kSpeed);
}

Stop dropoff(GeoPoint loc, TimeWindow w, int64_t agent, int64_t service = 60) {
    Stop s;
    s.location = loc;
    s.window = w;
    s.kind = StopKind::dropoff;
    s.agent_id = agent;
    s.service_time_s = service;
    return s;
}

Stop pickup(GeoPoint loc, TimeWindow w, int64_t agent, int64_t service = 60) {
    Stop s = dropoff(loc, w, agent, service);
    s.kind = StopKind::pickup;
    return s;
}

}  // namespace

TEST_CASE("accepted ride time") {
    // 30 min direct, base 1.4 -> 30 + ln(30)/ln(1.4) = 40.1086 min
    CHECK(accepted_ride_time_s({30 * 60, 1.4}) / 60.0 == doctest::Approx(40.1086).epsilon(1e-4));
    // base 1.2 -> 30 + ln(30)/ln(1.2) = 48.6547 min
    CHECK(accepted_ride_time_s({30 * 60, 1.2}) / 60.0 == doctest::Approx(48.6547).epsilon(1e-4));
    // log(1) = 0
    CHECK(accepted_ride_time_s({60, 1.4}) == doctest::Approx(60.0));
    // below one minute the log term clamps to zero
    CHECK(accepted_ride_time_s({30, 1.4}) == doctest::Approx(30.0));
    CHECK_THROWS_AS(accepted_ride_time_s({600, 1.0}), std::invalid_argument);
}

TEST_CASE("accepted ride time is monotone") {
    double prev = accepted_ride_time_s({61, 1.4});
    for (int64_t x = 120; x <= 7200; x += 60) {
        const double cur = accepted_ride_time_s({x, 1.4});
        CHECK(cur > prev);
        prev = cur;
    }
    // decreasing in the log base
    CHECK(accepted_ride_time_s({1800, 1.2}) > accepted_ride_time_s({1800, 1.4}));
}

TEST_CASE("solve: single reachable stop") {
    auto router = make_router();
    GeoPoint loc = point_at_seconds(600);
    std::vector<Stop> stops{dropoff(loc, {29000, 30000}, 1)};
    auto res = solve_schedule(kStart, stops, {}, router);
    REQUIRE(res.feasible());
    CHECK(res.schedule->stops.size() == 1);
    // latest feasible start: arrive exactly at the window close
    CHECK(res.schedule->arrival_s[0] == 30000);
    CHECK(res.schedule->start_time_s == 30000 - 600);
    CHECK(res.schedule->total_travel_s == 600);
}

TEST_CASE("solve: empty stop set") {
    auto router = make_router();
    auto res = solve_schedule(kStart, {}, {}, router);
    REQUIRE(res.feasible());
    CHECK(res.schedule->stops.empty());
    CHECK(res.schedule->end_time_s() == res.schedule->start_time_s);
}

TEST_CASE("solve: two stops where only one visiting order works") {
    auto router = make_router();
    GeoPoint a = point_at_seconds(300, 90.0);
    GeoPoint b = point_at_seconds(600, 90.0);  // further out on the same bearing
    // windows force visiting a first, then b
    std::vector<Stop> stops{dropoff(a, {28800, 28900}, 1), dropoff(b, {29100, 29400}, 2)};

    auto brute = testoracle::brute_force_schedule(kStart, stops, {}, router);
    REQUIRE(brute.feasible);
    CHECK(brute.best_order == std::vector<int>{0, 1});

    auto res = solve_schedule(kStart, stops, {}, router);
    REQUIRE(res.feasible());
    CHECK(res.schedule->stops[0].agent_id == 1);
    CHECK(res.schedule->stops[1].agent_id == 2);
    CHECK(res.schedule->total_travel_s == brute.best_travel_s);
    CHECK(res.schedule->start_time_s == brute.best_start_s);
}

TEST_CASE("solve: window closing before minimum travel time") {
    auto router = make_router();
    GeoPoint loc = point_at_seconds(600);
    std::vector<Stop> stops{dropoff(loc, {0, 300}, 1)};
    SolveOptions opts;
    opts.min_start_s = 0;
    auto res = solve_schedule(kStart, stops, {}, router, opts);
    REQUIRE(!res.feasible());
    CHECK(res.reason == InfeasibleReason::window);
}

TEST_CASE("solve: infeasibility classified as budget") {
    auto router = make_router();
    // agent boards at the start and rides 41 minutes against a 40.1 minute budget
    GeoPoint loc = point_at_seconds(41 * 60);
    std::vector<Stop> stops{dropoff(loc, {}, 7)};
    std::map<int64_t, RideTimeBudget> budgets{{7, RideTimeBudget{30 * 60, 1.4}}};
    auto res = solve_schedule(kStart, stops, budgets, router);
    REQUIRE(!res.feasible());
    CHECK(res.reason == InfeasibleReason::budget);
}

TEST_CASE("solve: infeasibility classified as no-wait") {
    auto router = make_router();
    GeoPoint a = point_at_seconds(100);
    GeoPoint b = point_at_seconds(300);
    // rigid point windows that would require idling in between
    std::vector<Stop> stops{dropoff(a, {1000, 1000}, 1), dropoff(b, {3000, 3000}, 2)};
    auto res = solve_schedule(kStart, stops, {}, router);
    REQUIRE(!res.feasible());
    CHECK(res.reason == InfeasibleReason::no_wait);
}

TEST_CASE("solve: infeasibility classified as precedence") {
    auto router = make_router();
    GeoPoint loc = point_at_seconds(100);
    std::vector<Stop> stops{pickup(loc, {2000, 2000}, 1), dropoff(loc, {1000, 1000}, 1)};
    auto res = solve_schedule(kStart, stops, {}, router);
    REQUIRE(!res.feasible());
    CHECK(res.reason == InfeasibleReason::precedence);
}

TEST_CASE("solve: no-waiting invariant and window containment") {
    auto router = make_router();
    Rng rng(21);
    int feasible_count = 0;
    for (int trial = 0; trial < 60; ++trial) {
        auto inst = testoracle::make_random_instance(rng, 6);
        auto res = solve_schedule(inst.start, inst.stops, inst.budgets, router, inst.opts);
        if (!res.feasible()) continue;
        ++feasible_count;
        const Schedule& s = *res.schedule;
        int64_t t = s.start_time_s;
        GeoPoint prev = s.start_location;
        for (size_t i = 0; i < s.stops.size(); ++i) {
            const int64_t leg = router.route(prev, s.stops[i].location).duration_s;
            t += leg;
            CHECK(s.arrival_s[i] == t);  // exact chain, no idle gaps
            CHECK(s.stops[i].window.contains(s.arrival_s[i]));
            t += s.stops[i].service_time_s;
            prev = s.stops[i].location;
        }
        CHECK(check_budgets(s, inst.budgets).violators.empty());
    }
    CHECK(feasible_count > 5);
}

TEST_CASE("solve: equals brute-force enumeration on random instances") {
    auto router = make_router();
    Rng rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        auto inst = testoracle::make_random_instance(rng, 7);
        auto brute = testoracle::brute_force_schedule(inst.start, inst.stops, inst.budgets, router,
                                                      inst.opts);
        auto res = solve_schedule(inst.start, inst.stops, inst.budgets, router, inst.opts);
        REQUIRE(res.feasible() == brute.feasible);
        if (brute.feasible) {
            CHECK(res.schedule->total_travel_s == brute.best_travel_s);
            CHECK(res.schedule->start_time_s == brute.best_start_s);
        }
    }
}

TEST_CASE("solve: deterministic tie-break by stop index order") {
    auto router = make_router();
    GeoPoint loc = point_at_seconds(300);
    std::vector<Stop> stops{dropoff(loc, {28000, 30000}, 5), dropoff(loc, {28000, 30000}, 3)};
    auto res = solve_schedule(kStart, stops, {}, router);
    REQUIRE(res.feasible());
    // identical location and window: input order wins, not agent id
    CHECK(res.schedule->stops[0].agent_id == 5);
    CHECK(res.schedule->stops[1].agent_id == 3);

    auto res2 = solve_schedule(kStart, stops, {}, router);
    CHECK(res2.schedule->start_time_s == res.schedule->start_time_s);
    CHECK(res2.schedule->arrival_s == res.schedule->arrival_s);
}

TEST_CASE("solve: stop count bound") {
    auto router = make_router();
    std::vector<Stop> stops;
    for (int i = 0; i < kMaxSolverStops + 1; ++i) {
        stops.push_back(dropoff(point_at_seconds(100 + i), {}, 1000 + i));
    }
    CHECK_THROWS_AS(solve_schedule(kStart, stops, {}, router), std::invalid_argument);
}

TEST_CASE("solve: fixed start time") {
    auto router = make_router();
    GeoPoint loc = point_at_seconds(600);
    std::vector<Stop> stops{dropoff(loc, {29000, 30000}, 1)};
    SolveOptions opts;
    opts.fixed_start_s = 28800;
    auto res = solve_schedule(kStart, stops, {}, router, opts);
    REQUIRE(res.feasible());
    CHECK(res.schedule->start_time_s == 28800);
    CHECK(res.schedule->arrival_s[0] == 29400);

    opts.fixed_start_s = 20000;  // window cannot be met from this start
    auto res2 = solve_schedule(kStart, stops, {}, router, opts);
    CHECK(!res2.feasible());
}

TEST_CASE("check_budgets") {
    Schedule s;
    s.start_location = kStart;
    s.start_time_s = 1000;
    s.stops.push_back(dropoff(point_at_seconds(1800), {}, 1, 0));
    s.arrival_s.push_back(1000 + 1800);  // 30 min aboard

    SUBCASE("solo direct ride passes") {
        std::map<int64_t, RideTimeBudget> budgets{{1, {1800, 1.4}}};
        auto check = check_budgets(s, budgets);
        CHECK(check.all_pass());
    }
    SUBCASE("41 min aboard against a 40.1 min budget fails") {
        s.arrival_s[0] = 1000 + 41 * 60;
        std::map<int64_t, RideTimeBudget> budgets{{1, {1800, 1.4}}};
        auto check = check_budgets(s, budgets);
        REQUIRE(check.violators.size() == 1);
        CHECK(check.violators[0] == 1);
    }
    SUBCASE("empty schedule, empty budgets") {
        Schedule empty;
        CHECK(check_budgets(empty, {}).all_pass());
    }
    SUBCASE("budget for an agent missing from the schedule is inconsistent") {
        std::map<int64_t, RideTimeBudget> budgets{{1, {1800, 1.4}}, {99, {600, 1.4}}};
        auto check = check_budgets(s, budgets);
        REQUIRE(check.inconsistent.size() == 1);
        CHECK(check.inconsistent[0] == 99);
    }
}
