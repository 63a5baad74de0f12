#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "commutesim/rng.hpp"
#include "commutesim/routing.hpp"
#include "oracles.hpp"

using namespace commutesim;

namespace {

const GeoPoint kCenter{49.7880, 9.9360};

// 4-node square grid, ~1 km sides, bidirectional edges.
std::string square_grid() {
    return "# test grid\n"
           "N 1 49.7880 9.9360\n"
           "N 2 49.7970 9.9360\n"
           "N 3 49.7970 9.9500\n"
           "N 4 49.7880 9.9500\n"
           "E 1 2 1000 50\nE 2 1 1000 50\n"
           "E 2 3 1000 50\nE 3 2 1000 50\n"
           "E 3 4 1000 50\nE 4 3 1000 50\n"
           "E 4 1 1000 50\nE 1 4 1000 50\n";
}

}  // namespace

TEST_CASE("graph load: identity and validation") {
    RoadGraph g = RoadGraph::parse(square_grid(), "grid");
    CHECK(g.node_count() == 4);
    CHECK(g.edge_count() == 8);
    CHECK(g.rejected_nodes().empty());

    CHECK_THROWS_WITH_AS(RoadGraph::parse("N 1 49.0 9.0\nE 1 7 100 50\n", "bad"),
                         doctest::Contains("missing node"), std::runtime_error);
    CHECK_THROWS_WITH_AS(RoadGraph::parse("# nothing here\n", "empty"),
                         doctest::Contains("empty graph"), std::runtime_error);
    CHECK_THROWS_AS(RoadGraph::parse("N 1 49.0 9.0\nE 1 1 -5 50\n", "neg"), std::runtime_error);
}

TEST_CASE("graph load: nodes outside the largest SCC are rejected") {
    std::string txt = square_grid();
    txt += "N 9 49.9000 9.9000\n";          // island node, no edges
    txt += "N 10 49.9100 9.9100\n";
    txt += "E 9 10 500 50\n";               // one-way pair, not strongly connected
    RoadGraph g = RoadGraph::parse(txt, "partial");
    CHECK(g.node_count() == 4);
    CHECK(g.rejected_nodes().size() == 2);
}

TEST_CASE("beeline routing") {
    BeelineRouter router(50.0 / 3.6, 1.3);  // 50 km/h, detour 1.3

    SUBCASE("identity") {
        Route r = router.route(kCenter, kCenter);
        CHECK(r.distance_m == 0.0);
        CHECK(r.duration_s == 0);
    }

    SUBCASE("10 km great-circle, detour 1.3, 50 km/h") {
        GeoPoint p = destination_point(kCenter, 70.0, 10000.0);
        Route r = router.route(kCenter, p);
        CHECK(r.distance_m == doctest::Approx(13000.0).epsilon(1e-9));
        // 13000 m / 13.888.. m/s = 936.0 s
        CHECK(r.duration_s == 936);
    }

    SUBCASE("symmetry is exact") {
        Rng rng(3);
        for (int i = 0; i < 100; ++i) {
            GeoPoint a = destination_point(kCenter, rng.uniform() * 360.0, rng.uniform() * 25000.0);
            GeoPoint b = destination_point(kCenter, rng.uniform() * 360.0, rng.uniform() * 25000.0);
            CHECK(router.route(a, b).distance_m == router.route(b, a).distance_m);
        }
    }

    SUBCASE("triangle sanity with 1 s rounding slack") {
        Rng rng(5);
        for (int i = 0; i < 200; ++i) {
            GeoPoint a = destination_point(kCenter, rng.uniform() * 360.0, rng.uniform() * 25000.0);
            GeoPoint b = destination_point(kCenter, rng.uniform() * 360.0, rng.uniform() * 25000.0);
            GeoPoint c = destination_point(kCenter, rng.uniform() * 360.0, rng.uniform() * 25000.0);
            CHECK(router.route(a, c).duration_s <=
                  router.route(a, b).duration_s + router.route(b, c).duration_s + 1);
        }
    }

    SUBCASE("distance dominates great-circle for detour >= 1") {
        Rng rng(9);
        for (int i = 0; i < 100; ++i) {
            GeoPoint a = destination_point(kCenter, rng.uniform() * 360.0, rng.uniform() * 25000.0);
            GeoPoint b = destination_point(kCenter, rng.uniform() * 360.0, rng.uniform() * 25000.0);
            CHECK(router.route(a, b).distance_m >= haversine_m(a, b) - 1e-9);
        }
    }
}

TEST_CASE("graph routing avoids slow edges (verified by path enumeration)") {
    // same square, but the direct 1->2 edge crawls at 5 km/h
    std::string txt =
        "N 1 49.7880 9.9360\nN 2 49.7970 9.9360\nN 3 49.7970 9.9500\nN 4 49.7880 9.9500\n"
        "E 1 2 1000 5\nE 2 1 1000 5\n"
        "E 2 3 1000 50\nE 3 2 1000 50\n"
        "E 3 4 1000 50\nE 4 3 1000 50\n"
        "E 4 1 1000 50\nE 1 4 1000 50\n";
    RoadGraph g = RoadGraph::parse(txt, "slow");
    auto oracle = testoracle::enumerate_shortest_duration(g, 0, 1);
    REQUIRE(oracle.has_value());

    GraphRouter router(std::move(g));
    Route r = router.route({49.7880, 9.9360}, {49.7970, 9.9360});
    CHECK(r.duration_s == static_cast<int64_t>(std::llround(*oracle)));
    CHECK(r.distance_m == doctest::Approx(3000.0));  // went around: 1->4->3->2
}

TEST_CASE("graph routing equals exhaustive enumeration on random graphs") {
    Rng rng(123);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 5 + static_cast<int>(rng.uniform_int(0, 7));  // up to 12 nodes
        std::string txt;
        std::vector<GeoPoint> pts;
        for (int i = 0; i < n; ++i) {
            GeoPoint p = destination_point(kCenter, rng.uniform() * 360.0, 500.0 + rng.uniform() * 8000.0);
            pts.push_back(p);
            char buf[96];
            std::snprintf(buf, sizeof buf, "N %d %.7f %.7f\n", i + 1, p.lat, p.lon);
            txt += buf;
        }
        // random edges + a ring to guarantee one SCC
        for (int i = 0; i < n; ++i) {
            int j = (i + 1) % n;
            char buf[96];
            std::snprintf(buf, sizeof buf, "E %d %d %.1f %d\n", i + 1, j + 1,
                          std::max(50.0, haversine_m(pts[i], pts[j])), 30 + (int)rng.uniform_int(0, 40));
            txt += buf;
        }
        for (int k = 0; k < n; ++k) {
            int i = static_cast<int>(rng.uniform_int(0, n - 1));
            int j = static_cast<int>(rng.uniform_int(0, n - 1));
            if (i == j) continue;
            char buf[96];
            std::snprintf(buf, sizeof buf, "E %d %d %.1f %d\n", i + 1, j + 1,
                          std::max(50.0, haversine_m(pts[i], pts[j])), 20 + (int)rng.uniform_int(0, 60));
            txt += buf;
        }
        RoadGraph g = RoadGraph::parse(txt, "rand");
        REQUIRE(g.node_count() == static_cast<size_t>(n));
        const int from = static_cast<int>(rng.uniform_int(0, n - 1));
        const int to = static_cast<int>(rng.uniform_int(0, n - 1));
        if (from == to) continue;
        auto oracle = testoracle::enumerate_shortest_duration(g, from, to);
        REQUIRE(oracle.has_value());

        GeoPoint a = g.node_pos(from), b = g.node_pos(to);
        GraphRouter router(std::move(g));
        CHECK(router.route(a, b).duration_s == static_cast<int64_t>(std::llround(*oracle)));
    }
}

TEST_CASE("graph file loading from disk") {
    auto path = std::filesystem::temp_directory_path() / "commutesim_test_grid.txt";
    {
        std::ofstream out(path);
        out << square_grid();
    }
    RoadGraph g = RoadGraph::load(path);
    CHECK(g.node_count() == 4);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(RoadGraph::load("/nonexistent/graph.txt"), std::runtime_error);
}
