#include "doctest.h"

#include <cmath>

#include "commutesim/geo.hpp"
#include "commutesim/rng.hpp"

using namespace commutesim;

namespace {
const GeoPoint kWuerzburg{49.7880, 9.9360};
}

TEST_CASE("haversine basics") {
    CHECK(haversine_m(kWuerzburg, kWuerzburg) == 0.0);

    // 0.01 degrees of latitude = R * 0.01 * pi/180 on the sphere
    GeoPoint north{kWuerzburg.lat + 0.01, kWuerzburg.lon};
    CHECK(haversine_m(kWuerzburg, north) == doctest::Approx(1111.9493).epsilon(1e-6));

    // symmetric in its arguments, bit for bit
    GeoPoint other{50.1, 10.3};
    CHECK(haversine_m(kWuerzburg, other) == haversine_m(other, kWuerzburg));
}

TEST_CASE("destination_point round-trips distance") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const double bearing = rng.uniform() * 360.0;
        const double dist = 10.0 + rng.uniform() * 30000.0;
        GeoPoint p = destination_point(kWuerzburg, bearing, dist);
        CHECK(haversine_m(kWuerzburg, p) == doctest::Approx(dist).epsilon(1e-9));
        CHECK(initial_bearing_deg(kWuerzburg, p) == doctest::Approx(bearing).epsilon(1e-6));
    }
}

TEST_CASE("walking distance model") {
    CHECK(walking_distance_m(kWuerzburg, kWuerzburg) == 0.0);

    GeoPoint p = destination_point(kWuerzburg, 135.0, 1000.0);
    CHECK(walking_distance_m(kWuerzburg, p, 1.2) == doctest::Approx(1200.0).epsilon(1e-9));
    CHECK(walking_distance_m(kWuerzburg, p) == doctest::Approx(1000.0).epsilon(1e-9));
}

TEST_CASE("bearing segments: conventions") {
    GeoPoint north = destination_point(kWuerzburg, 0.0, 5000.0);
    GeoPoint east = destination_point(kWuerzburg, 90.0, 5000.0);
    GeoPoint almost_north = destination_point(kWuerzburg, 359.9, 5000.0);

    CHECK(bearing_segment(kWuerzburg, north, 18) == 0);
    CHECK(bearing_segment(kWuerzburg, east, 18) == 4);  // 90 deg / 20 deg per segment
    CHECK(bearing_segment(kWuerzburg, almost_north, 18) == 17);
    CHECK(bearing_segment(kWuerzburg, kWuerzburg, 18) == 0);  // documented convention
    CHECK(bearing_segment(kWuerzburg, east, 1) == 0);
    CHECK_THROWS_AS(bearing_segment(kWuerzburg, east, 0), std::invalid_argument);
}

TEST_CASE("bearing segments: partition properties") {
    Rng rng(11);
    const int n = 18;
    const double step = 360.0 / n;
    for (int i = 0; i < 300; ++i) {
        const double bearing = rng.uniform() * 360.0;
        const double dist = 100.0 + rng.uniform() * 20000.0;
        GeoPoint p = destination_point(kWuerzburg, bearing, dist);
        const int idx = bearing_segment(kWuerzburg, p, n);
        CHECK(idx >= 0);
        CHECK(idx < n);

        // rotating by one segment width moves the index by exactly 1 mod n
        GeoPoint q = destination_point(kWuerzburg, std::fmod(bearing + step, 360.0), dist);
        const int idx_q = bearing_segment(kWuerzburg, q, n);
        CHECK(idx_q == (idx + 1) % n);
    }
}

TEST_CASE("point validation") {
    CHECK_THROWS_AS(validate_point({91.0, 0.0}, "test"), std::invalid_argument);
    CHECK_THROWS_AS(validate_point({0.0, 181.0}, "test"), std::invalid_argument);
    CHECK_NOTHROW(validate_point({-90.0, 180.0}, "test"));
}
