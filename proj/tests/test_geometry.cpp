#include <cmath>

#include "doctest.h"

#include "beamgraph/errors.hpp"
#include "beamgraph/geometry.hpp"
#include "beamgraph/rng.hpp"

using namespace beamgraph;

TEST_CASE("circular_distance") {
    CHECK(circular_distance(10, 350) == 20);
    CHECK(circular_distance(90, 90) == 0);
    CHECK(circular_distance(0, 180) == 180);
    CHECK(circular_distance(-10, 10) == 20);
    CHECK(circular_distance(720, 1) == 1);
}

TEST_CASE("circular_distance is a metric on the circle") {
    Rng rng(42);
    for (int i = 0; i < 2000; ++i) {
        const double a = rng.uniform(-720, 720);
        const double b = rng.uniform(-720, 720);
        const double c = rng.uniform(-720, 720);
        const double ab = circular_distance(a, b);
        CHECK(ab >= 0.0);
        CHECK(ab <= 180.0);
        CHECK(ab == doctest::Approx(circular_distance(b, a)).epsilon(1e-12));
        CHECK(circular_distance(a, c) <= ab + circular_distance(b, c) + 1e-9);
    }
}

TEST_CASE("angle_of_departure") {
    const GnbSite g{0, {0.0, 0.0}};
    CHECK(angle_of_departure(g, {100, 0}) == doctest::Approx(0.0));
    CHECK(angle_of_departure(g, {0, 100}) == doctest::Approx(90.0));
    CHECK(angle_of_departure(g, {-50, -50}) == doctest::Approx(225.0));
    CHECK(angle_of_departure(g, {10, -10}) == doctest::Approx(315.0));
    CHECK_THROWS_AS(angle_of_departure(g, {0, 0}), GeometryError);
}

TEST_CASE("covers") {
    CHECK(covers({0, 28, 5}, 30));
    CHECK(covers({0, 1, 10}, 359));
    CHECK_FALSE(covers({0, 20, 15}, 30));
    CHECK(covers({0, 20, 20}, 30));  // boundary included
}

TEST_CASE("covers is invariant under full turns") {
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const BeamCandidate b{0, static_cast<double>(rng.index(360)), 5.0 * (1 + rng.index(3))};
        const double theta = static_cast<double>(rng.index(360));
        const bool base = covers(b, theta);
        CHECK(covers(b, theta + 360.0) == base);
        CHECK(covers(b, theta - 720.0) == base);
        CHECK(covers({b.gnb_id, b.direction + 360.0, b.width}, theta) == base);
    }
}

TEST_CASE("conflicts") {
    CHECK(conflicts({0, 10, 10}, {0, 18, 10}));
    CHECK_FALSE(conflicts({0, 10, 10}, {0, 20, 10}));
    CHECK_FALSE(conflicts({0, 10, 10}, {1, 10, 10}));
    CHECK(conflicts({0, 10, 10}, {0, 10, 10}));
    CHECK(conflicts({0, 355, 10}, {0, 3, 10}));
}

TEST_CASE("conflicts is symmetric") {
    Rng rng(5);
    for (int i = 0; i < 2000; ++i) {
        const BeamCandidate a{static_cast<int>(rng.index(2)), static_cast<double>(rng.index(360)),
                              5.0 * (1 + rng.index(3))};
        const BeamCandidate b{static_cast<int>(rng.index(2)), static_cast<double>(rng.index(360)),
                              5.0 * (1 + rng.index(3))};
        CHECK(conflicts(a, b) == conflicts(b, a));
    }
}

TEST_CASE("covering candidates match a brute-force scan") {
    const GnbSite g{0, {0, 0}};
    Rng rng(9);
    for (int i = 0; i < 50; ++i) {
        const Vec2 target{rng.uniform(-300, 300), rng.uniform(-300, 300)};
        const double theta = angle_of_departure(g, target);
        for (int dir = 0; dir < 360; ++dir) {
            for (double w : {5.0, 10.0, 15.0}) {
                double d = std::abs(theta - dir);
                if (d > 180.0) {
                    d = 360.0 - d;
                }
                CHECK(covers({0, static_cast<double>(dir), w}, theta) == (d <= w / 2.0));
            }
        }
    }
}
