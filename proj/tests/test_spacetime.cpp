#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hinf/spacetime.hpp"

#include <cmath>
#include <random>

using namespace hinf;

namespace {

Event ev(const char* l, double x, double y, double z, double t) { return {l, {x, y, z}, t}; }

// Fig. 2b events, written out independently of the scenario builder
std::vector<Event> fig2b(double d, double eps) {
    double h = std::sqrt(3.0) * d / 2;
    return {ev("A", 0, 0, 0, -2 * eps), ev("B", d / 2, h, 0, 0), ev("C", d / 2, -h, 0, 0), ev("D", d, 0, 0, -eps)};
}

// light arrival at p from e (c = 1)
double arrival(const Event& e, const Vec3& p) { return e.time + norm(p - e.position); }

bool witness_oracle(const std::vector<Event>& inc, const Event& exc, const Vec3& p) {
    double m = -1e300;
    for (const auto& e : inc) m = std::max(m, arrival(e, p));
    return m < arrival(exc, p);
}

// distance from the apex along the ray through the locus, tau = lead of the excluded
// party over the pair in length units, pair at distance d from the apex's partner
double law(double d, double tau) { return tau * (2 * d - tau) / (d - 2 * tau); }

} // namespace

TEST_CASE("lightcone membership, boundary inclusive") {
    Event apex = ev("O", 0, 0, 0, 0);
    CHECK(in_future_lightcone(ev("P", 0, 0, 0, 1), apex, 1));
    CHECK(in_future_lightcone(ev("P", 1, 0, 0, 1), apex, 1));
    CHECK_FALSE(in_future_lightcone(ev("P", 2, 0, 0, 1), apex, 1));
    CHECK_FALSE(in_future_lightcone(ev("P", 0, 0, 0, -1), apex, 1));
}

TEST_CASE("lightcone transitivity on random timelike chains") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1, 1), dt(0, 2);
    int chains = 0;
    for (int i = 0; i < 2000; ++i) {
        Event e1 = ev("1", u(rng), u(rng), u(rng), u(rng));
        Event e2 = ev("2", u(rng), u(rng), u(rng), e1.time + dt(rng));
        Event e3 = ev("3", u(rng), u(rng), u(rng), e2.time + dt(rng));
        if (in_future_lightcone(e2, e1, 1) && in_future_lightcone(e3, e2, 1)) {
            ++chains;
            CHECK(in_future_lightcone(e3, e1, 1));
        }
    }
    CHECK(chains > 50);
}

TEST_CASE("boosted time order") {
    Event o = ev("O", 0, 0, 0, 0);
    CHECK(frame_time_order(o, ev("P", 0, 0, 0, 1), {}, 1) == TimeOrder::Future);
    CHECK(frame_time_order(o, ev("P", 1, 0, 0, 0), {{0.5, 0, 0}}, 1) == TimeOrder::Past);
    CHECK(frame_time_order(o, ev("P", 1, 0, 0, 0.5), {{0.5, 0, 0}}, 1) == TimeOrder::Simultaneous);
    CHECK_THROWS_AS(frame_time_order(o, ev("P", 1, 0, 0, 0), {{1, 0, 0}}, 1), DomainError);
    CHECK_THROWS_AS(frame_time_order(o, ev("P", 1, 0, 0, 0), {{0.8, 0.8, 0}}, 1), DomainError);
}

TEST_CASE("boosted order: rest frame agrees with preferred time, swap is antisymmetric") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 1000; ++i) {
        Event a = ev("a", u(rng), u(rng), u(rng), u(rng)), b = ev("b", u(rng), u(rng), u(rng), u(rng));
        TimeOrder expect = b.time > a.time ? TimeOrder::Future : TimeOrder::Past;
        CHECK(frame_time_order(a, b, {}, 1) == expect);
        FrameVelocity v{{0.5 * u(rng), 0.5 * u(rng), 0.5 * u(rng)}};
        TimeOrder ab = frame_time_order(a, b, v, 1), ba = frame_time_order(b, a, v, 1);
        if (ab == TimeOrder::Past) CHECK(ba == TimeOrder::Future);
        if (ab == TimeOrder::Future) CHECK(ba == TimeOrder::Past);
        if (ab == TimeOrder::Simultaneous) CHECK(ba == TimeOrder::Simultaneous);
    }
}

TEST_CASE("witness search trivial cases") {
    Event a = ev("A", 1, 2, 3, 4);
    auto p = find_witness_point({{a}, {}, std::nullopt, 1});
    REQUIRE(p);
    CHECK(p->position == a.position);
    CHECK(p->time == a.time);

    auto ev2 = fig2b(1, 0.1);
    // excluded coincident with an included event: its cone covers the intersection
    auto none = find_witness_point({{ev2[0], ev2[1], ev2[2]}, {ev2[0]}, std::make_pair(ev2[1], ev2[2]), 1});
    CHECK_FALSE(none);
}

TEST_CASE("fig2b witness A' follows the closed-form law") {
    auto e = fig2b(1, 0.1);
    WitnessQuery q{{e[0], e[1], e[2]}, {e[3]}, std::make_pair(e[1], e[2]), 1};
    auto p = find_witness_point(q);
    REQUIRE(p);
    CHECK(witness_oracle({e[0], e[1], e[2]}, e[3], p->position));
    auto md = min_witness_distance(q, e[0].position);
    REQUIRE(md);
    // 0.1 * 1.9 / 0.8
    CHECK(*md == doctest::Approx(0.2375).epsilon(1e-8));
    CHECK(*md == doctest::Approx(law(1, 0.1)).epsilon(1e-8));

    // brute-force scan of the bisector plane y = 0 around A
    double best = 1e9;
    for (double x = -0.6; x <= 0.6; x += 1e-3)
        for (double z = -0.6; z <= 0.6; z += 1e-3) {
            Vec3 pt{x, 0, z};
            if (witness_oracle({e[0], e[1], e[2]}, e[3], pt)) best = std::min(best, norm(pt));
        }
    CHECK(std::abs(best - *md) < 2e-3);
}

TEST_CASE("fig2b witness D' from D: lead of A is 2 eps") {
    auto e = fig2b(1, 0.1);
    WitnessQuery q{{e[3], e[1], e[2]}, {e[0]}, std::make_pair(e[1], e[2]), 1};
    auto md = min_witness_distance(q, e[3].position);
    REQUIRE(md);
    CHECK(*md == doctest::Approx(0.6).epsilon(1e-8));
    CHECK(*md == doctest::Approx(law(1, 0.2)).epsilon(1e-8));
}

TEST_CASE("fig2b witness law over a grid of d, eps") {
    for (double d : {0.5, 1.0, 2.0, 5.0})
        for (double f : {0.02, 0.08, 0.15, 0.22}) {
            double eps = f * d;
            auto e = fig2b(d, eps);
            WitnessQuery q{{e[0], e[1], e[2]}, {e[3]}, std::make_pair(e[1], e[2]), 1};
            auto md = min_witness_distance(q, e[0].position);
            REQUIRE(md);
            CHECK(*md == doctest::Approx(law(d, eps)).epsilon(1e-7));
            CHECK(*md < witness_bound_fig2(d, eps, 1));
        }
}

TEST_CASE("fig3 witness matches dv(4sqrt3c-3v)/(4c(c-sqrt3v))") {
    for (double v : {0.02, 0.1, 0.3, 0.5}) {
        double t = -std::sqrt(3.0) * v / 2;
        double h = std::sqrt(3.0) / 2;
        Event A = ev("A", 0, 0, 0, t), B = ev("B", 0.5, h, 0, 0), C = ev("C", 0.5, -h, 0, 0), D = ev("D", 1, 0, 0, t);
        auto md = min_witness_distance({{A, B, C}, {D}, std::make_pair(B, C), 1}, A.position);
        REQUIRE(md);
        CHECK(*md == doctest::Approx(witness_bound_fig3(1, v, 1)).epsilon(1e-7));
    }
}

TEST_CASE("closed-form bounds") {
    CHECK(witness_bound_fig2(1, 0.1, 1) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(witness_bound_fig2(1, 0, 1) == 0);
    CHECK_THROWS_AS(witness_bound_fig2(1, 0.25, 1), DomainError);
    CHECK_THROWS_AS(witness_bound_fig2(1, -0.1, 1), DomainError);

    CHECK(witness_bound_fig3(1, 0, 1) == 0);
    // 0.1 (4 sqrt3 - 0.3) / (4 (1 - 0.1 sqrt3)), evaluated in long double
    long double s3 = std::sqrt(3.0L);
    long double ref = 0.1L * (4 * s3 - 0.3L) / (4 * (1 - 0.1L * s3));
    CHECK(witness_bound_fig3(1, 0.1, 1) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-14));
    CHECK(witness_bound_fig3(1, 0.1, 1) == doctest::Approx(0.2004).epsilon(1e-3));
    CHECK_THROWS_AS(witness_bound_fig3(1, 1 / std::sqrt(3.0), 1), DomainError);
}

TEST_CASE("closed-form bounds increase on their domains") {
    double prev = -1;
    for (double eps = 0; eps < 0.2499; eps += 0.001) {
        double b = witness_bound_fig2(1, eps, 1);
        CHECK(b > prev);
        prev = b;
    }
    prev = -1;
    for (double v = 0; v < 0.577; v += 0.001) {
        double b = witness_bound_fig3(1, v, 1);
        CHECK(b > prev);
        prev = b;
    }
}
