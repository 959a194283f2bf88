#include <catch_amalgamated.hpp>

#include <random>

#include "tadic/collatz.hpp"

using namespace tadic;

TEST_CASE("map parameters must be odd") {
    CHECK_NOTHROW(MapParams(3, 1));
    CHECK_NOTHROW(MapParams(-5, 7));
    CHECK_NOTHROW(MapParams(1, -1));
    CHECK_THROWS_AS(MapParams(2, 1), std::invalid_argument);
    CHECK_THROWS_AS(MapParams(3, 0), std::invalid_argument);
}

TEST_CASE("single map steps") {
    CHECK(t_apply(MapParams(3, 1), Rat(1)) == Rat(2));
    CHECK(t_apply(MapParams(5, 1), Rat(1, 3)) == Rat(4, 3));
    CHECK(t_apply(MapParams(1, -1), Rat(7)) == Rat(3)); // T_{1,-1} is the shift
    CHECK_THROWS_AS(t_apply(MapParams(3, 1), Rat(1, 2)), std::domain_error);
}

TEST_CASE("orbit with cycle detection") {
    SECTION("integer cycle of the 5x+1 map") {
        OrbitResult res = orbit(MapParams(5, 1), Rat(1), 100);
        REQUIRE(res.cycle.has_value());
        CHECK(res.cycle->entry_index == 0);
        CHECK(res.cycle->cycle_length == 5);
        CHECK(res.states == std::vector<Rat>{1, 3, 8, 4, 2});
        CHECK(res.parity_bits == std::vector<bool>{true, true, false, false, false});
        CHECK_FALSE(res.budget_exhausted);
    }
    SECTION("rational cycle") {
        OrbitResult res = orbit(MapParams(5, 1), Rat(1, 3), 100);
        REQUIRE(res.cycle.has_value());
        CHECK(res.cycle->entry_index == 0);
        CHECK(res.cycle->cycle_length == 3);
        CHECK(res.parity_bits == std::vector<bool>{true, false, false});
    }
    SECTION("fixed point") {
        OrbitResult res = orbit(MapParams(3, 1), Rat(-1), 10);
        REQUIRE(res.cycle.has_value());
        CHECK(res.cycle->entry_index == 0);
        CHECK(res.cycle->cycle_length == 1);
        CHECK(res.parity_bits == std::vector<bool>{true});
    }
    SECTION("budget exhaustion is a result, not an error") {
        OrbitResult res = orbit(MapParams(5, 1), Rat(7), 10);
        CHECK_FALSE(res.cycle.has_value());
        CHECK(res.budget_exhausted);
        CHECK(res.states.size() == 10);
    }
}

TEST_CASE("truncated parity vector") {
    CHECK(q_truncated(MapParams(3, 1), Rat(1), 6) == TwoAdicWord(21, 6));
    CHECK(q_truncated(MapParams(1, -1), Rat(13), 4) == TwoAdicWord(13, 4));
    CHECK(q_truncated(MapParams(5, 1), Rat(0), 8) == TwoAdicWord(0, 8));
}

TEST_CASE("exact parity vector on cyclic orbits") {
    auto q31 = q_exact(MapParams(3, 1), Rat(1), 100);
    REQUIRE(q31.has_value());
    CHECK(q31->preperiod().empty());
    CHECK(q31->period() == std::vector<bool>{true, false});
    CHECK(bits_to_rational(*q31) == Rat(-1, 3));

    auto q51 = q_exact(MapParams(5, 1), Rat(1, 3), 100);
    REQUIRE(q51.has_value());
    CHECK(q51->period() == std::vector<bool>{true, false, false});
    CHECK(bits_to_rational(*q51) == Rat(-1, 7));

    auto qshift = q_exact(MapParams(1, -1), Rat(-1), 100);
    REQUIRE(qshift.has_value());
    CHECK(qshift->period() == std::vector<bool>{true});

    CHECK(q_exact(MapParams(5, 1), Rat(7), 50) == std::nullopt);
}

TEST_CASE("conjugacy relation on truncations: Q T = sigma Q") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<long> nd(-2000, 2000), dd(0, 100);
    for (auto [m, r] : std::vector<std::pair<int, int>>{{3, 1}, {5, 1}, {7, -3}, {-3, 5}}) {
        MapParams p(m, r);
        for (int i = 0; i < 60; ++i) {
            Rat x(BigInt(nd(rng)), BigInt(2 * dd(rng) + 1));
            unsigned k = 1 + static_cast<unsigned>(i % 63);
            CHECK(q_truncated(p, t_apply(p, x), k).residue ==
                  (q_truncated(p, x, k + 1).residue >> 1));
        }
    }
}

TEST_CASE("q_exact is consistent with q_truncated") {
    std::mt19937_64 rng(22);
    std::uniform_int_distribution<long> nd(-500, 500), dd(0, 30);
    MapParams p(3, 1);
    for (int i = 0; i < 60; ++i) {
        Rat x(BigInt(nd(rng)), BigInt(2 * dd(rng) + 1));
        auto q = q_exact(p, x, 2000);
        if (!q) continue;
        unsigned k = 1 + static_cast<unsigned>(i % 48);
        CHECK(truncate(*q, k) == q_truncated(p, x, k));
    }
}

TEST_CASE("m=1 closed form: Q is -x/r") {
    for (int r : {1, -1, 3, -3, 5, -5, 7, -7}) {
        MapParams p(1, r);
        for (int x = -50; x <= 50; ++x) {
            auto q = q_exact(p, Rat(x), 2000);
            REQUIRE(q.has_value());
            CHECK(bits_to_rational(*q) == frac(-x, r));
        }
    }
}

TEST_CASE("parity vector preserves the 2-adic valuation") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<long> nd(-2000, 2000), dd(0, 50);
    MapParams p(3, 1);
    for (int i = 0; i < 80; ++i) {
        Rat x(BigInt(nd(rng)), BigInt(2 * dd(rng) + 1));
        auto q = q_exact(p, x, 2000);
        if (!q) continue;
        CHECK(valuation2(bits_to_rational(*q)) == valuation2(x));
    }
}

TEST_CASE("word-level parity vector matches the rational route") {
    std::mt19937_64 rng(24);
    std::uniform_int_distribution<long> nd(-5000, 5000), dd(0, 100);
    MapParams p(5, -3);
    for (int i = 0; i < 60; ++i) {
        Rat x(BigInt(nd(rng)), BigInt(2 * dd(rng) + 1));
        unsigned k = 1 + static_cast<unsigned>(i % 63);
        TwoAdicWord w(residue_mod_pow2(x, k), k);
        CHECK(q_truncated_word(p, w) == q_truncated(p, x, k));
    }
}

TEST_CASE("even-iterate density") {
    auto d1 = nu_estimate(MapParams(5, 1), Rat(1), 100);
    CHECK(d1.exact);
    CHECK(d1.value == Rat(3, 5));

    auto d2 = nu_estimate(MapParams(5, 1), Rat(1, 3), 100);
    CHECK(d2.exact);
    CHECK(d2.value == Rat(2, 3));

    auto d3 = nu_estimate(MapParams(5, 1), Rat(-14, 17), 100);
    CHECK(d3.exact);
    CHECK(d3.value == Rat(1, 3));

    // non-cyclic within the window: plain average, flagged inexact
    auto d4 = nu_estimate(MapParams(5, 1), Rat(7), 50);
    CHECK_FALSE(d4.exact);
    CHECK(d4.value >= 0);
    CHECK(d4.value <= 1);
}
