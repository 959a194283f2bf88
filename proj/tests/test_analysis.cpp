#include <catch_amalgamated.hpp>

#include "tadic/analysis.hpp"

using namespace tadic;

TEST_CASE("qbar tables are permutations") {
    SECTION("known identity cases") {
        auto t1 = qbar_table(MapParams(3, 1), 1);
        CHECK(t1.bijective);
        CHECK(t1.mapping == std::vector<std::uint32_t>{0, 1});
        CHECK(t1.order == 1);

        auto t2 = qbar_table(MapParams(3, 1), 2);
        CHECK(t2.mapping == std::vector<std::uint32_t>{0, 1, 2, 3});
        CHECK(t2.order == 1);

        auto ts = qbar_table(MapParams(1, -1), 6);
        CHECK(ts.bijective);
        CHECK(ts.order == 1);
        for (std::size_t i = 0; i < ts.mapping.size(); ++i)
            CHECK(ts.mapping[i] == i);
    }
    SECTION("bijectivity and order dividing 2^k across the grid") {
        for (auto [m, r] : std::vector<std::pair<int, int>>{
                 {3, 1}, {5, 1}, {3, 5}, {7, 1}, {1, 3}, {5, -3}}) {
            MapParams p(m, r);
            for (unsigned k = 1; k <= 10; ++k) {
                auto t = qbar_table(p, k);
                CHECK(t.bijective);
                CHECK(((std::uint64_t(1) << k) % t.order) == 0);
            }
        }
    }
    SECTION("restriction coherence: low bits of the k+1 table reproduce k") {
        for (auto [m, r] : std::vector<std::pair<int, int>>{{3, 1}, {5, -3}}) {
            MapParams p(m, r);
            for (unsigned k = 1; k <= 9; ++k) {
                auto tk = qbar_table(p, k);
                auto tk1 = qbar_table(p, k + 1);
                std::uint32_t mask = (1u << k) - 1;
                for (std::size_t x = 0; x < tk.mapping.size(); ++x) {
                    CHECK((tk1.mapping[x] & mask) == tk.mapping[x]);
                    CHECK((tk1.mapping[x + tk.mapping.size()] & mask) == tk.mapping[x]);
                }
            }
        }
    }
    SECTION("k out of range") {
        CHECK_THROWS_AS(qbar_table(MapParams(3, 1), 0), std::invalid_argument);
        CHECK_THROWS_AS(qbar_table(MapParams(3, 1), 25), std::invalid_argument);
    }
}

TEST_CASE("identity suite never refutes a proved identity") {
    for (auto [m, r] : std::vector<std::pair<int, int>>{{3, 1}, {5, 1}, {1, 7}}) {
        ScanReport rep = identity_suite(MapParams(m, r), 100, 64, 42);
        INFO("m=" << m << " r=" << r);
        CHECK(rep.refuted == 0);
        CHECK(rep.confirmed > 0);
        CHECK(rep.witnesses.empty());
    }
}

TEST_CASE("identity suite is deterministic in the seed") {
    ScanReport a = identity_suite(MapParams(5, 1), 50, 32, 7);
    ScanReport b = identity_suite(MapParams(5, 1), 50, 32, 7);
    CHECK(a.confirmed == b.confirmed);
    CHECK(a.unknown == b.unknown);
}

TEST_CASE("rational-pairs scanner") {
    MapParams p(5, 1);
    SECTION("cyclic orbits confirm the conjecture's shape") {
        ScanReport rep = scan_rational_pairs(p, {Rat(1, 3), Rat(1), Rat(-1)}, 1000, 64, 1000);
        CHECK(rep.confirmed == 3);
        CHECK(rep.refuted == 0);
        CHECK(rep.unknown == 0);
    }
    SECTION("non-cycling inputs stay unknown, never refuted") {
        ScanReport rep = scan_rational_pairs(p, {Rat(7)}, 2000, 64, 1000);
        CHECK(rep.confirmed == 0);
        CHECK(rep.refuted == 0);
        CHECK(rep.unknown == 1);
    }
    SECTION("a constructed candidate pair is flagged as a witness") {
        // x = omega(7) truncated deep enough looks rational while the orbit
        // of 7 does not cycle; feed a small rational with a huge orbit
        // instead: anything non-cycling whose omega reconstructs stably
        // would appear here. With honest inputs we only assert the
        // three-valued bookkeeping.
        ScanReport rep = scan_rational_pairs(p, {Rat(9), Rat(1)}, 500, 64, 1000);
        CHECK(rep.confirmed + rep.refuted + rep.unknown == 2);
        CHECK(rep.refuted == 0);
    }
}

TEST_CASE("omega-hat scanner over small integers") {
    MapParams p(5, 1);
    std::vector<Rat> xs;
    for (long x : {-9, -7, -5, -3, -1, 0, 1, 3, 5, 7, 9}) xs.emplace_back(x);
    OmegaHatScan scan = scan_omega_hat(p, xs, 1e-6, 10000);
    CHECK(scan.report.confirmed == 11); // every row of the reference grid converges
    CHECK(scan.report.refuted == 0);
    CHECK(scan.min_density > Rat(43, 100));

    OmegaHatScan div = scan_omega_hat(p, {Rat(-14, 17)}, 1e-6, 10000);
    CHECK(div.report.refuted == 1);
    REQUIRE(div.report.witnesses.size() == 1);
    CHECK(div.report.witnesses[0].input == "-14/17");
}

TEST_CASE("reference value table for (5,1)") {
    auto rows = table1(1e-6);
    REQUIRE(rows.size() == 11);
    auto row = [&](long x) -> const Table1Row& {
        for (auto& r : rows)
            if (r.x == Rat(x)) return r;
        FAIL("row missing");
        return rows[0];
    };
    CHECK(row(3).omega == Rat(-26, 31));
    CHECK(row(3).hat.exact_value == Rat(-26, 31));
    CHECK(row(-7).omega == Rat(-160532, 78125));
    CHECK(row(-1).omega == Rat(-2));
    CHECK(row(0).two_adic == "-1/3");
    // non-cyclic rows carry a 2-adic prefix and a real value
    CHECK_FALSE(row(9).omega.has_value());
    CHECK(row(9).two_adic == "2^2(1 + 2^1 + 2^5 + ...)");
    CHECK(row(7).two_adic == "2^1(1 + 2^1 + 2^3 + ...)");
    CHECK(row(-9).two_adic == "2^1(1 + 2^1 + 2^4 + ...)");
    REQUIRE(row(9).hat.value.has_value());
    CHECK(row(9).hat.value->convert_to<double>() == Catch::Approx(-177.68).epsilon(1e-3));
}
