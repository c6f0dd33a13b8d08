#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "nsbc/json_io.hpp"
#include "nsbc/rng.hpp"
#include "nsbc/tree.hpp"

using namespace nsbc;

namespace {

const std::vector<std::string> kFig1Rows = {"*0*00", "*0*00", "***00", "00*00",
                                            "00*00", "00**0", "00***"};

// random recursive tree: parent of antenna b uniform among {root, 1..b-1};
// every antenna gets its own receiver plus a few extras
TreeNetwork random_tree(SeededRng& rng, int B, int extra_rx) {
    std::vector<int> parent(static_cast<std::size_t>(B));
    for (int b = 1; b <= B; ++b)
        parent[b - 1] = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(b)));
    std::vector<int> assoc;
    for (int b = 1; b <= B; ++b) assoc.push_back(b);
    for (int i = 0; i < extra_rx; ++i)
        assoc.push_back(1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(B))));
    return TreeNetwork::from_parents(parent, assoc);
}

DofTuple random_feasible(const TreeNetwork& T, SeededRng& rng) {
    // scale a random tuple until every root-to-leaf path sums below 1
    DofTuple d;
    d.d.resize(static_cast<std::size_t>(T.K));
    for (auto& v : d.d) v = rng.uniform01();
    double worst = 0.0;
    for (const int leaf : T.leaves) {
        double s = 0.0;
        for (const int b : T.root_path(leaf)) s += dof_at_antenna(T, d, b);
        worst = std::max(worst, s);
    }
    for (auto& v : d.d) v /= worst * 1.0000001;
    return d;
}

} // namespace

TEST_SUITE("topology") {

TEST_CASE("pattern validation") {
    CHECK_THROWS_AS(Pattern::from_rows({"00", "**"}), std::invalid_argument); // zero row
    CHECK_THROWS_AS(Pattern::from_rows({"*0", "*0"}), std::invalid_argument); // zero col
    CHECK_THROWS_AS(Pattern::from_rows({"*x"}), std::invalid_argument);
    const Pattern M = Pattern::from_rows(kFig1Rows);
    CHECK(M.K() == 7);
    CHECK(M.B() == 5);
    CHECK(M.total_stars() == 14);
}

TEST_CASE("hierarchy example reconstructs as the expected tree") {
    const auto parsed = tree_from_pattern(Pattern::from_rows(kFig1Rows));
    REQUIRE(parsed.ok());
    const auto& T = *parsed.tree;
    CHECK(T.parent[3] == 0); // Tx-3 hangs off the root
    CHECK(T.depth[3] == 1);
    CHECK(T.parent[1] == 3);
    CHECK(T.parent[2] == 1);
    CHECK(T.parent[4] == 3);
    CHECK(T.parent[5] == 4);
    CHECK(T.leaves == std::vector<int>{2, 5});
    CHECK(T.rx_assoc == std::vector<int>{1, 1, 2, 3, 3, 4, 5});
}

TEST_CASE("vertical hierarchy is a path graph") {
    const auto parsed = tree_from_pattern(Pattern::lower_triangular(4));
    REQUIRE(parsed.ok());
    const auto& T = *parsed.tree;
    CHECK(T.parent == std::vector<int>{-1, 0, 1, 2, 3});
    CHECK(T.leaves == std::vector<int>{4});
}

TEST_CASE("fully connected 2x2 is rejected with an equal-support witness") {
    const auto parsed = tree_from_pattern(Pattern::fully_connected(2, 2));
    CHECK(!parsed.ok());
    CHECK(parsed.rejection.find("identical receiver sets") != std::string::npos);
}

TEST_CASE("non-path row is rejected") {
    // receiver 3 hears antennas 2 and 3, which sit on different branches
    const auto parsed = tree_from_pattern(Pattern::from_rows({"*0", "0*", "**"}));
    CHECK(!parsed.ok());
}

TEST_CASE("pattern -> tree -> pattern round-trips") {
    const Pattern M = Pattern::from_rows(kFig1Rows);
    const auto parsed = tree_from_pattern(M);
    REQUIRE(parsed.ok());
    CHECK(parsed.tree->to_pattern() == M);

    SeededRng rng(11);
    for (int it = 0; it < 50; ++it) {
        const TreeNetwork T = random_tree(rng, 2 + static_cast<int>(rng.uniform_below(7)), 3);
        const Pattern P = T.to_pattern();
        const auto back = tree_from_pattern(P);
        REQUIRE(back.ok());
        CHECK(back.tree->to_pattern() == P);
    }
}

TEST_CASE("region membership") {
    const TreeNetwork path4 = TreeNetwork::path(4);
    const TreeNetwork star4 = TreeNetwork::star(4);
    CHECK_FALSE(classical_region_contains(path4, {{1, 1, 1, 1}}));
    CHECK(classical_region_contains(path4, {{0.3, 0.3, 0.3, 0.1}}));
    CHECK(classical_region_contains(star4, {{1, 1, 1, 1}}));
    CHECK(ns_region_contains(path4, {{1, 1, 1, 1}}));
    CHECK_FALSE(ns_region_contains(path4, {{1.5, 0, 0, 0}}));
    CHECK(classical_region_contains(path4, {{0.25, 0.25, 0.25, 0.25}})); // boundary point
    CHECK_THROWS_AS(classical_region_contains(path4, DofTuple{{0.1, 0.1}}),
                    std::invalid_argument);

    SUBCASE("one unit per antenna on the hierarchy example") {
        const auto parsed = tree_from_pattern(Pattern::from_rows(kFig1Rows));
        REQUIRE(parsed.ok());
        const auto& T = *parsed.tree;
        // split each antenna's unit across its associated receivers
        DofTuple d;
        d.d.assign(static_cast<std::size_t>(T.K), 0.0);
        for (int b = 1; b <= T.B; ++b) {
            const auto rx = T.receivers_of(b);
            for (const int k : rx) d.d[k] = 1.0 / static_cast<double>(rx.size());
        }
        CHECK(ns_region_contains(T, d));
    }
}

TEST_CASE("fully connected region") {
    CHECK(fully_connected_region_contains(3, {{1.0 / 3, 1.0 / 3, 1.0 / 3}}));
    CHECK_FALSE(fully_connected_region_contains(3, {{0.5, 0.5, 0.5}}));
    CHECK(fully_connected_region_contains(1, {{1.0}}));
}

TEST_CASE("sum DoF") {
    const auto p = sum_dof(TreeNetwork::path(4));
    CHECK(p.classical == 1.0);
    CHECK(p.ns == 4.0);
    const auto s = sum_dof(TreeNetwork::star(4));
    CHECK(s.classical == 4.0);
    CHECK(s.ns == 4.0);
    const auto parsed = tree_from_pattern(Pattern::from_rows(kFig1Rows));
    REQUIRE(parsed.ok());
    const auto f = sum_dof(*parsed.tree);
    CHECK(f.classical == 2.0);
    CHECK(f.ns == 5.0);
}

TEST_CASE("region monotonicity and classical within NS") {
    SeededRng rng(23);
    for (int it = 0; it < 40; ++it) {
        const TreeNetwork T = random_tree(rng, 2 + static_cast<int>(rng.uniform_below(6)), 2);
        const DofTuple d = random_feasible(T, rng);
        CHECK(classical_region_contains(T, d));
        CHECK(ns_region_contains(T, d)); // classical region is inside the NS region
        DofTuple smaller = d;
        for (auto& v : smaller.d) v *= rng.uniform01();
        CHECK(classical_region_contains(T, smaller));
    }
}

TEST_CASE("TDMA schedule matches the burning closed form") {
    // example tree: Tx-1 under the root, children Tx-2/Tx-5, Tx-2's children
    // Tx-3/Tx-4, Tx-6 under Tx-5
    const TreeNetwork T =
        TreeNetwork::from_parents({0, 1, 2, 2, 1, 5}, {1, 2, 3, 4, 5, 6});
    SeededRng rng(97);
    for (int it = 0; it < 25; ++it) {
        const DofTuple d = random_feasible(T, rng);
        const TdmaSchedule s = tdma_schedule(T, d);
        const auto& dv = d.d;
        const double eps = 1e-12;
        CHECK(std::abs(s.intervals.at(1).first - 0.0) < eps);
        CHECK(std::abs(s.intervals.at(1).second - dv[0]) < eps);
        CHECK(std::abs(s.intervals.at(2).first - dv[0]) < eps);
        CHECK(std::abs(s.intervals.at(2).second - (dv[0] + dv[1])) < eps);
        CHECK(std::abs(s.intervals.at(3).first - (dv[0] + dv[1])) < eps);
        CHECK(std::abs(s.intervals.at(3).second - (dv[0] + dv[1] + dv[2])) < eps);
        CHECK(std::abs(s.intervals.at(4).first - (dv[0] + dv[1])) < eps);
        CHECK(std::abs(s.intervals.at(4).second - (dv[0] + dv[1] + dv[3])) < eps);
        CHECK(std::abs(s.intervals.at(5).first - dv[0]) < eps);
        CHECK(std::abs(s.intervals.at(5).second - (dv[0] + dv[4])) < eps);
        CHECK(std::abs(s.intervals.at(6).first - (dv[0] + dv[4])) < eps);
        CHECK(std::abs(s.intervals.at(6).second - (dv[0] + dv[4] + dv[5])) < eps);
    }
}

TEST_CASE("TDMA simple schedules") {
    const TreeNetwork path4 = TreeNetwork::path(4);
    const auto quarters = tdma_schedule(path4, {{0.25, 0.25, 0.25, 0.25}});
    for (int b = 1; b <= 4; ++b) {
        CHECK(quarters.intervals.at(b).first == doctest::Approx((b - 1) * 0.25));
        CHECK(quarters.intervals.at(b).second == doctest::Approx(b * 0.25));
    }
    const TreeNetwork star4 = TreeNetwork::star(4);
    const auto all = tdma_schedule(star4, {{1, 1, 1, 1}});
    for (int b = 1; b <= 4; ++b) {
        CHECK(all.intervals.at(b).first == 0.0);
        CHECK(all.intervals.at(b).second == 1.0);
    }
    CHECK_THROWS_AS(tdma_schedule(path4, DofTuple{{1, 1, 1, 1}}), std::invalid_argument);
}

TEST_CASE("JSON schemas round-trip") {
    const Pattern M = Pattern::from_rows(kFig1Rows);
    CHECK(pattern_from_json(pattern_to_json(M)) == M);
    json bad = pattern_to_json(M);
    bad["K"] = 3;
    CHECK_THROWS_AS(pattern_from_json(bad), std::invalid_argument);

    const auto parsed = tree_from_pattern(M);
    REQUIRE(parsed.ok());
    const TreeNetwork back = tree_from_json(tree_to_json(*parsed.tree));
    CHECK(back.parent == parsed.tree->parent);
    CHECK(back.rx_assoc == parsed.tree->rx_assoc);
    // a pattern doubles as a tree description
    CHECK(tree_from_json(pattern_to_json(M)).leaves == parsed.tree->leaves);

    const auto sched = tdma_schedule(*parsed.tree, {{0.1, 0.1, 0.2, 0.1, 0.1, 0.3, 0.2}});
    const json sj = schedule_to_json(sched);
    for (const auto& [b, iv] : sched.intervals) {
        CHECK(sj.at(std::to_string(b))[0].get<double>() == doctest::Approx(iv.first));
        CHECK(sj.at(std::to_string(b))[1].get<double>() == doctest::Approx(iv.second));
    }
}

TEST_CASE("schedule orthogonality along every receiver's path") {
    SeededRng rng(5150);
    for (int it = 0; it < 100; ++it) {
        const TreeNetwork T = random_tree(rng, 2 + static_cast<int>(rng.uniform_below(7)), 2);
        const DofTuple d = random_feasible(T, rng);
        const TdmaSchedule s = tdma_schedule(T, d);
        for (int k = 0; k < T.K; ++k) {
            const auto path = T.root_path(T.rx_assoc[k]);
            for (std::size_t i = 0; i < path.size(); ++i)
                for (std::size_t j = i + 1; j < path.size(); ++j) {
                    const auto& a = s.intervals.at(path[i]);
                    const auto& b = s.intervals.at(path[j]);
                    const double overlap =
                        std::min(a.second, b.second) - std::max(a.first, b.first);
                    CHECK(overlap <= 1e-9);
                }
        }
    }
}

} // TEST_SUITE
