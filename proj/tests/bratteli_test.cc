#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "support.hh"
#include "vershik/bratteli.hh"
#include "vershik/builtins.hh"
#include "vershik/versik.hh"

using namespace vershik;
using namespace vtest;

TEST_CASE("validate accepts the dyadic diagram and rejects broken ones") {
    BratteliDiagram b = dyadic_diagram(4);
    CHECK(validate(b).empty());

    SUBCASE("source-isolated vertex") {
        BratteliDiagram bad = b;
        bad.vertex_levels[1] = {"v", "w"};
        bad.edge_levels[0].ranges = {"v", "w"};
        bad.edge_levels[1].sources = {"v", "w"};
        bad.vertex_levels[2] = bad.vertex_levels[1];
        bad.edge_levels[1].ranges = {"v", "w"};
        // no edges touch w
        auto viol = validate(bad);
        CHECK(!viol.empty());
    }
    SUBCASE("duplicate order index in a fiber") {
        BratteliDiagram bad = b;
        bad.edge_levels[0].edges[1].order_index = 0;
        auto viol = validate(bad);
        REQUIRE(!viol.empty());
        CHECK(viol.front().find("ordered") != std::string::npos);
    }
}

TEST_CASE("compose: dyadic level with itself orders pairs f-major") {
    BratteliDiagram b = dyadic_diagram(3);
    OrderedDiagram sq = compose(b.level(1), b.level(2));
    REQUIRE(sq.edges.size() == 4);
    // rank of (e, f) in the fiber equals idx(e) + 2 idx(f): check against the
    // successor-order of depth-2 paths
    auto paths = enumerate_paths(b, 2);
    REQUIRE(paths.size() == 4);
    for (std::size_t i = 0; i < paths.size(); ++i) {
        auto w = path_word(b, paths[i]);
        CHECK(static_cast<int>(i) == w[0] + 2 * w[1]);
    }
    for (const auto& e : sq.edges) {
        // fiber order was assigned in f-major order
        CHECK(e.order_index >= 0);
        CHECK(e.order_index < 4);
    }
}

TEST_CASE("compose with a single-edge diagram is order-isomorphic to the original") {
    BratteliDiagram b = dyadic_diagram(3);
    OrderedDiagram single;
    single.sources = {"v"};
    single.ranges = {"v"};
    single.edges = {{0, 0, 0}};
    OrderedDiagram left = compose(single, b.level(1));
    CHECK(order_isomorphic(left, b.level(1)));
    OrderedDiagram right = compose(b.level(1), single);
    CHECK(order_isomorphic(right, b.level(1)));
}

TEST_CASE("compose mismatch raises LevelMismatch") {
    BratteliDiagram b = dyadic_diagram(3);
    OrderedDiagram other;
    other.sources = {"a", "b"};
    other.ranges = {"a"};
    other.edges = {{0, 0, 0}, {1, 0, 1}};
    CHECK_THROWS_AS(compose(b.level(1), other), LevelMismatch);
}

TEST_CASE("telescope") {
    BratteliDiagram b = dyadic_diagram(8);
    SUBCASE("to every level is the identity") {
        std::vector<Level> all{1, 2, 3, 4, 5, 6, 7, 8};
        BratteliDiagram t = telescope(b, all);
        REQUIRE(t.depth() == b.depth());
        for (Level n = 1; n <= t.depth(); ++n) CHECK(order_isomorphic(t.level(n), b.level(n)));
    }
    SUBCASE("by pairs gives four edges per level") {
        BratteliDiagram t = telescope(b, {2, 4, 6, 8});
        REQUIRE(t.depth() == 4);
        for (Level n = 1; n <= 4; ++n) CHECK(t.level(n).edges.size() == 4);
    }
    SUBCASE("telescoping twice equals telescoping by the composite subsequence") {
        BratteliDiagram t1 = telescope(telescope(b, {2, 4, 6, 8}), {2, 4});
        BratteliDiagram t2 = telescope(b, {4, 8});
        REQUIRE(t1.depth() == t2.depth());
        CHECK(diagram_isomorphic(t1, t2));
    }
    SUBCASE("path counts are preserved") {
        BratteliDiagram t = telescope(b, {3, 8});
        CHECK(total_paths(t, 2) == total_paths(b, 8));
    }
    SUBCASE("bad cuts") {
        CHECK_THROWS_AS(telescope(b, {}), BadCuts);
        CHECK_THROWS_AS(telescope(b, {3, 2}), BadCuts);
        CHECK_THROWS_AS(telescope(b, {9}), BadCuts);
    }
}

TEST_CASE("order_isomorphic") {
    BratteliDiagram b = dyadic_diagram(3);
    SUBCASE("identity witness on itself") {
        auto iso = order_isomorphic(b.level(1), b.level(1));
        REQUIRE(iso);
        CHECK(iso->edge_map == std::vector<EdgeId>{0, 1});
    }
    SUBCASE("edge-relabeled copy") {
        OrderedDiagram copy = b.level(1);
        std::swap(copy.edges[0], copy.edges[1]);
        CHECK(order_isomorphic(b.level(1), copy));
    }
    SUBCASE("fiber size mismatch") {
        OrderedDiagram three = b.level(1);
        three.edges.push_back({0, 0, 2});
        CHECK(!order_isomorphic(b.level(1), three));
    }
}

TEST_CASE("unique extreme incoming paths per vertex") {
    std::mt19937_64 rng(11);
    for (int it = 0; it < 10; ++it) {
        BratteliDiagram b = random_diagram(rng, 6);
        for (Level lv = 1; lv <= 6; ++lv) {
            auto paths = enumerate_paths(b, lv);
            std::map<VertexId, int> maxs, mins;
            for (const auto& p : paths) {
                if (path_all_max(b, p)) ++maxs[end_vertex(b, p)];
                if (path_all_min(b, p)) ++mins[end_vertex(b, p)];
            }
            for (VertexId v = 0; v < b.vertex_levels[static_cast<std::size_t>(lv)].size(); ++v) {
                CHECK(maxs[v] == 1);
                CHECK(mins[v] == 1);
            }
        }
    }
}

TEST_CASE("compose is associative up to order isomorphism") {
    std::mt19937_64 rng(23);
    for (int it = 0; it < 10; ++it) {
        BratteliDiagram b = random_diagram(rng, 4);
        OrderedDiagram left = compose(compose(b.level(1), b.level(2)), b.level(3));
        OrderedDiagram right = compose(b.level(1), compose(b.level(2), b.level(3)));
        CHECK(order_isomorphic(left, right));
    }
}

TEST_CASE("order_equivalent_bounded") {
    SUBCASE("diagram vs its telescope, replay-verified") {
        BratteliDiagram b = dyadic_diagram(8);
        BratteliDiagram t = telescope(b, {2, 5, 8});
        EquivalenceVerdict v = order_equivalent_bounded(b, t, 4);
        REQUIRE(v.status == EquivStatus::Equivalent);
        REQUIRE(v.witness);
        CHECK(replay_witness(b, t, *v.witness));
    }
    SUBCASE("|X_max| certificate separates the two-loop diagram") {
        BratteliDiagram b = dyadic_diagram(6);
        BratteliDiagram two = two_loop_diagram(6);
        CHECK(max_path_count(b) == 1);
        CHECK(max_path_count(two) == 2);
        EquivalenceVerdict v = order_equivalent_bounded(b, two, 3);
        CHECK(v.status == EquivStatus::Inequivalent);
        CHECK(!v.certificate.empty());
    }
    SUBCASE("unrelated diagrams at bound 1 stay unknown") {
        std::mt19937_64 rng(5);
        BratteliDiagram b1 = random_diagram(rng, 6);
        BratteliDiagram b2 = random_diagram(rng, 6);
        // avoid an accidental certificate or equivalence by construction:
        // pick diagrams with equal extreme counts but distinct path counts
        while (max_path_count(b1) != max_path_count(b2) ||
               min_path_count(b1) != min_path_count(b2) ||
               total_paths(b1, 6) == total_paths(b2, 6)) {
            b1 = random_diagram(rng, 6);
            b2 = random_diagram(rng, 6);
        }
        EquivalenceVerdict v = order_equivalent_bounded(b1, b2, 1);
        CHECK(v.status == EquivStatus::Unknown);
        CHECK(v.exhausted_bound == 1);
    }
}

TEST_CASE("stationary extreme path counts match prefix stabilization") {
    std::mt19937_64 rng(31);
    for (int it = 0; it < 20; ++it) {
        BratteliDiagram b = random_diagram(rng, 8);
        // oracle: distinct depth-4 all-max prefixes of depth-8 all-max paths
        auto paths = enumerate_paths(b, 8);
        std::set<std::vector<EdgeId>> prefixes;
        for (const auto& p : paths)
            if (path_all_max(b, p))
                prefixes.insert(std::vector<EdgeId>(p.edges.begin(), p.edges.begin() + 4));
        CHECK(max_path_count(b) == prefixes.size());
    }
}
