#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hh"
#include "vershik/builtins.hh"
#include "vershik/towers.hh"

using namespace vershik;
using namespace vtest;

namespace {

std::vector<ClopenSet> zero_chain(int n) {
    std::vector<ClopenSet> chain;
    for (Level lv = 1; lv <= n; ++lv) chain.push_back(ClopenSet{lv, {0}});
    return chain;
}

}  // namespace

TEST_CASE("build_towers on the odometer with Y = [0]") {
    BratteliSystem s = odometer_system(8);
    KRPartition kr = build_towers(s, ClopenSet{1, {0}});
    REQUIRE(kr.towers.size() == 1);
    const Tower& t = kr.towers[0];
    CHECK(t.height == 1);
    CHECK(sets_equal(*s.space, t.floors[0], ClopenSet{1, {0}}));
    CHECK(sets_equal(*s.space, t.floors[1], ClopenSet{1, {1}}));
    CHECK(sets_equal(*s.space, kr.z, ClopenSet{1, {1}}));
}

TEST_CASE("build_towers with Y = X degenerates to one height-zero tower") {
    BratteliSystem s = odometer_system(6);
    KRPartition kr = build_towers(s, s.space->whole_space());
    REQUIRE(kr.towers.size() == 1);
    CHECK(kr.towers[0].height == 0);
    CHECK(is_whole(*s.space, kr.towers[0].floors[0]));
    CHECK(is_whole(*s.space, kr.z));
}

TEST_CASE("build_towers heights equal first-return times") {
    BratteliSystem s = odometer_system(8);
    // Y = [0,0]: the return time of the only base cell to Z = [1,1] is 3
    KRPartition kr = build_towers(s, ClopenSet{2, {0}});
    REQUIRE(kr.towers.size() == 1);
    CHECK(kr.towers[0].height == 3);
    // brute-force first-return oracle on depth-4 values
    int steps = 0;
    ClopenSet cur{2, {0}};
    while (!subset(*s.space, cur, kr.z)) {
        cur = image_clopen(s.phi, cur);
        ++steps;
        REQUIRE(steps < 50);
    }
    CHECK(steps == kr.towers[0].height);
}

TEST_CASE("refine") {
    BratteliSystem s = odometer_system(8);
    SUBCASE("stage-1 refinement with the level-1 cells") {
        KRPartition prev = trivial_partition(s);
        KRPartition kr = refine(s, prev, 1, ClopenSet{1, {0}});
        REQUIRE(kr.towers.size() == 1);  // r(1,1) = 1
        CHECK(kr.towers[0].height == 1);
    }
    SUBCASE("trivial ambient partition leaves towers unchanged") {
        KRPartition base = build_towers(s, ClopenSet{2, {0}});
        KRPartition kr = refine(s, trivial_partition(s), 1, ClopenSet{2, {0}});
        REQUIRE(kr.towers.size() == base.towers.size());
        for (std::size_t i = 0; i < kr.towers.size(); ++i)
            CHECK(sets_equal(*s.space, kr.towers[i].base, base.towers[i].base));
    }
    SUBCASE("two-stage refinement is finer stage over stage") {
        auto stages = kr_stages(s, zero_chain(3));
        REQUIRE(stages.size() == 3);
        for (std::size_t n = 1; n < stages.size(); ++n)
            for (const Tower& t : stages[n].towers)
                for (const ClopenSet& f : t.floors) {
                    bool inside_one = false;
                    for (const Tower& pt : stages[n - 1].towers)
                        for (const ClopenSet& pf : pt.floors)
                            inside_one = inside_one || subset(*s.space, f, pf);
                    CHECK(inside_one);
                }
    }
}

TEST_CASE("extraction over the zero-cylinder chain gives the dyadic diagram") {
    BratteliSystem s = odometer_system(12);
    for (int n : {1, 4, 7}) {
        Extraction ex = extract_diagram(s, kr_stages(s, zero_chain(n)));
        CHECK(validate(ex.diagram).empty());
        CHECK(total_paths(ex.diagram, n) == (std::uint64_t{1} << n));
    }
}

TEST_CASE("extraction of a single trivial stage") {
    BratteliSystem s = odometer_system(6);
    KRPartition kr = build_towers(s, s.space->whole_space());
    Extraction ex = extract_diagram(s, {kr});
    CHECK(ex.diagram.depth() == 1);
    CHECK(ex.diagram.level(1).edges.size() == 1);
    CHECK(verify_conjugacy(s, ex, 1).verified);
}

TEST_CASE("verify_conjugacy on the odometer extraction") {
    BratteliSystem s = odometer_system(12);
    Extraction ex = extract_diagram(s, kr_stages(s, zero_chain(8)));
    ConjugacyCheck check = verify_conjugacy(s, ex, 8);
    CHECK(check.verified);
    CHECK(check.pairs_checked == 255);
}

TEST_CASE("mutated edge labels are caught") {
    BratteliSystem s = odometer_system(10);
    Extraction ex = extract_diagram(s, kr_stages(s, zero_chain(5)));
    REQUIRE(ex.edge_labels.size() >= 3);
    // swap the labels of the two edges at level 3: psi now reads the wrong
    // floors
    auto broken = ex;
    std::swap(broken.edge_labels[2][0], broken.edge_labels[2][1]);
    ConjugacyCheck check = verify_conjugacy(s, broken, 5);
    CHECK(!check.verified);
    CHECK(!check.counterexample.empty());
}

TEST_CASE("extraction is independent of the generating chain") {
    BratteliSystem s = odometer_system(12);
    // chain 1: [0^n]; chain 2: [0^{2n}]
    Extraction ex1 = extract_diagram(s, kr_stages(s, zero_chain(6)));
    std::vector<ClopenSet> fast;
    for (Level lv = 2; lv <= 10; lv += 2) fast.push_back(ClopenSet{lv, {0}});
    Extraction ex2 = extract_diagram(s, kr_stages(s, fast));
    CHECK(verify_conjugacy(s, ex1, 6).verified);
    CHECK(verify_conjugacy(s, ex2, 5).verified);
    // the second telescopes the first
    EquivalenceVerdict v = order_equivalent_bounded(
        telescope(ex1.diagram, {2, 4, 6}), telescope(ex2.diagram, {1, 2, 3}), 3);
    CHECK(v.status == EquivStatus::Equivalent);
}

TEST_CASE("extraction of the double-sequence system verifies") {
    BratteliSystem s = nonsemisat_bratteli(12);
    std::vector<ClopenSet> chain;
    for (Level lv = 1; lv <= 6; ++lv) chain.push_back(s.xmin_at(lv));
    Extraction ex = extract_diagram(s, kr_stages(s, chain));
    CHECK(validate(ex.diagram).empty());
    ConjugacyCheck check = verify_conjugacy(s, ex, 6);
    CHECK(check.verified);
    // level-n cell counts reappear as path counts
    CHECK(total_paths(ex.diagram, 6) == s.space->cell_count(6));
}

TEST_CASE("maximal edge labels satisfy the height identity") {
    BratteliSystem s = odometer_system(12);
    Extraction ex = extract_diagram(s, kr_stages(s, zero_chain(6)));
    KRPartition prev = trivial_partition(s);
    for (Level n = 1; n <= 6; ++n) {
        const OrderedDiagram& d = ex.diagram.level(n);
        const KRPartition& cur = ex.stages[static_cast<std::size_t>(n) - 1];
        for (VertexId w = 0; w < d.ranges.size(); ++w) {
            EdgeId m = max_edge(d, w);
            int label = ex.edge_labels[static_cast<std::size_t>(n) - 1][m];
            int expect = cur.towers[w].height - prev.towers[d.edges[m].source].height;
            CHECK(label == expect);
            EdgeId mn = min_edge(d, w);
            CHECK(ex.edge_labels[static_cast<std::size_t>(n) - 1][mn] == 0);
        }
        prev = cur;
    }
}
