#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "support.hh"
#include "vershik/builtins.hh"
#include "vershik/systems.hh"

using namespace vershik;
using namespace vtest;

TEST_CASE("builtin systems validate") {
    CHECK(validate_system(odometer_system(8)).empty());
    CHECK(validate_system(odometer_system(8, 0)).empty());
    CHECK(validate_system(nonsemisat_bratteli(8)).empty());
    CHECK(validate_system(half_identity_system(8)).empty());
    CHECK(validate_system(versik_system(dyadic_diagram(6), 6)).empty());
}

TEST_CASE("forward axiom on the odometer") {
    BratteliSystem s = odometer_system(8);
    SUBCASE("U = [0] covers in one step") {
        CoverageVerdict v = check_axiom_forward(s, ClopenSet{1, {0}}, 16);
        REQUIRE(v.satisfied);
        CHECK(v.steps == 1);
    }
    SUBCASE("U = X covers immediately") {
        CoverageVerdict v = check_axiom_forward(s, s.space->whole_space(), 16);
        REQUIRE(v.satisfied);
        CHECK(v.steps == 0);
    }
    SUBCASE("U below the xmin approximation is rejected") {
        CHECK_THROWS_AS(check_axiom_forward(s, ClopenSet{1, {1}}, 16), PreconditionError);
    }
}

TEST_CASE("backward axiom mirrors the forward one") {
    BratteliSystem s = odometer_system(8);
    CoverageVerdict v = check_axiom_backward(s, ClopenSet{1, {1}}, 16);
    REQUIRE(v.satisfied);
    CHECK(v.steps == 1);
    CHECK(check_axiom_backward(s, s.space->whole_space(), 16).steps == 0);
}

TEST_CASE("a two-component system fails both axioms forever") {
    BratteliSystem s = half_identity_system(8);
    CoverageVerdict fwd = check_axiom_forward(s, s.xmin_at(2), 64);
    CHECK(!fwd.satisfied);
    ClopenSet v = pullback_union_max(s.phi, s.xmin_at(2), s.xmax_at(2));
    CoverageVerdict bwd = check_axiom_backward(s, v, 64);
    CHECK(!bwd.satisfied);
}

TEST_CASE("satisfied bound is monotone in U") {
    BratteliSystem s = odometer_system(8);
    ClopenSet small = s.xmin_at(3);
    ClopenSet bigger = set_union(*s.space, small, ClopenSet{3, {3}});
    CoverageVerdict a = check_axiom_forward(s, small, 64);
    CoverageVerdict b = check_axiom_forward(s, bigger, 64);
    REQUIRE(a.satisfied);
    REQUIRE(b.satisfied);
    CHECK(b.steps <= a.steps);
}

TEST_CASE("axiom equivalence probe finds no disagreements on built-ins") {
    SUBCASE("odometer") {
        BratteliSystem s = odometer_system(7);
        ProbeReport rep = axiom_equivalence_probe(s, 4, 20, 1, 200);
        CHECK(rep.checked >= 50);
        CHECK(rep.agree());
    }
    SUBCASE("double-sequence system") {
        BratteliSystem s = nonsemisat_bratteli(7);
        ProbeReport rep = axiom_equivalence_probe(s, 3, 20, 2, 200);
        CHECK(rep.checked >= 50);
        CHECK(rep.agree());
    }
}

TEST_CASE("conjugacy invariance of the forward verdict") {
    // h = the full adding machine conjugates the base-(-1) system to the
    // base-0 system; verdicts coincide for U and h(U)
    BratteliSystem s1 = odometer_system(8, -1);
    BratteliSystem s2 = odometer_system(8, 0);
    PartialHomeo h = odometer_power(s1.space, 1, {});
    std::mt19937_64 rng(13);
    const SymbolicSpace& sp = *s1.space;
    for (int it = 0; it < 20; ++it) {
        Level lv = 2 + static_cast<Level>(rng() % 3);
        ClopenSet u = deepen(sp, s1.xmin_at(lv), lv);
        for (CellId c = 0; c < sp.cell_count(lv); ++c)
            if (!u.contains(c) && (rng() & 1)) u.cells.push_back(c);
        std::sort(u.cells.begin(), u.cells.end());
        ClopenSet hu = image_clopen(h, u);
        CoverageVerdict v1 = check_axiom_forward(s1, u, 300);
        CoverageVerdict v2 = check_axiom_forward(s2, hu, 300);
        CHECK(v1.satisfied == v2.satisfied);
    }
}

TEST_CASE("detect_periodic") {
    SUBCASE("odometer has no periodic cells") {
        CHECK(!detect_periodic(odometer_system(8), 256));
    }
    SUBCASE("identity on one cell is a fixed point") {
        auto w = detect_periodic(one_cell_identity_system(4), 8);
        REQUIRE(w);
        CHECK(w->period == 1);
    }
    SUBCASE("the half-identity system has a fixed cell") {
        auto w = detect_periodic(half_identity_system(6), 8);
        REQUIRE(w);
        CHECK(w->period == 1);
    }
    SUBCASE("double-sequence system is aperiodic") {
        CHECK(!detect_periodic(nonsemisat_bratteli(8), 64));
    }
}

TEST_CASE("versik systems of valid diagrams pass the axiom checks") {
    std::mt19937_64 rng(37);
    for (int it = 0; it < 10; ++it) {
        BratteliDiagram b = random_diagram(rng, 6, 512);
        BratteliSystem s = versik_system(b, 6);
        CHECK(validate_system(s).empty());
        CoverageVerdict v = check_axiom_forward(s, s.xmin_at(2), 1024);
        CHECK(v.satisfied);
        CHECK(!detect_periodic(s, 64));
    }
}
