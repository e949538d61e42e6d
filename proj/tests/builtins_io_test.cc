#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hh"
#include "vershik/builtins.hh"
#include "vershik/dot.hh"
#include "vershik/io.hh"
#include "vershik/towers.hh"

using namespace vershik;
using namespace vtest;

TEST_CASE("catalog objects pass their validators") {
    for (const std::string& name : builtin_names()) {
        BuiltinObject o = build_builtin(name, 7);
        if (o.kind == "diagram") CHECK(validate(*o.diagram).empty());
        if (o.kind == "system") CHECK(validate_system(*o.system).empty());
        if (o.kind == "nested") CHECK(validate_nested(*o.nested).empty());
    }
    CHECK_THROWS_AS(build_builtin("no_such_thing", 6), PreconditionError);
}

TEST_CASE("dyadic diagram path counts") {
    BratteliDiagram b = dyadic_diagram(3);
    CHECK(enumerate_paths(b, 3).size() == 8);
}

TEST_CASE("odometer with the all-ones maximal point has the all-zeros minimal point") {
    BratteliSystem s = odometer_system(8, -1);
    const SymbolicSpace& sp = *s.space;
    Point zero = dyadic_point(sp, 0);
    for (Level lv = 1; lv <= 8; ++lv) CHECK(s.xmin_at(lv).contains(sp.cell_at(zero, lv)));
    Point ones = dyadic_point(sp, -1);
    for (Level lv = 1; lv <= 8; ++lv) CHECK(s.xmax_at(lv).contains(sp.cell_at(ones, lv)));
}

TEST_CASE("the interleaving sequence maps (0,1) to (0,2) through phi_2") {
    NestedSequence n = nonsemisat_nested(8);
    const SymbolicSpace& sp = *n.space;
    Point lim1 = nonsemisat_limit(sp, 1);
    PhiResult r = phi(n, lim1, 4);
    CHECK(r.k == 2);
    CHECK(sp.points_equal(r.value, nonsemisat_limit(sp, 2)));
}

TEST_CASE("diagram files round-trip") {
    BratteliDiagram b = dyadic_diagram(5);
    std::string text = emit_diagram(b);
    BratteliDiagram parsed = parse_diagram(text);
    CHECK(emit_diagram(parsed) == text);
    CHECK(parsed.stationary_period == 1);
    std::mt19937_64 rng(3);
    for (int it = 0; it < 5; ++it) {
        BratteliDiagram r = random_diagram(rng, 5);
        std::string t2 = emit_diagram(r);
        CHECK(emit_diagram(parse_diagram(t2)) == t2);
    }
}

TEST_CASE("system files round-trip at the emitted resolution") {
    BratteliSystem s = odometer_system(5);
    std::string text = emit_system(s, 5);
    BratteliSystem parsed = parse_system(text);
    CHECK(emit_system(parsed, 5) == text);
    CHECK(validate_system(parsed).empty());
    // the parsed system computes the same towers
    KRPartition kr = build_towers(parsed, ClopenSet{1, {0}});
    CHECK(kr.towers.size() == 1);
    CHECK(kr.towers[0].height == 1);
}

TEST_CASE("nested files round-trip at the emitted resolution") {
    NestedSequence n = nonsemisat_nested(6);
    std::string text = emit_nested(n, 6);
    NestedSequence parsed = parse_nested(text);
    CHECK(emit_nested(parsed, 6) == text);
    CHECK(validate_nested(parsed).empty());
    CHECK(parsed.rule == "odd-even-powers");

    NestedSequence dh = dh_nested(6);
    std::string t2 = emit_nested(dh, 6);
    NestedSequence p2 = parse_nested(t2);
    CHECK(emit_nested(p2, 6) == t2);
    CHECK(p2.rule == "dh-powers");
}

TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(parse_diagram("bogus\n"), ParseError);
    CHECK_THROWS_AS(parse_diagram("bd\nlevels 1\nlevel 0 r\nlevel 1 v\nedge 1 r w 0\n"),
                    ParseError);
    CHECK_THROWS_AS(parse_system("sys\nspace depth 1\nlevel 2 a\n"), ParseError);
    CHECK_THROWS_AS(parse_nested("ns\nspace depth 1\nlevel 1 a\nrule empty\n"), ParseError);
}

TEST_CASE("dot export mentions every vertex and edge label") {
    BratteliDiagram b = dyadic_diagram(3);
    std::string dot = to_dot(b);
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("rank=same") != std::string::npos);
    CHECK(dot.find("label=\"1\"") != std::string::npos);
}
