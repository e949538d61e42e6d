// Shared helpers for the test suites: oracles and generator utilities kept
// independent of the implementation paths they check.

#pragma once

#include <optional>
#include <random>
#include <vector>

#include "vershik/builtins.hh"
#include "vershik/nested.hh"
#include "vershik/systems.hh"
#include "vershik/versik.hh"

namespace vtest {

using namespace vershik;

// Little-endian binary increment with carry; nullopt on all-ones.
inline std::optional<std::vector<int>> increment_word(std::vector<int> w) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] == 0) {
            w[i] = 1;
            for (std::size_t j = 0; j < i; ++j) w[j] = 0;
            return w;
        }
    }
    return std::nullopt;
}

inline std::vector<int> path_word(const BratteliDiagram& b, const FinitePath& p) {
    std::vector<int> w;
    for (Level lv = 1; lv <= p.depth(); ++lv)
        w.push_back(b.level(lv).edges[p.edges[static_cast<std::size_t>(lv) - 1]].order_index);
    return w;
}

inline FinitePath word_path(const std::vector<int>& w) {
    FinitePath p;
    for (int x : w) p.edges.push_back(static_cast<EdgeId>(x));
    return p;
}

// Random valid ordered Bratteli diagram with a stationary tail level and a
// bounded total path count.
inline BratteliDiagram random_diagram(std::mt19937_64& rng, Level depth = 8,
                                      std::uint64_t max_paths = 2048) {
    for (;;) {
        BratteliDiagram b;
        int prefix = 2 + static_cast<int>(rng() % 2);
        std::vector<std::size_t> sizes{1};
        for (int i = 1; i < prefix; ++i) sizes.push_back(1 + rng() % 3);
        sizes.push_back(sizes.back());  // square tail level
        b.vertex_levels.push_back({"r"});
        for (std::size_t n = 1; n < sizes.size(); ++n) {
            std::vector<std::string> names;
            for (std::size_t v = 0; v < sizes[n]; ++v)
                names.push_back("v" + std::to_string(n) + "_" + std::to_string(v));
            b.vertex_levels.push_back(names);
        }
        // tail level shares the shape of the one before it so period 1 closes
        b.vertex_levels.back() = b.vertex_levels[b.vertex_levels.size() - 2];
        bool ok = true;
        for (std::size_t n = 1; n < b.vertex_levels.size() && ok; ++n) {
            OrderedDiagram d;
            d.sources = b.vertex_levels[n - 1];
            d.ranges = b.vertex_levels[n];
            std::vector<bool> src_used(d.sources.size(), false);
            for (VertexId w = 0; w < d.ranges.size(); ++w) {
                int fib = 1 + static_cast<int>(rng() % 2);
                for (int i = 0; i < fib; ++i) {
                    VertexId s = static_cast<VertexId>(rng() % d.sources.size());
                    src_used[s] = true;
                    d.edges.push_back({s, w, i});
                }
            }
            for (VertexId s = 0; s < d.sources.size(); ++s)
                if (!src_used[s]) {
                    VertexId w = static_cast<VertexId>(rng() % d.ranges.size());
                    int pos = 0;
                    for (const auto& e : d.edges)
                        if (e.range == w) ++pos;
                    d.edges.push_back({s, w, pos});
                }
            ok = validate(d).empty();
            b.edge_levels.push_back(std::move(d));
        }
        if (!ok) continue;
        b.stationary_period = 1;
        if (!validate(b).empty()) continue;
        BratteliDiagram m = materialize(b, depth);
        if (total_paths(m, depth) > max_paths) continue;
        return m;
    }
}

// Constant space of isolated points p_0..p_{n-1}; every level repeats them.
inline SpacePtr finite_point_space(std::size_t n, Level depth) {
    SpaceBuilder sb;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("p" + std::to_string(i));
    sb.root_level(names);
    std::vector<CellId> parents(n);
    for (CellId c = 0; c < n; ++c) parents[c] = c;
    for (Level lv = 2; lv <= depth; ++lv) sb.level(names, parents);
    sb.tail_rule("stay", [](Level, CellId c) { return c; });
    return sb.build();
}

// Nested sequence of shifts along `copies` disjoint chains of length k:
// phi_n moves n steps forward, empty for n >= k.
inline NestedSequence finite_chain_nested(int k, int copies, Level depth) {
    std::size_t n = static_cast<std::size_t>(k * copies);
    SpacePtr space = finite_point_space(n, depth);
    std::vector<PartialHomeo> maps;
    for (int step = 1; step < k; ++step) {
        auto fwd = [k, step](Level, CellId c) -> CellImage {
            int pos = static_cast<int>(c) % k;
            if (pos + step >= k) return CellImage::outside();
            return CellImage::resolved(c + static_cast<CellId>(step));
        };
        auto bwd = [k, step](Level, CellId c) -> CellImage {
            int pos = static_cast<int>(c) % k;
            if (pos - step < 0) return CellImage::outside();
            return CellImage::resolved(c - static_cast<CellId>(step));
        };
        auto dex = [k, step, n](Level lv) {
            ClopenSet s{lv, {}};
            for (CellId c = 0; c < n; ++c)
                if (static_cast<int>(c) % k + step >= k) s.cells.push_back(c);
            return s;
        };
        auto rex = [k, step, n](Level lv) {
            ClopenSet s{lv, {}};
            for (CellId c = 0; c < n; ++c)
                if (static_cast<int>(c) % k - step < 0) s.cells.push_back(c);
            return s;
        };
        maps.push_back(PartialHomeo(space, std::make_shared<FunctionProvider>(fwd, bwd, dex, rex)));
    }
    return make_nested(space, std::move(maps), "empty");
}

// phi is the identity on the x1 = 1 half and an adding machine on the tail
// coordinates of the x1 = 0 half: two orbit components, one of them full of
// fixed cells.
inline BratteliSystem half_identity_system(Level depth) {
    BratteliSystem s;
    s.space = binary_space(depth);
    auto rest_mask = [](Level lv) { return (std::uint64_t{1} << (lv - 1)) - 1; };
    auto fwd = [rest_mask](Level lv, CellId c) -> CellImage {
        if (c & 1) return CellImage::resolved(c);  // identity component
        std::uint64_t rest = c >> 1;
        if (rest == rest_mask(lv)) return CellImage::unresolved();
        std::uint64_t next = (rest + 1) & rest_mask(lv);
        return CellImage::resolved(static_cast<CellId>(next << 1));
    };
    auto bwd = [rest_mask](Level lv, CellId c) -> CellImage {
        if (c & 1) return CellImage::resolved(c);
        std::uint64_t rest = c >> 1;
        if (rest == 0) return CellImage::unresolved();
        std::uint64_t prev = (rest - 1) & rest_mask(lv);
        return CellImage::resolved(static_cast<CellId>(prev << 1));
    };
    auto dex = [rest_mask](Level lv) {
        return ClopenSet{lv, {static_cast<CellId>(rest_mask(lv) << 1)}};
    };
    auto rex = [](Level lv) {
        (void)lv;
        return ClopenSet{lv, {0}};
    };
    s.phi = PartialHomeo(s.space, std::make_shared<FunctionProvider>(fwd, bwd, dex, rex));
    for (Level lv = 1; lv <= depth; ++lv) {
        s.xmax.push_back(dex(lv));
        s.xmin.push_back(rex(lv));
    }
    return s;
}

// One cell per level, phi the identity, nothing excluded: a fixed point at
// cell level.
inline BratteliSystem one_cell_identity_system(Level depth) {
    BratteliSystem s;
    SpaceBuilder sb;
    sb.root_level({"x"});
    for (Level lv = 2; lv <= depth; ++lv) sb.level({"x"}, {0});
    sb.tail_rule("stay", [](Level, CellId c) { return c; });
    s.space = sb.build();
    s.phi = identity_homeo(s.space);
    for (Level lv = 1; lv <= depth; ++lv) {
        s.xmax.push_back(ClopenSet{lv, {}});
        s.xmin.push_back(ClopenSet{lv, {}});
    }
    return s;
}

// Stationary diagram with two independent loops after the root: two maximal
// and two minimal infinite paths.
inline BratteliDiagram two_loop_diagram(Level depth) {
    BratteliDiagram b;
    b.vertex_levels.push_back({"r"});
    b.vertex_levels.push_back({"a", "b"});
    OrderedDiagram first;
    first.sources = {"r"};
    first.ranges = {"a", "b"};
    first.edges = {{0, 0, 0}, {0, 1, 0}};
    b.edge_levels.push_back(first);
    OrderedDiagram loop;
    loop.sources = {"a", "b"};
    loop.ranges = {"a", "b"};
    loop.edges = {{0, 0, 0}, {0, 0, 1}, {1, 1, 0}, {1, 1, 1}};
    for (Level lv = 2; lv <= depth; ++lv) {
        b.edge_levels.push_back(loop);
        b.vertex_levels.push_back({"a", "b"});
    }
    b.stationary_period = 1;
    return b;
}

}  // namespace vtest
