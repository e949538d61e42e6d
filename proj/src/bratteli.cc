#include "vershik/bratteli.hh"

#include <algorithm>
#include <functional>
#include <numeric>

namespace vershik {

std::vector<EdgeId> fiber(const OrderedDiagram& d, VertexId range) {
    std::vector<EdgeId> out;
    for (EdgeId e = 0; e < d.edges.size(); ++e)
        if (d.edges[e].range == range) out.push_back(e);
    std::sort(out.begin(), out.end(), [&](EdgeId a, EdgeId b) {
        return d.edges[a].order_index < d.edges[b].order_index;
    });
    return out;
}

EdgeId min_edge(const OrderedDiagram& d, VertexId range) { return fiber(d, range).front(); }
EdgeId max_edge(const OrderedDiagram& d, VertexId range) { return fiber(d, range).back(); }

std::vector<std::string> validate(const OrderedDiagram& d) {
    std::vector<std::string> bad;
    if (d.sources.empty()) bad.push_back("empty source vertex set");
    if (d.ranges.empty()) bad.push_back("empty range vertex set");
    std::vector<bool> src_hit(d.sources.size(), false), rng_hit(d.ranges.size(), false);
    for (const auto& e : d.edges) {
        if (e.source >= d.sources.size() || e.range >= d.ranges.size()) {
            bad.push_back("edge endpoint out of range");
            return bad;
        }
        src_hit[e.source] = true;
        rng_hit[e.range] = true;
    }
    for (VertexId v = 0; v < d.sources.size(); ++v)
        if (!src_hit[v]) bad.push_back("s not surjective at vertex " + d.sources[v]);
    for (VertexId w = 0; w < d.ranges.size(); ++w)
        if (!rng_hit[w]) bad.push_back("r not surjective at vertex " + d.ranges[w]);
    for (VertexId w = 0; w < d.ranges.size(); ++w) {
        auto fb = fiber(d, w);
        for (std::size_t i = 0; i < fb.size(); ++i)
            if (d.edges[fb[i]].order_index != static_cast<int>(i)) {
                bad.push_back("fiber of " + d.ranges[w] + " is not ordered 0.." +
                              std::to_string(fb.size() - 1));
                break;
            }
    }
    return bad;
}

std::vector<std::string> validate(const BratteliDiagram& b) {
    std::vector<std::string> bad;
    if (b.vertex_levels.empty() || b.vertex_levels[0].size() != 1)
        bad.push_back("V_0 must be a singleton");
    if (b.vertex_levels.size() != b.edge_levels.size() + 1)
        bad.push_back("vertex/edge level counts disagree");
    for (Level n = 1; n <= b.depth() && bad.empty(); ++n) {
        const OrderedDiagram& d = b.level(n);
        if (d.sources != b.vertex_levels[static_cast<std::size_t>(n) - 1] ||
            d.ranges != b.vertex_levels[static_cast<std::size_t>(n)])
            bad.push_back("level " + std::to_string(n) + ": vertex sets disagree with diagram");
        for (const auto& v : validate(d)) bad.push_back("level " + std::to_string(n) + ": " + v);
    }
    if (b.stationary_period > 0) {
        if (b.stationary_period > b.depth())
            bad.push_back("stationary period exceeds depth");
        else if (b.vertex_levels.back() !=
                 b.vertex_levels[b.vertex_levels.size() - 1 - static_cast<std::size_t>(b.stationary_period)])
            bad.push_back("stationary extension does not close up");
    }
    return bad;
}

BratteliDiagram materialize(const BratteliDiagram& b, Level depth) {
    if (depth <= b.depth()) return b;
    if (!b.stationary())
        throw ResolutionExhausted("diagram has depth " + std::to_string(b.depth()) +
                                  " and no stationary extension");
    BratteliDiagram out = b;
    std::size_t p = static_cast<std::size_t>(b.stationary_period);
    std::size_t base = b.edge_levels.size() - p;
    while (out.depth() < depth) {
        std::size_t idx = base + (static_cast<std::size_t>(out.depth()) - base) % p;
        out.edge_levels.push_back(b.edge_levels[idx]);
        out.vertex_levels.push_back(out.edge_levels.back().ranges);
    }
    return out;
}

OrderedDiagram compose(const OrderedDiagram& e, const OrderedDiagram& f) {
    if (e.ranges != f.sources) throw LevelMismatch("compose: range of E != source of F");
    OrderedDiagram out;
    out.sources = e.sources;
    out.ranges = f.ranges;
    // pairs (a, b) into w, ordered b-major then a
    for (VertexId w = 0; w < f.ranges.size(); ++w) {
        int pos = 0;
        for (EdgeId bf : fiber(f, w)) {
            VertexId mid = f.edges[bf].source;
            for (EdgeId ae : fiber(e, mid))
                out.edges.push_back({e.edges[ae].source, w, pos++});
        }
    }
    return out;
}

OrderedDiagram composite_range(const BratteliDiagram& b, Level from, Level to) {
    if (from < 0 || from >= to || to > b.depth())
        throw BadCuts("composite_range: bad bounds");
    OrderedDiagram acc = b.level(from + 1);
    for (Level n = from + 2; n <= to; ++n) acc = compose(acc, b.level(n));
    return acc;
}

BratteliDiagram telescope(const BratteliDiagram& b, const std::vector<Level>& cuts) {
    if (cuts.empty()) throw BadCuts("no cut levels");
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        if (cuts[i] < 1 || cuts[i] > b.depth()) throw BadCuts("cut out of range");
        if (i > 0 && cuts[i] <= cuts[i - 1]) throw BadCuts("cuts not increasing");
    }
    BratteliDiagram out;
    out.vertex_levels.push_back(b.vertex_levels[0]);
    Level prev = 0;
    for (Level c : cuts) {
        out.edge_levels.push_back(composite_range(b, prev, c));
        out.vertex_levels.push_back(b.vertex_levels[static_cast<std::size_t>(c)]);
        prev = c;
    }
    return out;
}

std::vector<std::uint64_t> path_counts(const BratteliDiagram& b, Level n) {
    std::vector<std::uint64_t> cnt{1};
    for (Level lv = 1; lv <= n; ++lv) {
        const OrderedDiagram& d = b.level(lv);
        std::vector<std::uint64_t> nxt(d.ranges.size(), 0);
        for (const auto& e : d.edges) nxt[e.range] += cnt[e.source];
        cnt = std::move(nxt);
    }
    return cnt;
}

std::uint64_t total_paths(const BratteliDiagram& b, Level n) {
    auto c = path_counts(b, n);
    return std::accumulate(c.begin(), c.end(), std::uint64_t{0});
}

// --- order isomorphism ----------------------------------------------------

namespace {

bool try_range_map(const OrderedDiagram& d1, const OrderedDiagram& d2,
                   const std::vector<VertexId>& rng_map,
                   const std::optional<std::vector<VertexId>>& fixed_sources, OrderIso& out) {
    std::vector<VertexId> src_map(d1.sources.size(), static_cast<VertexId>(-1));
    std::vector<bool> src_used(d2.sources.size(), false);
    if (fixed_sources) {
        src_map = *fixed_sources;
        for (VertexId v : src_map) {
            if (v >= d2.sources.size() || src_used[v]) return false;
            src_used[v] = true;
        }
    }
    std::vector<EdgeId> edge_map(d1.edges.size(), static_cast<EdgeId>(-1));
    for (VertexId w = 0; w < d1.ranges.size(); ++w) {
        auto f1 = fiber(d1, w);
        auto f2 = fiber(d2, rng_map[w]);
        if (f1.size() != f2.size()) return false;
        for (std::size_t t = 0; t < f1.size(); ++t) {
            VertexId s1 = d1.edges[f1[t]].source;
            VertexId s2 = d2.edges[f2[t]].source;
            if (src_map[s1] == static_cast<VertexId>(-1)) {
                if (src_used[s2]) return false;
                src_map[s1] = s2;
                src_used[s2] = true;
            } else if (src_map[s1] != s2) {
                return false;
            }
            edge_map[f1[t]] = f2[t];
        }
    }
    // s is surjective, so every source was constrained; require a bijection
    for (VertexId v = 0; v < d1.sources.size(); ++v)
        if (src_map[v] == static_cast<VertexId>(-1)) return false;
    out.source_map = std::move(src_map);
    out.range_map = rng_map;
    out.edge_map = std::move(edge_map);
    return true;
}

bool search_range_map(const OrderedDiagram& d1, const OrderedDiagram& d2,
                      const std::optional<std::vector<VertexId>>& fixed_sources,
                      const std::optional<std::vector<VertexId>>& fixed_ranges,
                      std::vector<VertexId>& rng_map, std::vector<bool>& used, VertexId at,
                      OrderIso& out) {
    if (at == d1.ranges.size()) return try_range_map(d1, d2, rng_map, fixed_sources, out);
    auto f1 = fiber(d1, at);
    for (VertexId w2 = 0; w2 < d2.ranges.size(); ++w2) {
        if (used[w2]) continue;
        if (fixed_ranges && (*fixed_ranges)[at] != w2) continue;
        if (fiber(d2, w2).size() != f1.size()) continue;
        rng_map[at] = w2;
        used[w2] = true;
        if (search_range_map(d1, d2, fixed_sources, fixed_ranges, rng_map, used, at + 1, out))
            return true;
        used[w2] = false;
    }
    return false;
}

}  // namespace

std::optional<OrderIso> order_isomorphic(const OrderedDiagram& d1, const OrderedDiagram& d2,
                                         const std::optional<std::vector<VertexId>>& fixed_sources,
                                         const std::optional<std::vector<VertexId>>& fixed_ranges) {
    if (d1.sources.size() != d2.sources.size() || d1.ranges.size() != d2.ranges.size() ||
        d1.edges.size() != d2.edges.size())
        return std::nullopt;
    std::vector<VertexId> rng_map(d1.ranges.size(), 0);
    std::vector<bool> used(d2.ranges.size(), false);
    OrderIso out;
    if (search_range_map(d1, d2, fixed_sources, fixed_ranges, rng_map, used, 0, out)) return out;
    return std::nullopt;
}

namespace {

bool diagram_iso_from(const BratteliDiagram& b1, const BratteliDiagram& b2, Level at,
                      std::vector<std::vector<VertexId>>& maps) {
    if (at > b1.depth()) return true;
    const OrderedDiagram& d1 = b1.level(at);
    const OrderedDiagram& d2 = b2.level(at);
    if (d1.ranges.size() != d2.ranges.size() || d1.edges.size() != d2.edges.size()) return false;
    // enumerate range bijections consistent with the fixed source bijection
    std::vector<VertexId> rng(d1.ranges.size(), static_cast<VertexId>(-1));
    std::vector<bool> used(d2.ranges.size(), false);
    std::vector<VertexId> fixed_src = maps[static_cast<std::size_t>(at) - 1];

    std::function<bool(VertexId)> rec = [&](VertexId w) -> bool {
        if (w == d1.ranges.size()) {
            OrderIso iso;
            if (!try_range_map(d1, d2, rng, fixed_src, iso)) return false;
            maps.push_back(rng);
            if (diagram_iso_from(b1, b2, at + 1, maps)) return true;
            maps.pop_back();
            return false;
        }
        auto f1 = fiber(d1, w);
        for (VertexId w2 = 0; w2 < d2.ranges.size(); ++w2) {
            if (used[w2] || fiber(d2, w2).size() != f1.size()) continue;
            rng[w] = w2;
            used[w2] = true;
            if (rec(w + 1)) return true;
            used[w2] = false;
        }
        return false;
    };
    return rec(0);
}

}  // namespace

std::optional<std::vector<std::vector<VertexId>>> diagram_isomorphic(const BratteliDiagram& b1,
                                                                     const BratteliDiagram& b2) {
    if (b1.depth() != b2.depth()) return std::nullopt;
    std::vector<std::vector<VertexId>> maps;
    maps.push_back({0});  // V_0 -> V_0
    if (diagram_iso_from(b1, b2, 1, maps)) return maps;
    return std::nullopt;
}

// --- stationary extreme-path counts ----------------------------------------

namespace {

std::uint64_t extreme_path_count(const BratteliDiagram& b, bool maximal) {
    if (!b.stationary()) throw PreconditionError("extreme path count needs a stationary diagram");
    std::size_t p = static_cast<std::size_t>(b.stationary_period);
    std::size_t base = b.edge_levels.size() - p;  // levels base+1 .. base+p repeat
    std::size_t nv = b.vertex_levels.back().size();
    // one-period predecessor map g : V_{base+p} -> V_{base} (same vertex set)
    std::vector<VertexId> g(nv);
    for (VertexId v = 0; v < nv; ++v) {
        VertexId cur = v;
        for (std::size_t i = b.edge_levels.size(); i > base; --i) {
            const OrderedDiagram& d = b.edge_levels[i - 1];
            EdgeId e = maximal ? max_edge(d, cur) : min_edge(d, cur);
            cur = d.edges[e].source;
        }
        g[v] = cur;
    }
    // eventual image of g
    std::vector<bool> in(nv, true);
    for (std::size_t it = 0; it < nv; ++it) {
        std::vector<bool> nxt(nv, false);
        for (VertexId v = 0; v < nv; ++v)
            if (in[v]) nxt[g[v]] = true;
        in = std::move(nxt);
    }
    return static_cast<std::uint64_t>(std::count(in.begin(), in.end(), true));
}

}  // namespace

std::uint64_t max_path_count(const BratteliDiagram& b) { return extreme_path_count(b, true); }
std::uint64_t min_path_count(const BratteliDiagram& b) { return extreme_path_count(b, false); }

// --- bounded order equivalence ----------------------------------------------

namespace {

OrderedDiagram identity_like(const std::vector<std::string>& from, const std::vector<std::string>& to,
                             const std::vector<VertexId>& map) {
    OrderedDiagram d;
    d.sources = from;
    d.ranges = to;
    for (VertexId v = 0; v < from.size(); ++v) d.edges.push_back({v, map[v], 0});
    return d;
}

IntertwinerWitness build_witness(const BratteliDiagram& b1, const BratteliDiagram& b2,
                                 const std::vector<Level>& cuts1, const std::vector<Level>& cuts2,
                                 const std::vector<std::vector<VertexId>>& isos) {
    IntertwinerWitness w;
    w.cuts1 = cuts1;
    w.cuts2 = cuts2;
    // isos[0] is the root map; cut k uses isos[k]
    for (std::size_t k = 1; k < isos.size(); ++k) w.isos.push_back(isos[k]);
    std::size_t kk = cuts1.size();
    for (std::size_t k = 0; k < kk; ++k) {
        const auto& v1 = b1.vertex_levels[static_cast<std::size_t>(cuts1[k])];
        const auto& v2 = b2.vertex_levels[static_cast<std::size_t>(cuts2[k])];
        w.eprime.push_back(identity_like(v1, v2, isos[k + 1]));
    }
    for (std::size_t k = 0; k + 1 < kk; ++k) {
        // composite of b1 between cuts k and k+1, sources pulled back to b2
        // vertices through the cut-k identification
        OrderedDiagram f = composite_range(b1, cuts1[k], cuts1[k + 1]);
        f.sources = b2.vertex_levels[static_cast<std::size_t>(cuts2[k])];
        for (auto& e : f.edges) e.source = isos[k + 1][e.source];
        w.fprime.push_back(std::move(f));
    }
    return w;
}

}  // namespace

bool replay_witness(const BratteliDiagram& b1, const BratteliDiagram& b2,
                    const IntertwinerWitness& w) {
    std::size_t kk = w.cuts1.size();
    if (w.cuts2.size() != kk || w.eprime.size() != kk || w.fprime.size() + 1 != kk) return false;
    for (std::size_t k = 0; k + 1 < kk; ++k) {
        OrderedDiagram lhs1 = compose(w.eprime[k], w.fprime[k]);
        OrderedDiagram rhs1 = composite_range(b1, w.cuts1[k], w.cuts1[k + 1]);
        if (!order_isomorphic(lhs1, rhs1)) return false;
        OrderedDiagram lhs2 = compose(w.fprime[k], w.eprime[k + 1]);
        OrderedDiagram rhs2 = composite_range(b2, w.cuts2[k], w.cuts2[k + 1]);
        if (!order_isomorphic(lhs2, rhs2)) return false;
    }
    return true;
}

namespace {

void increasing_subsets(Level n, int k, std::vector<std::vector<Level>>& out) {
    // strictly increasing k-subsets of 1..n that contain n
    std::vector<Level> cur;
    std::function<void(Level, int)> rec = [&](Level from, int left) {
        if (left == 1) {
            cur.push_back(n);
            out.push_back(cur);
            cur.pop_back();
            return;
        }
        for (Level v = from; v <= n - left + 1; ++v) {
            cur.push_back(v);
            rec(v + 1, left - 1);
            cur.pop_back();
        }
    };
    if (k >= 1 && n >= k) rec(1, k);
}

}  // namespace

EquivalenceVerdict order_equivalent_bounded(const BratteliDiagram& b1, const BratteliDiagram& b2,
                                            int depth_bound) {
    if (!validate(b1).empty() || !validate(b2).empty())
        throw PreconditionError("order_equivalent_bounded: diagrams must validate");
    EquivalenceVerdict out;
    if (b1.stationary() && b2.stationary()) {
        std::uint64_t m1 = max_path_count(b1), m2 = max_path_count(b2);
        if (m1 != m2) {
            out.status = EquivStatus::Inequivalent;
            out.certificate = "|X_max| differs: " + std::to_string(m1) + " vs " + std::to_string(m2);
            return out;
        }
        std::uint64_t n1 = min_path_count(b1), n2 = min_path_count(b2);
        if (n1 != n2) {
            out.status = EquivStatus::Inequivalent;
            out.certificate = "|X_min| differs: " + std::to_string(n1) + " vs " + std::to_string(n2);
            return out;
        }
    }
    for (int k = depth_bound; k >= 1; --k) {
        std::vector<std::vector<Level>> cs1, cs2;
        increasing_subsets(b1.depth(), k, cs1);
        increasing_subsets(b2.depth(), k, cs2);
        struct Cand {
            std::vector<Level> cuts;
            BratteliDiagram tel;
            std::vector<std::uint64_t> paths;
        };
        std::vector<Cand> t2s;
        for (const auto& c2 : cs2) {
            Cand cd{c2, telescope(b2, c2), {}};
            for (std::size_t i = 1; i <= c2.size(); ++i)
                cd.paths.push_back(total_paths(cd.tel, static_cast<Level>(i)));
            t2s.push_back(std::move(cd));
        }
        for (const auto& c1 : cs1) {
            BratteliDiagram t1 = telescope(b1, c1);
            std::vector<std::uint64_t> p1;
            for (std::size_t i = 1; i <= c1.size(); ++i)
                p1.push_back(total_paths(t1, static_cast<Level>(i)));
            for (const auto& cd : t2s) {
                if (cd.paths != p1) continue;
                bool sizes_ok = true;
                for (std::size_t i = 0; i < c1.size() && sizes_ok; ++i)
                    sizes_ok = t1.vertex_levels[i + 1].size() == cd.tel.vertex_levels[i + 1].size();
                if (!sizes_ok) continue;
                auto isos = diagram_isomorphic(t1, cd.tel);
                if (!isos) continue;
                IntertwinerWitness w = build_witness(b1, b2, c1, cd.cuts, *isos);
                if (!replay_witness(b1, b2, w))
                    throw PreconditionError("internal: witness failed replay");
                out.status = EquivStatus::Equivalent;
                out.witness = std::move(w);
                return out;
            }
        }
    }
    out.status = EquivStatus::Unknown;
    out.exhausted_bound = depth_bound;
    return out;
}

}  // namespace vershik
