#include "vershik/versik.hh"

#include <algorithm>
#include <map>

namespace vershik {

namespace {

std::size_t fiber_size(const BratteliDiagram& b, Level lv, VertexId range) {
    std::size_t n = 0;
    for (const auto& e : b.level(lv).edges)
        if (e.range == range) ++n;
    return n;
}

}  // namespace

bool path_valid(const BratteliDiagram& b, const FinitePath& p) {
    if (p.edges.empty() || p.depth() > b.depth()) return false;
    VertexId at = 0;
    for (Level lv = 1; lv <= p.depth(); ++lv) {
        const OrderedDiagram& d = b.level(lv);
        EdgeId e = p.edges[static_cast<std::size_t>(lv) - 1];
        if (e >= d.edges.size() || d.edges[e].source != at) return false;
        at = d.edges[e].range;
    }
    return true;
}

VertexId end_vertex(const BratteliDiagram& b, const FinitePath& p) {
    const OrderedDiagram& d = b.level(p.depth());
    return d.edges[p.edges.back()].range;
}

bool edge_is_max(const BratteliDiagram& b, Level lv, EdgeId e) {
    const OrderedDiagram& d = b.level(lv);
    return d.edges[e].order_index ==
           static_cast<int>(fiber_size(b, lv, d.edges[e].range)) - 1;
}

bool edge_is_min(const BratteliDiagram& b, Level lv, EdgeId e) {
    return b.level(lv).edges[e].order_index == 0;
}

bool path_all_max(const BratteliDiagram& b, const FinitePath& p) {
    for (Level lv = 1; lv <= p.depth(); ++lv)
        if (!edge_is_max(b, lv, p.edges[static_cast<std::size_t>(lv) - 1])) return false;
    return true;
}

bool path_all_min(const BratteliDiagram& b, const FinitePath& p) {
    for (Level lv = 1; lv <= p.depth(); ++lv)
        if (!edge_is_min(b, lv, p.edges[static_cast<std::size_t>(lv) - 1])) return false;
    return true;
}

FinitePath extreme_path(const BratteliDiagram& b, Level level, VertexId v, bool maximal) {
    FinitePath p;
    p.edges.assign(static_cast<std::size_t>(level), 0);
    VertexId at = v;
    for (Level lv = level; lv >= 1; --lv) {
        const OrderedDiagram& d = b.level(lv);
        EdgeId e = maximal ? max_edge(d, at) : min_edge(d, at);
        p.edges[static_cast<std::size_t>(lv) - 1] = e;
        at = d.edges[e].source;
    }
    return p;
}

namespace {

// Deterministic tail step from vertex v at level lv: the least edge from v
// that is fiber-extreme on the requested side; kNoCell when none exists.
EdgeId tail_step(const BratteliDiagram& b, Level lv, VertexId v, bool maximal) {
    const OrderedDiagram& d = b.level(lv);
    for (EdgeId e = 0; e < d.edges.size(); ++e) {
        if (d.edges[e].source != v) continue;
        bool extreme = maximal ? edge_is_max(b, lv, e) : edge_is_min(b, lv, e);
        if (extreme) return e;
    }
    return kNoCell;
}

}  // namespace

EdgeId edge_at(const BratteliDiagram& b, const PathPoint& x, Level lv) {
    if (lv > b.depth()) throw ResolutionExhausted("edge_at: level beyond materialized depth");
    if (lv <= x.prefix.depth()) return x.prefix.edges[static_cast<std::size_t>(lv) - 1];
    VertexId at = end_vertex(b, x.prefix);
    EdgeId e = kNoCell;
    for (Level i = x.prefix.depth() + 1; i <= lv; ++i) {
        switch (x.tail.kind) {
            case TailKind::Max:
                e = tail_step(b, i, at, true);
                break;
            case TailKind::Min:
                e = tail_step(b, i, at, false);
                break;
            case TailKind::Periodic: {
                std::size_t k = static_cast<std::size_t>(i - x.prefix.depth() - 1) % x.tail.word.size();
                e = x.tail.word[k];
                const OrderedDiagram& d = b.level(i);
                if (e >= d.edges.size() || d.edges[e].source != at) e = kNoCell;
                break;
            }
        }
        if (e == kNoCell)
            throw PreconditionError("edge_at: tail rule inapplicable at level " + std::to_string(i));
        at = b.level(i).edges[e].range;
    }
    return e;
}

bool point_valid(const BratteliDiagram& b, const PathPoint& x) {
    if (!path_valid(b, x.prefix)) return false;
    if (x.tail.kind == TailKind::Periodic && x.tail.word.empty()) return false;
    try {
        edge_at(b, x, b.depth());
    } catch (const std::exception&) {
        return false;
    }
    return true;
}

PathPoint extend_prefix(const BratteliDiagram& b, const PathPoint& x, Level depth) {
    if (depth <= x.prefix.depth()) return x;
    PathPoint out = x;
    Level consumed = depth - x.prefix.depth();
    for (Level lv = x.prefix.depth() + 1; lv <= depth; ++lv)
        out.prefix.edges.push_back(edge_at(b, x, lv));
    if (x.tail.kind == TailKind::Periodic) {
        std::size_t shift = static_cast<std::size_t>(consumed) % x.tail.word.size();
        std::rotate(out.tail.word.begin(),
                    out.tail.word.begin() + static_cast<std::ptrdiff_t>(shift),
                    out.tail.word.end());
    }
    return out;
}

bool path_points_equal(const BratteliDiagram& b, const PathPoint& x, const PathPoint& y) {
    for (Level lv = 1; lv <= b.depth(); ++lv)
        if (edge_at(b, x, lv) != edge_at(b, y, lv)) return false;
    return true;
}

std::optional<FinitePath> successor(const BratteliDiagram& b, const FinitePath& p) {
    Level k = 0;
    for (Level lv = 1; lv <= p.depth(); ++lv)
        if (!edge_is_max(b, lv, p.edges[static_cast<std::size_t>(lv) - 1])) {
            k = lv;
            break;
        }
    if (k == 0) return std::nullopt;
    const OrderedDiagram& d = b.level(k);
    EdgeId ek = p.edges[static_cast<std::size_t>(k) - 1];
    auto fb = fiber(d, d.edges[ek].range);
    EdgeId fk = fb[static_cast<std::size_t>(d.edges[ek].order_index) + 1];
    FinitePath out = p;
    out.edges[static_cast<std::size_t>(k) - 1] = fk;
    if (k > 1) {
        FinitePath head = extreme_path(b, k - 1, d.edges[fk].source, false);
        std::copy(head.edges.begin(), head.edges.end(), out.edges.begin());
    }
    return out;
}

std::optional<FinitePath> predecessor(const BratteliDiagram& b, const FinitePath& p) {
    Level k = 0;
    for (Level lv = 1; lv <= p.depth(); ++lv)
        if (!edge_is_min(b, lv, p.edges[static_cast<std::size_t>(lv) - 1])) {
            k = lv;
            break;
        }
    if (k == 0) return std::nullopt;
    const OrderedDiagram& d = b.level(k);
    EdgeId ek = p.edges[static_cast<std::size_t>(k) - 1];
    auto fb = fiber(d, d.edges[ek].range);
    EdgeId fk = fb[static_cast<std::size_t>(d.edges[ek].order_index) - 1];
    FinitePath out = p;
    out.edges[static_cast<std::size_t>(k) - 1] = fk;
    if (k > 1) {
        FinitePath head = extreme_path(b, k - 1, d.edges[fk].source, true);
        std::copy(head.edges.begin(), head.edges.end(), out.edges.begin());
    }
    return out;
}

namespace {

PathPoint step_point(const BratteliDiagram& b, const PathPoint& x, Level target_depth,
                     bool forward) {
    // least position where the point's edge is not extreme on this side
    Level k = 0;
    for (Level lv = 1; lv <= b.depth(); ++lv) {
        EdgeId e = edge_at(b, x, lv);
        bool extreme = forward ? edge_is_max(b, lv, e) : edge_is_min(b, lv, e);
        if (!extreme) {
            k = lv;
            break;
        }
    }
    if (k == 0) {
        bool genuinely_stuck = forward ? (x.tail.kind == TailKind::Max && path_all_max(b, x.prefix))
                                       : (x.tail.kind == TailKind::Min && path_all_min(b, x.prefix));
        if (genuinely_stuck)
            throw MaximalPoint(forward ? "all edges maximal" : "all edges minimal");
        throw ResolutionExhausted("step_point: no bump position within materialized depth");
    }
    PathPoint wide = extend_prefix(b, x, std::max(k, target_depth));
    auto stepped = forward ? successor(b, FinitePath{std::vector<EdgeId>(
                                              wide.prefix.edges.begin(),
                                              wide.prefix.edges.begin() + k)})
                           : predecessor(b, FinitePath{std::vector<EdgeId>(
                                                wide.prefix.edges.begin(),
                                                wide.prefix.edges.begin() + k)});
    PathPoint out = wide;
    std::copy(stepped->edges.begin(), stepped->edges.end(), out.prefix.edges.begin());
    return out;
}

}  // namespace

PathPoint successor_point(const BratteliDiagram& b, const PathPoint& x, Level target_depth) {
    return step_point(b, x, target_depth, true);
}

PathPoint predecessor_point(const BratteliDiagram& b, const PathPoint& x, Level target_depth) {
    return step_point(b, x, target_depth, false);
}

std::uint64_t rank_in_fiber(const BratteliDiagram& b, const FinitePath& p) {
    std::vector<std::uint64_t> cnt{1};
    std::uint64_t rank = 0;
    for (Level lv = 1; lv <= p.depth(); ++lv) {
        const OrderedDiagram& d = b.level(lv);
        EdgeId e = p.edges[static_cast<std::size_t>(lv) - 1];
        for (EdgeId f : fiber(d, d.edges[e].range)) {
            if (d.edges[f].order_index >= d.edges[e].order_index) break;
            rank += cnt[d.edges[f].source];
        }
        std::vector<std::uint64_t> nxt(d.ranges.size(), 0);
        for (const auto& ed : d.edges) nxt[ed.range] += cnt[ed.source];
        cnt = std::move(nxt);
    }
    return rank;
}

CocycleValue counting_cocycle(const BratteliDiagram& b, const PathPoint& x, const PathPoint& y,
                              Level depth) {
    if (depth < 1 || depth >= b.depth())
        throw ResolutionExhausted("counting_cocycle: depth must leave a materialized window");
    for (Level lv = depth + 1; lv <= b.depth(); ++lv)
        if (edge_at(b, x, lv) != edge_at(b, y, lv)) return CocycleValue::not_cofinal();
    PathPoint xd = extend_prefix(b, x, depth);
    PathPoint yd = extend_prefix(b, y, depth);
    FinitePath px{std::vector<EdgeId>(xd.prefix.edges.begin(), xd.prefix.edges.begin() + depth)};
    FinitePath py{std::vector<EdgeId>(yd.prefix.edges.begin(), yd.prefix.edges.begin() + depth)};
    return CocycleValue::of(static_cast<std::int64_t>(rank_in_fiber(b, py)) -
                            static_cast<std::int64_t>(rank_in_fiber(b, px)));
}

std::vector<FinitePath> enumerate_paths(const BratteliDiagram& b, Level level) {
    if (level < 1 || level > b.depth())
        throw PreconditionError("enumerate_paths: level beyond materialized depth");
    std::vector<std::pair<FinitePath, VertexId>> acc{{FinitePath{}, 0}};
    for (Level lv = 1; lv <= level; ++lv) {
        const OrderedDiagram& d = b.level(lv);
        std::vector<std::pair<FinitePath, VertexId>> nxt;
        for (const auto& [p, at] : acc)
            for (EdgeId e = 0; e < d.edges.size(); ++e)
                if (d.edges[e].source == at) {
                    FinitePath q = p;
                    q.edges.push_back(e);
                    nxt.emplace_back(std::move(q), d.edges[e].range);
                }
        acc = std::move(nxt);
    }
    std::vector<std::pair<std::pair<VertexId, std::uint64_t>, FinitePath>> keyed;
    keyed.reserve(acc.size());
    for (auto& [p, at] : acc) keyed.push_back({{at, rank_in_fiber(b, p)}, std::move(p)});
    std::sort(keyed.begin(), keyed.end());
    std::vector<FinitePath> out;
    out.reserve(keyed.size());
    for (auto& [k, p] : keyed) out.push_back(std::move(p));
    return out;
}

CoverageVerdict check_orbit_cofinality(const BratteliDiagram& b, Level level,
                                       const std::vector<FinitePath>& u, int bound,
                                       bool backward) {
    std::vector<FinitePath> all = enumerate_paths(b, level);
    std::map<FinitePath, std::size_t> index;
    for (std::size_t i = 0; i < all.size(); ++i) index.emplace(all[i], i);
    std::vector<bool> in(all.size(), false);
    for (const auto& p : u) {
        auto it = index.find(p);
        if (it == index.end()) throw PreconditionError("check_orbit_cofinality: foreign path in U");
        in[it->second] = true;
    }
    for (std::size_t i = 0; i < all.size(); ++i) {
        bool extreme = backward ? path_all_max(b, all[i]) : path_all_min(b, all[i]);
        if (extreme && !in[i])
            throw PreconditionError("check_orbit_cofinality: U misses an extreme path");
    }
    auto covered = [&] { return std::all_of(in.begin(), in.end(), [](bool x) { return x; }); };
    if (covered()) return CoverageVerdict::ok(0);
    std::vector<std::size_t> frontier;
    for (std::size_t i = 0; i < all.size(); ++i)
        if (in[i]) frontier.push_back(i);
    for (int n = 1; n <= bound; ++n) {
        std::vector<std::size_t> next;
        for (std::size_t i : frontier) {
            auto q = backward ? predecessor(b, all[i]) : successor(b, all[i]);
            if (!q) continue;
            std::size_t j = index.at(*q);
            if (!in[j]) {
                in[j] = true;
                next.push_back(j);
            }
        }
        if (covered()) return CoverageVerdict::ok(n);
        if (next.empty()) return CoverageVerdict::failed(bound);
        frontier = std::move(next);
    }
    return CoverageVerdict::failed(bound);
}

}  // namespace vershik
