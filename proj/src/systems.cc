#include "vershik/systems.hh"

#include <algorithm>
#include <map>
#include <random>

namespace vershik {

std::vector<std::string> validate_system(const BratteliSystem& s) {
    const SymbolicSpace& sp = *s.space;
    std::vector<std::string> bad = validate_homeo(s.phi, sp.depth_bound());
    if (s.xmax.size() != static_cast<std::size_t>(sp.depth_bound()) || s.xmax.size() != s.xmin.size())
        bad.push_back("extreme approximation chains must cover every level");
    for (Level lv = 1; lv < sp.depth_bound(); ++lv) {
        if (!subset(sp, s.xmax_at(lv + 1), s.xmax_at(lv)))
            bad.push_back("xmax chain not descending at level " + std::to_string(lv + 1));
        if (!subset(sp, s.xmin_at(lv + 1), s.xmin_at(lv)))
            bad.push_back("xmin chain not descending at level " + std::to_string(lv + 1));
    }
    // the xmax approximation at the depth bound consists exactly of the
    // cells phi cannot settle: the unresolved-forever cells, plus possibly
    // whole cells outside the domain
    Level db = sp.depth_bound();
    auto side = [&](bool forward) {
        ClopenSet unres{db, {}}, outside{db, {}};
        for (CellId c = 0; c < sp.cell_count(db); ++c) {
            CellImage ci = forward ? s.phi.image(db, c) : s.phi.preimage(db, c);
            if (ci.kind == CellImageKind::Unresolved) unres.cells.push_back(c);
            if (ci.kind == CellImageKind::OutsideDomain) outside.cells.push_back(c);
        }
        ClopenSet approx = deepen(sp, forward ? s.xmax_at(db) : s.xmin_at(db), db);
        if (!subset(sp, unres, approx) || !subset(sp, approx, set_union(sp, unres, outside)))
            bad.push_back(std::string(forward ? "xmax" : "xmin") +
                          " approximation at depth bound differs from the unsettled cells");
    };
    side(true);
    side(false);
    return bad;
}

namespace {

CoverageVerdict coverage(const BratteliSystem& s, const ClopenSet& start, int bound, bool backward) {
    const SymbolicSpace& sp = *s.space;
    PartialHomeo map = backward ? s.phi.inverse() : s.phi;
    ClopenSet acc = canonicalize(sp, start);
    if (is_whole(sp, acc)) return CoverageVerdict::ok(0);
    for (int n = 1; n <= bound; ++n) {
        ClopenSet next = set_union(sp, acc, image_clopen(map, acc));
        if (is_whole(sp, next)) return CoverageVerdict::ok(n);
        if (next == acc) return CoverageVerdict::failed(bound);
        acc = std::move(next);
    }
    return CoverageVerdict::failed(bound);
}

}  // namespace

CoverageVerdict check_axiom_forward(const BratteliSystem& s, const ClopenSet& u, int bound) {
    if (!subset(*s.space, s.xmin_at(u.level), u))
        throw PreconditionError("check_axiom_forward: U must contain the xmin approximation");
    return coverage(s, u, bound, false);
}

CoverageVerdict check_axiom_backward(const BratteliSystem& s, const ClopenSet& v, int bound) {
    if (!subset(*s.space, s.xmax_at(v.level), v))
        throw PreconditionError("check_axiom_backward: V must contain the xmax approximation");
    return coverage(s, v, bound, true);
}

ProbeReport axiom_equivalence_probe(const BratteliSystem& s, Level exhaustive_level,
                                    int random_samples, std::uint64_t seed, int bound) {
    const SymbolicSpace& sp = *s.space;
    ProbeReport report;
    auto run_one = [&](const ClopenSet& u) {
        ClopenSet v = pullback_union_max(s.phi, u, s.xmax_at(u.level));
        CoverageVerdict fwd = check_axiom_forward(s, u, bound);
        CoverageVerdict bwd = check_axiom_backward(s, v, bound);
        ++report.checked;
        if (fwd.satisfied != bwd.satisfied)
            report.disagreements.push_back({u, v, fwd, bwd});
    };
    Level cap = std::min(exhaustive_level, sp.depth_bound());
    for (Level lv = 1; lv <= cap; ++lv) {
        ClopenSet base = deepen(sp, s.xmin_at(lv), lv);
        std::vector<CellId> free;
        for (CellId c = 0; c < sp.cell_count(lv); ++c)
            if (!base.contains(c)) free.push_back(c);
        if (free.size() > 20) continue;  // enumeration guard; deeper levels are sampled
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << free.size()); ++mask) {
            ClopenSet u = base;
            for (std::size_t i = 0; i < free.size(); ++i)
                if (mask & (std::uint64_t{1} << i)) u.cells.push_back(free[i]);
            std::sort(u.cells.begin(), u.cells.end());
            run_one(u);
        }
    }
    std::mt19937_64 rng(seed);
    for (int i = 0; i < random_samples; ++i) {
        Level lv = cap + 1 + static_cast<Level>(rng() % std::max(1, sp.depth_bound() - cap));
        lv = std::min(lv, sp.depth_bound());
        ClopenSet u = deepen(sp, s.xmin_at(lv), lv);
        for (CellId c = 0; c < sp.cell_count(lv); ++c)
            if (!u.contains(c) && (rng() & 1)) u.cells.push_back(c);
        std::sort(u.cells.begin(), u.cells.end());
        run_one(u);
    }
    return report;
}

std::optional<PeriodicWitness> detect_periodic(const BratteliSystem& s, int bound) {
    const SymbolicSpace& sp = *s.space;
    for (Level lv = 1; lv <= sp.depth_bound(); ++lv) {
        std::size_t n = sp.cell_count(lv);
        std::vector<CellId> next(n, kNoCell);
        for (CellId c = 0; c < n; ++c) {
            CellImage ci = s.phi.image(lv, c);
            if (ci.is_resolved()) next[c] = ci.cell;
        }
        // functional-graph cycle search with three-color marking
        std::vector<std::uint8_t> color(n, 0);  // 0 white, 1 on stack, 2 done
        for (CellId start = 0; start < n; ++start) {
            if (color[start]) continue;
            std::vector<CellId> stack;
            CellId cur = start;
            while (cur != kNoCell && color[cur] == 0) {
                color[cur] = 1;
                stack.push_back(cur);
                cur = next[cur];
            }
            if (cur != kNoCell && color[cur] == 1) {
                // walk the stack back to the cycle entry
                std::vector<CellId> cycle;
                for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
                    cycle.push_back(*it);
                    if (*it == cur) break;
                }
                std::reverse(cycle.begin(), cycle.end());
                if (static_cast<int>(cycle.size()) <= bound) {
                    PeriodicWitness w;
                    w.level = lv;
                    w.period = static_cast<int>(cycle.size());
                    w.cycle = std::move(cycle);
                    CellId rep = w.cycle.front();
                    int rule = 0;
                    for (int r = 0; r < sp.tail_rule_count(); ++r)
                        if (sp.tail_rule(r).accepts(lv, rep)) {
                            rule = r;
                            break;
                        }
                    w.representative = sp.point_from_cell(lv, rep, rule);
                    return w;
                }
            }
            for (CellId c : stack) color[c] = 2;
        }
    }
    return std::nullopt;
}

// --- path-space systems -----------------------------------------------------

namespace {

struct PathLevels {
    std::vector<std::vector<FinitePath>> paths;        // [lv-1]
    std::vector<std::map<FinitePath, CellId>> index;   // [lv-1]
};

std::shared_ptr<PathLevels> build_path_levels(const BratteliDiagram& b, Level depth) {
    auto pl = std::make_shared<PathLevels>();
    for (Level lv = 1; lv <= depth; ++lv) {
        pl->paths.push_back(enumerate_paths(b, lv));
        std::map<FinitePath, CellId> ix;
        for (CellId i = 0; i < pl->paths.back().size(); ++i) ix.emplace(pl->paths.back()[i], i);
        pl->index.push_back(std::move(ix));
    }
    return pl;
}

}  // namespace

// Unique cell name: per level the fiber order index and the range vertex.
std::string path_cell_name(const BratteliDiagram& b, const FinitePath& p) {
    std::string s;
    for (Level lv = 1; lv <= p.depth(); ++lv) {
        const OrderedDiagram& d = b.level(lv);
        const OrderedEdge& e = d.edges[p.edges[static_cast<std::size_t>(lv) - 1]];
        if (lv > 1) s += ',';
        s += std::to_string(e.order_index);
        if (d.ranges.size() > 1) s += '.' + d.ranges[e.range];
    }
    return s;
}

namespace {

class SuccessorProvider : public CellMapProvider {
  public:
    SuccessorProvider(std::shared_ptr<const BratteliDiagram> b, std::shared_ptr<PathLevels> pl)
        : b_(std::move(b)), pl_(std::move(pl)) {}

    CellImage image(Level lv, CellId c) const override {
        const FinitePath& p = pl_->paths[static_cast<std::size_t>(lv) - 1][c];
        auto q = successor(*b_, p);
        if (!q) return CellImage::unresolved();
        return CellImage::resolved(pl_->index[static_cast<std::size_t>(lv) - 1].at(*q));
    }
    CellImage preimage(Level lv, CellId c) const override {
        const FinitePath& p = pl_->paths[static_cast<std::size_t>(lv) - 1][c];
        auto q = predecessor(*b_, p);
        if (!q) return CellImage::unresolved();
        return CellImage::resolved(pl_->index[static_cast<std::size_t>(lv) - 1].at(*q));
    }
    ClopenSet domain_exclusion(Level lv) const override { return extreme(lv, true); }
    ClopenSet range_exclusion(Level lv) const override { return extreme(lv, false); }

  private:
    ClopenSet extreme(Level lv, bool maximal) const {
        ClopenSet out{lv, {}};
        const auto& paths = pl_->paths[static_cast<std::size_t>(lv) - 1];
        for (CellId c = 0; c < paths.size(); ++c) {
            bool ext = maximal ? path_all_max(*b_, paths[c]) : path_all_min(*b_, paths[c]);
            if (ext) out.cells.push_back(c);
        }
        return out;
    }

    std::shared_ptr<const BratteliDiagram> b_;
    std::shared_ptr<PathLevels> pl_;
};

}  // namespace

BratteliSystem versik_system(const BratteliDiagram& b, Level depth) {
    auto bd = std::make_shared<BratteliDiagram>(materialize(b, depth));
    auto pl = build_path_levels(*bd, depth);
    SpaceBuilder sb;
    std::vector<std::string> names;
    for (const auto& p : pl->paths[0]) names.push_back(path_cell_name(*bd, p));
    sb.root_level(names);
    for (Level lv = 2; lv <= depth; ++lv) {
        names.clear();
        std::vector<CellId> parents;
        for (const auto& p : pl->paths[static_cast<std::size_t>(lv) - 1]) {
            names.push_back(path_cell_name(*bd, p));
            FinitePath head{std::vector<EdgeId>(p.edges.begin(), p.edges.end() - 1)};
            parents.push_back(pl->index[static_cast<std::size_t>(lv) - 2].at(head));
        }
        sb.level(names, parents);
    }
    auto bd_keep = bd;
    auto pl_keep = pl;
    auto extreme_next = [bd_keep, pl_keep](Level lv, CellId c, bool maximal) -> CellId {
        const FinitePath& p = pl_keep->paths[static_cast<std::size_t>(lv) - 1][c];
        const OrderedDiagram& d = bd_keep->level(lv + 1);
        VertexId v = end_vertex(*bd_keep, p);
        for (EdgeId e = 0; e < d.edges.size(); ++e) {
            if (d.edges[e].source != v) continue;
            bool ext = maximal ? edge_is_max(*bd_keep, lv + 1, e) : edge_is_min(*bd_keep, lv + 1, e);
            if (ext) {
                FinitePath q = p;
                q.edges.push_back(e);
                return pl_keep->index[static_cast<std::size_t>(lv)].at(q);
            }
        }
        return kNoCell;
    };
    sb.tail_rule("max", [extreme_next](Level lv, CellId c) { return extreme_next(lv, c, true); });
    sb.tail_rule("min", [extreme_next](Level lv, CellId c) { return extreme_next(lv, c, false); });
    SpacePtr sp = sb.build();

    auto provider = std::make_shared<SuccessorProvider>(bd, pl);
    BratteliSystem s;
    s.space = sp;
    s.phi = PartialHomeo(sp, provider);
    for (Level lv = 1; lv <= depth; ++lv) {
        s.xmax.push_back(provider->domain_exclusion(lv));
        s.xmin.push_back(provider->range_exclusion(lv));
    }
    return s;
}

CellId path_cell(const SymbolicSpace& sp, const BratteliDiagram& b, const FinitePath& p) {
    return sp.cell_index(p.depth(), path_cell_name(b, p));
}

}  // namespace vershik
