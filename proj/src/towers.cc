#include "vershik/towers.hh"

#include <algorithm>
#include <map>
#include <set>

namespace vershik {

namespace {

struct Piece {
    ClopenSet cell;                      // single base cell
    int lambda = 0;                      // return time
    std::vector<ClopenSet> trajectory;   // phi^j(cell), j = 0..lambda
};

// Return-time decomposition of Y over Z: every piece is a single cell on
// which the return time is constant; cells are split until the trajectory
// is uniformly inside or outside Z at every step.
std::vector<Piece> lambda_pieces(const BratteliSystem& s, const ClopenSet& y, const ClopenSet& z) {
    const SymbolicSpace& sp = *s.space;
    std::vector<std::pair<Level, CellId>> work;
    for (CellId c : y.cells) work.emplace_back(y.level, c);
    std::vector<Piece> out;
    while (!work.empty()) {
        auto [lv, c] = work.back();
        work.pop_back();
        Piece piece;
        piece.cell = ClopenSet{lv, {c}};
        ClopenSet cur = piece.cell;
        std::set<std::pair<Level, std::vector<CellId>>> seen;
        bool split = false;
        for (;;) {
            if (subset(sp, cur, z)) {
                piece.trajectory.push_back(cur);
                out.push_back(std::move(piece));
                break;
            }
            if (!disjoint(sp, cur, z)) {
                if (lv == sp.depth_bound())
                    throw ResolutionExhausted("build_towers: return time not uniform on a cell at depth bound");
                for (CellId ch : sp.children(lv, c)) work.emplace_back(lv + 1, ch);
                split = true;
                break;
            }
            if (!seen.insert({cur.level, cur.cells}).second)
                throw LambdaUnbounded(static_cast<int>(seen.size()));
            piece.trajectory.push_back(cur);
            cur = image_clopen(s.phi, cur);
            if (cur.empty())
                throw PreconditionError("build_towers: trajectory vanished outside Z");
            ++piece.lambda;
        }
        (void)split;
    }
    std::sort(out.begin(), out.end(), [](const Piece& a, const Piece& b) {
        if (a.lambda != b.lambda) return a.lambda < b.lambda;
        if (a.cell.level != b.cell.level) return a.cell.level < b.cell.level;
        return a.cell.cells < b.cell.cells;
    });
    return out;
}

ClopenSet union_all(const SymbolicSpace& sp, const std::vector<const ClopenSet*>& sets) {
    ClopenSet acc{1, {}};
    for (const ClopenSet* s : sets) acc = set_union(sp, acc, *s);
    return acc;
}

void verify_partition(const BratteliSystem& s, const KRPartition& kr) {
    const SymbolicSpace& sp = *s.space;
    // property 2: phi moves each floor to the next
    for (const Tower& t : kr.towers)
        for (int j = 0; j < t.height; ++j)
            if (!sets_equal(sp, image_clopen(s.phi, t.floors[static_cast<std::size_t>(j)]),
                            t.floors[static_cast<std::size_t>(j) + 1]))
                throw PreconditionError("KR property 2 failed");
    // property 1: floor-1 sets cover phi(Y \ Z)
    std::vector<const ClopenSet*> firsts;
    for (const Tower& t : kr.towers)
        if (t.height >= 1) firsts.push_back(&t.floors[1]);
    ClopenSet lhs = union_all(sp, firsts);
    ClopenSet rhs = image_clopen(s.phi, set_difference(sp, kr.y, kr.z));
    if (!sets_equal(sp, lhs, rhs)) throw PreconditionError("KR property 1 failed");
    // property 3: top floors equal Z
    std::vector<const ClopenSet*> tops;
    for (const Tower& t : kr.towers) tops.push_back(&t.floors.back());
    if (!sets_equal(sp, union_all(sp, tops), kr.z)) throw PreconditionError("KR property 3 failed");
    // property 4 + disjointness: floors partition X
    Level lv = 1;
    std::size_t total = 0;
    for (const Tower& t : kr.towers)
        for (const ClopenSet& f : t.floors) lv = std::max(lv, f.level);
    std::vector<CellId> all;
    for (const Tower& t : kr.towers)
        for (const ClopenSet& f : t.floors) {
            ClopenSet d = deepen(sp, f, lv);
            total += d.cells.size();
            all.insert(all.end(), d.cells.begin(), d.cells.end());
        }
    std::sort(all.begin(), all.end());
    bool dup = std::adjacent_find(all.begin(), all.end()) != all.end();
    if (dup || total != sp.cell_count(lv))
        throw PreconditionError("KR property 4 failed (floors do not partition X)");
}

KRPartition assemble(const BratteliSystem& s, const ClopenSet& y, const ClopenSet& z,
                     const std::vector<std::vector<const Piece*>>& groups) {
    const SymbolicSpace& sp = *s.space;
    KRPartition kr;
    kr.y = y;
    kr.z = z;
    std::map<int, int> height_to_class;
    for (const auto& g : groups) height_to_class.emplace(g.front()->lambda, 0);
    int k = 0;
    for (auto& [h, cls] : height_to_class) cls = ++k;
    std::map<int, int> next_index;
    for (const auto& g : groups) {
        Tower t;
        t.height = g.front()->lambda;
        t.lambda_class = height_to_class.at(t.height);
        t.refine_index = ++next_index[t.height];
        for (int j = 0; j <= t.height; ++j) {
            std::vector<const ClopenSet*> parts;
            for (const Piece* p : g) parts.push_back(&p->trajectory[static_cast<std::size_t>(j)]);
            t.floors.push_back(union_all(sp, parts));
        }
        t.base = t.floors.front();
        kr.towers.push_back(std::move(t));
    }
    verify_partition(s, kr);
    return kr;
}

}  // namespace

KRPartition trivial_partition(const BratteliSystem& s) {
    KRPartition kr;
    kr.y = s.space->whole_space();
    kr.z = kr.y;
    Tower t;
    t.height = 0;
    t.base = kr.y;
    t.floors = {kr.y};
    kr.towers.push_back(std::move(t));
    return kr;
}

KRPartition build_towers(const BratteliSystem& s, const ClopenSet& y_in) {
    const SymbolicSpace& sp = *s.space;
    ClopenSet y = canonicalize(sp, y_in);
    if (!subset(sp, s.xmin_at(y.level), y))
        throw PreconditionError("build_towers: Y must contain the xmin approximation");
    ClopenSet pre = preimage_clopen(s.phi, y);
    Level wl = std::max(pre.level, y.level);
    ClopenSet z = canonicalize(sp, set_union(sp, pre, s.xmax_at(wl)));
    auto pieces = lambda_pieces(s, y, z);
    // one tower per distinct return time
    std::vector<std::vector<const Piece*>> groups;
    for (const Piece& p : pieces) {
        if (groups.empty() || groups.back().front()->lambda != p.lambda) groups.push_back({});
        groups.back().push_back(&p);
    }
    return assemble(s, y, z, groups);
}

KRPartition refine(const BratteliSystem& s, const KRPartition& prev, Level p_level,
                   const ClopenSet& yn_in) {
    const SymbolicSpace& sp = *s.space;
    ClopenSet yn = canonicalize(sp, yn_in);
    if (!subset(sp, yn, prev.y)) throw PreconditionError("refine: Y_n must shrink");
    if (!subset(sp, s.xmin_at(yn.level), yn))
        throw PreconditionError("refine: Y_n must contain the xmin approximation");
    ClopenSet pre = preimage_clopen(s.phi, yn);
    Level wl = std::max(pre.level, yn.level);
    ClopenSet z = canonicalize(sp, set_union(sp, pre, s.xmax_at(wl)));

    // signature of a floor set: the previous floor and the ambient
    // level-p_level cell containing it (split the base until both exist)
    auto floor_container = [&](const ClopenSet& f) -> int {
        int id = 0;
        for (const Tower& t : prev.towers) {
            for (const ClopenSet& pf : t.floors) {
                if (subset(sp, f, pf)) return id;
                if (!disjoint(sp, f, pf)) return -1;
                ++id;
            }
        }
        return -1;
    };
    auto ambient_container = [&](const ClopenSet& f) -> int {
        ClopenSet d = deepen(sp, f, std::max(f.level, p_level));
        if (d.cells.empty()) return -1;
        if (d.level == p_level) return d.cells.size() == 1 ? static_cast<int>(d.cells.front()) : -1;
        CellId anc = d.cells.front();
        for (CellId c : d.cells) {
            CellId a = c;
            for (Level lv = d.level; lv > p_level; --lv) a = sp.parent(lv, a);
            if (c == d.cells.front())
                anc = a;
            else if (a != anc)
                return -1;
        }
        return static_cast<int>(anc);
    };

    std::vector<Piece> pieces = lambda_pieces(s, yn, z);
    std::vector<std::pair<Piece, std::vector<std::pair<int, int>>>> classified;
    std::vector<Piece> work = std::move(pieces);
    while (!work.empty()) {
        Piece p = std::move(work.back());
        work.pop_back();
        std::vector<std::pair<int, int>> sig;
        bool ok = true;
        for (const ClopenSet& f : p.trajectory) {
            int a = floor_container(f);
            int b = ambient_container(f);
            if (a < 0 || b < 0) {
                ok = false;
                break;
            }
            sig.emplace_back(a, b);
        }
        if (ok) {
            classified.emplace_back(std::move(p), std::move(sig));
            continue;
        }
        Level lv = p.cell.level;
        CellId c = p.cell.cells.front();
        if (lv == sp.depth_bound())
            throw ResolutionExhausted("refine: signature not uniform on a cell at depth bound");
        for (CellId ch : sp.children(lv, c)) {
            for (Piece q : lambda_pieces(s, ClopenSet{lv + 1, {ch}}, z)) work.push_back(std::move(q));
        }
    }
    // atoms of the join: equal (lambda, signature)
    std::map<std::pair<int, std::vector<std::pair<int, int>>>, std::vector<const Piece*>> atoms;
    for (const auto& [p, sig] : classified) atoms[{p.lambda, sig}].push_back(&p);
    std::vector<std::vector<const Piece*>> groups;
    for (auto& [key, g] : atoms) {
        std::sort(g.begin(), g.end(), [](const Piece* a, const Piece* b) {
            if (a->cell.level != b->cell.level) return a->cell.level < b->cell.level;
            return a->cell.cells < b->cell.cells;
        });
        groups.push_back(g);
    }
    std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
        if (a.front()->lambda != b.front()->lambda) return a.front()->lambda < b.front()->lambda;
        if (a.front()->cell.level != b.front()->cell.level)
            return a.front()->cell.level < b.front()->cell.level;
        return a.front()->cell.cells < b.front()->cell.cells;
    });
    return assemble(s, yn, z, groups);
}

std::vector<KRPartition> kr_stages(const BratteliSystem& s, const std::vector<ClopenSet>& y_chain) {
    std::vector<KRPartition> stages;
    KRPartition prev = trivial_partition(s);
    for (const ClopenSet& y : y_chain) {
        KRPartition cur = refine(s, prev, y.level, y);
        stages.push_back(cur);
        prev = std::move(cur);
    }
    return stages;
}

Extraction extract_diagram(const BratteliSystem& s, std::vector<KRPartition> stages) {
    const SymbolicSpace& sp = *s.space;
    if (stages.empty()) throw PreconditionError("extract_diagram: no stages");
    for (std::size_t i = 1; i < stages.size(); ++i)
        if (!subset(sp, stages[i].y, stages[i - 1].y))
            throw PreconditionError("extract_diagram: generating sets must be nested");
    Extraction ex;
    ex.diagram.vertex_levels.push_back({"X"});
    KRPartition prev = trivial_partition(s);
    for (std::size_t n = 0; n < stages.size(); ++n) {
        const KRPartition& cur = stages[n];
        std::vector<std::string> names;
        for (const Tower& t : cur.towers)
            names.push_back("t" + std::to_string(t.lambda_class) + "." + std::to_string(t.refine_index));
        OrderedDiagram d;
        d.sources = ex.diagram.vertex_levels.back();
        d.ranges = names;
        std::vector<int> labels;
        for (VertexId w = 0; w < cur.towers.size(); ++w) {
            const Tower& t = cur.towers[w];
            struct Incoming {
                int label;
                VertexId src;
            };
            std::vector<Incoming> in;
            for (int j = 0; j <= t.height; ++j) {
                const ClopenSet& f = t.floors[static_cast<std::size_t>(j)];
                int hit = -1;
                for (VertexId v = 0; v < prev.towers.size(); ++v) {
                    if (subset(sp, f, prev.towers[v].base)) {
                        hit = static_cast<int>(v);
                        break;
                    }
                    if (!disjoint(sp, f, prev.towers[v].base))
                        throw BrokenContainment("floor " + std::to_string(j) + " of tower " +
                                                names[w] + " straddles a previous base");
                }
                if (hit >= 0) in.push_back({j, static_cast<VertexId>(hit)});
            }
            if (in.empty() || in.front().label != 0)
                throw PreconditionError("extract_diagram: minimal edge label is not 0");
            int jmax = in.back().label;
            int expect = t.height - prev.towers[in.back().src].height;
            if (jmax != expect)
                throw PreconditionError("extract_diagram: maximal edge label violates the height identity");
            int pos = 0;
            for (const Incoming& e : in) {
                d.edges.push_back({e.src, w, pos++});
                labels.push_back(e.label);
            }
        }
        // edges were appended fiber-by-fiber; reorder labels edge-aligned
        ex.diagram.edge_levels.push_back(d);
        ex.diagram.vertex_levels.push_back(names);
        ex.edge_labels.push_back(std::move(labels));
        prev = cur;
    }
    if (auto bad = validate(ex.diagram); !bad.empty())
        throw PreconditionError("extract_diagram: " + bad.front());
    ex.stages = std::move(stages);
    return ex;
}

namespace {

const ClopenSet& psi_cell(const Extraction& ex, const FinitePath& p) {
    Level d = p.depth();
    const KRPartition& st = ex.stages[static_cast<std::size_t>(d) - 1];
    const OrderedDiagram& od = ex.diagram.level(d);
    VertexId tower = od.edges[p.edges.back()].range;
    int s = 0;
    for (Level lv = 1; lv <= d; ++lv)
        s += ex.edge_labels[static_cast<std::size_t>(lv) - 1][p.edges[static_cast<std::size_t>(lv) - 1]];
    return st.towers[tower].floors.at(static_cast<std::size_t>(s));
}

}  // namespace

ConjugacyCheck verify_conjugacy(const BratteliSystem& s, const Extraction& ex, Level depth) {
    const SymbolicSpace& sp = *s.space;
    ConjugacyCheck out;
    if (depth < 1 || depth > ex.diagram.depth())
        throw PreconditionError("verify_conjugacy: depth beyond extraction");
    auto paths = enumerate_paths(ex.diagram, depth);
    ClopenSet min_union{1, {}}, max_union{1, {}};
    for (const auto& p : paths) {
        const ClopenSet& cell = psi_cell(ex, p);
        // psi intertwines the successor map with phi
        if (auto q = successor(ex.diagram, p)) {
            ClopenSet lhs = psi_cell(ex, *q);
            ClopenSet rhs = image_clopen(s.phi, cell);
            ++out.pairs_checked;
            if (!sets_equal(sp, lhs, rhs)) {
                out.verified = false;
                out.counterexample = "path " + path_cell_name(ex.diagram, p);
                return out;
            }
        }
        // psi respects the cylinder nesting
        if (depth > 1) {
            FinitePath head{std::vector<EdgeId>(p.edges.begin(), p.edges.end() - 1)};
            Extraction const& exr = ex;
            if (!subset(sp, cell, psi_cell(exr, head))) {
                out.verified = false;
                out.counterexample = "nesting at path " + path_cell_name(ex.diagram, p);
                return out;
            }
        }
        if (path_all_min(ex.diagram, p)) min_union = set_union(sp, min_union, cell);
        if (path_all_max(ex.diagram, p)) max_union = set_union(sp, max_union, cell);
    }
    const KRPartition& st = ex.stages[static_cast<std::size_t>(depth) - 1];
    if (!sets_equal(sp, min_union, st.y)) {
        out.verified = false;
        out.counterexample = "min truncation does not map onto the generating set";
        return out;
    }
    if (!sets_equal(sp, max_union, st.z)) {
        out.verified = false;
        out.counterexample = "max truncation does not map onto the top set";
        return out;
    }
    if (!subset(sp, s.xmin_at(st.y.level), st.y) || !subset(sp, s.xmax_at(st.z.level), st.z)) {
        out.verified = false;
        out.counterexample = "extreme approximations escape the generating/top sets";
    }
    return out;
}

}  // namespace vershik
