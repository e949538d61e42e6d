#include "vershik/nested.hh"

#include <algorithm>
#include <map>
#include <set>

namespace vershik {

namespace {

// witness[lv-1][c]: the cell has a descendant (within the depth bound) that
// escapes the map's domain-exclusion chain, i.e. carries domain points.
std::vector<std::vector<bool>> domain_witness(const SymbolicSpace& sp, const PartialHomeo& f) {
    Level db = sp.depth_bound();
    std::vector<std::vector<bool>> w(static_cast<std::size_t>(db));
    ClopenSet excl = f.domain_exclusion(db);
    w[static_cast<std::size_t>(db) - 1].resize(sp.cell_count(db));
    for (CellId c = 0; c < sp.cell_count(db); ++c)
        w[static_cast<std::size_t>(db) - 1][c] = !excl.contains(c);
    for (Level lv = db - 1; lv >= 1; --lv) {
        excl = f.domain_exclusion(lv);
        w[static_cast<std::size_t>(lv) - 1].resize(sp.cell_count(lv));
        for (CellId c = 0; c < sp.cell_count(lv); ++c) {
            bool hit = !excl.contains(c);
            for (CellId ch : sp.children(lv, c))
                hit = hit || w[static_cast<std::size_t>(lv)][ch];
            w[static_cast<std::size_t>(lv) - 1][c] = hit;
        }
    }
    return w;
}

bool point_escapes_chain(const SymbolicSpace& sp, const PartialHomeo& f, const Point& x) {
    for (Level lv = 1; lv <= sp.depth_bound(); ++lv)
        if (!f.domain_exclusion(lv).contains(sp.cell_at(x, lv))) return true;
    return false;
}

bool inside_chain_everywhere(const SymbolicSpace& sp, const std::vector<ClopenSet>& chain,
                             const Point& x) {
    for (Level lv = 1; lv <= sp.depth_bound(); ++lv)
        if (!chain[static_cast<std::size_t>(lv) - 1].contains(sp.cell_at(x, lv))) return false;
    return true;
}

// no witnessed domain point at any level
bool map_is_empty(const SymbolicSpace& sp, const PartialHomeo& f) {
    for (Level lv = 1; lv <= sp.depth_bound(); ++lv) {
        ClopenSet excl = f.domain_exclusion(lv);
        if (excl.cells.size() != sp.cell_count(lv)) return false;
    }
    return true;
}

// chain is an exact clopen set at resolution: the last two refinement steps
// are stable (the earlier members' children reproduce the deeper members)
bool chain_stable(const SymbolicSpace& sp, const std::vector<ClopenSet>& chain) {
    Level db = sp.depth_bound();
    for (Level lv = std::max<Level>(1, db - 2); lv < db; ++lv) {
        ClopenSet kids = deepen(sp, chain[static_cast<std::size_t>(lv) - 1], lv + 1);
        if (!sets_equal(sp, kids, chain[static_cast<std::size_t>(lv)])) return false;
    }
    return true;
}

std::vector<ClopenSet> homeo_chain(const SymbolicSpace& sp, const PartialHomeo& f, bool range_side) {
    std::vector<ClopenSet> out;
    for (Level lv = 1; lv <= sp.depth_bound(); ++lv)
        out.push_back(range_side ? f.range_exclusion(lv) : f.domain_exclusion(lv));
    return out;
}

}  // namespace

PartialHomeo empty_homeo(SpacePtr space) {
    auto out = [](Level, CellId) { return CellImage::outside(); };
    SpacePtr keep = space;
    auto all = [keep](Level lv) {
        ClopenSet s{lv, {}};
        s.cells.resize(keep->cell_count(lv));
        for (CellId c = 0; c < s.cells.size(); ++c) s.cells[c] = c;
        return s;
    };
    return PartialHomeo(space, std::make_shared<FunctionProvider>(out, out, all, all));
}

PartialHomeo NestedSequence::map_at(int n) const {
    if (n == 0) return identity_homeo(space);
    int a = std::abs(n);
    PartialHomeo f;
    if (a <= window)
        f = maps.at(static_cast<std::size_t>(a) - 1);
    else if (extend && a <= horizon())
        f = extend(a);
    else
        f = empty_homeo(space);
    return n > 0 ? f : f.inverse();
}

NestedSequence make_nested(SpacePtr space, std::vector<PartialHomeo> maps, std::string rule,
                           std::function<PartialHomeo(int)> extend, int extend_cap) {
    NestedSequence n;
    n.space = std::move(space);
    n.window = static_cast<int>(maps.size());
    n.maps = std::move(maps);
    n.rule = std::move(rule);
    if (n.rule == "power-phi1" && !extend && !n.maps.empty()) {
        PartialHomeo phi1 = n.maps.front();
        extend = [phi1](int k) { return power_homeo(phi1, k); };
        if (extend_cap == 0) extend_cap = 8;
    }
    n.extend = std::move(extend);
    n.extend_cap = extend_cap;
    const SymbolicSpace& sp = *n.space;
    // derived extreme chains: intersection of the per-map exclusion chains
    int h = n.horizon();
    for (Level lv = 1; lv <= sp.depth_bound(); ++lv) {
        ClopenSet mx = sp.whole_space();
        mx = deepen(sp, mx, lv);
        ClopenSet mn = mx;
        for (int k = 1; k <= std::max(h, 1); ++k) {
            PartialHomeo f = n.map_at(k);
            mx = set_intersect(sp, mx, f.domain_exclusion(lv));
            mn = set_intersect(sp, mn, f.range_exclusion(lv));
        }
        // keep the chains nested
        if (lv > 1) {
            mx = set_intersect(sp, mx, n.xmax.back());
            mn = set_intersect(sp, mn, n.xmin.back());
        }
        n.xmax.push_back(deepen(sp, mx, lv));
        n.xmin.push_back(deepen(sp, mn, lv));
    }
    return n;
}

NestedSequence nested_from_system(const BratteliSystem& s, int window) {
    std::vector<PartialHomeo> maps;
    for (int k = 1; k <= window; ++k) maps.push_back(power_homeo(s.phi, k));
    return make_nested(s.space, std::move(maps), "power-phi1");
}

std::vector<std::string> validate_nested(const NestedSequence& n) {
    const SymbolicSpace& sp = *n.space;
    std::vector<std::string> bad;
    if (n.map0.valid()) {
        for (Level lv = 1; lv <= sp.depth_bound(); ++lv)
            for (CellId c = 0; c < sp.cell_count(lv); ++c) {
                CellImage ci = n.map0.image(lv, c);
                if (!ci.is_resolved() || ci.cell != c) {
                    bad.push_back("phi_0 is not the identity at level " + std::to_string(lv) +
                                  " cell " + sp.cell_name(lv, c));
                    lv = sp.depth_bound();
                    break;
                }
            }
    }
    for (int k = 1; k <= n.window; ++k)
        for (const auto& v : validate_homeo(n.map_at(k), sp.depth_bound()))
            bad.push_back("phi_" + std::to_string(k) + ": " + v);
    // graph nesting at every materialized level; with the empty rule the
    // maps beyond the window are known, so the full (n, m) square is testable
    int h = n.rule == "empty" ? 2 * n.window : std::min(n.horizon(), 2 * n.window);
    for (int nn = -n.window; nn <= n.window; ++nn) {
        if (nn == 0) continue;
        for (int mm = -n.window; mm <= n.window; ++mm) {
            if (mm == 0 || std::abs(nn + mm) > h) continue;
            PartialHomeo comp = compose_homeo(n.map_at(mm), n.map_at(nn));
            PartialHomeo target = n.map_at(nn + mm);
            bool target_empty = (nn + mm != 0) && map_is_empty(sp, target);
            for (Level lv = 1; lv <= sp.depth_bound(); ++lv) {
                for (CellId c = 0; c < sp.cell_count(lv); ++c) {
                    CellImage ci = comp.image(lv, c);
                    if (!ci.is_resolved()) continue;
                    CellImage ti = (nn + mm == 0) ? CellImage::resolved(c) : target.image(lv, c);
                    bool witnessed = !comp.domain_exclusion(lv).contains(c);
                    if (ti.is_resolved()) {
                        if (ti.cell != ci.cell)
                            bad.push_back("nesting (" + std::to_string(nn) + "," + std::to_string(mm) +
                                          ") broken at level " + std::to_string(lv) + " cell " +
                                          sp.cell_name(lv, c));
                    } else if (witnessed && (target_empty || lv == sp.depth_bound())) {
                        bad.push_back("nesting (" + std::to_string(nn) + "," + std::to_string(mm) +
                                      ") unconfirmed at level " + std::to_string(lv) + " cell " +
                                      sp.cell_name(lv, c));
                    }
                    if (!bad.empty() && bad.size() > 40) return bad;
                }
            }
        }
    }
    return bad;
}

PhiResult phi(const NestedSequence& n, const Point& x, Level depth) {
    const SymbolicSpace& sp = *n.space;
    if (inside_chain_everywhere(sp, n.xmax, x))
        throw MaximalPoint("phi: point lies in the xmax chain at every level");
    for (int k = 1; k <= std::max(n.horizon(), 1); ++k) {
        PartialHomeo f = n.map_at(k);
        if (!point_escapes_chain(sp, f, x)) continue;
        return {apply(f, x, depth), k};
    }
    throw ResolutionExhausted("phi: no applicable map within the horizon");
}

PhiResult phi_inverse(const NestedSequence& n, const Point& x, Level depth) {
    const SymbolicSpace& sp = *n.space;
    if (inside_chain_everywhere(sp, n.xmin, x))
        throw MaximalPoint("phi_inverse: point lies in the xmin chain at every level");
    for (int k = 1; k <= std::max(n.horizon(), 1); ++k) {
        PartialHomeo f = n.map_at(-k);
        if (!point_escapes_chain(sp, f, x)) continue;
        return {apply(f, x, depth), k};
    }
    throw ResolutionExhausted("phi_inverse: no applicable map within the horizon");
}

PhiMap::PhiMap(const NestedSequence& n, bool inverse) {
    const SymbolicSpace& sp = *n.space;
    int h = std::max(n.horizon(), 1);
    std::vector<std::vector<std::vector<bool>>> wit;
    for (int k = 1; k <= h; ++k)
        wit.push_back(domain_witness(sp, inverse ? n.map_at(-k) : n.map_at(k)));
    for (Level lv = 1; lv <= sp.depth_bound(); ++lv) {
        std::vector<PhiCellEntry> row(sp.cell_count(lv));
        for (CellId c = 0; c < sp.cell_count(lv); ++c) {
            for (int k = 1; k <= h; ++k) {
                PartialHomeo f = inverse ? n.map_at(-k) : n.map_at(k);
                bool wholly_in = !f.domain_exclusion(lv).contains(c);
                bool meets = wit[static_cast<std::size_t>(k) - 1][static_cast<std::size_t>(lv) - 1][c];
                if (wholly_in) {
                    CellImage ci = f.image(lv, c);
                    if (ci.is_resolved()) row[c] = {k, ci.cell};
                    break;  // uniform or not, k is decided
                }
                if (meets) break;  // smaller index applies to part of the cell only
            }
        }
        table_.push_back(std::move(row));
    }
}

LemmaReport check_lemma_conditions(const NestedSequence& n) {
    const SymbolicSpace& sp = *n.space;
    LemmaReport rep;
    if (!chain_stable(sp, n.xmax)) rep.violations.push_back("condition 1: X_max is not clopen");
    if (!chain_stable(sp, n.xmin)) rep.violations.push_back("condition 1: X_min is not clopen");
    int h = std::max(n.horizon(), 1);
    int last_nonempty = 0;
    for (int k = 1; k <= (n.rule == "empty" ? n.window : h); ++k)
        if (!map_is_empty(sp, n.map_at(k))) last_nonempty = k;
    bool vanishes = (n.rule == "empty") || last_nonempty == 0;
    if (!vanishes)
        rep.violations.push_back("condition 3: dom phi_n does not vanish for large n");
    int m = last_nonempty + 1;
    for (int k = 1; k <= std::min(last_nonempty, n.rule == "empty" ? n.window : h); ++k) {
        PartialHomeo f = n.map_at(k);
        if (map_is_empty(sp, f)) continue;
        if (!chain_stable(sp, homeo_chain(sp, f, false)))
            rep.violations.push_back("condition 2: dom phi_" + std::to_string(k) + " is not clopen");
        if (!chain_stable(sp, homeo_chain(sp, f, true)))
            rep.violations.push_back("condition 2: dom phi_-" + std::to_string(k) + " is not clopen");
    }
    rep.satisfied = rep.violations.empty();
    rep.m = rep.satisfied ? m : 0;
    return rep;
}

// --- restriction and the AF search ------------------------------------------

namespace {

// phi_n restricted to a clopen cell union, as explicit tables. Exclusion
// chains are the cells not wholly inside the restricted domain/range.
PartialHomeo restrict_homeo(const SymbolicSpace& sp, SpacePtr space, const PartialHomeo& f,
                            const ClopenSet& dn, const ClopenSet& en) {
    Level db = sp.depth_bound();
    auto t = std::make_shared<TableProvider>(db);
    for (Level lv = 1; lv <= db; ++lv) {
        t->resize_level(lv, sp.cell_count(lv));
        ClopenSet dex{lv, {}}, rex{lv, {}};
        for (CellId c = 0; c < sp.cell_count(lv); ++c) {
            ClopenSet cell{lv, {c}};
            if (subset(sp, cell, dn))
                t->set_image(lv, c, f.image(lv, c));
            else if (disjoint(sp, cell, dn))
                t->set_image(lv, c, CellImage::outside());
            else
                t->set_image(lv, c, CellImage::unresolved());
            if (!subset(sp, cell, dn)) dex.cells.push_back(c);
            if (subset(sp, cell, en))
                t->set_preimage(lv, c, f.preimage(lv, c));
            else if (disjoint(sp, cell, en))
                t->set_preimage(lv, c, CellImage::outside());
            else
                t->set_preimage(lv, c, CellImage::unresolved());
            if (!subset(sp, cell, en)) rex.cells.push_back(c);
        }
        t->set_domain_exclusion(lv, std::move(dex));
        t->set_range_exclusion(lv, std::move(rex));
    }
    return PartialHomeo(space, t);
}

}  // namespace

AfnestResult check_afnest(const NestedSequence& n, const ClopenSet& u, const ClopenSet& v,
                          Level search_depth) {
    const SymbolicSpace& sp = *n.space;
    AfnestResult res;
    if (!subset(sp, n.xmin_at(u.level), u) || !subset(sp, n.xmax_at(v.level), v))
        throw PreconditionError("check_afnest: U, V must contain the extreme approximations");
    for (Level lv = 1; lv <= std::min<Level>(search_depth, sp.depth_bound()); ++lv) {
        ClopenSet y = n.xmin_at(lv);
        ClopenSet z = n.xmax_at(lv);
        if (!subset(sp, y, u) || !subset(sp, z, v)) continue;
        // cell-level restrictions: D_k = cells out of Z, wholly inside
        // dom phi_k, with image disjoint from Y
        int ncap = 2 * static_cast<int>(sp.cell_count(lv)) + 8;
        if (n.rule != "empty") ncap = std::min(ncap, n.horizon());
        std::vector<ClopenSet> dsets, esets;
        int last_nonempty = 0;
        bool usable = true;
        for (int k = 1; k <= ncap && usable; ++k) {
            PartialHomeo f = n.map_at(k);
            ClopenSet excl = f.domain_exclusion(lv);
            ClopenSet dk{lv, {}};
            ClopenSet zlv = deepen(sp, z, lv);
            ClopenSet ylv = deepen(sp, y, lv);
            for (CellId c = 0; c < sp.cell_count(lv); ++c) {
                if (zlv.contains(c) || excl.contains(c)) continue;
                ClopenSet img;
                try {
                    img = image_clopen(f, ClopenSet{lv, {c}});
                } catch (const ResolutionExhausted&) {
                    usable = false;
                    break;
                }
                if (disjoint(sp, img, ylv)) dk.cells.push_back(c);
            }
            if (!usable) break;
            if (!dk.empty()) last_nonempty = k;
            dsets.push_back(dk);
            esets.push_back(dk.empty() ? ClopenSet{lv, {}} : image_clopen(f, dk));
        }
        if (!usable || last_nonempty == ncap) continue;  // no stable vanishing here
        std::vector<PartialHomeo> rmaps;
        for (int k = 1; k <= last_nonempty; ++k)
            rmaps.push_back(restrict_homeo(sp, n.space, n.map_at(k),
                                           dsets[static_cast<std::size_t>(k) - 1],
                                           esets[static_cast<std::size_t>(k) - 1]));
        NestedSequence restriction = make_nested(n.space, std::move(rmaps), "empty");
        LemmaReport rep = check_lemma_conditions(restriction);
        if (!rep.satisfied) continue;
        // successor-map properties of the restriction: per-level bijection
        // between non-extreme cells and full tower coverage within m steps
        PhiMap pm(restriction);
        bool ok = true;
        for (Level l2 = lv; l2 <= sp.depth_bound() && ok; ++l2) {
            ClopenSet mx = restriction.xmax_at(l2);
            ClopenSet mn = restriction.xmin_at(l2);
            std::vector<bool> hit(sp.cell_count(l2), false);
            std::size_t mapped = 0, expected = 0;
            for (CellId c = 0; c < sp.cell_count(l2); ++c) {
                if (mx.contains(c)) continue;
                ++expected;
                const PhiCellEntry& e = pm.entry(l2, c);
                if (e.k == 0 || e.image == kNoCell || hit[e.image] || mn.contains(e.image)) {
                    ok = false;
                    break;
                }
                hit[e.image] = true;
                ++mapped;
            }
            if (!ok) break;
            std::size_t targets = 0;
            for (CellId c = 0; c < sp.cell_count(l2); ++c)
                if (!mn.contains(c)) ++targets;
            if (mapped != expected || mapped != targets) ok = false;
            if (!ok) break;
            // coverage: every cell reached from the xmin cells within m
            // forward steps of the cell-level successor
            std::vector<bool> reach(sp.cell_count(l2), false);
            for (CellId c : deepen(sp, mn, l2).cells) reach[c] = true;
            for (int step = 0; step < rep.m; ++step) {
                for (CellId c = 0; c < sp.cell_count(l2); ++c) {
                    if (!reach[c] || mx.contains(c)) continue;
                    const PhiCellEntry& e = pm.entry(l2, c);
                    if (e.k != 0 && e.image != kNoCell) reach[e.image] = true;
                }
            }
            if (!std::all_of(reach.begin(), reach.end(), [](bool b) { return b; })) ok = false;
        }
        if (!ok) continue;
        res.found = true;
        res.y = y;
        res.z = z;
        res.restriction = std::move(restriction);
        res.lemma = rep;
        res.level = lv;
        return res;
    }
    return res;
}

CocycleValue counting_cocycle_nested(const NestedSequence& n, const Point& x, const Point& y,
                                     Level depth) {
    const SymbolicSpace& sp = *n.space;
    if (sp.points_equal(x, y)) return CocycleValue::of(0);
    int cap = 1 << std::min<Level>(depth, 12);
    cap = std::min(cap, 4096);
    Point cur = x;
    for (int st = 1; st <= cap; ++st) {
        try {
            cur = phi(n, cur, depth).value;
        } catch (const std::exception&) {
            break;
        }
        if (sp.points_equal(cur, y)) return CocycleValue::of(st);
    }
    cur = x;
    for (int st = 1; st <= cap; ++st) {
        try {
            cur = phi_inverse(n, cur, depth).value;
        } catch (const std::exception&) {
            break;
        }
        if (sp.points_equal(cur, y)) return CocycleValue::of(-st);
    }
    return CocycleValue::not_cofinal();
}

ContinuityReport continuity_diagnostic(const NestedSequence& n, Level depth) {
    const SymbolicSpace& sp = *n.space;
    ContinuityReport rep;
    rep.depth = depth;
    Level cap = std::min<Level>(depth, sp.depth_bound());
    for (int k = 1; k <= n.window; ++k) {
        PartialHomeo f = n.map_at(k);
        for (Level lv = 1; lv <= cap; ++lv) {
            for (CellId c = 0; c < sp.cell_count(lv); ++c) {
                CellImage ci = f.image(lv, c);
                if (!ci.is_resolved()) continue;
                std::vector<std::pair<std::int64_t, std::pair<Point, Point>>> vals;
                for (int r = 0; r < sp.tail_rule_count(); ++r) {
                    Point x = sp.point_from_cell(lv, c, r);
                    if (!sp.point_valid(x)) continue;
                    Point q;
                    try {
                        q = apply(f, x, std::min<Level>(lv + 2, sp.depth_bound()));
                    } catch (const std::exception&) {
                        continue;
                    }
                    CocycleValue d = counting_cocycle_nested(n, x, q, depth);
                    if (!d.cofinal) continue;
                    vals.push_back({d.value, {x, q}});
                }
                for (std::size_t i = 0; i < vals.size(); ++i)
                    for (std::size_t j = i + 1; j < vals.size(); ++j)
                        if (vals[i].first != vals[j].first) {
                            DiscontinuityWitness w;
                            w.n = k;
                            w.level = lv;
                            w.cell_from = c;
                            w.cell_to = ci.cell;
                            w.value1 = vals[i].first;
                            w.value2 = vals[j].first;
                            w.point1 = vals[i].second.first;
                            w.point2 = vals[j].second.first;
                            rep.continuous = false;
                            rep.witness = w;
                            return rep;
                        }
            }
        }
    }
    return rep;
}

// --- semi-saturation ---------------------------------------------------------

SemisatResult semisaturation_check(const NestedSequence& n, Level depth) {
    const SymbolicSpace& sp = *n.space;
    Level db = sp.depth_bound();
    // keep two levels of resolution headroom: image pieces of the deepest
    // chain cells must still resolve inside the materialized window
    depth = std::max<Level>(1, std::min(depth, db - 2));
    SemisatResult res;
    res.depth = depth;
    if (n.window < 1) throw PreconditionError("semisaturation_check: phi_1 missing");
    PartialHomeo phi1 = n.map_at(1);
    int h = std::max(n.horizon(), 1);

    // density of dom phi_1 in the union of the domains; the deepest level
    // carries no refinement evidence, so point-thin exclusion chains are
    // only compared above it
    auto w1 = domain_witness(sp, phi1);
    std::vector<std::vector<std::vector<bool>>> wk;
    for (int k = 1; k <= h; ++k) wk.push_back(domain_witness(sp, n.map_at(k)));
    for (Level lv = 1; lv < db; ++lv)
        for (CellId c = 0; c < sp.cell_count(lv); ++c) {
            bool in_union = false;
            for (int k = 1; k <= h && !in_union; ++k)
                in_union = wk[static_cast<std::size_t>(k) - 1][static_cast<std::size_t>(lv) - 1][c];
            if (in_union && !w1[static_cast<std::size_t>(lv) - 1][c])
                throw NotDense("cell " + sp.cell_name(lv, c) + " at level " + std::to_string(lv));
        }

    auto run_side = [&](const PartialHomeo& f, bool inverse_side,
                        std::optional<SemisatWitness>& witness) -> SemisatStatus {
        SemisatStatus status = SemisatStatus::Admits;
        auto wf = domain_witness(sp, f);
        for (CellId leaf = 0; leaf < sp.cell_count(depth); ++leaf) {
            // ancestor chain of the leaf
            std::vector<CellId> anc(static_cast<std::size_t>(depth) + 1, kNoCell);
            anc[static_cast<std::size_t>(depth)] = leaf;
            for (Level lv = depth; lv > 1; --lv)
                anc[static_cast<std::size_t>(lv) - 1] = sp.parent(lv, anc[static_cast<std::size_t>(lv)]);
            // the deepest cell must carry a whole-cell domain witness for
            // some phi_k (the chain limit lies in the union of domains)
            bool qualified = false;
            for (int k = 1; k <= h && !qualified; ++k) {
                PartialHomeo g = inverse_side ? n.map_at(-k) : n.map_at(k);
                qualified = !g.domain_exclusion(depth).contains(leaf);
            }
            if (!qualified) continue;
            bool chain_ok = true;
            for (Level lv = 1; lv <= std::min<Level>(depth, db - 1) && chain_ok; ++lv)
                chain_ok = wf[static_cast<std::size_t>(lv) - 1][anc[static_cast<std::size_t>(lv)]];
            if (!chain_ok) continue;
            // image sets along the chain
            std::vector<ClopenSet> images;
            bool unknown = false;
            for (Level lv = 1; lv <= depth; ++lv) {
                try {
                    images.push_back(
                        image_clopen(f, ClopenSet{lv, {anc[static_cast<std::size_t>(lv)]}}));
                } catch (const ResolutionExhausted&) {
                    unknown = true;
                    break;
                }
            }
            if (unknown) {
                status = SemisatStatus::Unknown;
                continue;
            }
            Level deep = depth;
            for (const auto& i : images) deep = std::max(deep, i.level);
            std::vector<ClopenSet> flat;
            for (const auto& i : images) flat.push_back(deepen(sp, i, deep));
            // contraction: for every level L there is a chain stage whose
            // image sits inside a single level-L cell
            for (Level big = 1; big <= depth; ++big) {
                bool contracted = false;
                for (const auto& fimg : flat) {
                    if (fimg.cells.empty()) continue;
                    CellId first = kNoCell;
                    bool one = true;
                    for (CellId c : fimg.cells) {
                        CellId a = c;
                        for (Level lv = deep; lv > big; --lv) a = sp.parent(lv, a);
                        if (first == kNoCell)
                            first = a;
                        else if (a != first) {
                            one = false;
                            break;
                        }
                    }
                    if (one && first != kNoCell) {
                        contracted = true;
                        break;
                    }
                }
                if (contracted) continue;
                // separated branches must persist in every stage: group the
                // deepest nonempty image by level-`big` ancestors
                std::size_t last_ix = flat.size();
                while (last_ix > 0 && flat[last_ix - 1].cells.empty()) --last_ix;
                if (last_ix == 0) continue;
                const ClopenSet& last = flat[last_ix - 1];
                std::map<CellId, std::vector<CellId>> groups;
                for (CellId c : last.cells) {
                    CellId a = c;
                    for (Level lv = deep; lv > big; --lv) a = sp.parent(lv, a);
                    groups[a].push_back(c);
                }
                if (groups.size() < 2) continue;  // deepest stage converged; earlier stages lag
                bool persistent = true;
                for (const auto& fimg : flat) {
                    if (fimg.cells.empty()) continue;
                    std::set<CellId> seen;
                    for (CellId c : fimg.cells) {
                        CellId a = c;
                        for (Level lv = deep; lv > big; --lv) a = sp.parent(lv, a);
                        if (groups.count(a)) seen.insert(a);
                    }
                    std::size_t present = 0;
                    for (const auto& [key, cells] : groups)
                        if (seen.count(key)) ++present;
                    if (present < 2) {
                        persistent = false;
                        break;
                    }
                }
                if (!persistent) continue;
                auto it = groups.begin();
                SemisatWitness w;
                w.separation_level = big;
                w.branch1 = ClopenSet{big, {it->first}};
                ClopenSet part1{deep, it->second};
                ++it;
                w.branch2 = ClopenSet{big, {it->first}};
                ClopenSet part2{deep, it->second};
                for (Level lv = 1; lv <= depth; ++lv)
                    w.chain.push_back(ClopenSet{lv, {anc[static_cast<std::size_t>(lv)]}});
                ClopenSet chain_deep{depth, {leaf}};
                w.pre1 = set_intersect(sp, preimage_clopen(f, part1), chain_deep);
                w.pre2 = set_intersect(sp, preimage_clopen(f, part2), chain_deep);
                w.inverse_side = inverse_side;
                witness = std::move(w);
                return SemisatStatus::Fails;
            }
        }
        return status;
    };

    std::optional<SemisatWitness> witness;
    SemisatStatus fwd = run_side(phi1, false, witness);
    if (fwd == SemisatStatus::Fails) {
        res.status = fwd;
        res.witness = std::move(witness);
        return res;
    }
    SemisatStatus bwd = run_side(phi1.inverse(), true, witness);
    if (bwd == SemisatStatus::Fails) {
        res.status = bwd;
        res.witness = std::move(witness);
        return res;
    }
    res.status = (fwd == SemisatStatus::Unknown || bwd == SemisatStatus::Unknown)
                     ? SemisatStatus::Unknown
                     : SemisatStatus::Admits;
    if (res.status == SemisatStatus::Admits) {
        // extension table: the unique same-level cell containing the image
        for (Level lv = 1; lv <= db; ++lv) {
            std::vector<CellId> row(sp.cell_count(lv), kNoCell);
            for (CellId c = 0; c < sp.cell_count(lv); ++c) {
                bool in_union = false;
                for (int k = 1; k <= h && !in_union; ++k)
                    in_union = wk[static_cast<std::size_t>(k) - 1][static_cast<std::size_t>(lv) - 1][c];
                if (!in_union) continue;
                ClopenSet img;
                try {
                    img = image_clopen(phi1, ClopenSet{lv, {c}});
                } catch (const ResolutionExhausted&) {
                    continue;
                }
                if (img.cells.empty()) continue;
                Level deep = std::max(lv, img.level);
                ClopenSet d = deepen(sp, img, deep);
                CellId a0 = kNoCell;
                bool one = true;
                for (CellId cc : d.cells) {
                    CellId a = cc;
                    for (Level l2 = deep; l2 > lv; --l2) a = sp.parent(l2, a);
                    if (a0 == kNoCell)
                        a0 = a;
                    else if (a != a0)
                        one = false;
                }
                if (one) row[c] = a0;
            }
            res.extension.push_back(std::move(row));
        }
    }
    return res;
}

// --- bounded conjugacy --------------------------------------------------------

namespace {

int stable_extreme_count(const SymbolicSpace& sp, const std::vector<ClopenSet>& chain) {
    Level db = sp.depth_bound();
    if (db < 3) return -1;
    std::size_t a = chain[static_cast<std::size_t>(db) - 1].cells.size();
    std::size_t b = chain[static_cast<std::size_t>(db) - 2].cells.size();
    std::size_t c = chain[static_cast<std::size_t>(db) - 3].cells.size();
    if (a == b && b == c) return static_cast<int>(a);
    return -1;
}

struct ConjSearch {
    const NestedSequence& n1;
    const NestedSequence& n2;
    const SymbolicSpace& s1;
    const SymbolicSpace& s2;
    Level depth;
    PhiMap pm1, pm2;
    std::vector<std::vector<CellId>> psi;
    bool resolution_limited = false;

    ConjSearch(const NestedSequence& a, const NestedSequence& b, Level d)
        : n1(a), n2(b), s1(*a.space), s2(*b.space), depth(d), pm1(a), pm2(b) {
        psi.reserve(static_cast<std::size_t>(depth) + 1);
    }

    bool extend_level(Level lv) {
        if (lv > depth) return verify_points();
        std::size_t cnt = s1.cell_count(lv);
        if (cnt != s2.cell_count(lv)) return false;
        ClopenSet mx1 = deepen(s1, n1.xmax_at(lv), lv), mn1 = deepen(s1, n1.xmin_at(lv), lv);
        ClopenSet mx2 = deepen(s2, n2.xmax_at(lv), lv), mn2 = deepen(s2, n2.xmin_at(lv), lv);
        // reverse Phi edges for incremental commutation checks
        std::vector<std::vector<CellId>> rev(cnt);
        for (CellId c = 0; c < cnt; ++c) {
            const PhiCellEntry& e = pm1.entry(lv, c);
            if (e.k != 0) rev[e.image].push_back(c);
        }
        std::vector<CellId> map(cnt, kNoCell);
        std::vector<bool> used(cnt, false);
        const std::vector<CellId>* parent_map =
            lv > 1 ? &psi[static_cast<std::size_t>(lv) - 2] : nullptr;
        // commutation between an assigned source and an assigned target
        auto edge_ok = [&](CellId src) {
            const PhiCellEntry& e1 = pm1.entry(lv, src);
            if (e1.k == 0 || map[src] == kNoCell) return true;
            const PhiCellEntry& e2 = pm2.entry(lv, map[src]);
            if (e2.k == 0) {
                resolution_limited = true;
                return true;
            }
            if (e1.k != e2.k) return false;
            return map[e1.image] == kNoCell || map[e1.image] == e2.image;
        };
        std::function<bool(CellId)> rec = [&](CellId c) -> bool {
            if (c == cnt) {
                psi.push_back(map);
                if (extend_level(lv + 1)) return true;
                psi.pop_back();
                return false;
            }
            for (CellId d = 0; d < cnt; ++d) {
                if (used[d]) continue;
                if (parent_map && (*parent_map)[s1.parent(lv, c)] != s2.parent(lv, d)) continue;
                if (mx1.contains(c) != mx2.contains(d)) continue;
                if (mn1.contains(c) != mn2.contains(d)) continue;
                map[c] = d;
                used[d] = true;
                bool ok = edge_ok(c);
                for (CellId src : rev[c]) ok = ok && edge_ok(src);
                if (ok && rec(c + 1)) return true;
                used[d] = false;
            }
            map[c] = kNoCell;
            return false;
        };
        return rec(0);
    }

    // map a space-1 point through psi (defined on levels <= depth)
    std::optional<Point> map_point(const Point& x) {
        Point out;
        for (Level lv = 1; lv <= depth; ++lv)
            out.prefix.push_back(psi[static_cast<std::size_t>(lv) - 1][s1.cell_at(x, lv)]);
        // prefer the rule with the same name, then any consistent one
        int same = -1;
        if (x.tail_rule >= 0 && x.tail_rule < s1.tail_rule_count())
            same = s2.tail_rule_index(s1.tail_rule(x.tail_rule).name);
        std::vector<int> order;
        if (same >= 0) order.push_back(same);
        for (int r = 0; r < s2.tail_rule_count(); ++r)
            if (r != same) order.push_back(r);
        for (int r : order) {
            out.tail_rule = r;
            if (s2.point_valid(out)) return out;
        }
        return std::nullopt;
    }

    bool verify_points() {
        for (CellId c = 0; c < s1.cell_count(depth); ++c) {
            for (int r = 0; r < s1.tail_rule_count(); ++r) {
                Point x = s1.point_from_cell(depth, c, r);
                if (!s1.point_valid(x)) continue;
                auto px = map_point(x);
                if (!px) {
                    resolution_limited = true;
                    continue;
                }
                bool max1 = false, max2 = false;
                Point q1, q2;
                try {
                    q1 = phi(n1, x, depth).value;
                } catch (const MaximalPoint&) {
                    max1 = true;
                } catch (const ResolutionExhausted&) {
                    resolution_limited = true;
                    continue;
                }
                try {
                    q2 = phi(n2, *px, depth).value;
                } catch (const MaximalPoint&) {
                    max2 = true;
                } catch (const ResolutionExhausted&) {
                    resolution_limited = true;
                    continue;
                }
                if (max1 != max2) return false;
                if (max1) continue;
                auto pq = map_point(q1);
                if (!pq) {
                    resolution_limited = true;
                    continue;
                }
                if (!s2.points_equal(*pq, q2)) return false;
            }
        }
        return true;
    }
};

}  // namespace

NestedConjugacy nested_conjugate_bounded(const NestedSequence& n1, const NestedSequence& n2,
                                         Level depth) {
    NestedConjugacy out;
    const SymbolicSpace& s1 = *n1.space;
    const SymbolicSpace& s2 = *n2.space;
    int a = stable_extreme_count(s1, n1.xmax), b = stable_extreme_count(s2, n2.xmax);
    if (a >= 0 && b >= 0 && a != b) {
        out.status = ConjStatus::Inequivalent;
        out.certificate = "|X_max| differs at stable resolution: " + std::to_string(a) + " vs " +
                          std::to_string(b);
        return out;
    }
    a = stable_extreme_count(s1, n1.xmin);
    b = stable_extreme_count(s2, n2.xmin);
    if (a >= 0 && b >= 0 && a != b) {
        out.status = ConjStatus::Inequivalent;
        out.certificate = "|X_min| differs at stable resolution: " + std::to_string(a) + " vs " +
                          std::to_string(b);
        return out;
    }
    depth = std::min({depth, s1.depth_bound(), s2.depth_bound()});
    ConjSearch search(n1, n2, depth);
    if (search.extend_level(1)) {
        out.status = ConjStatus::Witness;
        out.psi = search.psi;
        return out;
    }
    out.status = ConjStatus::Unknown;
    return out;
}

GroupoidCompare compare_groupoids(const NestedSequence& n, const BratteliSystem& s, Level depth,
                                  int power_cap) {
    const SymbolicSpace& sp = *n.space;
    GroupoidCompare out;
    // the two presentations may carry their own copies of the space; they
    // must agree structurally, cell for cell
    if (n.space != s.space) {
        const SymbolicSpace& o = *s.space;
        bool same = sp.depth_bound() == o.depth_bound();
        for (Level lv = 1; same && lv <= sp.depth_bound(); ++lv) {
            same = sp.cell_count(lv) == o.cell_count(lv);
            for (CellId c = 0; same && c < sp.cell_count(lv); ++c)
                same = sp.cell_name(lv, c) == o.cell_name(lv, c) &&
                       (lv == 1 || sp.parent(lv, c) == o.parent(lv, c));
        }
        if (!same) {
            out.equal = false;
            out.detail = "different spaces";
            return out;
        }
    }
    Level db = sp.depth_bound();
    depth = std::min(depth, db);
    std::vector<PartialHomeo> powers{s.phi};
    for (int j = 2; j <= power_cap; ++j) powers.push_back(compose_homeo(powers.back(), s.phi));
    int h = std::max(n.horizon(), 1);
    for (Level lv = 1; lv <= depth; ++lv) {
        auto components = [&](auto&& edges) {
            std::vector<CellId> parent(sp.cell_count(lv));
            for (CellId c = 0; c < parent.size(); ++c) parent[c] = c;
            std::function<CellId(CellId)> find = [&](CellId c) {
                while (parent[c] != c) c = parent[c] = parent[parent[c]];
                return c;
            };
            edges([&](Level ell, CellId c, CellId d) {
                CellId ca = c, da = d;
                for (Level l2 = ell; l2 > lv; --l2) {
                    ca = sp.parent(l2, ca);
                    da = sp.parent(l2, da);
                }
                parent[find(ca)] = find(da);
            });
            std::vector<CellId> root(sp.cell_count(lv));
            for (CellId c = 0; c < root.size(); ++c) root[c] = find(c);
            return root;
        };
        auto left = components([&](auto&& join) {
            for (Level ell = lv; ell <= db; ++ell)
                for (int k = 1; k <= h; ++k) {
                    PartialHomeo f = n.map_at(k);
                    for (CellId c = 0; c < sp.cell_count(ell); ++c) {
                        CellImage ci = f.image(ell, c);
                        if (ci.is_resolved()) join(ell, c, ci.cell);
                    }
                }
        });
        auto right = components([&](auto&& join) {
            for (Level ell = lv; ell <= db; ++ell)
                for (const PartialHomeo& f : powers)
                    for (CellId c = 0; c < sp.cell_count(ell); ++c) {
                        CellImage ci = f.image(ell, c);
                        if (ci.is_resolved()) join(ell, c, ci.cell);
                    }
        });
        // same partitions?
        std::map<CellId, CellId> match;
        for (CellId c = 0; c < left.size(); ++c) {
            auto it = match.find(left[c]);
            if (it == match.end())
                match.emplace(left[c], right[c]);
            else if (it->second != right[c]) {
                out.equal = false;
                out.detail = "component mismatch at level " + std::to_string(lv);
                return out;
            }
        }
        std::map<CellId, CellId> rmatch;
        for (CellId c = 0; c < left.size(); ++c) {
            auto it = rmatch.find(right[c]);
            if (it == rmatch.end())
                rmatch.emplace(right[c], left[c]);
            else if (it->second != left[c]) {
                out.equal = false;
                out.detail = "component mismatch at level " + std::to_string(lv);
                return out;
            }
        }
    }
    // tail-limit representative pairs must have matching relation status
    std::vector<Point> pts;
    auto add_points = [&](const std::vector<ClopenSet>& chain) {
        if (chain.empty()) return;
        for (CellId c : chain[static_cast<std::size_t>(db) - 1].cells)
            for (int r = 0; r < sp.tail_rule_count(); ++r) {
                Point p = sp.point_from_cell(db, c, r);
                if (!sp.point_valid(p)) continue;
                bool dup = false;
                for (const Point& q : pts) dup = dup || sp.points_equal(p, q);
                if (!dup) pts.push_back(p);
            }
    };
    add_points(n.xmax);
    add_points(n.xmin);
    add_points(s.xmax);
    add_points(s.xmin);
    auto related_left = [&](const Point& x, const Point& y) {
        for (bool back : {false, true}) {
            Point cur = x;
            for (int j = 1; j <= power_cap; ++j) {
                try {
                    cur = back ? phi_inverse(n, cur, depth).value : phi(n, cur, depth).value;
                } catch (const std::exception&) {
                    break;
                }
                if (sp.points_equal(cur, y)) return true;
            }
        }
        return false;
    };
    auto related_right = [&](const Point& x, const Point& y) {
        for (bool back : {false, true}) {
            Point cur = x;
            for (int j = 1; j <= power_cap; ++j) {
                try {
                    cur = apply(back ? s.phi.inverse() : s.phi, cur, depth);
                } catch (const std::exception&) {
                    break;
                }
                if (sp.points_equal(cur, y)) return true;
            }
        }
        return false;
    };
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (i == j) continue;
            if (related_left(pts[i], pts[j]) != related_right(pts[i], pts[j])) {
                out.equal = false;
                out.detail = "tail-point relation mismatch at (" +
                             sp.cell_name(db, sp.cell_at(pts[i], db)) + ", " +
                             sp.cell_name(db, sp.cell_at(pts[j], db)) + ")";
                return out;
            }
        }
    return out;
}

}  // namespace vershik
