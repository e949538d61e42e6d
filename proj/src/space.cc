#include "vershik/space.hh"

#include <algorithm>
#include <set>

namespace vershik {

bool ClopenSet::contains(CellId c) const {
    return std::binary_search(cells.begin(), cells.end(), c);
}

CellId SymbolicSpace::cell_index(Level lv, const std::string& name) const {
    const auto& ix = data(lv).index;
    auto it = ix.find(name);
    return it == ix.end() ? kNoCell : it->second;
}

int SymbolicSpace::tail_rule_index(const std::string& name) const {
    for (int i = 0; i < tail_rule_count(); ++i)
        if (rules_[static_cast<std::size_t>(i)].name == name) return i;
    return -1;
}

CellId SymbolicSpace::cell_at(const Point& p, Level lv) const {
    if (lv < 1 || lv > depth_bound())
        throw PreconditionError("cell_at: level out of range");
    if (lv <= p.prefix_depth()) return p.prefix[static_cast<std::size_t>(lv) - 1];
    if (p.prefix.empty()) throw PreconditionError("cell_at: empty point prefix");
    const TailRule& rule = tail_rule(p.tail_rule);
    Level at = p.prefix_depth();
    CellId c = p.prefix.back();
    while (at < lv) {
        CellId nxt = rule.next(at, c);
        if (nxt == kNoCell)
            throw PreconditionError("cell_at: tail rule '" + rule.name +
                                    "' rejects cell at level " + std::to_string(at));
        c = nxt;
        ++at;
    }
    return c;
}

bool SymbolicSpace::point_valid(const Point& p) const {
    if (p.prefix.empty() || p.prefix_depth() > depth_bound()) return false;
    if (p.tail_rule < 0 || p.tail_rule >= tail_rule_count()) return false;
    for (Level lv = 1; lv <= p.prefix_depth(); ++lv)
        if (p.prefix[static_cast<std::size_t>(lv) - 1] >= cell_count(lv)) return false;
    for (Level lv = 2; lv <= p.prefix_depth(); ++lv) {
        CellId c = p.prefix[static_cast<std::size_t>(lv) - 1];
        if (parent(lv, c) != p.prefix[static_cast<std::size_t>(lv) - 2]) return false;
    }
    if (p.prefix_depth() < depth_bound() &&
        !tail_rule(p.tail_rule).accepts(p.prefix_depth(), p.prefix.back()))
        return false;
    return true;
}

bool SymbolicSpace::points_equal(const Point& a, const Point& b) const {
    for (Level lv = 1; lv <= depth_bound(); ++lv)
        if (cell_at(a, lv) != cell_at(b, lv)) return false;
    return true;
}

Point SymbolicSpace::point_from_cell(Level lv, CellId c, int rule) const {
    Point p;
    p.tail_rule = rule;
    p.prefix.assign(static_cast<std::size_t>(lv), kNoCell);
    CellId cur = c;
    for (Level at = lv; at >= 1; --at) {
        p.prefix[static_cast<std::size_t>(at) - 1] = cur;
        if (at > 1) cur = parent(at, cur);
    }
    return p;
}

ClopenSet SymbolicSpace::whole_space() const {
    ClopenSet all;
    all.level = 1;
    all.cells.resize(cell_count(1));
    for (CellId c = 0; c < all.cells.size(); ++c) all.cells[c] = c;
    return all;
}

// --- SpaceBuilder -------------------------------------------------------

SpaceBuilder& SpaceBuilder::root_level(std::vector<std::string> names) {
    if (names.empty())
        throw PreconditionError("space: level-1 partition must be nonempty");
    SymbolicSpace::LevelData ld;
    ld.names = std::move(names);
    for (CellId c = 0; c < ld.names.size(); ++c) ld.index.emplace(ld.names[c], c);
    if (ld.index.size() != ld.names.size())
        throw PreconditionError("space: duplicate cell name at level 1");
    space_->levels_.push_back(std::move(ld));
    rooted_ = true;
    return *this;
}

SpaceBuilder& SpaceBuilder::level(std::vector<std::string> names, std::vector<CellId> parents) {
    if (!rooted_) throw PreconditionError("space: root level missing");
    if (names.empty() || names.size() != parents.size())
        throw PreconditionError("space: bad level data");
    auto& prev = space_->levels_.back();
    prev.children.assign(prev.names.size(), {});
    SymbolicSpace::LevelData ld;
    ld.names = std::move(names);
    ld.parent = std::move(parents);
    for (CellId c = 0; c < ld.names.size(); ++c) {
        if (ld.parent[c] >= prev.names.size())
            throw PreconditionError("space: parent out of range for cell " + ld.names[c]);
        prev.children[ld.parent[c]].push_back(c);
        ld.index.emplace(ld.names[c], c);
    }
    if (ld.index.size() != ld.names.size())
        throw PreconditionError("space: duplicate cell name");
    for (CellId c = 0; c < prev.names.size(); ++c)
        if (prev.children[c].empty())
            throw PreconditionError("space: cell " + prev.names[c] + " has no child");
    space_->levels_.push_back(std::move(ld));
    return *this;
}

SpaceBuilder& SpaceBuilder::tail_rule(std::string name, std::function<CellId(Level, CellId)> next) {
    space_->rules_.push_back(TailRule{std::move(name), std::move(next)});
    return *this;
}

SpacePtr SpaceBuilder::build() {
    if (!rooted_) throw PreconditionError("space: level-1 partition must be nonempty");
    return space_;
}

// --- clopen algebra -----------------------------------------------------

namespace {

std::vector<CellId> sorted_unique(std::vector<CellId> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

ClopenSet deepen(const SymbolicSpace& sp, const ClopenSet& a, Level to) {
    if (to < a.level) throw PreconditionError("deepen: target above set level");
    if (to > sp.depth_bound()) throw ResolutionExhausted("deepen past depth bound");
    ClopenSet out = a;
    while (out.level < to) {
        std::vector<CellId> next;
        for (CellId c : out.cells) {
            const auto& ch = sp.children(out.level, c);
            next.insert(next.end(), ch.begin(), ch.end());
        }
        out.cells = sorted_unique(std::move(next));
        ++out.level;
    }
    return out;
}

ClopenSet canonicalize(const SymbolicSpace& sp, ClopenSet a) {
    a.cells = sorted_unique(std::move(a.cells));
    while (a.level > 1) {
        // liftable iff the set is exactly the preimage of its parent set
        std::vector<CellId> parents;
        parents.reserve(a.cells.size());
        for (CellId c : a.cells) parents.push_back(sp.parent(a.level, c));
        parents = sorted_unique(std::move(parents));
        std::size_t expected = 0;
        for (CellId p : parents) expected += sp.children(a.level - 1, p).size();
        if (expected != a.cells.size()) break;
        a.cells = std::move(parents);
        --a.level;
    }
    if (a.cells.empty()) a.level = 1;
    return a;
}

ClopenSet set_union(const SymbolicSpace& sp, const ClopenSet& a, const ClopenSet& b) {
    Level lv = std::max(a.level, b.level);
    ClopenSet da = deepen(sp, a, lv), db = deepen(sp, b, lv);
    std::vector<CellId> out;
    std::set_union(da.cells.begin(), da.cells.end(), db.cells.begin(), db.cells.end(),
                   std::back_inserter(out));
    return canonicalize(sp, ClopenSet{lv, std::move(out)});
}

ClopenSet set_intersect(const SymbolicSpace& sp, const ClopenSet& a, const ClopenSet& b) {
    Level lv = std::max(a.level, b.level);
    ClopenSet da = deepen(sp, a, lv), db = deepen(sp, b, lv);
    std::vector<CellId> out;
    std::set_intersection(da.cells.begin(), da.cells.end(), db.cells.begin(), db.cells.end(),
                          std::back_inserter(out));
    return canonicalize(sp, ClopenSet{lv, std::move(out)});
}

ClopenSet set_difference(const SymbolicSpace& sp, const ClopenSet& a, const ClopenSet& b) {
    Level lv = std::max(a.level, b.level);
    ClopenSet da = deepen(sp, a, lv), db = deepen(sp, b, lv);
    std::vector<CellId> out;
    std::set_difference(da.cells.begin(), da.cells.end(), db.cells.begin(), db.cells.end(),
                        std::back_inserter(out));
    return canonicalize(sp, ClopenSet{lv, std::move(out)});
}

ClopenSet complement(const SymbolicSpace& sp, const ClopenSet& a) {
    ClopenSet all;
    all.level = a.level;
    all.cells.resize(sp.cell_count(a.level));
    for (CellId c = 0; c < all.cells.size(); ++c) all.cells[c] = c;
    return set_difference(sp, all, a);
}

bool subset(const SymbolicSpace& sp, const ClopenSet& a, const ClopenSet& b) {
    Level lv = std::max(a.level, b.level);
    ClopenSet da = deepen(sp, a, lv), db = deepen(sp, b, lv);
    return std::includes(db.cells.begin(), db.cells.end(), da.cells.begin(), da.cells.end());
}

bool disjoint(const SymbolicSpace& sp, const ClopenSet& a, const ClopenSet& b) {
    Level lv = std::max(a.level, b.level);
    ClopenSet da = deepen(sp, a, lv), db = deepen(sp, b, lv);
    auto i = da.cells.begin();
    auto j = db.cells.begin();
    while (i != da.cells.end() && j != db.cells.end()) {
        if (*i == *j) return false;
        (*i < *j) ? ++i : ++j;
    }
    return true;
}

bool sets_equal(const SymbolicSpace& sp, const ClopenSet& a, const ClopenSet& b) {
    return canonicalize(sp, a) == canonicalize(sp, b);
}

bool is_whole(const SymbolicSpace& sp, const ClopenSet& a) {
    return sets_equal(sp, a, sp.whole_space());
}

bool point_in(const SymbolicSpace& sp, const ClopenSet& a, const Point& p) {
    return a.contains(sp.cell_at(p, a.level));
}

// --- providers ----------------------------------------------------------

TableProvider::TableProvider(Level depth)
    : fwd_(static_cast<std::size_t>(depth)),
      bwd_(static_cast<std::size_t>(depth)),
      dom_excl_(static_cast<std::size_t>(depth)),
      ran_excl_(static_cast<std::size_t>(depth)) {
    for (Level lv = 1; lv <= depth; ++lv) {
        dom_excl_[static_cast<std::size_t>(lv) - 1].level = lv;
        ran_excl_[static_cast<std::size_t>(lv) - 1].level = lv;
    }
}

CellImage TableProvider::image(Level lv, CellId c) const {
    return fwd_.at(static_cast<std::size_t>(lv) - 1).at(c);
}
CellImage TableProvider::preimage(Level lv, CellId c) const {
    return bwd_.at(static_cast<std::size_t>(lv) - 1).at(c);
}
ClopenSet TableProvider::domain_exclusion(Level lv) const {
    return dom_excl_.at(static_cast<std::size_t>(lv) - 1);
}
ClopenSet TableProvider::range_exclusion(Level lv) const {
    return ran_excl_.at(static_cast<std::size_t>(lv) - 1);
}

void TableProvider::resize_level(Level lv, std::size_t cells) {
    fwd_.at(static_cast<std::size_t>(lv) - 1).assign(cells, CellImage::unresolved());
    bwd_.at(static_cast<std::size_t>(lv) - 1).assign(cells, CellImage::unresolved());
}
void TableProvider::set_image(Level lv, CellId c, CellImage ci) {
    fwd_.at(static_cast<std::size_t>(lv) - 1).at(c) = ci;
}
void TableProvider::set_preimage(Level lv, CellId c, CellImage ci) {
    bwd_.at(static_cast<std::size_t>(lv) - 1).at(c) = ci;
}
void TableProvider::set_domain_exclusion(Level lv, ClopenSet s) {
    dom_excl_.at(static_cast<std::size_t>(lv) - 1) = std::move(s);
}
void TableProvider::set_range_exclusion(Level lv, ClopenSet s) {
    ran_excl_.at(static_cast<std::size_t>(lv) - 1) = std::move(s);
}

PartialHomeo identity_homeo(SpacePtr space) {
    auto idmap = [](Level, CellId c) { return CellImage::resolved(c); };
    auto noexcl = [](Level lv) { return ClopenSet{lv, {}}; };
    return PartialHomeo(std::move(space),
                        std::make_shared<FunctionProvider>(idmap, idmap, noexcl, noexcl));
}

PartialHomeo tabulate(const PartialHomeo& phi, Level depth) {
    const SymbolicSpace& sp = *phi.space();
    if (depth > sp.depth_bound()) depth = sp.depth_bound();
    auto table = std::make_shared<TableProvider>(depth);
    for (Level lv = 1; lv <= depth; ++lv) {
        table->resize_level(lv, sp.cell_count(lv));
        for (CellId c = 0; c < sp.cell_count(lv); ++c) {
            table->set_image(lv, c, phi.image(lv, c));
            table->set_preimage(lv, c, phi.preimage(lv, c));
        }
        table->set_domain_exclusion(lv, phi.domain_exclusion(lv));
        table->set_range_exclusion(lv, phi.range_exclusion(lv));
    }
    return PartialHomeo(phi.space(), std::move(table));
}

namespace {

// g after f at cell level; Unresolved propagates. Exclusion chains are the
// per-level conservative unions made descending by cumulative intersection.
class ComposeProvider : public CellMapProvider {
  public:
    ComposeProvider(SpacePtr space, PartialHomeo f, PartialHomeo g)
        : f_(std::move(f)), g_(std::move(g)) {
        const SymbolicSpace& sp = *space;
        auto chain = [&](bool forward) {
            std::vector<ClopenSet> out;
            ClopenSet prev{1, {}};
            for (Level lv = 1; lv <= sp.depth_bound(); ++lv) {
                ClopenSet raw = forward ? raw_dom_excl(sp, lv) : raw_ran_excl(sp, lv);
                ClopenSet cur = (lv == 1) ? raw : set_intersect(sp, raw, prev);
                cur = deepen(sp, cur, lv);
                out.push_back(cur);
                prev = cur;
            }
            return out;
        };
        dom_chain_ = chain(true);
        ran_chain_ = chain(false);
    }

    CellImage image(Level lv, CellId c) const override {
        CellImage a = f_.image(lv, c);
        if (!a.is_resolved()) return a;
        return g_.image(lv, a.cell);
    }
    CellImage preimage(Level lv, CellId c) const override {
        CellImage a = g_.preimage(lv, c);
        if (!a.is_resolved()) return a;
        return f_.preimage(lv, a.cell);
    }
    ClopenSet domain_exclusion(Level lv) const override {
        return dom_chain_.at(static_cast<std::size_t>(lv) - 1);
    }
    ClopenSet range_exclusion(Level lv) const override {
        return ran_chain_.at(static_cast<std::size_t>(lv) - 1);
    }

  private:
    ClopenSet raw_dom_excl(const SymbolicSpace& sp, Level lv) const {
        // cells possibly meeting X \ dom(g o f): f-exclusion, f-unresolved,
        // or resolved into the g-exclusion
        ClopenSet out = f_.domain_exclusion(lv);
        ClopenSet gex = g_.domain_exclusion(lv);
        for (CellId c = 0; c < sp.cell_count(lv); ++c) {
            CellImage a = f_.image(lv, c);
            if (!a.is_resolved())
                out.cells.push_back(c);
            else if (gex.contains(a.cell))
                out.cells.push_back(c);
        }
        std::sort(out.cells.begin(), out.cells.end());
        out.cells.erase(std::unique(out.cells.begin(), out.cells.end()), out.cells.end());
        return out;
    }
    ClopenSet raw_ran_excl(const SymbolicSpace& sp, Level lv) const {
        ClopenSet out = g_.range_exclusion(lv);
        ClopenSet fex = f_.range_exclusion(lv);
        for (CellId c = 0; c < sp.cell_count(lv); ++c) {
            CellImage a = g_.preimage(lv, c);
            if (!a.is_resolved())
                out.cells.push_back(c);
            else if (fex.contains(a.cell))
                out.cells.push_back(c);
        }
        std::sort(out.cells.begin(), out.cells.end());
        out.cells.erase(std::unique(out.cells.begin(), out.cells.end()), out.cells.end());
        return out;
    }

    PartialHomeo f_, g_;
    std::vector<ClopenSet> dom_chain_, ran_chain_;
};

}  // namespace

PartialHomeo compose_homeo(const PartialHomeo& f, const PartialHomeo& g) {
    if (f.space() != g.space())
        throw PreconditionError("compose_homeo: maps live on different spaces");
    return PartialHomeo(f.space(), std::make_shared<ComposeProvider>(f.space(), f, g));
}

PartialHomeo power_homeo(const PartialHomeo& phi, int n) {
    if (n < 1) throw PreconditionError("power_homeo: n must be >= 1");
    PartialHomeo acc = phi;
    for (int i = 1; i < n; ++i) acc = compose_homeo(acc, phi);
    return acc;
}

// --- operations ---------------------------------------------------------

Point apply(const PartialHomeo& phi, const Point& x, Level target_depth) {
    const SymbolicSpace& sp = *phi.space();
    const Level db = sp.depth_bound();
    if (target_depth < 1 || target_depth > db)
        throw PreconditionError("apply: target depth out of range");

    bool inside_excl_everywhere = true;
    Level first = 0;  // shallowest resolving level
    std::vector<CellId> img(static_cast<std::size_t>(db) + 1, kNoCell);
    for (Level lv = 1; lv <= db; ++lv) {
        CellId c = sp.cell_at(x, lv);
        if (inside_excl_everywhere && !phi.domain_exclusion(lv).contains(c))
            inside_excl_everywhere = false;
        CellImage ci = phi.image(lv, c);
        if (ci.kind == CellImageKind::OutsideDomain) throw OutsideDomain("apply: cell-level");
        if (ci.is_resolved()) {
            if (first == 0) first = lv;
            img[static_cast<std::size_t>(lv)] = ci.cell;
        } else if (first != 0) {
            throw PreconditionError("apply: resolution not monotone");
        }
    }
    if (inside_excl_everywhere) throw OutsideDomain("apply: point never leaves the exclusion chain");
    if (first == 0) throw ResolutionExhausted("apply: image unresolved at depth bound");

    // ancestors below the first resolving level
    for (Level lv = first; lv > 1; --lv)
        img[static_cast<std::size_t>(lv) - 1] = sp.parent(lv, img[static_cast<std::size_t>(lv)]);

    // shortest prefix end >= target_depth from which some tail rule
    // reproduces the resolved chain
    for (Level cut = target_depth; cut <= db; ++cut) {
        for (int r = 0; r < sp.tail_rule_count(); ++r) {
            const TailRule& rule = sp.tail_rule(r);
            bool ok = true;
            for (Level lv = cut; lv < db && ok; ++lv)
                ok = rule.next(lv, img[static_cast<std::size_t>(lv)]) ==
                     img[static_cast<std::size_t>(lv) + 1];
            if (ok && (cut == db || rule.accepts(cut, img[static_cast<std::size_t>(cut)]))) {
                Point out;
                out.prefix.assign(img.begin() + 1, img.begin() + 1 + cut);
                out.tail_rule = r;
                return out;
            }
        }
    }
    throw ResolutionExhausted("apply: image tail not representable by any rule");
}

ClopenSet image_clopen(const PartialHomeo& phi, const ClopenSet& a) {
    const SymbolicSpace& sp = *phi.space();
    const Level db = sp.depth_bound();
    ClopenSet acc{1, {}};
    std::vector<std::pair<Level, CellId>> work;
    for (CellId c : a.cells) work.emplace_back(a.level, c);
    std::vector<ClopenSet> pieces;
    while (!work.empty()) {
        auto [lv, c] = work.back();
        work.pop_back();
        CellImage ci = phi.image(lv, c);
        if (ci.is_resolved()) {
            pieces.push_back(ClopenSet{lv, {ci.cell}});
        } else if (ci.kind == CellImageKind::Unresolved) {
            if (lv == db) {
                if (phi.domain_exclusion(db).contains(c)) continue;  // Xmax remainder
                throw ResolutionExhausted("image_clopen: cell " + sp.cell_name(lv, c));
            }
            for (CellId ch : sp.children(lv, c)) work.emplace_back(lv + 1, ch);
        }
        // OutsideDomain contributes nothing
    }
    if (pieces.empty()) return ClopenSet{1, {}};
    Level lv = 1;
    for (const auto& p : pieces) lv = std::max(lv, p.level);
    std::vector<CellId> out;
    for (const auto& p : pieces) {
        ClopenSet d = deepen(sp, p, lv);
        out.insert(out.end(), d.cells.begin(), d.cells.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return canonicalize(sp, ClopenSet{lv, std::move(out)});
}

ClopenSet preimage_clopen(const PartialHomeo& phi, const ClopenSet& a) {
    return image_clopen(phi.inverse(), a);
}

ClopenSet pullback_union_max(const PartialHomeo& phi, const ClopenSet& y, const ClopenSet& xmax) {
    const SymbolicSpace& sp = *phi.space();
    return set_union(sp, preimage_clopen(phi, y), xmax);
}

std::vector<std::string> validate_homeo(const PartialHomeo& phi, Level depth) {
    const SymbolicSpace& sp = *phi.space();
    if (depth > sp.depth_bound()) depth = sp.depth_bound();
    std::vector<std::string> bad;
    auto note = [&](Level lv, CellId c, const std::string& what) {
        bad.push_back("level " + std::to_string(lv) + " cell " + sp.cell_name(lv, c) + ": " + what);
    };
    for (Level lv = 1; lv <= depth; ++lv) {
        std::vector<CellId> seen(sp.cell_count(lv), kNoCell);
        for (CellId c = 0; c < sp.cell_count(lv); ++c) {
            CellImage ci = phi.image(lv, c);
            if (ci.is_resolved()) {
                if (ci.cell >= sp.cell_count(lv)) {
                    note(lv, c, "image cell out of range");
                    continue;
                }
                if (seen[ci.cell] != kNoCell) note(lv, c, "image collides (injectivity)");
                seen[ci.cell] = c;
                CellImage back = phi.preimage(lv, ci.cell);
                if (!back.is_resolved() || back.cell != c)
                    note(lv, c, "preimage does not invert image");
                if (lv < depth) {
                    for (CellId ch : sp.children(lv, c)) {
                        CellImage cc = phi.image(lv + 1, ch);
                        if (!cc.is_resolved())
                            note(lv + 1, ch, "child of resolved cell not resolved");
                        else if (sp.parent(lv + 1, cc.cell) != ci.cell)
                            note(lv + 1, ch, "child image not under parent image");
                    }
                }
            } else if (ci.kind == CellImageKind::OutsideDomain && lv < depth) {
                for (CellId ch : sp.children(lv, c))
                    if (phi.image(lv + 1, ch).kind != CellImageKind::OutsideDomain)
                        note(lv + 1, ch, "child of outside-domain cell not outside");
            }
        }
        if (lv < depth) {
            ClopenSet cur = phi.domain_exclusion(lv);
            ClopenSet nxt = phi.domain_exclusion(lv + 1);
            if (!subset(sp, nxt, cur))
                bad.push_back("level " + std::to_string(lv + 1) +
                              ": domain-exclusion chain not descending");
            ClopenSet rcur = phi.range_exclusion(lv);
            ClopenSet rnxt = phi.range_exclusion(lv + 1);
            if (!subset(sp, rnxt, rcur))
                bad.push_back("level " + std::to_string(lv + 1) +
                              ": range-exclusion chain not descending");
        }
    }
    return bad;
}

}  // namespace vershik
