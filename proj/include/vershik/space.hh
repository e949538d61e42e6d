/* space.hh -- finitely presented zero-dimensional compact spaces.
 *
 * A space is a chain of refining finite partitions P_1, P_2, ... materialized
 * to a depth bound, plus deterministic tail rules that extend a cell chain
 * one level at a time. Clopen sets are finite cell unions at one level,
 * points are cell chains (prefix + tail rule), and partial homeomorphisms
 * are given cell-functionally: the exact same-level image of a cell minus
 * the domain/range exclusion chains.
 */

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "vershik/core.hh"

namespace vershik {

class SymbolicSpace;
using SpacePtr = std::shared_ptr<const SymbolicSpace>;

/// Finite union of cells of one partition level, sorted and duplicate-free.
/// Canonical form lives at the shallowest level expressing the same set.
struct ClopenSet {
    Level level = 1;
    std::vector<CellId> cells;

    bool empty() const { return cells.empty(); }
    bool contains(CellId c) const;
    bool operator==(const ClopenSet&) const = default;
};

/// A point: refine-compatible cell chain prefix plus the tail rule deciding
/// every deeper level.
struct Point {
    std::vector<CellId> prefix;  // prefix[i] = cell at level i+1
    int tail_rule = -1;

    Level prefix_depth() const { return static_cast<Level>(prefix.size()); }
};

/// Deterministic chain-extension rule. next(lv, c) is the unique child at
/// level lv+1 of cell c at level lv, or kNoCell when the rule rejects c.
struct TailRule {
    std::string name;
    std::function<CellId(Level, CellId)> next;

    bool accepts(Level lv, CellId c) const { return next(lv, c) != kNoCell; }
};

class SymbolicSpace {
  public:
    struct LevelData {
        std::vector<std::string> names;
        std::vector<CellId> parent;                 // empty at level 1
        std::vector<std::vector<CellId>> children;  // empty at the deepest level
        std::unordered_map<std::string, CellId> index;
    };

    Level depth_bound() const { return static_cast<Level>(levels_.size()); }
    std::size_t cell_count(Level lv) const { return data(lv).names.size(); }
    const std::string& cell_name(Level lv, CellId c) const { return data(lv).names.at(c); }
    CellId cell_index(Level lv, const std::string& name) const;
    CellId parent(Level lv, CellId c) const { return data(lv).parent.at(c); }
    const std::vector<CellId>& children(Level lv, CellId c) const { return data(lv).children.at(c); }

    int tail_rule_count() const { return static_cast<int>(rules_.size()); }
    const TailRule& tail_rule(int id) const { return rules_.at(id); }
    int tail_rule_index(const std::string& name) const;  // -1 if absent

    /// Cell of `p` at any materialized level, resolving through the tail rule.
    CellId cell_at(const Point& p, Level lv) const;
    bool point_valid(const Point& p) const;
    /// Equality at full materialized resolution: cell chains agree at every
    /// level up to depth_bound.
    bool points_equal(const Point& a, const Point& b) const;
    /// Point with prefix = ancestor chain of `c` at level lv, given tail rule.
    Point point_from_cell(Level lv, CellId c, int tail_rule) const;

    ClopenSet whole_space() const;
    ClopenSet empty_set() const { return ClopenSet{1, {}}; }

  private:
    friend class SpaceBuilder;
    const LevelData& data(Level lv) const { return levels_.at(static_cast<std::size_t>(lv) - 1); }

    std::vector<LevelData> levels_;
    std::vector<TailRule> rules_;
};

/// Incremental constructor; rejects empty level-1 partitions and orphan cells.
class SpaceBuilder {
  public:
    /// Level 1; names must be nonempty.
    SpaceBuilder& root_level(std::vector<std::string> names);
    /// Next level: cells with their parents at the previous level.
    SpaceBuilder& level(std::vector<std::string> names, std::vector<CellId> parents);
    SpaceBuilder& tail_rule(std::string name, std::function<CellId(Level, CellId)> next);
    SpacePtr build();

  private:
    std::shared_ptr<SymbolicSpace> space_ = std::make_shared<SymbolicSpace>();
    bool rooted_ = false;
};

// --- clopen set algebra -----------------------------------------------

ClopenSet deepen(const SymbolicSpace& sp, const ClopenSet& a, Level to);
ClopenSet canonicalize(const SymbolicSpace& sp, ClopenSet a);
ClopenSet set_union(const SymbolicSpace& sp, const ClopenSet& a, const ClopenSet& b);
ClopenSet set_intersect(const SymbolicSpace& sp, const ClopenSet& a, const ClopenSet& b);
ClopenSet set_difference(const SymbolicSpace& sp, const ClopenSet& a, const ClopenSet& b);
ClopenSet complement(const SymbolicSpace& sp, const ClopenSet& a);
bool subset(const SymbolicSpace& sp, const ClopenSet& a, const ClopenSet& b);
bool disjoint(const SymbolicSpace& sp, const ClopenSet& a, const ClopenSet& b);
bool sets_equal(const SymbolicSpace& sp, const ClopenSet& a, const ClopenSet& b);
bool is_whole(const SymbolicSpace& sp, const ClopenSet& a);
bool point_in(const SymbolicSpace& sp, const ClopenSet& a, const Point& p);

// --- partial homeomorphisms -------------------------------------------

enum class CellImageKind : std::uint8_t { Resolved, Unresolved, OutsideDomain };

struct CellImage {
    CellImageKind kind = CellImageKind::Unresolved;
    CellId cell = kNoCell;

    static CellImage resolved(CellId c) { return {CellImageKind::Resolved, c}; }
    static CellImage unresolved() { return {CellImageKind::Unresolved, kNoCell}; }
    static CellImage outside() { return {CellImageKind::OutsideDomain, kNoCell}; }
    bool is_resolved() const { return kind == CellImageKind::Resolved; }
};

/// Cell-level presentation of a partial homeomorphism phi.
///
/// Contract: image(lv, C) = Resolved(D) means phi(C \ Xmax) = D \ Xmin
/// exactly, where Xmax = X \ dom phi and Xmin = X \ ran phi; Unresolved
/// means a deeper prefix is needed; OutsideDomain means C carries no domain
/// points. domain_exclusion(lv) is the union of level-lv cells meeting
/// X \ dom phi; the per-level sets form a descending chain.
class CellMapProvider {
  public:
    virtual ~CellMapProvider() = default;
    virtual CellImage image(Level lv, CellId c) const = 0;
    virtual CellImage preimage(Level lv, CellId c) const = 0;
    virtual ClopenSet domain_exclusion(Level lv) const = 0;
    virtual ClopenSet range_exclusion(Level lv) const = 0;
};

/// Value handle for a cell-level partial homeomorphism; inverse() is a view.
class PartialHomeo {
  public:
    PartialHomeo() = default;
    PartialHomeo(SpacePtr space, std::shared_ptr<const CellMapProvider> provider,
                 bool inverted = false)
        : space_(std::move(space)), provider_(std::move(provider)), inverted_(inverted) {}

    bool valid() const { return static_cast<bool>(provider_); }
    const SpacePtr& space() const { return space_; }

    CellImage image(Level lv, CellId c) const {
        return inverted_ ? provider_->preimage(lv, c) : provider_->image(lv, c);
    }
    CellImage preimage(Level lv, CellId c) const {
        return inverted_ ? provider_->image(lv, c) : provider_->preimage(lv, c);
    }
    ClopenSet domain_exclusion(Level lv) const {
        return inverted_ ? provider_->range_exclusion(lv) : provider_->domain_exclusion(lv);
    }
    ClopenSet range_exclusion(Level lv) const {
        return inverted_ ? provider_->domain_exclusion(lv) : provider_->range_exclusion(lv);
    }
    PartialHomeo inverse() const { return PartialHomeo(space_, provider_, !inverted_); }

  private:
    SpacePtr space_;
    std::shared_ptr<const CellMapProvider> provider_;
    bool inverted_ = false;
};

/// Table-backed provider (used by the file format and by tabulate()).
class TableProvider : public CellMapProvider {
  public:
    explicit TableProvider(Level depth);

    CellImage image(Level lv, CellId c) const override;
    CellImage preimage(Level lv, CellId c) const override;
    ClopenSet domain_exclusion(Level lv) const override;
    ClopenSet range_exclusion(Level lv) const override;

    void resize_level(Level lv, std::size_t cells);
    void set_image(Level lv, CellId c, CellImage ci);
    void set_preimage(Level lv, CellId c, CellImage ci);
    void set_domain_exclusion(Level lv, ClopenSet s);
    void set_range_exclusion(Level lv, ClopenSet s);

  private:
    std::vector<std::vector<CellImage>> fwd_, bwd_;
    std::vector<ClopenSet> dom_excl_, ran_excl_;
};

/// Provider defined by callables; builtins use this for closed-form maps.
class FunctionProvider : public CellMapProvider {
  public:
    using MapFn = std::function<CellImage(Level, CellId)>;
    using ExclFn = std::function<ClopenSet(Level)>;

    FunctionProvider(MapFn image, MapFn preimage, ExclFn dom_excl, ExclFn ran_excl)
        : image_(std::move(image)), preimage_(std::move(preimage)),
          dom_excl_(std::move(dom_excl)), ran_excl_(std::move(ran_excl)) {}

    CellImage image(Level lv, CellId c) const override { return image_(lv, c); }
    CellImage preimage(Level lv, CellId c) const override { return preimage_(lv, c); }
    ClopenSet domain_exclusion(Level lv) const override { return dom_excl_(lv); }
    ClopenSet range_exclusion(Level lv) const override { return ran_excl_(lv); }

  private:
    MapFn image_, preimage_;
    ExclFn dom_excl_, ran_excl_;
};

PartialHomeo identity_homeo(SpacePtr space);

/// Copy a homeo into tables up to `depth` (for serialization).
PartialHomeo tabulate(const PartialHomeo& phi, Level depth);

/// Composition g after f, with exclusion chains made descending by
/// cumulative intersection.
PartialHomeo compose_homeo(const PartialHomeo& f, const PartialHomeo& g);

/// n-fold composition of phi (n >= 1).
PartialHomeo power_homeo(const PartialHomeo& phi, int n);

// --- operations ---------------------------------------------------------

/// phi(x) with prefix resolved at least to target_depth. Throws
/// OutsideDomain when x sits in the domain-exclusion chain at every
/// materialized level, ResolutionExhausted when the cell image stays
/// unresolved at depth_bound.
Point apply(const PartialHomeo& phi, const Point& x, Level target_depth);

/// phi(A \ Xmax) as a canonical clopen set: the exact image of the part of
/// A resolving within depth_bound; never-resolving remainder cells must lie
/// in the domain-exclusion chain.
ClopenSet image_clopen(const PartialHomeo& phi, const ClopenSet& a);

ClopenSet preimage_clopen(const PartialHomeo& phi, const ClopenSet& a);

/// Z = phi^{-1}(Y) union Xmax, canonical; Y must contain the minimal-side
/// exclusion of phi at its level (checked by callers that know it).
ClopenSet pullback_union_max(const PartialHomeo& phi, const ClopenSet& y, const ClopenSet& xmax);

/// Invariant check of the cell-map contract up to `depth`; returns
/// human-readable violations (empty = clean).
std::vector<std::string> validate_homeo(const PartialHomeo& phi, Level depth);

}  // namespace vershik
