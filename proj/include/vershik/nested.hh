/* nested.hh -- nested sequences of partial homeomorphisms: validation, the
 * successor map Phi, AF criteria, counting-cocycle continuity diagnostics,
 * semi-saturation checks and bounded conjugacy. */

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vershik/space.hh"
#include "vershik/systems.hh"
#include "vershik/versik.hh"

namespace vershik {

/// Family {phi_n}: stored maps for 1..window, inverses implicit, phi_0 the
/// identity, and a rule generating phi_n beyond the window. The derived
/// extreme chains are intersections of the per-map exclusion chains.
struct NestedSequence {
    SpacePtr space;
    int window = 0;
    std::vector<PartialHomeo> maps;  // maps[n-1] = phi_n
    std::string rule = "empty";      // empty | power-phi1 | dh-powers | odd-even-powers
    std::string rule_param;          // rule data carried through serialization
    std::function<PartialHomeo(int)> extend;  // n > window; null = empty maps
    int extend_cap = 0;
    PartialHomeo map0;  // optional explicit phi_0 from a spec file (must be id)
    std::vector<ClopenSet> xmax, xmin;  // derived chains, [lv-1]

    PartialHomeo map_at(int n) const;
    /// Largest |n| for which map_at is meaningful.
    int horizon() const { return extend ? window + extend_cap : window; }
    const ClopenSet& xmax_at(Level lv) const { return xmax.at(static_cast<std::size_t>(lv) - 1); }
    const ClopenSet& xmin_at(Level lv) const { return xmin.at(static_cast<std::size_t>(lv) - 1); }
};

/// Map with every cell outside the domain.
PartialHomeo empty_homeo(SpacePtr space);

/// Assembles the sequence and precomputes the derived extreme chains.
NestedSequence make_nested(SpacePtr space, std::vector<PartialHomeo> maps, std::string rule = "empty",
                           std::function<PartialHomeo(int)> extend = nullptr, int extend_cap = 0);

/// Nested view of a Bratteli system: phi_n = phi^n.
NestedSequence nested_from_system(const BratteliSystem& s, int window);

/// Type invariants plus the graph nesting at every materialized level;
/// violations name (n, m, cell).
std::vector<std::string> validate_nested(const NestedSequence& n);

struct PhiResult {
    Point value;
    int k = 0;  // minimal index certificate
};

/// Phi(x) = phi_k(x), k minimal with x in dom phi_k. Throws MaximalPoint
/// when x sits in the xmax chain at every level.
PhiResult phi(const NestedSequence& n, const Point& x, Level depth);
PhiResult phi_inverse(const NestedSequence& n, const Point& x, Level depth);

/// Cell-level Phi: per level, the minimal index and image for cells where
/// the index is uniform; k = 0 marks cells without a uniform resolution.
struct PhiCellEntry {
    int k = 0;
    CellId image = kNoCell;
};

class PhiMap {
  public:
    PhiMap(const NestedSequence& n, bool inverse = false);
    const PhiCellEntry& entry(Level lv, CellId c) const {
        return table_.at(static_cast<std::size_t>(lv) - 1).at(c);
    }

  private:
    std::vector<std::vector<PhiCellEntry>> table_;
};

struct LemmaReport {
    bool satisfied = false;
    int m = 0;  // witnessing vanishing bound when satisfied
    std::vector<std::string> violations;
};

/// Conditions for the AF lemma: clopen extreme sets, clopen domains, and
/// vanishing beyond some M. All failed conditions are reported.
LemmaReport check_lemma_conditions(const NestedSequence& n);

struct AfnestResult {
    bool found = false;
    ClopenSet y, z;
    NestedSequence restriction;
    LemmaReport lemma;
    Level level = 0;  // cell level of the restriction
};

/// Searches clopen Y in [xmin, U], Z in [xmax, V] (approximation-chain
/// members at increasing levels) whose cell-level restriction
/// D_n = {cells out of Z, inside dom phi_n, image out of Y} satisfies the
/// lemma conditions and whose Phi is bijective with full tower coverage.
AfnestResult check_afnest(const NestedSequence& n, const ClopenSet& u, const ClopenSet& v,
                          Level search_depth);

/// Minimal signed step count along the Phi-orbit from x to y; NotCofinal
/// when no walk within the step budget connects them.
CocycleValue counting_cocycle_nested(const NestedSequence& n, const Point& x, const Point& y,
                                     Level depth);

struct DiscontinuityWitness {
    int n = 0;          // the map joining the witness cells
    Level level = 0;
    CellId cell_from = kNoCell, cell_to = kNoCell;
    std::int64_t value1 = 0, value2 = 0;
    Point point1, point2;  // representatives realizing the two values
};

struct ContinuityReport {
    bool continuous = true;
    Level depth = 0;
    std::optional<DiscontinuityWitness> witness;
};

/// Searches a basic neighborhood (cell pair joined by some phi_n) on which
/// the counting cocycle takes two distinct values at resolution <= depth.
ContinuityReport continuity_diagnostic(const NestedSequence& n, Level depth);

enum class SemisatStatus { Admits, Fails, Unknown };

struct SemisatWitness {
    std::vector<ClopenSet> chain;   // descending cell chain
    Level separation_level = 0;
    ClopenSet branch1, branch2;     // separated image branches
    ClopenSet pre1, pre2;           // preimage families inside the chain
    bool inverse_side = false;      // witness found on the phi_1^{-1} side
};

struct SemisatResult {
    SemisatStatus status = SemisatStatus::Unknown;
    Level depth = 0;
    // extension[lv-1][c]: cell image of the extended map (kNoCell where the
    // cell misses the union of domains); filled when Admits
    std::vector<std::vector<CellId>> extension;
    std::optional<SemisatWitness> witness;
};

/// Conditions (a)/(b) of the semi-saturation criterion at cell level:
/// shrinking cell chains must have shrinking phi_1 images. Requires
/// dom phi_1 dense in the union of domains (NotDense otherwise).
SemisatResult semisaturation_check(const NestedSequence& n, Level depth);

enum class ConjStatus { Witness, Inequivalent, Unknown };

struct NestedConjugacy {
    ConjStatus status = ConjStatus::Unknown;
    std::vector<std::vector<CellId>> psi;  // per-level cell bijections when Witness
    std::string certificate;               // when Inequivalent
};

/// Searches refine-compatible per-level cell bijections with
/// psi(xmax) = xmax', psi(xmin) = xmin' and psi o Phi = Phi' o psi on all
/// resolvable cells up to `depth`, verified on tail-rule representative
/// points; Inequivalent only with a stable extreme-set cardinality
/// certificate; everything resolution-limited stays Unknown.
NestedConjugacy nested_conjugate_bounded(const NestedSequence& n1, const NestedSequence& n2,
                                         Level depth);

struct GroupoidCompare {
    bool equal = true;
    std::string detail;
};

/// Compares the orbit relation generated by the nested maps with the one
/// generated by the powers of a system's map: per-level cell components
/// (edges projected up from deeper resolutions) plus relation status of the
/// tail-limit representative points.
GroupoidCompare compare_groupoids(const NestedSequence& n, const BratteliSystem& s, Level depth,
                                  int power_cap);

}  // namespace vershik
