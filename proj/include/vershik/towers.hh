/* towers.hh -- Kakutani-Rohlin partitions of a Bratteli system: tower
 * construction from return times, inductive refinement, ordered-diagram
 * extraction, and finite-depth conjugacy verification. */

#pragma once

#include <string>
#include <vector>

#include "vershik/bratteli.hh"
#include "vershik/systems.hh"

namespace vershik {

struct Tower {
    int lambda_class = 1;  // k, 1-based over increasing heights
    int refine_index = 1;  // i within the class
    int height = 0;        // J_k
    ClopenSet base;
    std::vector<ClopenSet> floors;  // floors[j] = phi^j(base), j = 0..height
};

struct KRPartition {
    std::vector<Tower> towers;
    ClopenSet y;  // generating clopen set
    ClopenSet z;  // phi^{-1}(Y) union Xmax
};

/// Stage-0 partition: one height-0 tower over the whole space.
KRPartition trivial_partition(const BratteliSystem& s);

/// Towers of the return-time function to Z = phi^{-1}(Y) u Xmax, one per
/// distinct return time; verifies the partition properties exactly at cell
/// level before returning. Y must contain the xmin approximation at its
/// level and the system must satisfy the forward axiom for Y.
KRPartition build_towers(const BratteliSystem& s, const ClopenSet& y);

/// Stage-n refinement: splits the bases of build_towers(s, yn) until every
/// floor sits inside one cell of the ambient level-`p_level` partition and
/// one floor of `prev`; Y_n must be contained in the previous generating set.
KRPartition refine(const BratteliSystem& s, const KRPartition& prev, Level p_level,
                   const ClopenSet& yn);

/// refine() folded over a nested chain of generating sets (the trivial
/// partition is the implicit stage 0).
std::vector<KRPartition> kr_stages(const BratteliSystem& s, const std::vector<ClopenSet>& y_chain);

struct Extraction {
    BratteliDiagram diagram;
    std::vector<std::vector<int>> edge_labels;  // [n-1][edge] = floor number j(e)
    std::vector<KRPartition> stages;
};

/// Vertices are tower bases per stage (V_0 = {X}); an edge per floor
/// contained in a previous-stage base, ordered by floor number. Asserts the
/// minimal-edge and maximal-edge label identities and that the result
/// validates.
Extraction extract_diagram(const BratteliSystem& s, std::vector<KRPartition> stages);

struct ConjugacyCheck {
    bool verified = true;
    std::string counterexample;
    int pairs_checked = 0;
};

/// Materializes psi (path -> floor cell) on all depth-d paths and checks
/// psi o successor = phi o psi cell-exactly, plus that psi maps the min/max
/// truncations onto the generating set and the top set.
ConjugacyCheck verify_conjugacy(const BratteliSystem& s, const Extraction& ex, Level depth);

}  // namespace vershik
