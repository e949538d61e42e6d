/* systems.hh -- Bratteli systems over symbolic spaces: axiom checking,
 * forward/backward equivalence probing, periodicity search, and the
 * path-space system of an ordered Bratteli diagram. */

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vershik/bratteli.hh"
#include "vershik/space.hh"
#include "vershik/versik.hh"

namespace vershik {

/// (X, Xmax, Xmin, phi) with the extreme sets stored as descending clopen
/// approximation chains, one set per level.
struct BratteliSystem {
    SpacePtr space;
    PartialHomeo phi;
    std::vector<ClopenSet> xmax;  // [lv-1]
    std::vector<ClopenSet> xmin;

    const ClopenSet& xmax_at(Level lv) const { return xmax.at(static_cast<std::size_t>(lv) - 1); }
    const ClopenSet& xmin_at(Level lv) const { return xmin.at(static_cast<std::size_t>(lv) - 1); }
};

std::vector<std::string> validate_system(const BratteliSystem& s);

/// Cell-level verification that union_{n<=N0} phi^n(U) covers X; U must
/// contain the xmin approximation at its level.
CoverageVerdict check_axiom_forward(const BratteliSystem& s, const ClopenSet& u, int bound);
/// Mirror: union of phi^{-n}(V), V containing the xmax approximation.
CoverageVerdict check_axiom_backward(const BratteliSystem& s, const ClopenSet& v, int bound);

struct ProbeDisagreement {
    ClopenSet u, v;
    CoverageVerdict forward, backward;
};

struct ProbeReport {
    int checked = 0;
    std::vector<ProbeDisagreement> disagreements;

    bool agree() const { return disagreements.empty(); }
};

/// Pairs each sampled clopen U >= xmin with V = phi^{-1}(U) u Xmax and
/// compares forward/backward verdicts: exhaustive supersets at levels <=
/// exhaustive_level, `random_samples` seeded draws on deeper levels.
ProbeReport axiom_equivalence_probe(const BratteliSystem& s, Level exhaustive_level,
                                    int random_samples, std::uint64_t seed, int bound);

struct PeriodicWitness {
    Level level = 0;
    std::vector<CellId> cycle;
    int period = 0;
    Point representative;
};

/// Searches resolved-cell cycles of phi of length <= bound at every
/// materialized level; None on any verified Bratteli system.
std::optional<PeriodicWitness> detect_periodic(const BratteliSystem& s, int bound);

/// Path-space system of a diagram: cells at level n are the depth-n paths,
/// phi is the successor map, the extreme chains are the all-max/all-min
/// path cells. The diagram must be materialized to `depth`.
BratteliSystem versik_system(const BratteliDiagram& b, Level depth);

/// Cell id of a depth-`lv` path in the versik_system space (enumeration
/// order of enumerate_paths).
CellId path_cell(const SymbolicSpace& sp, const BratteliDiagram& b, const FinitePath& p);

/// Name a path cell gets in the versik_system space.
std::string path_cell_name(const BratteliDiagram& b, const FinitePath& p);

}  // namespace vershik
