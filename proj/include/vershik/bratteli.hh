/* bratteli.hh -- ordered Bratteli diagrams: validation, composition,
 * telescoping, order isomorphism and bounded order equivalence. */

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vershik/core.hh"

namespace vershik {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

struct OrderedEdge {
    VertexId source = 0;
    VertexId range = 0;
    int order_index = 0;  // position within the fiber r^{-1}(range)
};

/// Ordered diagram from a source vertex set to a range vertex set: edges are
/// comparable iff they share a range vertex, and each fiber carries order
/// indices 0..size-1.
struct OrderedDiagram {
    std::vector<std::string> sources;
    std::vector<std::string> ranges;
    std::vector<OrderedEdge> edges;

    std::size_t edge_count() const { return edges.size(); }
};

/// Edges into `range`, sorted by order index.
std::vector<EdgeId> fiber(const OrderedDiagram& d, VertexId range);
EdgeId min_edge(const OrderedDiagram& d, VertexId range);
EdgeId max_edge(const OrderedDiagram& d, VertexId range);

std::vector<std::string> validate(const OrderedDiagram& d);

/// Leveled diagram: V_0 singleton, E_n from V_{n-1} to V_n. A positive
/// stationary period means the last `period` edge levels repeat forever.
struct BratteliDiagram {
    std::vector<std::vector<std::string>> vertex_levels;  // [0] = V_0
    std::vector<OrderedDiagram> edge_levels;              // [n-1] = E_n
    int stationary_period = 0;

    Level depth() const { return static_cast<Level>(edge_levels.size()); }
    const OrderedDiagram& level(Level n) const {
        return edge_levels.at(static_cast<std::size_t>(n) - 1);
    }
    bool stationary() const { return stationary_period > 0; }
};

std::vector<std::string> validate(const BratteliDiagram& b);

/// Unroll the stationary extension so that at least `depth` edge levels are
/// materialized. Errors if the diagram is shorter and has no extension.
BratteliDiagram materialize(const BratteliDiagram& b, Level depth);

/// Paths (e, f); fiber order compares f first, then e (lexicographic as in
/// contraction). Requires ranges of `e` = sources of `f`.
OrderedDiagram compose(const OrderedDiagram& e, const OrderedDiagram& f);

/// Contraction to the given cut levels (1-based, strictly increasing,
/// subset of 1..depth). Level 0 is kept implicitly.
BratteliDiagram telescope(const BratteliDiagram& b, const std::vector<Level>& cuts);

/// Composite of edge levels from+1 .. to (from >= 0).
OrderedDiagram composite_range(const BratteliDiagram& b, Level from, Level to);

/// Per-vertex counts of paths from V_0 into level n.
std::vector<std::uint64_t> path_counts(const BratteliDiagram& b, Level n);
std::uint64_t total_paths(const BratteliDiagram& b, Level n);

struct OrderIso {
    std::vector<VertexId> source_map;  // D1 source -> D2 source
    std::vector<VertexId> range_map;   // D1 range -> D2 range
    std::vector<EdgeId> edge_map;      // D1 edge -> D2 edge
};

/// Order-preserving edge bijection compatible with r and s up to vertex
/// bijections (optionally pinned); lexicographically least witness, or
/// nullopt after exhaustive search.
std::optional<OrderIso> order_isomorphic(
    const OrderedDiagram& d1, const OrderedDiagram& d2,
    const std::optional<std::vector<VertexId>>& fixed_sources = std::nullopt,
    const std::optional<std::vector<VertexId>>& fixed_ranges = std::nullopt);

/// Level-wise isomorphism of whole diagrams (consistent vertex bijections).
std::optional<std::vector<std::vector<VertexId>>> diagram_isomorphic(const BratteliDiagram& b1,
                                                                     const BratteliDiagram& b2);

/// Number of maximal (resp. minimal) infinite paths of a stationary diagram:
/// the eventual image of the one-period predecessor map on vertices.
std::uint64_t max_path_count(const BratteliDiagram& b);
std::uint64_t min_path_count(const BratteliDiagram& b);

enum class EquivStatus { Equivalent, Inequivalent, Unknown };

/// Finite window of intertwiner data: telescoping both diagrams to the cut
/// levels yields order-isomorphic diagrams; eprime[k] carries the vertex
/// identification at cut k, fprime[k] the composite of b1 between cuts k and
/// k+1 pulled back through it. Replay checks
///   compose(eprime[k], fprime[k])   ~ composite of b1 (cuts1[k], cuts1[k+1])
///   compose(fprime[k], eprime[k+1]) ~ composite of b2 (cuts2[k], cuts2[k+1]).
struct IntertwinerWitness {
    std::vector<Level> cuts1, cuts2;
    std::vector<std::vector<VertexId>> isos;  // per cut: V_{cuts1[k]}(b1) -> V_{cuts2[k]}(b2)
    std::vector<OrderedDiagram> eprime;       // size K
    std::vector<OrderedDiagram> fprime;       // size K-1
};

struct EquivalenceVerdict {
    EquivStatus status = EquivStatus::Unknown;
    std::optional<IntertwinerWitness> witness;
    std::string certificate;  // for Inequivalent
    int exhausted_bound = 0;  // for Unknown
};

bool replay_witness(const BratteliDiagram& b1, const BratteliDiagram& b2,
                    const IntertwinerWitness& w);

/// Semidecision: searches common telescopes with cut sequences of length
/// <= depth_bound ending at the materialized depths; Inequivalent only with
/// a conjugacy-invariant certificate (stationary |X_max| / |X_min|).
EquivalenceVerdict order_equivalent_bounded(const BratteliDiagram& b1, const BratteliDiagram& b2,
                                            int depth_bound);

}  // namespace vershik
