/* versik.hh -- path space of an ordered Bratteli diagram: finite paths,
 * path points with tail rules, the successor/predecessor dynamics,
 * fiber ranks and the counting cocycle. */

#pragma once

#include <optional>
#include <vector>

#include "vershik/bratteli.hh"
#include "vershik/core.hh"

namespace vershik {

struct FinitePath {
    std::vector<EdgeId> edges;  // edges[i] in E_{i+1}

    Level depth() const { return static_cast<Level>(edges.size()); }
    bool operator==(const FinitePath&) const = default;
    auto operator<=>(const FinitePath&) const = default;
};

enum class TailKind { Max, Min, Periodic };

struct PathTail {
    TailKind kind = TailKind::Max;
    std::vector<EdgeId> word;  // Periodic only; applied cyclically after the prefix

    bool operator==(const PathTail&) const = default;
};

/// Infinite path: finite prefix plus a deterministic tail rule.
struct PathPoint {
    FinitePath prefix;
    PathTail tail;
};

struct CocycleValue {
    bool cofinal = false;
    std::int64_t value = 0;

    static CocycleValue not_cofinal() { return {false, 0}; }
    static CocycleValue of(std::int64_t v) { return {true, v}; }
};

bool path_valid(const BratteliDiagram& b, const FinitePath& p);
VertexId end_vertex(const BratteliDiagram& b, const FinitePath& p);
bool edge_is_max(const BratteliDiagram& b, Level lv, EdgeId e);
bool edge_is_min(const BratteliDiagram& b, Level lv, EdgeId e);
bool path_all_max(const BratteliDiagram& b, const FinitePath& p);
bool path_all_min(const BratteliDiagram& b, const FinitePath& p);

/// Unique all-extreme path from V_0 into `v` at `level`.
FinitePath extreme_path(const BratteliDiagram& b, Level level, VertexId v, bool maximal);

/// Edge of the point at any materialized level, resolving through the tail.
EdgeId edge_at(const BratteliDiagram& b, const PathPoint& x, Level lv);
bool point_valid(const BratteliDiagram& b, const PathPoint& x);
/// Same point with prefix extended to at least `depth` (tail phase kept).
PathPoint extend_prefix(const BratteliDiagram& b, const PathPoint& x, Level depth);
bool path_points_equal(const BratteliDiagram& b, const PathPoint& x, const PathPoint& y);

/// Bump the least non-maximal edge and reset below to the minimal path;
/// nullopt = all edges maximal (NeedDeeper).
std::optional<FinitePath> successor(const BratteliDiagram& b, const FinitePath& p);
/// Mirror image: least non-minimal edge, fiber predecessor, maximal refill.
std::optional<FinitePath> predecessor(const BratteliDiagram& b, const FinitePath& p);

/// The Versik map on points, prefix resolved to at least target_depth.
PathPoint successor_point(const BratteliDiagram& b, const PathPoint& x, Level target_depth);
PathPoint predecessor_point(const BratteliDiagram& b, const PathPoint& x, Level target_depth);

/// Position of p in successor order among depth-n paths into the same
/// vertex (weighted-sum recursion over fiber positions and path counts).
std::uint64_t rank_in_fiber(const BratteliDiagram& b, const FinitePath& p);

/// Rank difference when x and y agree strictly beyond `depth` (at every
/// materialized level); NotCofinal otherwise.
CocycleValue counting_cocycle(const BratteliDiagram& b, const PathPoint& x, const PathPoint& y,
                              Level depth);

/// All depth-`level` paths, duplicate-free, sorted by (end vertex, rank).
std::vector<FinitePath> enumerate_paths(const BratteliDiagram& b, Level level);

/// Verifies at the path level that every depth-`level` path lies in
/// union_{n<=N0} phi^n(U) (or phi^{-n} when backward), U given as a set of
/// depth-`level` paths containing every all-extreme path of that side.
CoverageVerdict check_orbit_cofinality(const BratteliDiagram& b, Level level,
                                       const std::vector<FinitePath>& u, int bound,
                                       bool backward = false);

}  // namespace vershik
