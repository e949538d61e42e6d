/* builtins.hh -- built-in instances used by tests and the CLI: the 2-adic
 * odometer, the dyadic diagram, and the two interleaved-sequence examples
 * on the convergent double sequence space. */

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "vershik/bratteli.hh"
#include "vershik/nested.hh"
#include "vershik/systems.hh"

namespace vershik {

/// Product space {0,1}^N materialized to `depth`: level-n cells are the
/// 2^n bit prefixes (little endian ids), tail rules append constant bits.
SpacePtr binary_space(Level depth);

/// The point whose coordinates are the 2-adic digits of v (two's
/// complement; tail "zeros" for v >= 0, "ones" for v < 0).
Point dyadic_point(const SymbolicSpace& sp, std::int64_t v);
CellId dyadic_cell(std::int64_t v, Level lv);

/// Adding machine with one chosen maximal point: phi = +1 on
/// X \ {base}, X_max = {base}, X_min = {base + 1}.
BratteliSystem odometer_system(Level depth, std::int64_t base = -1);

/// phi^n on the binary space minus a finite set of excluded points
/// (restriction of the full adding machine; exact mod-2^level cell maps).
PartialHomeo odometer_power(SpacePtr space, int n, std::vector<std::int64_t> excluded);

/// Nested sequence over the adding machine with the staircase exclusion
/// sets around the orbit of `base`; phi_n beyond the stored window is
/// generated by the "dh-powers" rule.
NestedSequence dh_nested(Level depth, std::int64_t base = 0);

/// X = {(1/n, i) : i = 1,2} with the two limit points (0,1), (0,2);
/// level-n cells are the singletons up to 1/n plus one tail cell per row.
SpacePtr nonsemisat_space(Level depth);

/// Points of the double-sequence space.
Point nonsemisat_point(const SymbolicSpace& sp, int m, int i);  // (1/m, i)
Point nonsemisat_limit(const SymbolicSpace& sp, int i);         // (0, i)

/// The interleaving nested sequence (rows swap along the walk); fails
/// semi-saturation.
NestedSequence nonsemisat_nested(Level depth);

/// The straightened single-map system generating the same orbit relation:
/// row 1 -> row 2 -> next column, X_max = {(0,2)},
/// X_min = {(1,1), (0,1)}.
BratteliSystem nonsemisat_bratteli(Level depth);

/// Stationary diagram with one vertex and two edges per level.
BratteliDiagram dyadic_diagram(Level depth);

struct BuiltinObject {
    std::string kind;  // diagram | system | nested | space
    std::optional<BratteliDiagram> diagram;
    std::optional<BratteliSystem> system;
    std::optional<NestedSequence> nested;
    SpacePtr space;
};

std::vector<std::string> builtin_names();
/// Throws PreconditionError on an unknown name.
BuiltinObject build_builtin(const std::string& name, Level depth, std::int64_t base = -1);

}  // namespace vershik
