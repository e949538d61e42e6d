/* dot.hh -- layered DOT rendering of ordered Bratteli diagrams. */

#pragma once

#include <string>

#include "vershik/bratteli.hh"

namespace vershik {

/// Layered digraph with one rank per vertex level and order indices as
/// edge labels.
std::string to_dot(const BratteliDiagram& b);

}  // namespace vershik
