/* io.hh -- text formats: .bd diagrams, .sys systems, .ns nested sequences.
 * Grammar documented in the README; emit/parse round-trip at the emitted
 * resolution. */

#pragma once

#include <iosfwd>
#include <string>

#include "vershik/bratteli.hh"
#include "vershik/nested.hh"
#include "vershik/systems.hh"

namespace vershik {

std::string emit_diagram(const BratteliDiagram& b);
BratteliDiagram parse_diagram(const std::string& text, const std::string& filename = "<input>");

std::string emit_system(const BratteliSystem& s, Level depth);
BratteliSystem parse_system(const std::string& text, const std::string& filename = "<input>");

std::string emit_nested(const NestedSequence& n, Level depth);
NestedSequence parse_nested(const std::string& text, const std::string& filename = "<input>");

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace vershik
