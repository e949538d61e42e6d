/* core.hh -- shared ids, error types and verdict helpers. */

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vershik {

using CellId = std::uint32_t;
using Level = int;  // partition depth, 1-based

inline constexpr CellId kNoCell = static_cast<CellId>(-1);

/// A point (or clopen set) could not be resolved within the materialized
/// depth bound of the space.
struct ResolutionExhausted : std::runtime_error {
    explicit ResolutionExhausted(const std::string& what)
        : std::runtime_error("resolution exhausted: " + what) {}
};

/// The argument lies outside the domain of the partial map at every
/// materialized resolution.
struct OutsideDomain : std::runtime_error {
    explicit OutsideDomain(const std::string& what)
        : std::runtime_error("outside domain: " + what) {}
};

/// The path point is maximal: the successor map is undefined on it.
struct MaximalPoint : std::runtime_error {
    explicit MaximalPoint(const std::string& what)
        : std::runtime_error("maximal point: " + what) {}
};

struct LevelMismatch : std::runtime_error {
    explicit LevelMismatch(const std::string& what)
        : std::runtime_error("level mismatch: " + what) {}
};

struct BadCuts : std::runtime_error {
    explicit BadCuts(const std::string& what)
        : std::runtime_error("bad cut levels: " + what) {}
};

/// Return-time function exceeded the pigeonhole bound: the system is not a
/// Bratteli system at this resolution.
struct LambdaUnbounded : std::runtime_error {
    explicit LambdaUnbounded(int bound)
        : std::runtime_error("return time exceeds pigeonhole bound " +
                             std::to_string(bound)),
          bound(bound) {}
    int bound;
};

/// A tower floor is split across base cells of the previous stage;
/// indicates the refinement step was skipped.
struct BrokenContainment : std::runtime_error {
    explicit BrokenContainment(const std::string& what)
        : std::runtime_error("broken containment: " + what) {}
};

/// dom phi_1 is not dense in the union of the dom phi_n at some
/// materialized level.
struct NotDense : std::runtime_error {
    explicit NotDense(const std::string& what)
        : std::runtime_error("dom phi_1 not dense: " + what) {}
};

struct PreconditionError : std::invalid_argument {
    explicit PreconditionError(const std::string& what)
        : std::invalid_argument(what) {}
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& file, int line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what) {}
};

/// Verdict of a bounded coverage check: either the least sufficient bound,
/// or failure up to the bound that was tried.
struct CoverageVerdict {
    bool satisfied = false;
    int steps = 0;  // least N0 when satisfied, tried bound otherwise

    static CoverageVerdict ok(int n0) { return {true, n0}; }
    static CoverageVerdict failed(int n) { return {false, n}; }
};

}  // namespace vershik
