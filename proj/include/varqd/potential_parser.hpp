#pragma once

#include "varqd/grid.hpp"
#include "varqd/potential.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace varqd {

struct PotentialContext {
  /// Grid on which custom(file=...) tables are read; required for custom potentials.
  std::optional<Grid> grid;
  /// Directory that relative table paths are resolved against.
  std::filesystem::path base_directory;
};

/// Parses the potential grammar:
///
///   expr  := name "(" [arg {"," arg}] ")"
///   arg   := key "=" (number | string) | number | expr
///
/// Models: harmonic(k), quartic(k2, k4), morse(D, a, x0), doublewell(a, b),
/// pair(lambda), linear(mu_1, ..., mu_d), constant(c), separable(expr, ...),
/// sum(expr, ...), custom(file="table.txt").
/// Throws ValidationError with field "potential" on malformed input.
Potential parse_potential(const std::string& text, const PotentialContext& context = {});

/// Reads M^d whitespace-separated values in row-major order; '#' starts a comment.
std::vector<double> read_table(const std::filesystem::path& path, const Grid& grid);

}  // namespace varqd
