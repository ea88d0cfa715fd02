#pragma once

#include "varqd/frozen.hpp"
#include "varqd/integrator.hpp"
#include "varqd/potential.hpp"
#include "varqd/propagate.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace varqd {

/// A value of the TOML subset: number, string, boolean or array of numbers.
using ConfigValue = std::variant<double, std::string, bool, std::vector<double>>;

/// Flat `section.key -> value` table of a TOML-style document.
///
/// Supported: `[section]` headers, `key = value` lines, `#` comments, double-quoted
/// strings, true/false, decimal numbers and single-line arrays of numbers.
class ConfigTable {
 public:
  static ConfigTable parse(const std::string& text);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, ConfigValue>& values() const { return values_; }
  void set(const std::string& key, ConfigValue value) { values_[key] = std::move(value); }

  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  long integer(const std::string& key) const;
  long integer(const std::string& key, long fallback) const;
  std::string string(const std::string& key) const;
  std::string string(const std::string& key, const std::string& fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::vector<double> array(const std::string& key) const;
  std::vector<double> array(const std::string& key, const std::vector<double>& fallback) const;

  /// Canonical text: sorted keys, numbers at 17 significant digits.
  std::string canonical() const;

 private:
  std::map<std::string, ConfigValue> values_;
};

/// Parses a single value with the TOML subset rules (used for sweep overrides).
ConfigValue parse_config_value(const std::string& text, const std::string& key);

struct FrozenSettings {
  double delta = 1.0;
  double theta = 0.0;
  std::vector<double> q;
  std::vector<double> p;
};

struct HartreeSettings {
  std::vector<double> centers;
  std::vector<double> momenta;
  std::vector<double> widths;
  std::vector<double> kinetic_scales;
};

struct Scenario {
  Kind kind = Kind::Frozen;
  Principle principle = Principle::MVP;
  double hbar = 1.0;
  std::string potential_text;
  Potential potential;
  std::optional<FrozenSettings> frozen;
  std::optional<HartreeSettings> hartree;
  double length = 20.0;
  int points = 256;
  std::size_t max_points = Grid::kMaxPoints;
  IntegratorOptions integrator;
  /// Step halving to estimate the integrator error constant.
  bool estimate_error = false;
  bool renormalize = true;
  int stride = 1;
  std::filesystem::path output_directory = "out";
  bool reference_enabled = false;
  double reference_dt = 1e-4;
  /// Upper bound on second derivatives of V for the frozen Taylor bound; absent disables it.
  std::optional<double> c2;

  ConfigTable table;
  std::filesystem::path base_directory;

  /// Number of coordinates of the full problem (d for packets, N for products).
  int coordinates() const;
  /// Grid on which grid states of this scenario live (1D per particle for Hartree).
  Grid grid() const;
  /// Grid of the full problem: the packet grid, or the product grid for two particles.
  Grid reference_grid() const;
  Hamiltonian hamiltonian() const;
  FrozenParams frozen_params() const;
  HartreeState hartree_state() const;
  /// Initial state of the full problem on reference_grid().
  Wavefunction initial_wavefunction() const;

  /// FNV-1a hash of the canonical configuration.
  std::uint64_t config_hash() const;
  /// FNV-1a hash of everything that fixes the exact solution: hbar, potential, grid,
  /// kinetic scales and initial state. Runs and references must agree on it.
  std::uint64_t physics_hash() const;
};

/// Builds and validates a scenario; ValidationError names the offending key.
Scenario load_scenario(const ConfigTable& table, const std::filesystem::path& base_directory);
Scenario load_scenario_file(const std::filesystem::path& path);

std::uint64_t fnv1a(const std::string& text);
std::string hex(std::uint64_t value);

}  // namespace varqd
