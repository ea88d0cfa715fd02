#pragma once

#include "varqd/grid.hpp"
#include "varqd/propagate.hpp"
#include "varqd/reference.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace varqd {

/// %.17g: round-trips every double.
std::string format_double(double v);

/// Descriptive 64-byte little-endian header of a wavefunction snapshot:
/// magic "VARQDWF1", u32 dimension, u32 points, f64 length, f64 time, f64 hbar,
/// u64 physics hash, u32 particle index, u32 particle count, u64 sample index.
/// The header is followed by (re, im) f64 pairs in grid order.
struct SnapshotHeader {
  std::uint32_t dimension = 1;
  std::uint32_t points = 0;
  double length = 0.0;
  double time = 0.0;
  double hbar = 1.0;
  std::uint64_t physics_hash = 0;
  std::uint32_t particle = 0;
  std::uint32_t particle_count = 1;
  std::uint64_t sample = 0;
};

inline constexpr std::size_t kSnapshotHeaderBytes = 64;

void write_snapshot(const std::filesystem::path& path, const Wavefunction& psi,
                    SnapshotHeader header);
struct Snapshot {
  SnapshotHeader header;
  Wavefunction psi;
};
Snapshot read_snapshot(const std::filesystem::path& path);

/// Numeric CSV with a leading "# config_hash: <hex>" line.
struct CsvTable {
  std::string config_hash;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a column; throws ValidationError if absent.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

/// Frozen: t,theta,q_1..q_d,p_1..p_d,norm,E0,epsilon,bound
/// Hartree: t,norm,E0,epsilon,bound,c1,norm_1..norm_N,eps_kin_1..eps_kin_N
CsvTable trajectory_table(const TrajectoryRecord& record);
/// t,norm,E0
CsvTable reference_table(const ReferenceRun& run);
/// t,epsilon,bound,true_error,slack,margin (rows with a true error only)
CsvTable certified_table(const CertificateReport& report);

}  // namespace varqd
