#include "varqd/io.hpp"

#include "varqd/errors.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace varqd {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

constexpr char kMagic[8] = {'V', 'A', 'R', 'Q', 'D', 'W', 'F', '1'};

template <class T>
void put(std::vector<unsigned char>& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.insert(out.end(), bytes, bytes + sizeof(T));
}

template <class T>
T get(const unsigned char*& in) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, in, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  in += sizeof(T);
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const Wavefunction& psi,
                    SnapshotHeader header) {
  const Grid& g = psi.grid();
  header.dimension = static_cast<std::uint32_t>(g.dimension());
  header.points = static_cast<std::uint32_t>(g.points());
  header.length = g.length();
  std::vector<unsigned char> bytes(kMagic, kMagic + 8);
  put(bytes, header.dimension);
  put(bytes, header.points);
  put(bytes, header.length);
  put(bytes, header.time);
  put(bytes, header.hbar);
  put(bytes, header.physics_hash);
  put(bytes, header.particle);
  put(bytes, header.particle_count);
  put(bytes, header.sample);
  for (std::size_t j = 0; j < psi.size(); ++j) {
    put(bytes, psi[j].real());
    put(bytes, psi[j].imag());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("snapshot", "cannot read " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < kSnapshotHeaderBytes || std::memcmp(bytes.data(), kMagic, 8) != 0) {
    throw ValidationError("snapshot", path.string() + " is not a wavefunction snapshot");
  }
  const unsigned char* p = bytes.data() + 8;
  SnapshotHeader h;
  h.dimension = get<std::uint32_t>(p);
  h.points = get<std::uint32_t>(p);
  h.length = get<double>(p);
  h.time = get<double>(p);
  h.hbar = get<double>(p);
  h.physics_hash = get<std::uint64_t>(p);
  h.particle = get<std::uint32_t>(p);
  h.particle_count = get<std::uint32_t>(p);
  h.sample = get<std::uint64_t>(p);
  const Grid grid(static_cast<int>(h.dimension), h.length, static_cast<int>(h.points));
  if (bytes.size() != kSnapshotHeaderBytes + 16 * grid.size()) {
    throw ValidationError("snapshot", path.string() + " has the wrong payload size");
  }
  Wavefunction psi(grid);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double re = get<double>(p);
    const double im = get<double>(p);
    psi[j] = cplx(re, im);
  }
  return {h, std::move(psi)};
}

std::size_t CsvTable::column(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ValidationError("csv", "missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

bool CsvTable::has_column(const std::string& name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "# config_hash: " << table.config_hash << '\n';
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("csv", "cannot read " + path.string());
  CsvTable table;
  std::string line;
  const std::string prefix = "# config_hash: ";
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind(prefix, 0) == 0) {
      table.config_hash = line.substr(prefix.size());
      continue;
    }
    if (line[0] == '#') continue;
    std::stringstream cells(line);
    std::string cell;
    if (table.header.empty()) {
      while (std::getline(cells, cell, ',')) table.header.push_back(cell);
      continue;
    }
    std::vector<double> row;
    while (std::getline(cells, cell, ',')) {
      char* end = nullptr;
      row.push_back(std::strtod(cell.c_str(), &end));
      if (end != cell.c_str() + cell.size()) {
        throw ValidationError("csv", "non-numeric cell '" + cell + "' in " + path.string());
      }
    }
    if (row.size() != table.header.size()) {
      throw ValidationError("csv", "ragged row in " + path.string());
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable trajectory_table(const TrajectoryRecord& record) {
  CsvTable t;
  if (record.kind == Kind::Frozen) {
    const std::size_t d = record.samples.empty() ? 0 : (record.samples[0].parameters.size() - 1) / 2;
    t.header.push_back("t");
    t.header.push_back("theta");
    for (std::size_t m = 1; m <= d; ++m) t.header.push_back("q_" + std::to_string(m));
    for (std::size_t m = 1; m <= d; ++m) t.header.push_back("p_" + std::to_string(m));
    for (const char* c : {"norm", "E0", "epsilon", "bound"}) t.header.push_back(c);
    for (const auto& s : record.samples) {
      std::vector<double> row{s.t};
      row.insert(row.end(), s.parameters.begin(), s.parameters.end());
      row.insert(row.end(), {s.norm, s.energy, s.epsilon, s.bound});
      t.rows.push_back(std::move(row));
    }
    return t;
  }
  const std::size_t n = record.samples.empty() ? 0 : record.samples[0].particle_norms.size();
  t.header = {"t", "norm", "E0", "epsilon", "bound", "c1"};
  for (std::size_t i = 1; i <= n; ++i) t.header.push_back("norm_" + std::to_string(i));
  for (std::size_t i = 1; i <= n; ++i) t.header.push_back("eps_kin_" + std::to_string(i));
  for (const auto& s : record.samples) {
    std::vector<double> row{s.t, s.norm, s.energy, s.epsilon, s.bound, s.c1.value_or(0.0)};
    row.insert(row.end(), s.particle_norms.begin(), s.particle_norms.end());
    row.insert(row.end(), s.kinetic.begin(), s.kinetic.end());
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable reference_table(const ReferenceRun& run) {
  CsvTable t;
  t.header = {"t", "norm", "E0"};
  for (const auto& s : run.snapshots) t.rows.push_back({s.t, norm(s.psi), s.energy});
  return t;
}

CsvTable certified_table(const CertificateReport& report) {
  CsvTable t;
  t.header = {"t", "epsilon", "bound", "true_error", "slack", "margin"};
  for (const auto& r : report.rows) {
    if (!r.true_error) continue;
    t.rows.push_back({r.t, r.epsilon, r.bound, *r.true_error, r.slack.value_or(0.0),
                      r.margin.value_or(0.0)});
  }
  return t;
}

}  // namespace varqd
