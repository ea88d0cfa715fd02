#include "varqd/pipeline.hpp"

#include "varqd/errors.hpp"
#include "varqd/reference.hpp"
#include "varqd/spectral.hpp"

#include <Eigen/Core>
#include <fftw3.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

namespace varqd {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("json", "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("json", path.string() + ": " + e.what());
  }
}

json grid_json(const Grid& g) {
  return {{"dimension", g.dimension()}, {"length", g.length()}, {"points", g.points()}};
}

json manifest(const Scenario& sc) {
  json m;
  m["program"] = "varqd";
  m["version"] = VARQD_VERSION;
  m["libraries"] = {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                  std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                  std::to_string(EIGEN_MINOR_VERSION)},
                    {"fftw", std::string(fftw_version)}};
  m["seed"] = nullptr;
  m["kind"] = to_string(sc.kind);
  m["principle"] = to_string(sc.principle);
  m["potential"] = sc.potential.describe();
  m["config_hash"] = hex(sc.config_hash());
  m["physics_hash"] = hex(sc.physics_hash());
  m["config"] = sc.table.canonical();
  const fs::path base = sc.base_directory.empty() ? fs::path(".") : sc.base_directory;
  m["base_directory"] = fs::absolute(base).lexically_normal().string();
  return m;
}

json slack_json(const SlackModel& s, double t) {
  return {{"integrator", s.integrator},   {"dt", s.dt},
          {"reference", s.reference},     {"dt_reference", s.dt_reference},
          {"grid_tail", s.grid_tail},     {"at_final_time", s.at(t)}};
}

json certificate_json(const CertificateReport& r) {
  json j;
  j["final_time"] = r.final_time;
  j["bound"] = r.bound;
  j["epsilon_max"] = r.epsilon_max;
  j["epsilon_mean"] = r.epsilon_mean;
  j["dt"] = r.dt;
  if (r.slack) j["slack"] = slack_json(*r.slack, r.final_time);
  if (r.true_error) {
    j["true_error"] = *r.true_error;
    j["margin"] = *r.margin;
  }
  bool any_error = false;
  for (const auto& row : r.rows) any_error = any_error || row.true_error.has_value();
  if (any_error) j["violated"] = r.violated;
  return j;
}

// ||u - v||^2 for Hartree products: 2 - 2 Re prod <phi_n|phi'_n>.
double product_distance(const HartreeState& a, const HartreeState& b) {
  cplx overlap = 1.0;
  double na = 1.0;
  double nb = 1.0;
  for (int n = 0; n < a.count(); ++n) {
    const auto i = static_cast<std::size_t>(n);
    overlap *= inner(a.particles[i], b.particles[i]);
    na *= squared_norm(a.particles[i]);
    nb *= squared_norm(b.particles[i]);
  }
  return std::sqrt(std::max(0.0, na + nb - 2.0 * overlap.real()));
}

IntegratorOptions halved(const IntegratorOptions& o) {
  IntegratorOptions h = o;
  h.dt *= 0.5;
  return h;
}

long reference_steps(double t_final, double dt) {
  const double ratio = t_final / dt;
  const long steps = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-6 * std::max(1.0, ratio)) {
    throw ValidationError("reference.dt", "t_final is not a multiple of the reference step");
  }
  return steps;
}

void write_snapshots(const fs::path& dir, const TrajectoryRecord& rec, const Scenario& sc) {
  fs::create_directories(dir);
  for (std::size_t k = 0; k < rec.hartree_states.size(); ++k) {
    const auto& state = rec.hartree_states[k];
    for (int n = 0; n < state.count(); ++n) {
      SnapshotHeader h;
      h.time = rec.samples[k].t;
      h.hbar = sc.hbar;
      h.physics_hash = sc.physics_hash();
      h.particle = static_cast<std::uint32_t>(n);
      h.particle_count = static_cast<std::uint32_t>(state.count());
      h.sample = k;
      write_snapshot(dir / ("hartree_" + std::to_string(k) + "_p" + std::to_string(n + 1) + ".bin"),
                     state.particles[static_cast<std::size_t>(n)], h);
    }
  }
}

void write_reference_snapshots(const fs::path& dir, const ReferenceRun& run, const Scenario& sc) {
  fs::create_directories(dir);
  for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
    SnapshotHeader h;
    h.time = run.snapshots[k].t;
    h.hbar = sc.hbar;
    h.physics_hash = sc.physics_hash();
    h.sample = k;
    write_snapshot(dir / ("reference_" + std::to_string(k) + ".bin"), run.snapshots[k].psi, h);
  }
}

// Full-problem state of the k-th recorded sample.
Wavefunction recorded_state(const TrajectoryRecord& rec, std::size_t k, const Grid& grid) {
  if (rec.kind == Kind::Frozen) return synthesize(rec.frozen_states[k], grid);
  return assemble_product(rec.hartree_states[k]);
}

double energy_drift(const TrajectoryRecord& rec) {
  double drift = 0.0;
  for (const auto& s : rec.samples) {
    drift = std::max(drift, std::abs(s.energy - rec.samples.front().energy));
  }
  return drift;
}

RunSummary run_reference_scenario(const Scenario& sc, const fs::path& dir) {
  const Wavefunction psi0 = sc.initial_wavefunction();
  const Hamiltonian h = sc.hamiltonian();
  const double dt = sc.reference_dt;
  const long steps = reference_steps(sc.integrator.t_final, dt);
  const ReferenceRun run = split_step(psi0, h, dt, steps, sc.stride);

  CsvTable table = reference_table(run);
  table.config_hash = hex(sc.config_hash());
  write_csv(dir / "trajectory.csv", table);
  write_reference_snapshots(dir / "snapshots", run, sc);

  json cert;
  cert["kind"] = "reference";
  cert["final_time"] = run.snapshots.back().t;
  cert["dt"] = dt;
  cert["steps"] = steps;
  cert["max_norm_drift"] = run.max_norm_drift;
  cert["energy_drift"] = std::abs(run.snapshots.back().energy - run.snapshots.front().energy);
  cert["grid"] = grid_json(run.grid);
  cert["config_hash"] = hex(sc.config_hash());
  cert["physics_hash"] = hex(sc.physics_hash());
  if (sc.estimate_error && steps > 0) {
    const ReferenceRun fine = split_step(psi0, h, 0.5 * dt, 2 * steps, 2 * steps);
    const double diff = norm(fine.snapshots.back().psi - run.snapshots.back().psi);
    SlackModel s;
    s.reference = SlackModel::reference_constant(diff, dt, sc.integrator.t_final);
    s.dt_reference = dt;
    cert["slack"] = slack_json(s, sc.integrator.t_final);
  }
  write_json(dir / "certificate.json", cert);
  return {dir, Kind::Reference, run.snapshots.back().t, 0.0, 0.0, std::nullopt, false};
}

}  // namespace

RunSummary run_scenario(const Scenario& sc, const fs::path& dir) {
  fs::create_directories(dir);
  write_json(dir / "manifest.json", manifest(sc));
  if (sc.kind == Kind::Reference) return run_reference_scenario(sc, dir);

  const Hamiltonian h = sc.hamiltonian();
  const RecordOptions record{sc.stride, true, sc.renormalize};
  TrajectoryRecord rec;
  std::optional<FrozenSystem> frozen;
  std::optional<HartreeSystem> hartree;
  if (sc.kind == Kind::Frozen) {
    frozen.emplace(h, sc.coordinates(), sc.grid());
    rec = run_frozen(sc.frozen_params(), *frozen, sc.principle, sc.integrator, record);
  } else {
    hartree.emplace(h, sc.grid(), sc.coordinates());
    rec = run_hartree(sc.hartree_state(), *hartree, sc.principle, sc.integrator, record);
    write_snapshots(dir / "snapshots", rec, sc);
  }

  const double t_final = sc.integrator.t_final;
  std::optional<SlackModel> slack;
  if ((sc.estimate_error || sc.reference_enabled) && t_final > 0.0) {
    SlackModel s;
    s.dt = rec.integrator.dt;
    const RecordOptions coarse{1 << 30, false, sc.renormalize};
    double diff = 0.0;
    if (frozen) {
      const auto fine = run_frozen(sc.frozen_params(), *frozen, sc.principle,
                                   halved(sc.integrator), coarse);
      diff = norm(synthesize(fine.frozen_states.back(), sc.grid()) -
                  synthesize(rec.frozen_states.back(), sc.grid()));
    } else {
      const auto fine = run_hartree(sc.hartree_state(), *hartree, sc.principle,
                                    halved(sc.integrator), coarse);
      diff = product_distance(fine.hartree_states.back(), rec.hartree_states.back());
    }
    s.integrator = SlackModel::integrator_constant(diff, s.dt, t_final);
    slack = s;
  }

  std::optional<std::vector<ErrorSample>> errors;
  if (sc.reference_enabled) {
    const Grid grid = sc.reference_grid();
    const Wavefunction psi0 = sc.initial_wavefunction();
    const double dt_ref = sc.reference_dt;
    const long steps = reference_steps(t_final, dt_ref);
    const ReferenceRun run = split_step(psi0, h, dt_ref, steps, 1);
    errors.emplace();
    for (std::size_t k = 0; k < rec.samples.size(); ++k) {
      errors->push_back({rec.samples[k].t, true_error(recorded_state(rec, k, grid), run, rec.samples[k].t)});
    }
    if (steps > 0) {
      const ReferenceRun fine = split_step(psi0, h, 0.5 * dt_ref, 2 * steps, 2 * steps);
      const double diff = norm(fine.snapshots.back().psi - run.snapshots.back().psi);
      slack->reference = SlackModel::reference_constant(diff, dt_ref, t_final);
      slack->dt_reference = dt_ref;
    }
    slack->grid_tail = spectral_tail(run.snapshots.back().psi) +
                       spectral_tail(recorded_state(rec, rec.samples.size() - 1, grid));
  }

  const CertificateReport report = certify(rec, errors, slack);
  CsvTable table = trajectory_table(rec);
  table.config_hash = hex(sc.config_hash());
  write_csv(dir / "trajectory.csv", table);
  if (errors) {
    CsvTable certified = certified_table(report);
    certified.config_hash = table.config_hash;
    write_csv(dir / "certified.csv", certified);
  }

  json cert = certificate_json(report);
  cert["kind"] = to_string(sc.kind);
  cert["principle"] = to_string(sc.principle);
  cert["gauge_convention"] = rec.gauge_convention;
  if (sc.kind == Kind::Frozen) {
    cert["phase_convention"] = rec.gauge_convention
                                   ? "theta follows the McLachlan phase equation (not fixed by TDVP)"
                                   : "theta from the McLachlan phase equation";
  } else {
    cert["phase_convention"] = "gauge factor on particle 1 with kappa_1 = 0 (c1 = E0)";
  }
  cert["method"] = to_string(sc.integrator.method);
  cert["accepted_steps"] = rec.accepted_steps;
  cert["rejected_steps"] = rec.rejected_steps;
  cert["energy_drift"] = energy_drift(rec);
  cert["max_norm_drift"] = rec.max_norm_drift;
  cert["renormalizations"] = rec.renormalizations;
  cert["grid"] = grid_json(sc.grid());
  cert["config_hash"] = hex(sc.config_hash());
  cert["physics_hash"] = hex(sc.physics_hash());
  if (sc.kind == Kind::Frozen && sc.c2) {
    const double tb = taylor_bound(sc.frozen_params(), *sc.c2);
    cert["taylor_bound"] = tb;
    cert["taylor_bound_holds"] = report.epsilon_max <= tb;
  }
  write_json(dir / "certificate.json", cert);

  return {dir, sc.kind, report.final_time, report.bound, report.epsilon_max, report.true_error,
          report.violated};
}

namespace {

Scenario scenario_from_manifest(const json& m) {
  const auto table = ConfigTable::parse(m.at("config").get<std::string>());
  return load_scenario(table, m.value("base_directory", std::string(".")));
}

std::vector<fs::path> reference_files(const fs::path& dir) {
  std::vector<std::pair<long, fs::path>> found;
  if (!fs::exists(dir)) return {};
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("reference_", 0) == 0 && entry.path().extension() == ".bin") {
      found.emplace_back(std::stol(name.substr(10)), entry.path());
    }
  }
  std::sort(found.begin(), found.end());
  std::vector<fs::path> out;
  for (auto& f : found) out.push_back(f.second);
  return out;
}

}  // namespace

CertificateReport certify_directories(const fs::path& run_dir, const fs::path& ref_dir) {
  const json run_manifest = read_json(run_dir / "manifest.json");
  const json ref_manifest = read_json(ref_dir / "manifest.json");
  if (run_manifest.at("kind") == "reference") {
    throw ValidationError("run", run_dir.string() + " is a reference run");
  }
  if (ref_manifest.at("kind") != "reference") {
    throw ValidationError("reference", ref_dir.string() + " is not a reference run");
  }
  if (run_manifest.at("physics_hash") != ref_manifest.at("physics_hash")) {
    throw ValidationError("reference", "physics hash " + ref_manifest.at("physics_hash").get<std::string>() +
                                           " does not match the run's " +
                                           run_manifest.at("physics_hash").get<std::string>());
  }
  const Scenario sc = scenario_from_manifest(run_manifest);
  const CsvTable traj = read_csv(run_dir / "trajectory.csv");
  if (traj.config_hash != run_manifest.at("config_hash")) {
    throw ValidationError("run", "trajectory.csv config hash does not match the manifest");
  }
  const CsvTable ref_traj = read_csv(ref_dir / "trajectory.csv");
  if (ref_traj.config_hash != ref_manifest.at("config_hash")) {
    throw ValidationError("reference", "trajectory.csv config hash does not match the manifest");
  }

  TrajectoryRecord rec;
  rec.kind = sc.kind;
  rec.integrator = sc.integrator;
  const std::size_t ct = traj.column("t"), ce = traj.column("epsilon"), cb = traj.column("bound");
  for (const auto& row : traj.rows) {
    TrajectorySample s;
    s.t = row[ct];
    s.epsilon = row[ce];
    s.bound = row[cb];
    rec.samples.push_back(s);
  }

  const Grid grid = sc.reference_grid();
  const std::string physics = run_manifest.at("physics_hash");
  auto state_at = [&](std::size_t k) {
    if (sc.kind == Kind::Frozen) {
      FrozenParams p = sc.frozen_params();
      p.theta = traj.rows[k][traj.column("theta")];
      for (int m = 0; m < sc.coordinates(); ++m) {
        p.q[static_cast<std::size_t>(m)] = traj.rows[k][traj.column("q_" + std::to_string(m + 1))];
        p.p[static_cast<std::size_t>(m)] = traj.rows[k][traj.column("p_" + std::to_string(m + 1))];
      }
      return synthesize(p, grid);
    }
    HartreeState state;
    state.hbar = sc.hbar;
    for (int n = 1; n <= sc.coordinates(); ++n) {
      const auto snap = read_snapshot(run_dir / "snapshots" /
                                      ("hartree_" + std::to_string(k) + "_p" + std::to_string(n) + ".bin"));
      if (hex(snap.header.physics_hash) != physics) {
        throw ValidationError("run", "snapshot physics hash mismatch");
      }
      state.particles.push_back(snap.psi);
    }
    return assemble_product(state);
  };

  std::vector<ErrorSample> errors;
  std::optional<Wavefunction> last_u;
  std::optional<Wavefunction> last_psi;
  for (const auto& path : reference_files(ref_dir / "snapshots")) {
    Snapshot snap = read_snapshot(path);
    if (hex(snap.header.physics_hash) != physics) {
      throw ValidationError("reference", path.string() + " has a different physics hash");
    }
    std::size_t k = 0;
    try {
      k = rec.index_at(snap.header.time);
    } catch (const DimensionError&) {
      continue;
    }
    Wavefunction u = state_at(k);
    require_same_grid(u.grid(), snap.psi.grid());
    errors.push_back({snap.header.time, norm(u - snap.psi)});
    last_u = std::move(u);
    last_psi = std::move(snap.psi);
  }
  if (errors.empty()) {
    throw ValidationError("reference", "no reference snapshot shares a time with the run");
  }

  SlackModel slack;
  slack.dt = sc.integrator.dt;
  const json run_cert = read_json(run_dir / "certificate.json");
  const json ref_cert = read_json(ref_dir / "certificate.json");
  if (run_cert.contains("slack")) slack.integrator = run_cert["slack"].value("integrator", 0.0);
  if (ref_cert.contains("slack")) {
    slack.reference = ref_cert["slack"].value("reference", 0.0);
    slack.dt_reference = ref_cert["slack"].value("dt_reference", 0.0);
  }
  slack.grid_tail = spectral_tail(*last_psi) + spectral_tail(*last_u);

  CertificateReport report = certify(rec, errors, slack);
  CsvTable certified = certified_table(report);
  certified.config_hash = traj.config_hash;
  write_csv(run_dir / "certified.csv", certified);
  json j = certificate_json(report);
  j["run"] = fs::absolute(run_dir).lexically_normal().string();
  j["reference"] = fs::absolute(ref_dir).lexically_normal().string();
  j["physics_hash"] = physics;
  j["config_hash"] = traj.config_hash;
  j["slack_estimated"] = {{"integrator", run_cert.contains("slack")},
                          {"reference", ref_cert.contains("slack")}};
  write_json(run_dir / "certification.json", j);
  return report;
}

Comparison compare_directories(const std::vector<fs::path>& dirs) {
  if (dirs.empty()) throw ValidationError("compare", "no runs given");
  struct Loaded {
    std::string label;
    CsvTable traj;
    std::optional<CsvTable> certified;
    json cert;
    std::string potential;
  };
  std::vector<Loaded> runs;
  for (const auto& d : dirs) {
    Loaded l;
    l.label = fs::path(d).lexically_normal().filename().string();
    if (l.label.empty()) l.label = d.string();
    const json m = read_json(d / "manifest.json");
    if (m.value("kind", "") == "reference") {
      throw ValidationError("compare", d.string() + " is a reference run; use certify");
    }
    for (const auto& other : runs) {
      if (other.label == l.label) l.label += "#" + std::to_string(runs.size() + 1);
    }
    l.potential = m.value("potential", "");
    l.traj = read_csv(d / "trajectory.csv");
    if (l.traj.config_hash != m.value("config_hash", "")) {
      throw ValidationError("compare", d.string() + ": trajectory hash does not match the manifest");
    }
    if (fs::exists(d / "certified.csv")) l.certified = read_csv(d / "certified.csv");
    l.cert = read_json(d / "certificate.json");
    if (fs::exists(d / "certification.json")) {
      const json c = read_json(d / "certification.json");
      if (c.contains("true_error")) l.cert["true_error"] = c["true_error"];
    }
    if (l.traj.rows.empty()) throw ValidationError("compare", d.string() + " has an empty trajectory");
    runs.push_back(std::move(l));
  }
  const auto& first = runs.front();
  const double horizon = first.traj.rows.back()[first.traj.column("t")];
  for (const auto& r : runs) {
    const double t = r.traj.rows.back()[r.traj.column("t")];
    if (std::abs(t - horizon) > 1e-9 * std::max(1.0, horizon)) {
      throw ValidationError("compare", r.label + " ends at t = " + format_double(t) +
                                           " but " + first.label + " ends at " + format_double(horizon));
    }
    if (r.potential != first.potential) {
      throw ValidationError("compare", r.label + " uses a different potential");
    }
  }

  auto row_at = [](const CsvTable& t, double time) -> const std::vector<double>* {
    const std::size_t c = t.column("t");
    for (const auto& row : t.rows) {
      if (std::abs(row[c] - time) <= 1e-9) return &row;
    }
    return nullptr;
  };
  auto columns_with = [](const CsvTable& t, const std::string& prefix) {
    std::vector<std::string> out;
    for (const auto& h : t.header)
      if (h.rfind(prefix, 0) == 0) out.push_back(h);
    return out;
  };

  Comparison cmp;
  cmp.aligned.config_hash = "compare";
  cmp.aligned.header.push_back("t");
  for (const auto& r : runs) {
    for (const auto& c : columns_with(r.traj, "q_")) cmp.aligned.header.push_back(r.label + ":" + c);
    for (const auto& c : columns_with(r.traj, "p_")) cmp.aligned.header.push_back(r.label + ":" + c);
    cmp.aligned.header.push_back(r.label + ":epsilon");
    cmp.aligned.header.push_back(r.label + ":bound");
    if (r.certified) cmp.aligned.header.push_back(r.label + ":true_error");
  }
  const std::size_t first_t = first.traj.column("t");
  for (const auto& base_row : first.traj.rows) {
    const double t = base_row[first_t];
    std::vector<double> out{t};
    bool complete = true;
    for (const auto& r : runs) {
      const auto* row = row_at(r.traj, t);
      if (!row) {
        complete = false;
        break;
      }
      for (const auto& c : columns_with(r.traj, "q_")) out.push_back((*row)[r.traj.column(c)]);
      for (const auto& c : columns_with(r.traj, "p_")) out.push_back((*row)[r.traj.column(c)]);
      out.push_back((*row)[r.traj.column("epsilon")]);
      out.push_back((*row)[r.traj.column("bound")]);
      if (r.certified) {
        const auto* crow = row_at(*r.certified, t);
        out.push_back(crow ? (*crow)[r.certified->column("true_error")] : std::nan(""));
      }
    }
    if (complete) cmp.aligned.rows.push_back(std::move(out));
  }

  for (const auto& r : runs) {
    ComparisonSummary s;
    s.label = r.label;
    s.final_time = r.traj.rows.back()[r.traj.column("t")];
    s.bound = r.traj.rows.back()[r.traj.column("bound")];
    for (const auto& row : r.traj.rows) s.epsilon_max = std::max(s.epsilon_max, row[r.traj.column("epsilon")]);
    if (r.cert.contains("true_error")) s.true_error = r.cert["true_error"].get<double>();
    for (const auto& row : r.traj.rows) {
      const double t = row[r.traj.column("t")];
      const auto* base = row_at(first.traj, t);
      if (!base) continue;
      auto diff = [&](const std::string& c) {
        if (!first.traj.has_column(c) || !r.traj.has_column(c)) return 0.0;
        return std::abs(row[r.traj.column(c)] - (*base)[first.traj.column(c)]);
      };
      for (const auto& c : columns_with(r.traj, "q_")) s.max_dq = std::max(s.max_dq, diff(c));
      for (const auto& c : columns_with(r.traj, "p_")) s.max_dp = std::max(s.max_dp, diff(c));
      s.max_depsilon = std::max(s.max_depsilon, diff("epsilon"));
      s.max_dbound = std::max(s.max_dbound, diff("bound"));
    }
    cmp.runs.push_back(s);
  }
  return cmp;
}

int thread_budget() {
  if (const char* env = std::getenv("VARQD_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(std::min(v, 1024L));
    throw ValidationError("VARQD_THREADS", "must be a positive integer");
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::vector<RunSummary> sweep(const ConfigTable& base, const fs::path& base_directory,
                              const std::string& key, const std::vector<std::string>& values,
                              int threads) {
  if (values.empty()) throw ValidationError("--values", "no values given");
  std::vector<Scenario> scenarios;
  const fs::path root = base.string("output.directory", "out");
  for (const auto& text : values) {
    ConfigTable t = base;
    t.set(key, parse_config_value(text, key));
    std::string label = key + "=" + text;
    std::replace(label.begin(), label.end(), '/', '_');
    t.set("output.directory", (root / label).string());
    scenarios.push_back(load_scenario(t, base_directory));
  }

  std::vector<RunSummary> out(scenarios.size());
  std::vector<std::exception_ptr> failures(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      try {
        out[i] = run_scenario(scenarios[i], scenarios[i].output_directory);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(scenarios.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return out;
}

}  // namespace varqd
