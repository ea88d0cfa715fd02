// Command-line front end: run, certify, compare, sweep.

#include "varqd/errors.hpp"
#include "varqd/log.hpp"
#include "varqd/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

namespace fs = std::filesystem;

void print_summary(const varqd::RunSummary& s) {
  std::printf("%s: %s T=%s bound=%s epsilon_max=%s", s.directory.string().c_str(),
              varqd::to_string(s.kind), varqd::format_double(s.final_time).c_str(),
              varqd::format_double(s.bound).c_str(), varqd::format_double(s.epsilon_max).c_str());
  if (s.true_error) {
    std::printf(" true_error=%s%s", varqd::format_double(*s.true_error).c_str(),
                s.violated ? " VIOLATED" : "");
  }
  std::printf("\n");
}

std::vector<std::string> split_values(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw varqd::ValidationError("--values", "empty entry");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

int run_command(const std::string& config, const std::string& output) {
  const varqd::Scenario sc = varqd::load_scenario_file(config);
  const fs::path dir = output.empty() ? sc.output_directory : fs::path(output);
  print_summary(varqd::run_scenario(sc, dir));
  return 0;
}

int certify_command(const std::string& run, const std::string& reference) {
  const auto report = varqd::certify_directories(run, reference);
  std::printf("T=%s bound=%s true_error=%s margin=%s slack=%s %s\n",
              varqd::format_double(report.final_time).c_str(),
              varqd::format_double(report.bound).c_str(),
              varqd::format_double(report.true_error.value_or(0.0)).c_str(),
              varqd::format_double(report.margin.value_or(0.0)).c_str(),
              varqd::format_double(report.slack ? report.slack->at(report.final_time) : 0.0).c_str(),
              report.violated ? "VIOLATED" : "ok");
  return 0;
}

int compare_command(const std::vector<std::string>& dirs, const std::string& output) {
  std::vector<fs::path> paths(dirs.begin(), dirs.end());
  const auto cmp = varqd::compare_directories(paths);
  if (!output.empty()) varqd::write_csv(output, cmp.aligned);
  std::printf("label,final_time,bound,epsilon_max,true_error,max_dq,max_dp,max_depsilon,max_dbound\n");
  for (const auto& r : cmp.runs) {
    std::printf("%s,%s,%s,%s,%s,%s,%s,%s,%s\n", r.label.c_str(),
                varqd::format_double(r.final_time).c_str(), varqd::format_double(r.bound).c_str(),
                varqd::format_double(r.epsilon_max).c_str(),
                r.true_error ? varqd::format_double(*r.true_error).c_str() : "",
                varqd::format_double(r.max_dq).c_str(), varqd::format_double(r.max_dp).c_str(),
                varqd::format_double(r.max_depsilon).c_str(),
                varqd::format_double(r.max_dbound).c_str());
  }
  return 0;
}

int sweep_command(const std::string& config, const std::string& param, const std::string& values) {
  std::ifstream in(config);
  if (!in) throw varqd::ValidationError("config", "cannot read " + config);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto table = varqd::ConfigTable::parse(buffer.str());
  const auto runs = varqd::sweep(table, fs::path(config).parent_path(), param,
                                 split_values(values), varqd::thread_budget());
  for (const auto& r : runs) print_summary(r);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational quantum dynamics with a posteriori error certificates"};
  app.set_version_flag("--version", std::string(VARQD_VERSION));
  app.require_subcommand(1);

  std::string config;
  std::string output;
  auto* run = app.add_subcommand("run", "Propagate one scenario");
  run->add_option("config", config, "Scenario file")->required();
  run->add_option("-o,--output", output, "Output directory (default: output.directory)");

  std::string run_dir;
  std::string ref_dir;
  auto* certify = app.add_subcommand("certify", "Join a run with a reference run");
  certify->add_option("--run", run_dir, "Variational run directory")->required();
  certify->add_option("--reference", ref_dir, "Reference run directory")->required();

  std::vector<std::string> dirs;
  std::string table;
  auto* compare = app.add_subcommand("compare", "Align several runs");
  compare->add_option("dirs", dirs, "Run directories")->required();
  compare->add_option("-o,--output", table, "Write the aligned table to this CSV file");

  std::string param;
  std::string values;
  auto* sweep = app.add_subcommand("sweep", "Run a scenario for several values of one key");
  sweep->add_option("config", config, "Scenario file")->required();
  sweep->add_option("--param", param, "Key such as frozen.delta")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  varqd::set_warning_sink([](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; });
  try {
    if (*run) return run_command(config, output);
    if (*certify) return certify_command(run_dir, ref_dir);
    if (*compare) return compare_command(dirs, table);
    if (*sweep) return sweep_command(config, param, values);
  } catch (const varqd::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const varqd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
