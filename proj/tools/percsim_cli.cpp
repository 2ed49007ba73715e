#include "percsim/percsim.h"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using ScenarioPtr = std::unique_ptr<percsim_scenario, decltype(&percsim_scenario_free)>;
using ResultPtr = std::unique_ptr<percsim_result, decltype(&percsim_result_free)>;

int exit_code(percsim_status s) {
  switch (s) {
    case PERCSIM_OK: return 0;
    case PERCSIM_CONFIG: return 2;
    case PERCSIM_NUMERICAL: return 3;
    default: return 1;
  }
}

int report_error(percsim_status s) {
  std::fprintf(stderr, "percsim: %s\n", percsim_last_error());
  return exit_code(s);
}

ScenarioPtr load(const std::string& path, percsim_status& st) {
  percsim_scenario* sc = nullptr;
  st = percsim_scenario_load(path.c_str(), &sc);
  return ScenarioPtr(sc, &percsim_scenario_free);
}

std::vector<double> parse_values(const std::string& list, bool& ok) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  ok = true;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) ok = false;
    } catch (const std::exception&) {
      ok = false;
    }
  }
  if (out.empty()) ok = false;
  return out;
}

int cmd_run(const std::string& file, const std::optional<std::uint64_t>& seed, const std::string& out_dir) {
  percsim_status st;
  ScenarioPtr sc = load(file, st);
  if (st != PERCSIM_OK) return report_error(st);
  if (seed) percsim_scenario_set_seed(sc.get(), *seed);

  percsim_result* raw = nullptr;
  const percsim_status run_status = percsim_run(sc.get(), &raw);
  ResultPtr res(raw, &percsim_result_free);
  if (!res) return report_error(run_status);
  const std::string abort_msg = run_status == PERCSIM_NUMERICAL ? percsim_last_error() : "";

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    std::fprintf(stderr, "percsim: cannot create %s: %s\n", out_dir.c_str(), ec.message().c_str());
    return 1;
  }
  const std::string stem = (std::filesystem::path(out_dir) / percsim_scenario_name(sc.get())).string();
  if ((st = percsim_result_write_ticks_csv(res.get(), (stem + ".ticks.csv").c_str())) != PERCSIM_OK)
    return report_error(st);
  if ((st = percsim_result_write_summary_json(res.get(), (stem + ".summary.json").c_str())) != PERCSIM_OK)
    return report_error(st);

  percsim_summary s;
  percsim_result_summary(res.get(), &s);
  std::printf("%s: steps=%d rms=%s sup|P|=%.4f sum|P|=%.2f missed=%.3f latency=%.4f\n",
              percsim_scenario_name(sc.get()), s.steps, s.has_rms ? std::to_string(s.rms_formation).c_str() : "n/a",
              s.sup_cov_norm, s.sum_cov_norm, s.missed_fraction, s.mean_latency);
  if (run_status == PERCSIM_NUMERICAL) {
    std::fprintf(stderr, "percsim: numerical abort: %s\n", abort_msg.c_str());
    return 3;
  }
  return 0;
}

int cmd_sweep(const std::string& file, const std::string& axis, const std::string& values, int seeds,
              const std::string& out_path) {
  bool ok = false;
  const std::vector<double> vals = parse_values(values, ok);
  if (!ok) {
    std::fprintf(stderr, "percsim: --values must be a comma-separated list of numbers\n");
    return 2;
  }
  percsim_status st;
  ScenarioPtr sc = load(file, st);
  if (st != PERCSIM_OK) return report_error(st);
  char* json = nullptr;
  char* table = nullptr;
  st = percsim_sweep(sc.get(), axis.c_str(), vals.data(), vals.size(), seeds, &json, &table);
  if (st != PERCSIM_OK) return report_error(st);
  std::fputs(table, stdout);
  if (!out_path.empty()) {
    std::FILE* f = std::fopen(out_path.c_str(), "wb");
    if (!f) {
      std::fprintf(stderr, "percsim: cannot open %s\n", out_path.c_str());
      percsim_string_free(json);
      percsim_string_free(table);
      return 1;
    }
    std::fputs(json, f);
    std::fputc('\n', f);
    std::fclose(f);
  }
  percsim_string_free(json);
  percsim_string_free(table);
  return 0;
}

int cmd_validate(const std::string& file) {
  percsim_status st;
  ScenarioPtr sc = load(file, st);
  if (st == PERCSIM_OK) st = percsim_scenario_validate(sc.get());
  if (st != PERCSIM_OK) return report_error(st);
  std::printf("%s: ok\n", percsim_scenario_name(sc.get()));
  return 0;
}

int cmd_report(const std::string& dir) {
  char* text = nullptr;
  const percsim_status st = percsim_report(dir.c_str(), &text);
  if (st != PERCSIM_OK) return report_error(st);
  std::fputs(text, stdout);
  percsim_string_free(text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perception-attack swarm simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", percsim_version());

  std::string file;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  auto* run = app.add_subcommand("run", "Run one scenario and write <name>.ticks.csv and <name>.summary.json");
  run->add_option("scenario", file, "Scenario JSON file")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();

  std::string axis;
  std::string values;
  int seeds = 1;
  std::string sweep_out;
  auto* sw = app.add_subcommand("sweep", "Sweep one adversary parameter over several seeds");
  sw->add_option("scenario", file, "Scenario JSON file")->required();
  sw->add_option("--axis", axis, "p, n_blocks, b, q or seed")->required();
  sw->add_option("--values", values, "Comma-separated axis values")->required();
  sw->add_option("--seeds", seeds, "Seeds per value (seed, seed+1, ...)")->capture_default_str();
  sw->add_option("--json", sweep_out, "Also write the sweep statistics as JSON");

  auto* val = app.add_subcommand("validate", "Check a scenario file without running it");
  val->add_option("scenario", file, "Scenario JSON file")->required();

  std::string report_dir;
  auto* rep = app.add_subcommand("report", "Tabulate every *.summary.json in a directory");
  rep->add_option("out_dir", report_dir, "Directory written by run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (*run) return cmd_run(file, seed, out_dir);
  if (*sw) return cmd_sweep(file, axis, values, seeds, sweep_out);
  if (*val) return cmd_validate(file);
  if (*rep) return cmd_report(report_dir);
  return 2;
}
