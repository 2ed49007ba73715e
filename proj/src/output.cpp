#include "percsim/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <ostream>

namespace percsim {

namespace {

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

std::string num(double v) { return fmt::format("{}", v); }

}  // namespace

nlohmann::json summary_to_json(const RunResult& result) {
  const RunSummary& s = result.summary;
  nlohmann::json j;
  j["name"] = result.config.name;
  j["seed"] = result.config.seed;
  j["adversary"] = describe_attacks(result.config);
  j["aborted"] = result.aborted;
  if (result.aborted) j["diagnostic"] = result.diagnostic;
  j["summary"] = {
      {"metric_robot", result.config.metrics.robot},
      {"reference_robot", result.config.metrics.reference},
      {"steps", s.steps},
      {"rms_formation", opt(s.rms_formation)},
      {"rms_formation_reference_view", opt(s.rms_formation_reference_view)},
      {"sup_cov_norm", s.sup_cov_norm},
      {"sum_cov_norm", s.sum_cov_norm},
      {"missed_fraction", s.missed_fraction},
      {"mean_latency", s.mean_latency},
      {"final_obs_ratio", s.final_obs_ratio},
      {"nominal_selection_rate", opt(s.nominal_selection_rate)},
      {"max_formation_error", s.max_formation_error},
  };
  j["config"] = to_json(result.config);
  return j;
}

void write_ticks_csv(const std::vector<TickRecord>& records, std::ostream& out) {
  out << "step,robot,t,T_s,m,candidates,nominal_candidates,beta,selected,"
         "px_hat,py_hat,pz_hat,vx_hat,vy_hat,vz_hat,P_norm,trace_W_ad,trace_W_sd,obs_ratio,"
         "px,py,pz,vx,vy,vz,ux,uy,uax,uay,formation_error,pair_error_x,pair_error_y,stale,gate_singular\n";
  for (const TickRecord& r : records) {
    std::string line = fmt::format("{},{},{},{},{},{},{},{},{}", r.step, r.robot, num(r.t), num(r.T_s), r.m,
                                   r.candidates, r.nominal_candidates, r.beta, static_cast<int>(r.selected));
    for (int i = 0; i < 6; ++i) line += "," + num(r.x_hat(i));
    line += fmt::format(",{},{},{},{}", num(r.P_norm), num(r.trace_w_ad), num(r.trace_w_sd), num(r.obs_ratio));
    for (int i = 0; i < 3; ++i) line += "," + num(r.true_p(i));
    for (int i = 0; i < 3; ++i) line += "," + num(r.true_v(i));
    line += fmt::format(",{},{},{},{},{}", num(r.u.x()), num(r.u.y()), num(r.u_a.x()), num(r.u_a.y()),
                        num(r.formation_error));
    if (r.pair_error)
      line += fmt::format(",{},{}", num(r.pair_error->x()), num(r.pair_error->y()));
    else
      line += ",,";
    line += fmt::format(",{},{}\n", r.stale_neighbors, r.gate_singular);
    out << line;
  }
}

std::string report_directory(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw ConfigError(fmt::format("not a directory: {}", dir.string()));
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (e.is_regular_file() && name.size() > 13 && name.ends_with(".summary.json")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());

  auto cell = [](const nlohmann::json& v, int prec) {
    if (v.is_null()) return std::string("-");
    return fmt::format("{:.{}f}", v.get<double>(), prec);
  };
  struct Row {
    std::string name, adversary, rest;
  };
  std::vector<Row> rows;
  std::size_t wn = 10, wa = 9;
  for (const fs::path& f : files) {
    std::ifstream in(f);
    nlohmann::json j;
    try {
      in >> j;
      const nlohmann::json& s = j.at("summary");
      Row r{j.at("name").get<std::string>(), j.at("adversary").get<std::string>(),
            fmt::format("{:>10} {:>10} {:>10} {:>8} {:>9}", cell(s.at("rms_formation"), 4),
                        cell(s.at("sup_cov_norm"), 4), cell(s.at("sum_cov_norm"), 2),
                        cell(s.at("missed_fraction"), 3), cell(s.at("mean_latency"), 4))};
      if (j.value("aborted", false)) r.rest += "  (aborted)";
      wn = std::max(wn, r.name.size());
      wa = std::max(wa, r.adversary.size());
      rows.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(fmt::format("{}: malformed summary ({})", f.filename().string(), e.what()));
    }
  }
  std::string out = fmt::format("{:<{}} {:<{}} {:>10} {:>10} {:>10} {:>8} {:>9}\n", "experiment", wn, "adversary", wa,
                                "rms[m]", "sup|P|", "sum|P|", "missed", "lat[s]");
  for (const Row& r : rows) out += fmt::format("{:<{}} {:<{}} {}\n", r.name, wn, r.adversary, wa, r.rest);
  if (files.empty()) out += "(no *.summary.json files)\n";
  return out;
}

}  // namespace percsim
