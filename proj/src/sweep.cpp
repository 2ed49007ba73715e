#include "percsim/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace percsim {

namespace {

AttackSpec& attack_of_metric_robot(ScenarioConfig& cfg, std::string_view axis) {
  for (AttackSpec& a : cfg.attacks)
    if (a.target_robot == cfg.metrics.robot) return a;
  throw ConfigError(fmt::format("axis '{}' needs an attack on robot {}", axis, cfg.metrics.robot));
}

int as_count(std::string_view axis, double value) {
  if (!(value >= 0.0) || std::floor(value) != value || value > 1e9)
    throw ConfigError(fmt::format("axis '{}' takes non-negative integers, got {}", axis, value));
  return static_cast<int>(value);
}

void add_metric(SweepRow& row, const std::string& name, std::optional<double> v) {
  MetricStats& s = row.metrics[name];
  if (!v) return;
  if (s.count == 0) {
    s.min = s.max = *v;
  } else {
    s.min = std::min(s.min, *v);
    s.max = std::max(s.max, *v);
  }
  s.mean += (*v - s.mean) / (s.count + 1);
  ++s.count;
}

constexpr const char* kMetricOrder[] = {"rms_formation", "sup_cov_norm", "sum_cov_norm", "missed_fraction",
                                        "mean_latency", "nominal_selection_rate", "final_obs_ratio"};

}  // namespace

void apply_axis(ScenarioConfig& cfg, std::string_view axis, double value) {
  if (axis == "p" || axis == "n_blocks") {
    AttackSpec& a = attack_of_metric_robot(cfg, axis);
    if (!a.misclass) throw ConfigError(fmt::format("axis '{}' needs a misclassification attack", axis));
    if (axis == "p")
      a.misclass->p = value;
    else
      a.misclass->n_blocks = as_count(axis, value);
  } else if (axis == "b" || axis == "q") {
    AttackSpec& a = attack_of_metric_robot(cfg, axis);
    if (!a.misloc) throw ConfigError(fmt::format("axis '{}' needs a mislocalization attack", axis));
    if (axis == "b")
      a.misloc->b = as_count(axis, value);
    else
      a.misloc->q = value;
  } else if (axis == "seed" || axis == "seeds") {
    if (!(value >= 0.0) || std::floor(value) != value) throw ConfigError("seed must be a non-negative integer");
    cfg.seed = static_cast<std::uint64_t>(value);
  } else {
    throw ConfigError(fmt::format("unknown sweep axis '{}' (expected p, n_blocks, b, q or seed)", axis));
  }
  cfg.validate();
}

std::vector<SweepRow> sweep(const ScenarioConfig& base, std::string_view axis, const std::vector<double>& values,
                            int seeds) {
  if (seeds < 1) throw ConfigError("sweep needs at least one seed");
  std::vector<SweepRow> rows;
  for (double v : values) {
    ScenarioConfig cfg = base;
    apply_axis(cfg, axis, v);
    SweepRow row;
    row.value = v;
    row.seeds = seeds;
    for (const char* name : kMetricOrder) row.metrics[name];
    for (int s = 0; s < seeds; ++s) {
      ScenarioConfig run = cfg;
      run.seed = cfg.seed + static_cast<std::uint64_t>(s);
      const RunResult res = run_scenario(run);
      if (res.aborted) {
        ++row.aborted;
        continue;
      }
      const RunSummary& m = res.summary;
      add_metric(row, "rms_formation", m.rms_formation);
      add_metric(row, "sup_cov_norm", m.sup_cov_norm);
      add_metric(row, "sum_cov_norm", m.sum_cov_norm);
      add_metric(row, "missed_fraction", m.missed_fraction);
      add_metric(row, "mean_latency", m.mean_latency);
      add_metric(row, "nominal_selection_rate", m.nominal_selection_rate);
      add_metric(row, "final_obs_ratio", m.final_obs_ratio);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json sweep_to_json(std::string_view axis, const std::vector<SweepRow>& rows) {
  nlohmann::json out;
  out["axis"] = std::string(axis);
  out["rows"] = nlohmann::json::array();
  for (const SweepRow& r : rows) {
    nlohmann::json jr{{"value", r.value}, {"seeds", r.seeds}, {"aborted", r.aborted}};
    for (const auto& [name, s] : r.metrics) {
      if (s.count == 0)
        jr["metrics"][name] = nullptr;
      else
        jr["metrics"][name] = {{"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"count", s.count}};
    }
    out["rows"].push_back(std::move(jr));
  }
  return out;
}

std::string sweep_table(std::string_view axis, const std::vector<SweepRow>& rows) {
  std::string out = fmt::format("{:>10} {:>6} {:>12} {:>12} {:>12} {:>9} {:>9} {:>9}\n", axis, "seeds", "rms[m]",
                                "sup|P|", "sum|P|", "missed", "lat[s]", "nominal");
  auto cell = [](const SweepRow& r, const char* name, int width, int prec) {
    const MetricStats& s = r.metrics.at(name);
    if (s.count == 0) return fmt::format("{:>{}}", "-", width);
    return fmt::format("{:>{}.{}f}", s.mean, width, prec);
  };
  for (const SweepRow& r : rows) {
    out += fmt::format("{:>10} {:>6} {} {} {} {} {} {}", r.value, r.seeds, cell(r, "rms_formation", 12, 4),
                       cell(r, "sup_cov_norm", 12, 4), cell(r, "sum_cov_norm", 12, 2),
                       cell(r, "missed_fraction", 9, 3), cell(r, "mean_latency", 9, 4),
                       cell(r, "nominal_selection_rate", 9, 3));
    if (r.aborted) out += fmt::format("  ({} aborted)", r.aborted);
    out += '\n';
  }
  return out;
}

}  // namespace percsim
