// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include "percsim/harness.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace percsim;

namespace {

const std::filesystem::path kScenarios{PERCSIM_SCENARIO_DIR};
constexpr int kSeeds = 10;

ScenarioConfig scenario(const std::string& name) { return load_scenario(kScenarios / (name + ".json")); }

std::vector<std::string> shipped() {
  std::vector<std::string> names;
  for (const auto& e : std::filesystem::directory_iterator(kScenarios))
    if (e.path().extension() == ".json") names.push_back(e.path().stem().string());
  std::sort(names.begin(), names.end());
  return names;
}

std::vector<TickRecord> of_robot(const RunResult& r, RobotId id) {
  std::vector<TickRecord> out;
  for (const auto& t : r.records)
    if (t.robot == id) out.push_back(t);
  return out;
}

struct Verdict {
  bool pass = true;
  std::string detail;
};

double mean_sum_cov(ScenarioConfig cfg, int seeds) {
  double acc = 0.0;
  for (int s = 0; s < seeds; ++s) {
    cfg.seed = static_cast<std::uint64_t>(s + 1);
    acc += run_scenario(cfg).summary.sum_cov_norm;
  }
  return acc / seeds;
}

Verdict ac1() {
  const RunResult r = run_scenario(scenario("exp01_baseline"));
  const auto recs = of_robot(r, r.config.metrics.robot);
  double worst_step = 0.0;
  for (std::size_t k = recs.size() - 200; k < recs.size(); ++k)
    worst_step = std::max(worst_step, (recs[k].P - recs[k - 1].P).norm());
  const double rms = r.summary.rms_formation.value_or(INFINITY);
  const bool ok = !r.aborted && r.summary.missed_fraction == 0.0 && rms <= 0.10 && worst_step < 1e-6;
  return {ok, fmt::format("missed={} rms={:.4f} m max|dP| (last 200)={:.2e}", r.summary.missed_fraction, rms,
                          worst_step)};
}

Verdict ac2() {
  ScenarioConfig cfg = scenario("exp02_misclass_n1000_p20");
  const std::vector<double> ps{0.0, 0.2, 0.4, 0.6, 0.8, 0.95};
  std::vector<double> means;
  for (double p : ps) {
    apply_axis(cfg, "p", p);
    means.push_back(mean_sum_cov(cfg, kSeeds));
  }
  bool ok = means.back() >= 10.0 * means.front();
  for (std::size_t i = 1; i < means.size(); ++i) ok = ok && means[i] > means[i - 1];
  std::string d = "mean sum|P|:";
  for (std::size_t i = 0; i < ps.size(); ++i) d += fmt::format(" p={}:{:.2f}", ps[i], means[i]);
  return {ok, d};
}

Verdict ac3() {
  ScenarioConfig short_blocks = scenario("exp08_misclass_n200_p40");
  ScenarioConfig long_blocks = scenario("exp03_misclass_n1000_p40");
  const double a = mean_sum_cov(short_blocks, kSeeds);
  const double b = mean_sum_cov(long_blocks, kSeeds);
  return {a > b, fmt::format("n=200: {:.2f}  n=1000: {:.2f}", a, b)};
}

Verdict ac4() {
  bool ok = true;
  int runs = 0;
  for (const auto& name : shipped()) {
    const RunResult r = run_scenario(scenario(name));
    for (const auto& robot : r.config.robots) {
      bool any_missed = false;
      for (const auto& t : of_robot(r, robot.id)) {
        any_missed = any_missed || t.beta == 1;
        ok = ok && t.obs_ratio >= 0.0 && t.obs_ratio <= 1.0 && ((t.obs_ratio == 1.0) == !any_missed);
      }
    }
    ++runs;
  }
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> len(1, 50);
  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> dt(0.02, 0.08);
  int patterns = 0;
  for (; patterns < 1000; ++patterns) {
    const int n = len(rng);
    std::vector<std::array<int, 3>> bb(static_cast<std::size_t>(n));
    std::vector<double> T(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      T[static_cast<std::size_t>(k)] = dt(rng);
      for (int a = 0; a < 3; ++a) bb[static_cast<std::size_t>(k)][static_cast<std::size_t>(a)] = coin(rng);
    }
    auto ratio = [&](const std::vector<std::array<int, 3>>& pat) {
      GramianAccumulator acc;
      for (int k = 0; k < n; ++k) acc.accumulate(T[static_cast<std::size_t>(k)], pat[static_cast<std::size_t>(k)]);
      return quality_ratio(acc).per_axis;
    };
    const auto base = ratio(bb);
    for (int a = 0; a < 3; ++a) {
      bool none_missed = true;
      for (const auto& s : bb) none_missed = none_missed && s[static_cast<std::size_t>(a)] == 1;
      const double r = base[static_cast<std::size_t>(a)];
      ok = ok && r >= 0.0 && r <= 1.0 && ((r == 1.0) == none_missed);
    }
    for (int k = 0; k < n; ++k)
      for (int a = 0; a < 3; ++a) {
        if (bb[static_cast<std::size_t>(k)][static_cast<std::size_t>(a)]) continue;
        auto flipped = bb;
        flipped[static_cast<std::size_t>(k)][static_cast<std::size_t>(a)] = 1;
        ok = ok && ratio(flipped)[static_cast<std::size_t>(a)] >= base[static_cast<std::size_t>(a)];
      }
  }
  return {ok, fmt::format("{} scenario runs, {} random patterns", runs, patterns)};
}

Verdict ac5() {
  const double T = 0.035;
  bool ok = true;
  std::string d;
  for (int n : {10, 100, 1000}) {
    GramianAccumulator acc;
    for (int k = 0; k < n; ++k) acc.accumulate(T, 0);
    const double brute = quality_ratio(acc).aggregate;
    // Direct series: per axis, sum over k of 1 (adversarial) and 2 + (kT)^2 (standard).
    double standard = 0.0;
    for (int k = 0; k < n; ++k) standard += 2.0 + (k * T) * (k * T);
    const double series = n / standard;
    const double closed = lower_bound(n, T);
    const double rel = std::abs(brute - closed) / brute;
    ok = ok && rel < 0.05 && std::abs(brute - series) <= 1e-12;
    d += fmt::format(" n={}: brute={:.6g} closed={:.6g} rel={:.2e} |brute-series|={:.1e};", n, brute, closed, rel,
                     std::abs(brute - series));
  }
  return {ok, d};
}

Verdict ac6() {
  const int N = 20;
  const double T = 0.035;
  const double r_pos = 0.07;
  FilterParams params;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> yp(N), yv(N);
  for (int k = 0; k < N; ++k) {
    yp[static_cast<std::size_t>(k)] = -2.0 + 0.02 * k + 0.2 * g(rng);
    yv[static_cast<std::size_t>(k)] = 0.3 * g(rng);
  }
  FilterState fs = initial_state(params);
  for (int k = 0; k < N; ++k) {
    if (k > 0) fs = predict(fs, T, params);
    RelPosMeasurement m;
    m.p = Vec3(yp[static_cast<std::size_t>(k)], 0.0, 0.0);
    m.cov = r_pos * Mat3::Identity();
    fs = update(fs, Vec3(yv[static_cast<std::size_t>(k)], 0.0, 0.0), m, params);
  }
  // Stacked weighted least squares over the x axis trajectory.
  const int nx = 2 * N;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nx, nx);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(nx);
  Eigen::RowVectorXd a(nx);
  auto add = [&](double y, double var) {
    H += a.transpose() * a / var;
    b += a.transpose() * y / var;
  };
  a.setZero(); a(0) = 1; add(0.0, params.init_pos_var);
  a.setZero(); a(1) = 1; add(0.0, params.init_vel_var);
  for (int k = 1; k < N; ++k) {
    a.setZero(); a(2 * k) = 1; a(2 * k - 2) = -1; a(2 * k - 1) = -T; add(0.0, params.sigma2_pos);
    a.setZero(); a(2 * k + 1) = 1; a(2 * k - 1) = -1; add(0.0, params.sigma2_vel);
  }
  for (int k = 0; k < N; ++k) {
    a.setZero(); a(2 * k) = 1; add(yp[static_cast<std::size_t>(k)], r_pos);
    a.setZero(); a(2 * k + 1) = 1; add(yv[static_cast<std::size_t>(k)], params.r_vel(0, 0));
  }
  const Eigen::VectorXd sol = H.ldlt().solve(b);
  const double ep = std::abs(fs.x(0) - sol(nx - 2));
  const double ev = std::abs(fs.x(3) - sol(nx - 1));
  return {ep < 1e-9 && ev < 1e-9, fmt::format("|dp|={:.2e} |dv|={:.2e}", ep, ev)};
}

double pooled_nominal_rate(ScenarioConfig cfg) {
  long frames = 0, picked = 0;
  for (int s = 0; s < kSeeds; ++s) {
    cfg.seed = static_cast<std::uint64_t>(s + 1);
    const RunResult r = run_scenario(cfg);
    for (const auto& t : of_robot(r, cfg.metrics.robot)) {
      if (t.nominal_candidates == 0) continue;
      ++frames;
      picked += t.selected == Selection::Nominal ? 1 : 0;
    }
  }
  return frames ? static_cast<double>(picked) / static_cast<double>(frames) : 0.0;
}

Verdict ac7() {
  const double low = pooled_nominal_rate(scenario("exp12_misloc_b10_q15"));
  const double high = pooled_nominal_rate(scenario("exp15_misloc_b10_q75"));
  return {low >= 0.95 && high < low, fmt::format("q=0.15: {:.4f}  q=0.75: {:.4f}", low, high)};
}

Verdict ac8() {
  const OverloadModel cost = scenario("exp01_baseline").timing.cost;
  const double l1 = frame_latency(1, cost);
  const double l7 = frame_latency(7, cost);
  const double base = run_scenario(scenario("exp01_baseline")).summary.mean_latency;
  const double attacked = run_scenario(scenario("exp12_misloc_b10_q15")).summary.mean_latency;
  const bool ok = std::abs(l1 - 0.035) < 1e-12 && std::abs(l7 - 0.041) < 1e-12 && attacked > base;
  return {ok, fmt::format("latency(1)={:.4f} latency(7)={:.4f} mean T_s: none={:.4f} b=10={:.4f}", l1, l7, base,
                          attacked)};
}

Verdict ac9() {
  const RunResult base = run_scenario(scenario("exp01_baseline"));
  const RunResult mixed = run_scenario(scenario("exp16_mixed_n200_p20_b5_q75"));
  bool finite = !mixed.aborted;
  for (const auto& t : mixed.records)
    finite = finite && t.x_hat.allFinite() && t.true_p.allFinite() && t.true_v.allFinite() && std::isfinite(t.P_norm);
  const double plateau = of_robot(base, base.config.metrics.robot).back().P_norm;
  const double base_rms = base.summary.rms_formation.value_or(INFINITY);
  const double rms = mixed.summary.rms_formation.value_or(INFINITY);
  const bool ok = finite && mixed.summary.sup_cov_norm < 100.0 * plateau && rms <= 5.0 * base_rms;
  return {ok, fmt::format("finite={} sup|P|={:.4f} (< {:.4f}) rms={:.4f} (<= {:.4f})", finite,
                          mixed.summary.sup_cov_norm, 100.0 * plateau, rms, 5.0 * base_rms)};
}

Verdict ac10() {
  const CameraIntrinsics intr;
  const ObjectModel obj{0.5, 0.4, Vec3::Zero(), 80};
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> depth(0.6, 8.0);
  int checked = 0;
  double worst = 0.0;
  while (checked < 100) {
    Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
    q.normalize();
    const Rotation3 R(q.toRotationMatrix());
    const double z = depth(rng);
    const Vec3 in_cam(u(rng) * 0.5 * z, u(rng) * 0.4 * z, z);
    const Vec3 p_rel = -(R.matrix().transpose() * in_cam);
    const auto box = render_box(p_rel, R, intr, obj);
    if (!box) continue;
    const BoxCorners c = box->corners();
    if (c.x1 <= 0.0 || c.y1 <= 0.0 || c.x2 >= intr.width_px || c.y2 >= intr.height_px) continue;
    worst = std::max(worst, (localize_from_box(*box, R, intr, obj, 0.9, {}).p - p_rel).norm());
    ++checked;
  }
  return {worst < 1e-9, fmt::format("{} poses, max error {:.2e} m", checked, worst)};
}

Verdict ac11() {
  bool ok = true;
  int n = 0;
  for (const auto& name : shipped()) {
    const ScenarioConfig cfg = scenario(name);
    ok = ok && summary_to_json(run_scenario(cfg)).dump(2) == summary_to_json(run_scenario(cfg)).dump(2);
    ++n;
  }
  return {ok && n == 16, fmt::format("{} scenarios", n)};
}

Verdict ac12() {
  ScenarioConfig cfg = scenario("exp01_baseline");
  cfg.name = "bibo";
  cfg.horizon = 10000;
  AttackSpec a;
  a.target_robot = cfg.metrics.robot;
  a.synthetic_ua = Vec2(0.1, 0.0);
  cfg.attacks = {a};
  cfg.validate();
  const RunResult r = run_scenario(cfg);
  const RobotConfig& ri = cfg.robot(cfg.metrics.robot);
  const RobotConfig& rj = cfg.robot(cfg.metrics.reference);
  const auto ti = of_robot(r, ri.id);
  const auto tj = of_robot(r, rj.id);
  double worst = 0.0;
  for (std::size_t k = 0; k < std::min(ti.size(), tj.size()); ++k) {
    const Vec2 e = (ti[k].true_p.head<2>() - tj[k].true_p.head<2>()) - (ri.target - rj.target);
    worst = std::max(worst, e.cwiseAbs().maxCoeff());
  }
  const bool ok = !r.aborted && ti.size() == 10000 && worst <= 10.0;
  return {ok, fmt::format("steps={} max |formation error component|={:.3f} m", ti.size(), worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"AC1 baseline stability", ac1},         {"AC2 monotone degradation in p", ac2},
      {"AC3 block-length effect", ac3},        {"AC4 observability ratio bounds", ac4},
      {"AC5 lower-bound consistency", ac5},    {"AC6 filter vs batch least squares", ac6},
      {"AC7 gating efficacy", ac7},            {"AC8 overload coupling", ac8},
      {"AC9 mixed attack stability", ac9},     {"AC10 geometry round trip", ac10},
      {"AC11 determinism", ac11},              {"AC12 bounded formation error under u_a", ac12},
  };
  int failed = 0;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, fmt::format("exception: {}", e.what())};
    }
    failed += v.pass ? 0 : 1;
    fmt::print("{} {}: {}\n", v.pass ? "PASS" : "FAIL", name, v.detail);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  fmt::print("{} of {} criteria passed in {:.1f} s\n", criteria.size() - failed, criteria.size(), secs);
  return failed == 0 ? 0 : 1;
}
