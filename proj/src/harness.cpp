#include "percsim/harness.hpp"

#include <fmt/format.h>

#include <cmath>
#include <optional>

namespace percsim {

Rotation3 body_attitude(const RobotPhysState& s) { return Rotation3::from_rpy(0.0, 0.0, s.yaw); }

VioSample vio_oracle(const RobotPhysState& truth, const VioNoise& noise, Rng& rng) {
  VioSample out;
  out.velocity = truth.v;
  out.rotation = body_attitude(truth);
  if (noise.velocity_std > 0.0) {
    std::normal_distribution<double> n(0.0, noise.velocity_std);
    for (int i = 0; i < 3; ++i) out.velocity(i) += n(rng);
  }
  if (noise.rotation_std > 0.0) {
    std::normal_distribution<double> n(0.0, noise.rotation_std);
    Vec3 aa;
    for (int i = 0; i < 3; ++i) aa(i) = n(rng);
    out.rotation = out.rotation * Rotation3::from_axis_angle(aa);
  }
  return out;
}

namespace {

Vec3 lift(const Vec2& v) { return {v.x(), v.y(), 0.0}; }

/// Everything one robot owns. Robots interact only through the message queue.
struct RobotRuntime {
  RobotConfig cfg;
  RobotPhysState phys;
  FilterState filter;
  GramianAccumulator gramian;
  Rotation3 mount;
  std::optional<MisclassSchedule> misclass;
  std::optional<MislocSpec> misloc;
  OverloadModel cost;
  Vec2 synthetic_ua = Vec2::Zero();
  Rng vio_rng;
  Rng det_rng;
  Rng misloc_rng;
  NeighborTable neighbors;
  double t = 0.0;
  double last_period = 0.0;

  Vec2 p_tilde() const { return filter.position().head<2>() - cfg.target; }
};

RobotRuntime make_runtime(const ScenarioConfig& cfg, const RobotConfig& rc) {
  RobotRuntime r{rc,
                 {rc.position, rc.velocity, rc.yaw},
                 initial_state(cfg.filter),
                 {},
                 forward_camera_mount(rc.camera_tilt),
                 std::nullopt,
                 std::nullopt,
                 cfg.timing.cost,
                 Vec2::Zero(),
                 make_stream(cfg.seed, rc.id, Subsystem::Vio),
                 make_stream(cfg.seed, rc.id, Subsystem::Detector),
                 make_stream(cfg.seed, rc.id, Subsystem::Mislocalization),
                 {},
                 0.0,
                 0.0};
  if (const AttackSpec* a = cfg.attack_for(rc.id)) {
    if (a->misclass)
      r.misclass.emplace(*a->misclass, cfg.horizon, make_stream(cfg.seed, rc.id, Subsystem::Misclassification));
    r.misloc = a->misloc;
    if (a->overload) r.cost = *a->overload;
    if (a->synthetic_ua) r.synthetic_ua = *a->synthetic_ua;
  }
  return r;
}

/// Perception through filter update for one robot at step k. Fills the estimation part of rec.
void perceive_and_estimate(const ScenarioConfig& cfg, RobotRuntime& r, int k, TickRecord& rec) {
  const ReferenceProfile& ref = cfg.control.reference;
  const VioSample vio = vio_oracle(r.phys, cfg.vio, r.vio_rng);

  if (k > 0) r.filter = predict(r.filter, r.last_period, cfg.filter, lift(ref.velocity(k - 1)));

  const Rotation3 true_cw = camera_from_world(body_attitude(r.phys), r.mount);
  DetectionSet ds = detect({r.phys.p, true_cw}, cfg.objects, cfg.camera, cfg.detector, r.det_rng, r.t);
  if (r.misloc) ds = apply_mislocalization(ds, *r.misloc, cfg.target_class, cfg.camera, r.misloc_rng);
  if (r.misclass) ds = apply_misclassification(ds, *r.misclass, k, cfg.target_class);
  const std::size_t m = ds.size();

  const DetectionSet usable =
      class_filter(confidence_thresh_filter(ds, cfg.detector.confidence_threshold), cfg.target_class);
  const Rotation3 vio_cw = camera_from_world(vio.rotation, r.mount);
  const ObjectModel& target = cfg.target_object();
  std::vector<RelPosMeasurement> candidates;
  candidates.reserve(usable.size());
  for (std::size_t i = 0; i < usable.size(); ++i) {
    const Detection& d = usable.detections[i];
    RelPosMeasurement meas = localize_from_box(d.box, vio_cw, cfg.camera, target, d.pr, cfg.filter.localization);
    meas.source_index = i;
    candidates.push_back(meas);
    if (!d.injected) ++rec.nominal_candidates;
  }

  std::optional<std::size_t> pick;
  if (!r.filter.has_position_fix && cfg.filter.track_initiation) {
    if (!candidates.empty()) pick = initiate_track(candidates);
  } else {
    const GateResult g = gate(candidates, r.filter, cfg.filter);
    rec.gate_singular = g.singular_rejections;
    if (!g.admitted.empty()) pick = associate(candidates, g.admitted, r.filter);
  }

  std::optional<RelPosMeasurement> chosen;
  if (pick) {
    const std::size_t idx = *pick;
    chosen = candidates[idx];
    rec.selected = usable.detections[idx].injected ? Selection::Injected : Selection::Nominal;
  }
  rec.beta = chosen ? 0 : 1;

  const Vec3 y_vel = vio.velocity - lift(ref.velocity(k));
  r.filter = update(r.filter, y_vel, chosen, cfg.filter);
  r.filter.k = k;
  r.filter.t = r.t;

  const double period = next_period(m, r.cost, cfg.timing.min_period);
  r.gramian.accumulate(period, 1 - rec.beta);
  const QualityRatio q = quality_ratio(r.gramian);

  rec.step = k;
  rec.robot = r.cfg.id;
  rec.t = r.t;
  rec.T_s = period;
  rec.m = static_cast<int>(m);
  rec.candidates = static_cast<int>(candidates.size());
  rec.x_hat = r.filter.x;
  rec.P = r.filter.P;
  rec.P_norm = induced_norm(r.filter.P);
  rec.trace_w_ad = r.gramian.trace_adversarial();
  rec.trace_w_sd = r.gramian.trace_standard();
  rec.obs_ratio = q.aggregate;
  rec.true_p = r.phys.p;
  rec.true_v = r.phys.v;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  RunResult result;
  result.config = cfg;

  std::vector<RobotRuntime> robots;
  robots.reserve(cfg.robots.size());
  for (const auto& rc : cfg.robots) robots.push_back(make_runtime(cfg, rc));
  const Topology topology = cfg.build_topology();
  MessageQueue queue;
  Rng net_rng = make_stream(cfg.seed, 0, Subsystem::Network);
  const ReferenceProfile& ref = cfg.control.reference;
  const Vec3 object = cfg.target_object().position;

  result.records.reserve(static_cast<std::size_t>(cfg.horizon) * robots.size());
  std::vector<TickRecord> tick(robots.size());

  try {
    for (int k = 0; k < cfg.horizon; ++k) {
      // Local perception and estimation; independent across robots.
      for (std::size_t i = 0; i < robots.size(); ++i) {
        tick[i] = TickRecord{};
        perceive_and_estimate(cfg, robots[i], k, tick[i]);
      }

      // The network is the only cross-robot channel and advances once per tick.
      for (const RobotRuntime& r : robots) {
        for (RobotId j : topology.ids()) {
          if (j == r.cfg.id || topology.weight(j, r.cfg.id, k) == 0) continue;
          network_send(queue, {r.cfg.id, j, r.p_tilde(), k, k}, cfg.network);
        }
      }
      for (const NeighborMessage& msg : network_deliver(queue, k, cfg.network, net_rng)) {
        for (RobotRuntime& r : robots)
          if (r.cfg.id == msg.receiver) r.neighbors.receive(msg);
      }

      for (std::size_t i = 0; i < robots.size(); ++i) {
        RobotRuntime& r = robots[i];
        TickRecord& rec = tick[i];
        const Vec2 p_tilde = r.p_tilde();
        std::vector<NeighborTerm> terms;
        Vec2 u_a = Vec2::Zero();
        const Vec2 own_error = (r.filter.position() - (r.phys.p - object)).head<2>();
        for (RobotId j : topology.neighbors(r.cfg.id, k)) {
          const auto latest = r.neighbors.latest(j);
          if (!latest || latest->send_step < k) ++rec.stale_neighbors;
          if (!latest) continue;
          terms.push_back({static_cast<double>(topology.weight(r.cfg.id, j, k)), latest->p_tilde});
          for (const RobotRuntime& other : robots) {
            if (other.cfg.id != j) continue;
            const Vec2 other_error = (other.filter.position() - (other.phys.p - object)).head<2>();
            u_a += -cfg.control.alpha * (own_error - other_error);
          }
        }

        const Vec2 v_tilde = r.filter.velocity().head<2>();
        rec.u = consensus_control(p_tilde, v_tilde, terms, cfg.control, ref.acceleration(k), r.synthetic_ua);
        rec.u_a = u_a + r.synthetic_ua;

        // Scored pair as seen from either end.
        const RobotId other_id = r.cfg.id == cfg.metrics.robot       ? cfg.metrics.reference
                                 : r.cfg.id == cfg.metrics.reference ? cfg.metrics.robot
                                                                     : r.cfg.id;
        if (other_id != r.cfg.id) {
          if (const auto latest = r.neighbors.latest(other_id)) {
            rec.pair_error = r.cfg.id == cfg.metrics.robot ? Vec2(p_tilde - latest->p_tilde)
                                                           : Vec2(latest->p_tilde - p_tilde);
          }
        }

        double fe = 0.0;
        int others = 0;
        for (const RobotRuntime& o : robots) {
          if (o.cfg.id == r.cfg.id) continue;
          fe += formation_error(r.phys.p.head<2>(), o.phys.p.head<2>(), r.cfg.target, o.cfg.target);
          ++others;
        }
        rec.formation_error = others ? fe / others : 0.0;
      }

      for (std::size_t i = 0; i < robots.size(); ++i) {
        RobotRuntime& r = robots[i];
        const double period = tick[i].T_s;
        r.phys = step_dynamics(r.phys, tick[i].u, period, cfg.altitude);
        const Vec3 rel = r.filter.position();
        if (r.filter.has_position_fix && rel.head<2>().norm() > 0.1) {
          const double bearing = std::atan2(-rel.y(), -rel.x());
          r.phys = step_yaw(r.phys, bearing, cfg.yaw_gain, period);
        }
        r.last_period = period;
        r.t += period;
        if (!r.phys.p.allFinite() || !r.phys.v.allFinite())
          throw NumericalError(fmt::format("robot {} state became non-finite at step {}", r.cfg.id, k));
        result.records.push_back(tick[i]);
      }
    }
  } catch (const NumericalError& e) {
    result.aborted = true;
    result.diagnostic = e.what();
  }

  result.summary = compute_summary(result.records, cfg.metrics);
  return result;
}

RunSummary compute_summary(const std::vector<TickRecord>& records, const MetricsConfig& metrics) {
  RunSummary s;
  double sq_own = 0.0;
  double sq_ref = 0.0;
  int n_own = 0;
  int n_ref = 0;
  int missed = 0;
  int nominal_frames = 0;
  int nominal_picked = 0;
  double latency = 0.0;
  for (const TickRecord& r : records) {
    if (r.robot == metrics.reference && r.robot != metrics.robot && r.t >= metrics.rms_start_time && r.pair_error) {
      sq_ref += r.pair_error->squaredNorm();
      ++n_ref;
    }
    if (r.robot != metrics.robot) continue;
    ++s.steps;
    s.sup_cov_norm = std::max(s.sup_cov_norm, r.P_norm);
    s.sum_cov_norm += r.P_norm;
    missed += r.beta;
    latency += r.T_s;
    s.final_obs_ratio = r.obs_ratio;
    if (r.nominal_candidates > 0) {
      ++nominal_frames;
      if (r.selected == Selection::Nominal) ++nominal_picked;
    }
    if (r.t >= metrics.rms_start_time) {
      s.max_formation_error = std::max(s.max_formation_error, r.formation_error);
      if (r.pair_error) {
        sq_own += r.pair_error->squaredNorm();
        ++n_own;
      }
    }
  }
  if (s.steps > 0) {
    s.missed_fraction = static_cast<double>(missed) / s.steps;
    s.mean_latency = latency / s.steps;
  }
  if (n_own > 0) s.rms_formation = std::sqrt(sq_own / n_own);
  if (n_ref > 0) s.rms_formation_reference_view = std::sqrt(sq_ref / n_ref);
  if (nominal_frames > 0) s.nominal_selection_rate = static_cast<double>(nominal_picked) / nominal_frames;
  return s;
}

}  // namespace percsim
