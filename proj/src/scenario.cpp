#include "percsim/scenario.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace percsim {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!j.is_object()) throw ConfigError(fmt::format("{} must be an object", where));
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(fmt::format("unknown key '{}' in {}", key, where));
  }
}

template <typename T>
void read(const json& j, std::string_view key, T& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->template get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("bad value for '{}': {}", key, e.what()));
  }
}

template <int N>
void read_vec(const json& j, std::string_view key, Eigen::Matrix<double, N, 1>& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  std::vector<double> v;
  try {
    v = it->get<std::vector<double>>();
  } catch (const json::exception&) {
    throw ConfigError(fmt::format("'{}' must be an array of {} numbers", key, N));
  }
  if (v.size() != N) throw ConfigError(fmt::format("'{}' must have {} components", key, N));
  for (int i = 0; i < N; ++i) out(i) = v[static_cast<std::size_t>(i)];
}

template <int N>
json vec_json(const Eigen::Matrix<double, N, 1>& v) {
  json a = json::array();
  for (int i = 0; i < N; ++i) a.push_back(v(i));
  return a;
}

Eigen::MatrixXi read_adjacency(const json& j) {
  std::vector<std::vector<int>> rows;
  try {
    rows = j.get<std::vector<std::vector<int>>>();
  } catch (const json::exception&) {
    throw ConfigError("adjacency must be a square array of 0/1 integers");
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXi a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n)
      throw ConfigError("adjacency must be square");
    for (Eigen::Index c = 0; c < n; ++c) a(i, c) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
  }
  return a;
}

OverloadModel read_overload(const json& j, OverloadModel base, std::string_view where) {
  check_keys(j, {"base_cost", "per_box_cost"}, where);
  read(j, "base_cost", base.base_cost);
  read(j, "per_box_cost", base.per_box_cost);
  return base;
}

std::string pct(double q) {
  return fmt::format("{}%", std::round(q * 1000.0) / 10.0);
}

}  // namespace

ScenarioConfig parse_scenario(const json& j) {
  check_keys(j, {"name", "description", "horizon", "seed", "camera", "objects", "target_class", "detector", "filter",
                 "control", "vio", "timing", "network", "robots", "attacks", "metrics"},
             "scenario");
  ScenarioConfig cfg;
  read(j, "name", cfg.name);
  read(j, "description", cfg.description);
  read(j, "horizon", cfg.horizon);
  read(j, "seed", cfg.seed);
  read(j, "target_class", cfg.target_class);

  if (auto it = j.find("camera"); it != j.end()) {
    check_keys(*it, {"focal_px", "width_px", "height_px"}, "camera");
    read(*it, "focal_px", cfg.camera.focal_px);
    read(*it, "width_px", cfg.camera.width_px);
    read(*it, "height_px", cfg.camera.height_px);
  }

  if (auto it = j.find("objects"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("objects must be an array");
    for (const json& o : *it) {
      check_keys(o, {"class_id", "width", "height", "position"}, "object");
      ObjectModel obj;
      read(o, "class_id", obj.class_id);
      read(o, "width", obj.width_m);
      read(o, "height", obj.height_m);
      read_vec(o, "position", obj.position);
      cfg.objects.push_back(obj);
    }
  }

  if (auto it = j.find("detector"); it != j.end()) {
    check_keys(*it, {"pixel_noise", "base_confidence", "confidence_jitter", "confidence_threshold", "iou_threshold"},
               "detector");
    read(*it, "pixel_noise", cfg.detector.pixel_noise);
    read(*it, "base_confidence", cfg.detector.base_confidence);
    read(*it, "confidence_jitter", cfg.detector.confidence_jitter);
    read(*it, "confidence_threshold", cfg.detector.confidence_threshold);
    read(*it, "iou_threshold", cfg.detector.iou_threshold);
  }

  if (auto it = j.find("filter"); it != j.end()) {
    check_keys(*it, {"sigma2_pos", "sigma2_vel", "r_vel", "eps_bar", "eps_low", "gate_tau", "init_pos_var",
                     "init_vel_var", "track_initiation"},
               "filter");
    FilterParams& f = cfg.filter;
    read(*it, "sigma2_pos", f.sigma2_pos);
    read(*it, "sigma2_vel", f.sigma2_vel);
    double r_vel = f.r_vel(0, 0);
    read(*it, "r_vel", r_vel);
    f.r_vel = r_vel * Mat3::Identity();
    read(*it, "eps_bar", f.localization.eps_bar);
    read(*it, "eps_low", f.localization.eps_low);
    read(*it, "gate_tau", f.gate_tau);
    read(*it, "init_pos_var", f.init_pos_var);
    read(*it, "init_vel_var", f.init_vel_var);
    read(*it, "track_initiation", f.track_initiation);
  }

  if (auto it = j.find("control"); it != j.end()) {
    check_keys(*it, {"alpha", "gamma", "ref_freq", "ref_period_steps", "nominal_period", "altitude", "altitude_omega",
                     "yaw_gain"},
               "control");
    read(*it, "alpha", cfg.control.alpha);
    read(*it, "gamma", cfg.control.gamma);
    read(*it, "ref_freq", cfg.control.reference.freq);
    read(*it, "ref_period_steps", cfg.control.reference.period_steps);
    read(*it, "nominal_period", cfg.control.reference.nominal_period);
    read(*it, "altitude", cfg.altitude.altitude);
    read(*it, "altitude_omega", cfg.altitude.omega);
    read(*it, "yaw_gain", cfg.yaw_gain);
  }

  if (auto it = j.find("vio"); it != j.end()) {
    check_keys(*it, {"velocity_std", "rotation_std"}, "vio");
    read(*it, "velocity_std", cfg.vio.velocity_std);
    read(*it, "rotation_std", cfg.vio.rotation_std);
  }

  if (auto it = j.find("timing"); it != j.end()) {
    check_keys(*it, {"base_cost", "per_box_cost", "min_period"}, "timing");
    read(*it, "base_cost", cfg.timing.cost.base_cost);
    read(*it, "per_box_cost", cfg.timing.cost.per_box_cost);
    read(*it, "min_period", cfg.timing.min_period);
  }

  if (auto it = j.find("network"); it != j.end()) {
    check_keys(*it, {"loss", "delay_steps", "topology"}, "network");
    read(*it, "loss", cfg.network.loss);
    read(*it, "delay_steps", cfg.network.delay_steps);
    if (auto t = it->find("topology"); t != it->end()) {
      if (!t->is_array()) throw ConfigError("network.topology must be an array of phases");
      for (const json& ph : *t) {
        check_keys(ph, {"from_step", "adjacency"}, "topology phase");
        TopologyPhase phase;
        read(ph, "from_step", phase.from_step);
        if (!ph.contains("adjacency")) throw ConfigError("topology phase needs an adjacency matrix");
        phase.adjacency = read_adjacency(ph.at("adjacency"));
        cfg.topology.push_back(std::move(phase));
      }
    }
  }

  if (auto it = j.find("robots"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("robots must be an array");
    for (const json& r : *it) {
      check_keys(r, {"id", "position", "velocity", "yaw", "target", "camera_tilt"}, "robot");
      RobotConfig rc;
      if (!r.contains("id")) throw ConfigError("robot needs an id");
      read(r, "id", rc.id);
      read_vec(r, "position", rc.position);
      read_vec(r, "velocity", rc.velocity);
      read(r, "yaw", rc.yaw);
      read_vec(r, "target", rc.target);
      read(r, "camera_tilt", rc.camera_tilt);
      cfg.robots.push_back(rc);
    }
  }

  if (auto it = j.find("attacks"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("attacks must be an array");
    for (const json& a : *it) {
      check_keys(a, {"target_robot", "misclassification", "mislocalization", "overload", "synthetic_ua"}, "attack");
      AttackSpec spec;
      if (!a.contains("target_robot")) throw ConfigError("attack needs a target_robot");
      read(a, "target_robot", spec.target_robot);
      if (auto m = a.find("misclassification"); m != a.end() && !m->is_null()) {
        check_keys(*m, {"n_blocks", "p", "decoy_class"}, "misclassification");
        MisclassSpec mc;
        read(*m, "n_blocks", mc.n_blocks);
        read(*m, "p", mc.p);
        read(*m, "decoy_class", mc.decoy_class);
        spec.misclass = mc;
      }
      if (auto m = a.find("mislocalization"); m != a.end() && !m->is_null()) {
        check_keys(*m, {"b", "q", "conf_boost", "max_redraws"}, "mislocalization");
        MislocSpec ml;
        read(*m, "b", ml.b);
        read(*m, "q", ml.q);
        read(*m, "conf_boost", ml.conf_boost);
        read(*m, "max_redraws", ml.max_redraws);
        spec.misloc = ml;
      }
      if (auto m = a.find("overload"); m != a.end() && !m->is_null())
        spec.overload = read_overload(*m, cfg.timing.cost, "overload");
      if (a.contains("synthetic_ua") && !a.at("synthetic_ua").is_null()) {
        Vec2 ua = Vec2::Zero();
        read_vec(a, "synthetic_ua", ua);
        spec.synthetic_ua = ua;
      }
      cfg.attacks.push_back(spec);
    }
  }

  if (auto it = j.find("metrics"); it != j.end()) {
    check_keys(*it, {"robot", "reference", "rms_start_time"}, "metrics");
    read(*it, "robot", cfg.metrics.robot);
    read(*it, "reference", cfg.metrics.reference);
    read(*it, "rms_start_time", cfg.metrics.rms_start_time);
  }
  return cfg;
}

ScenarioConfig parse_scenario_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("scenario is not valid JSON: {}", e.what()));
  }
  return parse_scenario(j);
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open scenario file '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

json to_json(const ScenarioConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["description"] = cfg.description;
  j["horizon"] = cfg.horizon;
  j["seed"] = cfg.seed;
  j["camera"] = {{"focal_px", cfg.camera.focal_px}, {"width_px", cfg.camera.width_px},
                 {"height_px", cfg.camera.height_px}};
  j["objects"] = json::array();
  for (const auto& o : cfg.objects)
    j["objects"].push_back(
        {{"class_id", o.class_id}, {"width", o.width_m}, {"height", o.height_m}, {"position", vec_json<3>(o.position)}});
  j["target_class"] = cfg.target_class;
  j["detector"] = {{"pixel_noise", cfg.detector.pixel_noise},
                   {"base_confidence", cfg.detector.base_confidence},
                   {"confidence_jitter", cfg.detector.confidence_jitter},
                   {"confidence_threshold", cfg.detector.confidence_threshold},
                   {"iou_threshold", cfg.detector.iou_threshold}};
  const FilterParams& f = cfg.filter;
  j["filter"] = {{"sigma2_pos", f.sigma2_pos},       {"sigma2_vel", f.sigma2_vel},
                 {"r_vel", f.r_vel(0, 0)},           {"eps_bar", f.localization.eps_bar},
                 {"eps_low", f.localization.eps_low}, {"gate_tau", f.gate_tau},
                 {"init_pos_var", f.init_pos_var},   {"init_vel_var", f.init_vel_var},
                 {"track_initiation", f.track_initiation}};
  j["control"] = {{"alpha", cfg.control.alpha},
                  {"gamma", cfg.control.gamma},
                  {"ref_freq", cfg.control.reference.freq},
                  {"ref_period_steps", cfg.control.reference.period_steps},
                  {"nominal_period", cfg.control.reference.nominal_period},
                  {"altitude", cfg.altitude.altitude},
                  {"altitude_omega", cfg.altitude.omega},
                  {"yaw_gain", cfg.yaw_gain}};
  j["vio"] = {{"velocity_std", cfg.vio.velocity_std}, {"rotation_std", cfg.vio.rotation_std}};
  j["timing"] = {{"base_cost", cfg.timing.cost.base_cost},
                 {"per_box_cost", cfg.timing.cost.per_box_cost},
                 {"min_period", cfg.timing.min_period}};
  json topo = json::array();
  for (const auto& ph : cfg.topology) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < ph.adjacency.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < ph.adjacency.cols(); ++c) row.push_back(ph.adjacency(r, c));
      rows.push_back(row);
    }
    topo.push_back({{"from_step", ph.from_step}, {"adjacency", rows}});
  }
  j["network"] = {{"loss", cfg.network.loss}, {"delay_steps", cfg.network.delay_steps}, {"topology", topo}};
  j["robots"] = json::array();
  for (const auto& r : cfg.robots)
    j["robots"].push_back({{"id", r.id},
                           {"position", vec_json<3>(r.position)},
                           {"velocity", vec_json<3>(r.velocity)},
                           {"yaw", r.yaw},
                           {"target", vec_json<2>(r.target)},
                           {"camera_tilt", r.camera_tilt}});
  j["attacks"] = json::array();
  for (const auto& a : cfg.attacks) {
    json ja = {{"target_robot", a.target_robot}};
    if (a.misclass)
      ja["misclassification"] = {
          {"n_blocks", a.misclass->n_blocks}, {"p", a.misclass->p}, {"decoy_class", a.misclass->decoy_class}};
    if (a.misloc)
      ja["mislocalization"] = {{"b", a.misloc->b},
                               {"q", a.misloc->q},
                               {"conf_boost", a.misloc->conf_boost},
                               {"max_redraws", a.misloc->max_redraws}};
    if (a.overload) ja["overload"] = {{"base_cost", a.overload->base_cost}, {"per_box_cost", a.overload->per_box_cost}};
    if (a.synthetic_ua) ja["synthetic_ua"] = vec_json<2>(*a.synthetic_ua);
    j["attacks"].push_back(ja);
  }
  j["metrics"] = {{"robot", cfg.metrics.robot},
                  {"reference", cfg.metrics.reference},
                  {"rms_start_time", cfg.metrics.rms_start_time}};
  return j;
}

void ScenarioConfig::validate() const {
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  camera.validate();
  if (objects.empty()) throw ConfigError("scenario needs at least one object");
  for (const auto& o : objects) o.validate();
  target_object();
  detector.validate();
  filter.validate();
  control.validate();
  if (!(altitude.omega > 0.0)) throw ConfigError("altitude_omega must be > 0");
  if (!(yaw_gain >= 0.0)) throw ConfigError("yaw_gain must be >= 0");
  if (!(vio.velocity_std >= 0.0) || !(vio.rotation_std >= 0.0)) throw ConfigError("vio noise must be >= 0");
  timing.cost.validate();
  if (!(timing.min_period > 0.0)) throw ConfigError("min_period must be > 0");
  network.validate();

  if (robots.empty()) throw ConfigError("scenario needs at least one robot");
  std::set<RobotId> ids;
  for (const auto& r : robots) {
    if (!ids.insert(r.id).second) throw ConfigError(fmt::format("duplicate robot id {}", r.id));
    if (!r.position.allFinite() || !r.velocity.allFinite() || !r.target.allFinite() || !std::isfinite(r.yaw))
      throw ConfigError(fmt::format("robot {} has non-finite initial state", r.id));
  }
  build_topology();

  std::set<RobotId> attacked;
  for (const auto& a : attacks) {
    if (!ids.count(a.target_robot)) throw ConfigError(fmt::format("attack targets unknown robot {}", a.target_robot));
    if (!attacked.insert(a.target_robot).second)
      throw ConfigError(fmt::format("robot {} has more than one attack spec", a.target_robot));
    if (a.misclass) {
      a.misclass->validate(horizon);
      if (a.misclass->decoy_class == target_class) throw ConfigError("decoy class must differ from the target class");
    }
    if (a.misloc) a.misloc->validate();
    if (a.overload) a.overload->validate();
    if (a.synthetic_ua && !a.synthetic_ua->allFinite()) throw ConfigError("synthetic_ua must be finite");
  }

  if (!ids.count(metrics.robot)) throw ConfigError(fmt::format("metrics robot {} does not exist", metrics.robot));
  if (!ids.count(metrics.reference))
    throw ConfigError(fmt::format("metrics reference robot {} does not exist", metrics.reference));
  if (!(metrics.rms_start_time >= 0.0)) throw ConfigError("rms_start_time must be >= 0");
}

const RobotConfig& ScenarioConfig::robot(RobotId id) const {
  for (const auto& r : robots)
    if (r.id == id) return r;
  throw ConfigError(fmt::format("unknown robot id {}", id));
}

const ObjectModel& ScenarioConfig::target_object() const {
  for (const auto& o : objects)
    if (o.class_id == target_class) return o;
  throw ConfigError("no object of the target class in the scene");
}

Topology ScenarioConfig::build_topology() const {
  std::vector<RobotId> ids;
  for (const auto& r : robots) ids.push_back(r.id);
  if (topology.empty()) return Topology::complete(ids);
  Topology t(ids, topology.front().adjacency);
  if (topology.front().from_step != 0) throw ConfigError("first topology phase must start at step 0");
  for (std::size_t i = 1; i < topology.size(); ++i) t.add_phase(topology[i].from_step, topology[i].adjacency);
  return t;
}

const AttackSpec* ScenarioConfig::attack_for(RobotId id) const {
  for (const auto& a : attacks)
    if (a.target_robot == id) return &a;
  return nullptr;
}

std::string describe_attacks(const ScenarioConfig& cfg) {
  std::vector<std::string> parts;
  for (const auto& a : cfg.attacks) {
    std::vector<std::string> bits;
    if (a.misclass) bits.push_back(fmt::format("n={} p={}", a.misclass->n_blocks, a.misclass->p));
    if (a.misloc) bits.push_back(fmt::format("b={} q={}", a.misloc->b, pct(a.misloc->q)));
    if (a.synthetic_ua) bits.push_back(fmt::format("ua=[{},{}]", a.synthetic_ua->x(), a.synthetic_ua->y()));
    if (a.overload) bits.push_back("overload");
    if (bits.empty()) continue;
    std::string s = fmt::format("R{}:", a.target_robot);
    for (std::size_t i = 0; i < bits.size(); ++i) s += (i ? "; " : " ") + bits[i];
    parts.push_back(s);
  }
  if (parts.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? " | " : "") + parts[i];
  return out;
}

}  // namespace percsim
