#include "rhp_hqp/scenario.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "rhp_hqp/error.hpp"

namespace rhp_hqp {

std::string_view to_string(RunMode mode) {
  return mode == RunMode::rhp_hqp ? "rhp_hqp" : "strict_hqp_baseline";
}

RunMode run_mode_from_string(const std::string& name) {
  if (name == "rhp_hqp") return RunMode::rhp_hqp;
  if (name == "strict_hqp_baseline") return RunMode::strict_hqp_baseline;
  throw ConfigError("unknown mode '" + name + "' (expected rhp_hqp or strict_hqp_baseline)");
}

int Scenario::cycles() const { return static_cast<int>(std::llround(duration / dt)); }

void Scenario::check() const {
  if (!(duration >= 0.0)) throw ConfigError("duration must be non-negative");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  chain.check();
  if (q0.size() != chain.dof()) throw ConfigError("q0 must have one entry per joint");
  obstacle.check();
  for (const auto& t : tasks) t.check(chain);
  hierarchy.check();
  if (hierarchy.candidates.front().tasks() != static_cast<int>(tasks.size())) {
    throw ConfigError("hierarchy has " + std::to_string(hierarchy.candidates.front().tasks()) +
                      " task columns but " + std::to_string(tasks.size()) + " tasks are defined");
  }
  for (const auto& c : constraints) {
    if (c.level < 1 || c.level > hierarchy.candidates.front().levels()) {
      throw ConfigError("constraint " + std::to_string(c.id) + " level outside the hierarchy");
    }
  }
  policy.check();
  if (nominal < 0 || nominal >= hierarchy.size() || avoidance < 0 || avoidance >= hierarchy.size()) {
    throw ConfigError("nominal/avoidance must name candidates");
  }
  if (mode == RunMode::strict_hqp_baseline) {
    for (size_t k = 0; k < hierarchy.candidates.size(); ++k) {
      if (!hierarchy.candidates[k].is_binary()) {
        throw ConfigError("strict_hqp_baseline needs binary candidates; '" + hierarchy.labels[k] +
                          "' is not");
      }
    }
  }
}

namespace {

template <typename T>
T required(const YAML::Node& node, const std::string& key, const std::string& where) {
  const YAML::Node v = node[key];
  if (!v) throw ConfigError(where + ": missing '" + key + "'");
  try {
    return v.as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
T optional(const YAML::Node& node, const std::string& key, T fallback, const std::string& where) {
  const YAML::Node v = node[key];
  if (!v) return fallback;
  try {
    return v.as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

Eigen::VectorXd as_vector(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence()) throw ConfigError(where + ": expected a list of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(node.size()));
  for (size_t k = 0; k < node.size(); ++k) {
    try {
      v(static_cast<Eigen::Index>(k)) = node[k].as<double>();
    } catch (const YAML::Exception& e) {
      throw ConfigError(where + "[" + std::to_string(k) + "]: " + e.what());
    }
  }
  return v;
}

Eigen::Vector3d as_vec3(const YAML::Node& node, const std::string& where) {
  const Eigen::VectorXd v = as_vector(node, where);
  if (v.size() != 3) throw ConfigError(where + ": expected 3 numbers");
  return v;
}

Eigen::Matrix3d rpy_rotation(const Eigen::Vector3d& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(rpy.y(), Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

KinematicChain parse_chain(const YAML::Node& robot) {
  const std::string preset = optional<std::string>(robot, "preset", "", "robot");
  KinematicChain chain;
  if (preset == "desk10") {
    chain = desk10_chain();
  } else if (!preset.empty()) {
    throw ConfigError("robot.preset: unknown preset '" + preset + "'");
  }

  if (const YAML::Node joints = robot["joints"]) {
    chain.joints.clear();
    for (size_t k = 0; k < joints.size(); ++k) {
      const YAML::Node j = joints[k];
      const std::string where = "robot.joints[" + std::to_string(k) + "]";
      Joint joint;
      joint.name = optional<std::string>(j, "name", "joint" + std::to_string(k), where);
      joint.offset = Eigen::Isometry3d::Identity();
      if (j["offset"]) joint.offset.translation() = as_vec3(j["offset"], where + ".offset");
      if (j["rpy"]) joint.offset.linear() = rpy_rotation(as_vec3(j["rpy"], where + ".rpy"));
      joint.axis = as_vec3(j["axis"], where + ".axis");
      joint.q_min = optional<double>(j, "q_min", -M_PI, where);
      joint.q_max = optional<double>(j, "q_max", M_PI, where);
      joint.qd_max = optional<double>(j, "qd_max", 2.0, where);
      if (const YAML::Node pts = j["points"]) {
        for (size_t p = 0; p < pts.size(); ++p) {
          joint.points.push_back(as_vec3(pts[p], where + ".points[" + std::to_string(p) + "]"));
        }
      }
      chain.joints.push_back(std::move(joint));
    }
    chain.tip = Eigen::Isometry3d::Identity();
  }
  if (robot["tip"]) chain.tip.translation() = as_vec3(robot["tip"], "robot.tip");
  if (robot["torso_links"]) chain.torso_links = optional<std::vector<int>>(robot, "torso_links", {}, "robot");
  if (robot["arm_links"]) chain.arm_links = optional<std::vector<int>>(robot, "arm_links", {}, "robot");
  chain.shoulder_link = optional<int>(robot, "shoulder_link", chain.shoulder_link, "robot");
  chain.wrist_link = optional<int>(robot, "wrist_link", chain.wrist_link, "robot");
  if (robot["qd_max"]) {
    const double qd = required<double>(robot, "qd_max", "robot");
    for (auto& j : chain.joints) j.qd_max = qd;
  }
  if (chain.joints.empty()) throw ConfigError("robot: needs a preset or a joints list");
  return chain;
}

EventPredicate predicate_from_string(const std::string& s) {
  if (s == "elbow_extension_above") return EventPredicate::elbow_extension_above;
  if (s == "time_after") return EventPredicate::time_after;
  if (s == "d_min_below") return EventPredicate::d_min_below;
  throw ConfigError("unknown event predicate '" + s + "'");
}

}  // namespace

Scenario parse_scenario(const std::string& yaml_text, const std::string& name) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(name + ": " + e.what());
  }
  if (!root.IsMap()) throw ConfigError(name + ": top level must be a mapping");

  const int version = required<int>(root, "schema_version", name);
  if (version != kScenarioSchemaVersion) {
    throw ConfigError(name + ": unsupported schema_version " + std::to_string(version));
  }

  Scenario s;
  s.name = optional<std::string>(root, "name", name, name);
  s.duration = required<double>(root, "duration", name);
  s.dt = optional<double>(root, "dt", 0.004, name);
  s.seed = optional<std::uint64_t>(root, "seed", 0, name);
  s.mode = run_mode_from_string(optional<std::string>(root, "mode", "rhp_hqp", name));

  if (!root["robot"]) throw ConfigError(name + ": missing 'robot'");
  const YAML::Node robot = root["robot"];
  s.chain = parse_chain(robot);
  s.q0 = robot["q0"] ? as_vector(robot["q0"], "robot.q0")
                     : Eigen::VectorXd(Eigen::VectorXd::Zero(s.chain.dof()));
  if (s.q0.size() != s.chain.dof()) throw ConfigError("robot.q0 must have one entry per joint");
  const ChainFrames initial = forward_kinematics(s.chain, s.q0);

  if (!root["obstacle"]) throw ConfigError(name + ": missing 'obstacle'");
  const YAML::Node obs = root["obstacle"];
  s.obstacle.radius = required<double>(obs, "radius", "obstacle");
  const YAML::Node wps = obs["waypoints"];
  if (!wps || !wps.IsSequence()) throw ConfigError("obstacle.waypoints: expected a list");
  const double jitter = optional<double>(obs, "jitter", 0.0, "obstacle");
  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (size_t k = 0; k < wps.size(); ++k) {
    const Eigen::VectorXd w = as_vector(wps[k], "obstacle.waypoints[" + std::to_string(k) + "]");
    if (w.size() != 4) throw ConfigError("obstacle waypoints are [t, x, y, z]");
    Waypoint wp{w(0), w.tail<3>()};
    if (jitter > 0.0) wp.p += jitter * Eigen::Vector3d(noise(rng), noise(rng), noise(rng));
    s.obstacle.waypoints.push_back(wp);
  }

  const YAML::Node tasks = root["tasks"];
  if (!tasks || !tasks.IsSequence()) throw ConfigError(name + ": 'tasks' must be a list");
  for (size_t k = 0; k < tasks.size(); ++k) {
    const YAML::Node t = tasks[k];
    const std::string where = "tasks[" + std::to_string(k) + "]";
    TaskBinding b;
    b.id = optional<int>(t, "id", static_cast<int>(k) + 1, where);
    b.kind = task_kind_from_string(required<std::string>(t, "kind", where));
    b.name = optional<std::string>(t, "name", std::string(to_string(b.kind)), where);
    b.gain = required<double>(t, "gain", where);
    b.weight = optional<double>(t, "weight", 1.0, where);
    b.d_safe = optional<double>(t, "d_safe", b.kind == TaskKind::torso_avoidance ? 0.10 : 0.05, where);
    b.activation_distance =
        optional<double>(t, "activation_distance", std::numeric_limits<double>::infinity(), where);

    const YAML::Node target = t["target"];
    const bool hold = target && target.IsScalar() && target.as<std::string>() == "initial";
    switch (b.kind) {
      case TaskKind::hand_position:
        b.target_position = initial.tip.translation();
        if (target && !hold) b.target_position = as_vec3(target, where + ".target");
        if (t["target_offset"]) b.target_position += as_vec3(t["target_offset"], where + ".target_offset");
        break;
      case TaskKind::hand_orientation:
        b.target_rotation = initial.tip.linear();
        if (t["target_rpy"]) b.target_rotation = rpy_rotation(as_vec3(t["target_rpy"], where + ".target_rpy"));
        break;
      case TaskKind::joint_posture: {
        b.joints = required<std::vector<int>>(t, "joints", where);
        b.joint_targets.resize(static_cast<Eigen::Index>(b.joints.size()));
        if (t["joint_targets"]) {
          b.joint_targets = as_vector(t["joint_targets"], where + ".joint_targets");
        } else {
          for (size_t j = 0; j < b.joints.size(); ++j) {
            const int idx = b.joints[j];
            if (idx < 0 || idx >= s.chain.dof()) throw ConfigError(where + ": joint index out of range");
            b.joint_targets(static_cast<Eigen::Index>(j)) = s.q0(idx);
          }
        }
        break;
      }
      default:
        break;
    }
    s.tasks.push_back(std::move(b));
  }

  if (const YAML::Node cons = root["constraints"]) {
    for (size_t k = 0; k < cons.size(); ++k) {
      const std::string where = "constraints[" + std::to_string(k) + "]";
      ConstraintBinding c;
      c.id = optional<int>(cons[k], "id", static_cast<int>(k) + 1, where);
      const std::string kind = required<std::string>(cons[k], "kind", where);
      if (kind == "joint_velocity") {
        c.kind = ConstraintKind::joint_velocity;
      } else if (kind == "joint_position") {
        c.kind = ConstraintKind::joint_position;
      } else {
        throw ConfigError(where + ": unknown constraint kind '" + kind + "'");
      }
      c.level = optional<int>(cons[k], "level", 1, where);
      s.constraints.push_back(c);
    }
  }

  const YAML::Node h = root["hierarchy"];
  if (!h) throw ConfigError(name + ": missing 'hierarchy'");
  const YAML::Node cands = h["candidates"];
  if (!cands || !cands.IsSequence()) throw ConfigError("hierarchy.candidates: expected a list");
  for (size_t k = 0; k < cands.size(); ++k) {
    const std::string where = "hierarchy.candidates[" + std::to_string(k) + "]";
    s.hierarchy.labels.push_back(required<std::string>(cands[k], "label", where));
    const auto rows = required<std::vector<std::vector<double>>>(cands[k], "matrix", where);
    if (rows.empty()) throw ConfigError(where + ": empty matrix");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.front().size()) throw ConfigError(where + ": ragged matrix");
      for (size_t j = 0; j < rows[i].size(); ++j) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
      }
    }
    s.hierarchy.candidates.emplace_back(m);
  }
  s.nominal = s.hierarchy.index_of(
      optional<std::string>(h, "nominal", s.hierarchy.labels.empty() ? "" : s.hierarchy.labels.front(), "hierarchy"));
  s.avoidance = s.hierarchy.index_of(
      optional<std::string>(h, "avoidance", s.hierarchy.labels[static_cast<size_t>(s.nominal)], "hierarchy"));
  if (const YAML::Node blend_node = h["blend"]) {
    s.policy.d_low = optional<double>(blend_node, "d_low", 0.05, "hierarchy.blend");
    s.policy.d_high = optional<double>(blend_node, "d_high", 0.2, "hierarchy.blend");
    const std::string ramp = optional<std::string>(blend_node, "ramp", "linear", "hierarchy.blend");
    if (ramp == "linear") {
      s.policy.ramp = Ramp::linear;
    } else if (ramp == "smoothstep") {
      s.policy.ramp = Ramp::smoothstep;
    } else {
      throw ConfigError("hierarchy.blend.ramp: expected linear or smoothstep");
    }
    s.policy.rate_limit = optional<double>(blend_node, "rate_limit", 0.01, "hierarchy.blend");
  }
  if (const YAML::Node evs = h["events"]) {
    for (size_t k = 0; k < evs.size(); ++k) {
      const std::string where = "hierarchy.events[" + std::to_string(k) + "]";
      EventRule r;
      r.tag = required<std::string>(evs[k], "tag", where);
      r.when = predicate_from_string(required<std::string>(evs[k], "when", where));
      r.threshold = required<double>(evs[k], "threshold", where);
      r.target = s.hierarchy.index_of(required<std::string>(evs[k], "target", where));
      s.policy.event_targets[r.tag] = r.target;
      s.events.push_back(r);
    }
  }

  if (const YAML::Node sol = root["solver"]) {
    s.solver.regularization = optional<double>(sol, "regularization", s.solver.regularization, "solver");
    s.solver.qp_tolerance = optional<double>(sol, "qp_tolerance", s.solver.qp_tolerance, "solver");
    s.solver.max_qp_iterations = optional<int>(sol, "max_qp_iterations", s.solver.max_qp_iterations, "solver");
    s.solver.rank_tol = optional<double>(sol, "rank_tol", s.solver.rank_tol, "solver");
    if (!(s.solver.regularization > 0.0) || !(s.solver.qp_tolerance > 0.0)) {
      throw ConfigError("solver: regularization and qp_tolerance must be positive");
    }
  }

  s.check();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.stem().string());
}

RunResult run_scenario(const Scenario& sc) {
  sc.check();
  const int n = sc.chain.dof();
  const int cycles = sc.cycles();

  RunResult out;
  RunLog& log = out.log;
  log.scenario = sc.name;
  log.mode = std::string(to_string(sc.mode));
  log.dt = sc.dt;
  log.dof = n;
  log.levels = sc.hierarchy.candidates.front().levels();
  log.tasks = static_cast<int>(sc.tasks.size());
  log.candidates = sc.hierarchy.size();
  log.candidate_labels = sc.hierarchy.labels;
  log.records.reserve(static_cast<size_t>(cycles));

  RobotState state{sc.q0, Eigen::VectorXd::Zero(n), 0.0};
  ScheduleState schedule = ScheduleState::at(sc.hierarchy.size(), sc.nominal, sc.avoidance);
  Eigen::VectorXd last_command = Eigen::VectorXd::Zero(n);

  for (int cycle = 0; cycle < cycles; ++cycle) {
    state.t = cycle * sc.dt;
    const SceneEval scene = evaluate_scene(sc.chain, state, sc.obstacle, sc.tasks);

    std::vector<std::string> events;
    events.emplace_back(scene.arm.d_min < sc.policy.d_high ? kObstacleNearEvent : kObstacleClearEvent);
    for (const auto& rule : sc.events) {
      bool fire = false;
      switch (rule.when) {
        case EventPredicate::elbow_extension_above: fire = scene.extension > rule.threshold; break;
        case EventPredicate::time_after: fire = state.t >= rule.threshold; break;
        case EventPredicate::d_min_below: fire = scene.arm.d_min < rule.threshold; break;
      }
      if (fire) events.push_back(rule.tag);
    }
    schedule = step_schedule(schedule, scene.arm.d_min, events, sc.policy);

    PriorityMatrix psi;
    if (sc.mode == RunMode::strict_hqp_baseline) {
      Eigen::Index dominant = 0;
      schedule.p.maxCoeff(&dominant);
      psi = sc.hierarchy.candidates[static_cast<size_t>(dominant)];
    } else {
      psi = blend(sc.hierarchy, schedule.p);
    }

    GeneratedProblem gen = make_tasks(sc.chain, state, scene, sc.tasks, sc.constraints, sc.dt);
    const TaskLibrary library(n, std::move(gen.tasks), std::move(gen.constraints));

    HierarchySolution sol;
    const auto start = std::chrono::steady_clock::now();
    try {
      sol = sc.mode == RunMode::strict_hqp_baseline ? solve_strict_hierarchy(psi, library, sc.solver)
                                                     : solve_hierarchy(psi, library, sc.solver);
    } catch (const Error& e) {
      throw SolverError("cycle " + std::to_string(cycle) + " (t = " + std::to_string(state.t) +
                        " s): " + e.what());
    }
    const auto stop = std::chrono::steady_clock::now();

    CycleRecord r;
    r.cycle = cycle;
    r.t = state.t;
    r.q = state.q;
    r.qdot = state.qdot;
    r.command = sol.x;
    r.accel = (sol.x - last_command) / sc.dt;
    r.psi = psi.values();
    r.p = schedule.p;
    r.d_min = scene.arm.d_min;
    r.d_torso = scene.torso.d_min;
    r.hand = scene.frames.tip.translation();
    r.position_error = scene.position_error;
    r.orientation_error = scene.orientation_error;
    r.extension = scene.extension;
    r.mode = static_cast<int>(schedule.mode);
    r.task_residuals.resize(library.task_count());
    for (int j = 0; j < library.task_count(); ++j) {
      const Task& t = library.task(j);
      r.task_residuals(j) = (t.A * sol.x - t.b).norm();
    }
    r.level_seconds.resize(static_cast<Eigen::Index>(sol.levels.size()));
    r.level_iterations.resize(static_cast<Eigen::Index>(sol.levels.size()));
    for (size_t l = 0; l < sol.levels.size(); ++l) {
      r.level_seconds(static_cast<Eigen::Index>(l)) = sol.levels[l].seconds;
      r.level_iterations(static_cast<Eigen::Index>(l)) = sol.levels[l].qp_iterations;
      r.kkt = std::max(r.kkt, sol.levels[l].kkt);
    }
    r.solve_seconds = std::chrono::duration<double>(stop - start).count();

    const StepResult next = step(sc.chain, state, sol.x, sc.dt);
    r.velocity_excess = next.velocity_excess;
    log.records.push_back(std::move(r));
    last_command = sol.x;
    state = next.state;
  }

  out.summary = summarize(log, sc.policy.d_high);
  return out;
}

}  // namespace rhp_hqp
