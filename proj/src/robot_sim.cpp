#include "rhp_hqp/robot_sim.hpp"

#include <algorithm>
#include <cmath>

#include "rhp_hqp/error.hpp"

namespace rhp_hqp {

Eigen::Vector3d Obstacle::center(double t) const {
  if (waypoints.empty()) return Eigen::Vector3d::Zero();
  if (t <= waypoints.front().t) return waypoints.front().p;
  for (size_t k = 1; k < waypoints.size(); ++k) {
    const auto& a = waypoints[k - 1];
    const auto& b = waypoints[k];
    if (t <= b.t) {
      const double s = b.t > a.t ? (t - a.t) / (b.t - a.t) : 1.0;
      return a.p + s * (b.p - a.p);
    }
  }
  return waypoints.back().p;
}

void Obstacle::check() const {
  if (!(radius > 0.0)) throw ConfigError("obstacle radius must be positive");
  if (waypoints.empty()) throw ConfigError("obstacle needs at least one waypoint");
  for (size_t k = 1; k < waypoints.size(); ++k) {
    if (waypoints[k].t < waypoints[k - 1].t) throw ConfigError("obstacle waypoint times must not decrease");
  }
}

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::hand_position: return "hand_position";
    case TaskKind::hand_orientation: return "hand_orientation";
    case TaskKind::torso_avoidance: return "torso_avoidance";
    case TaskKind::arm_avoidance: return "arm_avoidance";
    case TaskKind::joint_posture: return "joint_posture";
  }
  return "unknown";
}

TaskKind task_kind_from_string(const std::string& name) {
  for (auto kind : {TaskKind::hand_position, TaskKind::hand_orientation, TaskKind::torso_avoidance,
                    TaskKind::arm_avoidance, TaskKind::joint_posture}) {
    if (name == to_string(kind)) return kind;
  }
  throw ConfigError("unknown task kind '" + name + "'");
}

void TaskBinding::check(const KinematicChain& chain) const {
  const std::string label = "task " + std::to_string(id) + " (" + name + ")";
  if (!(gain > 0.0)) throw ConfigError(label + ": gain must be positive");
  if (!(weight > 0.0)) throw ConfigError(label + ": weight must be positive");
  if (kind == TaskKind::joint_posture) {
    if (joints.empty()) throw ConfigError(label + ": joint_posture needs joints");
    if (joint_targets.size() != static_cast<Eigen::Index>(joints.size())) {
      throw ConfigError(label + ": one joint target per joint required");
    }
    for (int j : joints) {
      if (j < 0 || j >= chain.dof()) throw ConfigError(label + ": joint index out of range");
    }
  }
  if ((kind == TaskKind::torso_avoidance || kind == TaskKind::arm_avoidance) && !(d_safe >= 0.0)) {
    throw ConfigError(label + ": d_safe must be non-negative");
  }
  if ((kind == TaskKind::torso_avoidance || kind == TaskKind::arm_avoidance) &&
      !(activation_distance > d_safe)) {
    throw ConfigError(label + ": activation_distance must exceed d_safe");
  }
}

double avoidance_activation(double d, double d_safe, double activation_distance) {
  if (d <= d_safe || std::isinf(activation_distance)) return 1.0;
  if (d >= activation_distance) return 0.0;
  const double s = (activation_distance - d) / (activation_distance - d_safe);
  return s * s * (3.0 - 2.0 * s);
}

SceneEval evaluate_scene(const KinematicChain& chain, const RobotState& state,
                         const Obstacle& obstacle, const std::vector<TaskBinding>& bindings) {
  SceneEval s;
  s.frames = forward_kinematics(chain, state.q);
  s.obstacle_center = obstacle.center(state.t);
  s.arm = min_distance(chain, s.frames, chain.arm_links, s.obstacle_center, obstacle.radius);
  s.torso = min_distance(chain, s.frames, chain.torso_links, s.obstacle_center, obstacle.radius);
  s.extension = elbow_extension(chain, s.frames);

  bool have_position = false;
  bool have_orientation = false;
  for (const auto& b : bindings) {
    if (b.kind == TaskKind::hand_position && !have_position) {
      s.position_error = (b.target_position - s.frames.tip.translation()).norm();
      have_position = true;
    } else if (b.kind == TaskKind::hand_orientation && !have_orientation) {
      s.orientation_error =
          rotation_log(b.target_rotation * s.frames.tip.linear().transpose()).norm();
      have_orientation = true;
    }
  }
  return s;
}

GeneratedProblem make_tasks(const KinematicChain& chain, const RobotState& state,
                            const SceneEval& scene, const std::vector<TaskBinding>& bindings,
                            const std::vector<ConstraintBinding>& constraints, double dt) {
  const int n = chain.dof();
  GeneratedProblem out;
  out.tasks.reserve(bindings.size());

  for (const auto& b : bindings) {
    Task t;
    t.id = b.id;
    t.name = b.name;
    switch (b.kind) {
      case TaskKind::hand_position: {
        t.A = point_jacobian(chain, scene.frames, chain.tip_link(), chain.tip.translation());
        t.b = b.gain * (b.target_position - scene.frames.tip.translation());
        break;
      }
      case TaskKind::hand_orientation: {
        t.A = orientation_jacobian(chain, scene.frames, chain.tip_link());
        t.b = b.gain * rotation_log(b.target_rotation * scene.frames.tip.linear().transpose());
        break;
      }
      case TaskKind::torso_avoidance:
      case TaskKind::arm_avoidance: {
        const DistanceResult& d = b.kind == TaskKind::torso_avoidance ? scene.torso : scene.arm;
        t.A = Eigen::MatrixXd::Zero(1, n);
        t.b = Eigen::VectorXd::Zero(1);
        if (d.link >= 0) {
          const double h = avoidance_activation(d.d_min, b.d_safe, b.activation_distance);
          t.A.row(0) = h * d.gradient;
          t.b(0) = h * b.gain * std::max(0.0, b.d_safe - d.d_min);
        }
        break;
      }
      case TaskKind::joint_posture: {
        const auto m = static_cast<Eigen::Index>(b.joints.size());
        t.A = Eigen::MatrixXd::Zero(m, n);
        t.b.resize(m);
        for (Eigen::Index r = 0; r < m; ++r) {
          const int j = b.joints[static_cast<size_t>(r)];
          t.A(r, j) = 1.0;
          t.b(r) = b.gain * (b.joint_targets(r) - state.q(j));
        }
        break;
      }
    }
    t.W = b.weight * Eigen::MatrixXd::Identity(t.A.rows(), t.A.rows());
    out.tasks.push_back(std::move(t));
  }

  for (const auto& cb : constraints) {
    Constraint c;
    c.id = cb.id;
    c.level = cb.level;
    c.C = Eigen::MatrixXd::Identity(n, n);
    c.lower.resize(n);
    c.upper.resize(n);
    for (int j = 0; j < n; ++j) {
      const Joint& joint = chain.joints[static_cast<size_t>(j)];
      if (cb.kind == ConstraintKind::joint_velocity) {
        c.lower(j) = -joint.qd_max;
        c.upper(j) = joint.qd_max;
      } else {
        c.lower(j) = std::min(0.0, (joint.q_min - state.q(j)) / dt);
        c.upper(j) = std::max(0.0, (joint.q_max - state.q(j)) / dt);
      }
    }
    out.constraints.push_back(std::move(c));
  }
  return out;
}

StepResult step(const KinematicChain& chain, const RobotState& state,
                const Eigen::VectorXd& command, double dt) {
  if (!(dt > 0.0)) throw DimensionError("step: dt must be positive");
  if (command.size() != chain.dof() || state.q.size() != chain.dof()) {
    throw DimensionError("step: command size does not match the chain");
  }
  StepResult r;
  r.state.q = state.q + command * dt;
  r.state.qdot = command;
  r.state.t = state.t + dt;
  for (int j = 0; j < chain.dof(); ++j) {
    r.velocity_excess =
        std::max(r.velocity_excess, std::abs(command(j)) - chain.joints[static_cast<size_t>(j)].qd_max);
  }
  return r;
}

}  // namespace rhp_hqp
