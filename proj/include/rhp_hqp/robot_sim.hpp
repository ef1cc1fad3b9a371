#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rhp_hqp/kinematics.hpp"
#include "rhp_hqp/task_model.hpp"

namespace rhp_hqp {

struct RobotState {
  Eigen::VectorXd q;     // rad
  Eigen::VectorXd qdot;  // rad/s
  double t = 0.0;        // s
};

struct Waypoint {
  double t = 0.0;
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
};

/// Sphere moving along a piecewise-linear path, held at the end points
/// outside the waypoint time span.
struct Obstacle {
  double radius = 0.05;
  std::vector<Waypoint> waypoints;

  Eigen::Vector3d center(double t) const;
  void check() const;
};

enum class TaskKind { hand_position, hand_orientation, torso_avoidance, arm_avoidance, joint_posture };

std::string_view to_string(TaskKind kind);
TaskKind task_kind_from_string(const std::string& name);

struct TaskBinding {
  int id = 0;
  std::string name;
  TaskKind kind = TaskKind::hand_position;
  double gain = 1.0;                 // 1/s
  double weight = 1.0;
  double d_safe = 0.05;              // m, avoidance kinds
  double activation_distance = std::numeric_limits<double>::infinity();  // m
  Eigen::Vector3d target_position = Eigen::Vector3d::Zero();
  Eigen::Matrix3d target_rotation = Eigen::Matrix3d::Identity();
  std::vector<int> joints;           // joint_posture
  Eigen::VectorXd joint_targets;     // joint_posture

  void check(const KinematicChain& chain) const;
};

enum class ConstraintKind { joint_velocity, joint_position };

struct ConstraintBinding {
  int id = 0;
  ConstraintKind kind = ConstraintKind::joint_velocity;
  int level = 1;
};

/// Geometry shared by task generation and logging for one robot state.
struct SceneEval {
  ChainFrames frames;
  Eigen::Vector3d obstacle_center = Eigen::Vector3d::Zero();
  DistanceResult arm;
  DistanceResult torso;
  double position_error = 0.0;     // m, |target - hand| of the first hand_position task
  double orientation_error = 0.0;  // rad, |log(R_target R^T)| of the first hand_orientation task
  double extension = 0.0;
};

SceneEval evaluate_scene(const KinematicChain& chain, const RobotState& state,
                         const Obstacle& obstacle, const std::vector<TaskBinding>& bindings);

/// Per-cycle tasks and constraints in binding order.
struct GeneratedProblem {
  std::vector<Task> tasks;
  std::vector<Constraint> constraints;
};

/// Hand position: A = J_p(tip), b = k (p* - p). Hand orientation: A = J_w(tip),
/// b = k log(R* R^T). Avoidance: A = distance gradient of the witness point,
/// b = k max(0, d_safe - d_min), both scaled by avoidance_activation so the
/// row fades out smoothly and is zero beyond activation_distance.
/// Joint posture: selection rows, b = k (q* - q). Constraints: |qdot| <= qd_max
/// and (q_min - q)/dt <= qdot <= (q_max - q)/dt.
/// 1 up to d_safe, smoothstep down to 0 at activation_distance (1 everywhere
/// when activation_distance is infinite).
double avoidance_activation(double d, double d_safe, double activation_distance);

GeneratedProblem make_tasks(const KinematicChain& chain, const RobotState& state,
                            const SceneEval& scene, const std::vector<TaskBinding>& bindings,
                            const std::vector<ConstraintBinding>& constraints, double dt);

struct StepResult {
  RobotState state;
  double velocity_excess = 0.0;  // largest |qdot_i| - qd_max_i, clipped at 0
};

/// Explicit Euler step of the joint velocity command.
StepResult step(const KinematicChain& chain, const RobotState& state,
                const Eigen::VectorXd& command, double dt);

}  // namespace rhp_hqp
