#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "rhp_hqp/error.hpp"
#include "rhp_hqp/hqp_solver.hpp"
#include "rhp_hqp/robot_sim.hpp"

using namespace rhp_hqp;

namespace {

Eigen::VectorXd random_q(std::mt19937_64& rng, const KinematicChain& chain) {
  Eigen::VectorXd q(chain.dof());
  for (int j = 0; j < chain.dof(); ++j) {
    std::uniform_real_distribution<double> u(chain.joints[j].q_min, chain.joints[j].q_max);
    q(j) = u(rng);
  }
  return q;
}

// Rodrigues rotation as a plain 4x4 homogeneous matrix.
Eigen::Matrix4d rot4(const Eigen::Vector3d& k, double angle) {
  Eigen::Matrix3d K;
  K << 0, -k.z(), k.y(), k.z(), 0, -k.x(), -k.y(), k.x(), 0;
  Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
  T.topLeftCorner<3, 3>() = Eigen::Matrix3d::Identity() + std::sin(angle) * K + (1 - std::cos(angle)) * K * K;
  return T;
}

std::vector<Eigen::Matrix4d> fk_oracle(const KinematicChain& chain, const Eigen::VectorXd& q) {
  std::vector<Eigen::Matrix4d> frames;
  Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
  for (int k = 0; k < chain.dof(); ++k) {
    T = T * chain.joints[k].offset.matrix() * rot4(chain.joints[k].axis, q(k));
    frames.push_back(T);
  }
  frames.push_back(T * chain.tip.matrix());
  return frames;
}

Eigen::Vector3d apply(const Eigen::Matrix4d& T, const Eigen::Vector3d& p) {
  return (T * p.homogeneous()).head<3>();
}

KinematicChain single_joint_chain() {
  KinematicChain c;
  Joint j;
  j.name = "j";
  j.axis = Eigen::Vector3d::UnitZ();
  j.points = {Eigen::Vector3d(1, 0, 0)};
  c.joints = {j};
  c.tip.translation() = Eigen::Vector3d(1, 0, 0);
  c.arm_links = {0};
  return c;
}

Eigen::VectorXd case_q0() {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(10);
  q(3) = -0.8;
  q(4) = 0.3;
  q(6) = -1.2;
  return q;
}

}  // namespace

TEST(ForwardKinematics, ZeroConfigurationChainsOffsets) {
  const KinematicChain chain = desk10_chain();
  const ChainFrames f = forward_kinematics(chain, Eigen::VectorXd::Zero(10));
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  for (int k = 0; k < chain.dof(); ++k) {
    T = T * chain.joints[k].offset;
    EXPECT_LE((f.links[k].matrix() - T.matrix()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(ForwardKinematics, QuarterTurn) {
  const KinematicChain chain = single_joint_chain();
  const ChainFrames f = forward_kinematics(chain, Eigen::VectorXd::Constant(1, M_PI / 2));
  EXPECT_LE((f.tip.translation() - Eigen::Vector3d(0, 1, 0)).norm(), 1e-15);
}

TEST(ForwardKinematics, MatchesHomogeneousComposition) {
  const KinematicChain chain = desk10_chain();
  std::mt19937_64 rng(70);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd q = random_q(rng, chain);
    const ChainFrames f = forward_kinematics(chain, q);
    const auto oracle = fk_oracle(chain, q);
    for (int k = 0; k < chain.dof(); ++k) {
      EXPECT_LE((f.links[k].matrix() - oracle[k]).cwiseAbs().maxCoeff(), 1e-12);
    }
    EXPECT_LE((f.tip.translation() - oracle.back().topRightCorner<3, 1>()).norm(), 1e-12);
  }
  EXPECT_THROW(forward_kinematics(chain, Eigen::VectorXd::Zero(3)), DimensionError);
}

TEST(PointJacobian, Examples) {
  const KinematicChain single = single_joint_chain();
  const Eigen::MatrixXd J = point_jacobian(single, Eigen::VectorXd::Zero(1), 0, Eigen::Vector3d(1, 0, 0));
  EXPECT_NEAR(J.col(0).norm(), 1.0, 1e-15);
  const Eigen::MatrixXd J0 = point_jacobian(single, Eigen::VectorXd::Zero(1), 0, Eigen::Vector3d::Zero());
  EXPECT_EQ(J0.col(0).norm(), 0.0);

  const KinematicChain chain = desk10_chain();
  const Eigen::MatrixXd Jarm = point_jacobian(chain, case_q0(), 5, Eigen::Vector3d(0, 0, -0.1));
  EXPECT_EQ(Jarm.rightCols(4).norm(), 0.0);
}

TEST(PointJacobian, MatchesFiniteDifferences) {
  const KinematicChain chain = desk10_chain();
  std::mt19937_64 rng(71);
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd q = random_q(rng, chain);
    const int link = trial % chain.dof();
    const Eigen::Vector3d point(0.01 * (trial % 3), -0.02, -0.1);
    const Eigen::MatrixXd J = point_jacobian(chain, q, link, point);
    for (int j = 0; j < chain.dof(); ++j) {
      Eigen::VectorXd qp = q, qm = q;
      qp(j) += h;
      qm(j) -= h;
      const Eigen::Vector3d fd =
          (apply(fk_oracle(chain, qp)[link], point) - apply(fk_oracle(chain, qm)[link], point)) / (2 * h);
      EXPECT_LE((J.col(j) - fd).cwiseAbs().maxCoeff(), 1e-6);
    }
  }
}

TEST(OrientationJacobian, Examples) {
  const KinematicChain single = single_joint_chain();
  EXPECT_EQ(orientation_jacobian(single, Eigen::VectorXd::Constant(1, 0.7), 0).col(0), Eigen::Vector3d::UnitZ());
  const KinematicChain chain = desk10_chain();
  const Eigen::MatrixXd J = orientation_jacobian(chain, Eigen::VectorXd::Zero(10), chain.tip_link());
  for (int j = 0; j < chain.dof(); ++j) EXPECT_EQ(Eigen::Vector3d(J.col(j)), chain.joints[j].axis);
}

TEST(OrientationJacobian, MatchesFiniteDifferencesOfLogMap) {
  const KinematicChain chain = desk10_chain();
  std::mt19937_64 rng(72);
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd q = random_q(rng, chain);
    const int link = chain.tip_link() - trial % 4;
    const Eigen::MatrixXd J = orientation_jacobian(chain, q, link);
    for (int j = 0; j < chain.dof(); ++j) {
      Eigen::VectorXd qp = q, qm = q;
      qp(j) += h;
      qm(j) -= h;
      const Eigen::Matrix3d Rp = fk_oracle(chain, qp)[link].topLeftCorner<3, 3>();
      const Eigen::Matrix3d Rm = fk_oracle(chain, qm)[link].topLeftCorner<3, 3>();
      const Eigen::Vector3d fd = rotation_log(Rp * Rm.transpose()) / (2 * h);
      EXPECT_LE((J.col(j) - fd).cwiseAbs().maxCoeff(), 1e-6);
    }
  }
}

TEST(RotationLog, RoundTrip) {
  std::mt19937_64 rng(73);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::Vector3d w(n(rng), n(rng), n(rng));
    w *= std::min(1.0, 3.0 / w.norm());
    const Eigen::Matrix3d R = Eigen::AngleAxisd(w.norm(), w.normalized()).toRotationMatrix();
    EXPECT_LE((rotation_log(R) - w).norm(), 1e-12);
  }
  EXPECT_EQ(rotation_log(Eigen::Matrix3d::Identity()).norm(), 0.0);
}

TEST(MinDistance, Examples) {
  const KinematicChain single = single_joint_chain();
  const ChainFrames f = forward_kinematics(single, Eigen::VectorXd::Zero(1));
  const DistanceResult far = min_distance(single, f, {0}, Eigen::Vector3d(11, 0, 0), 0.05);
  EXPECT_NEAR(far.d_min, 10.0 - 0.05, 1e-15);
  EXPECT_TRUE(far.gradient.allFinite());
  const DistanceResult touch = min_distance(single, f, {0}, Eigen::Vector3d(1, 0.05, 0), 0.05);
  EXPECT_NEAR(touch.d_min, 0.0, 1e-15);
  EXPECT_EQ(touch.link, 0);
  EXPECT_EQ(touch.point, 0);
  // Sphere beside the point on the rotation direction: moving the joint closes the gap.
  EXPECT_NEAR(touch.gradient(0), -1.0, 1e-15);

  const KinematicChain chain = desk10_chain();
  const DistanceResult arm = min_distance(chain, forward_kinematics(chain, case_q0()), chain.arm_links,
                                          Eigen::Vector3d(10, 0, 0), 0.05);
  EXPECT_GT(arm.d_min, 9.0);
  EXPECT_LT(arm.d_min, 10.0);
  EXPECT_GT(arm.gradient.norm(), 0.0);
}

TEST(MinDistance, TiesGoToLowestLink) {
  KinematicChain c;
  Joint a, b;
  a.points = {Eigen::Vector3d(1, 0, 0)};
  b.points = {Eigen::Vector3d(1, 0, 0)};
  c.joints = {a, b};
  const ChainFrames f = forward_kinematics(c, Eigen::VectorXd::Zero(2));
  EXPECT_EQ(min_distance(c, f, {1, 0}, Eigen::Vector3d(3, 0, 0), 0.5).link, 0);
}

TEST(MinDistance, GradientMatchesFiniteDifferences) {
  const KinematicChain chain = desk10_chain();
  std::mt19937_64 rng(74);
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd q = random_q(rng, chain);
    const Eigen::Vector3d center(0.4, 0.3, 0.3);
    const DistanceResult d = min_distance(chain, forward_kinematics(chain, q), chain.arm_links, center, 0.05);
    // Fixed witness point: differentiate its own distance.
    const Eigen::Vector3d local = chain.joints[d.link].points[d.point];
    for (int j = 0; j < chain.dof(); ++j) {
      Eigen::VectorXd qp = q, qm = q;
      qp(j) += h;
      qm(j) -= h;
      const double dp = (apply(fk_oracle(chain, qp)[d.link], local) - center).norm();
      const double dm = (apply(fk_oracle(chain, qm)[d.link], local) - center).norm();
      EXPECT_LE(std::abs(d.gradient(j) - (dp - dm) / (2 * h)), 1e-6);
    }
  }
}

TEST(MinDistance, DenseSamplingOracle) {
  // The shipped chain samples each arm link segment at spacing s; sampling the
  // same segments ten times denser can only lower d_min, by at most s / 2.
  const KinematicChain chain = desk10_chain();
  struct Segment { int link; double from, to, spacing; };
  const std::vector<Segment> segments = {{5, -0.05, -0.3, 0.05}, {7, -0.04, -0.28, 0.04}, {9, -0.05, -0.1, 0.05}};
  std::mt19937_64 rng(75);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd q = random_q(rng, chain);
    const Eigen::Vector3d center(u(rng), u(rng), 0.3 + u(rng));
    const double radius = 0.05;
    const DistanceResult d =
        min_distance(chain, forward_kinematics(chain, q), chain.arm_links, center, radius);
    const auto frames = fk_oracle(chain, q);
    double dense = std::numeric_limits<double>::infinity();
    double coarse_step = 0.0;
    for (const auto& s : segments) {
      const int count = static_cast<int>(std::round((s.from - s.to) / s.spacing)) * 10;
      for (int k = 0; k <= count; ++k) {
        const Eigen::Vector3d local(0, 0, s.from + (s.to - s.from) * k / count);
        dense = std::min(dense, (apply(frames[s.link], local) - center).norm() - radius);
      }
      coarse_step = std::max(coarse_step, s.spacing);
    }
    EXPECT_LE(dense, d.d_min + 1e-12);
    EXPECT_LE(d.d_min - dense, coarse_step / 2 + 1e-12);
  }
}

TEST(MinDistance, ContinuousAlongJointLines) {
  const KinematicChain chain = desk10_chain();
  std::mt19937_64 rng(76);
  const Eigen::Vector3d center(0.3, 0.3, 0.2);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd a = random_q(rng, chain);
    const Eigen::VectorXd b = random_q(rng, chain);
    const int steps = static_cast<int>(std::ceil((b - a).cwiseAbs().maxCoeff() / 1e-3));
    DistanceResult prev = min_distance(chain, forward_kinematics(chain, a), chain.arm_links, center, 0.05);
    for (int k = 1; k <= steps; ++k) {
      const Eigen::VectorXd q = a + (b - a) * (static_cast<double>(k) / steps);
      const DistanceResult cur = min_distance(chain, forward_kinematics(chain, q), chain.arm_links, center, 0.05);
      // A 1 mrad joint step moves any arm point by less than reach * |dq|_1.
      EXPECT_LE(std::abs(cur.d_min - prev.d_min), 1.5 * (b - a).lpNorm<1>() / steps);
      prev = cur;
    }
  }
}

TEST(AvoidanceActivation, Profile) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(avoidance_activation(0.03, 0.05, 0.12), 1.0);
  EXPECT_EQ(avoidance_activation(0.05, 0.05, 0.12), 1.0);
  EXPECT_EQ(avoidance_activation(0.12, 0.05, 0.12), 0.0);
  EXPECT_EQ(avoidance_activation(0.5, 0.05, 0.12), 0.0);
  EXPECT_EQ(avoidance_activation(5.0, 0.05, inf), 1.0);
  EXPECT_NEAR(avoidance_activation(0.085, 0.05, 0.12), 0.5, 1e-12);
  double prev = 1.0;
  for (double d = 0.05; d <= 0.12; d += 1e-4) {
    const double h = avoidance_activation(d, 0.05, 0.12);
    EXPECT_LE(h, prev);
    EXPECT_LE(prev - h, 1.5 * 1e-4 / 0.07 + 1e-12);
    prev = h;
  }
}

TEST(TaskBinding, Checks) {
  const KinematicChain chain = desk10_chain();
  TaskBinding b;
  b.kind = TaskKind::arm_avoidance;
  b.activation_distance = 0.12;
  EXPECT_NO_THROW(b.check(chain));
  b.activation_distance = 0.05;
  EXPECT_THROW(b.check(chain), ConfigError);
  b.activation_distance = 0.12;
  b.gain = 0.0;
  EXPECT_THROW(b.check(chain), ConfigError);
  TaskBinding posture;
  posture.kind = TaskKind::joint_posture;
  posture.joints = {0, 11};
  posture.joint_targets = Eigen::Vector2d::Zero();
  EXPECT_THROW(posture.check(chain), ConfigError);
  EXPECT_EQ(task_kind_from_string("arm_avoidance"), TaskKind::arm_avoidance);
  EXPECT_THROW(task_kind_from_string("juggling"), ConfigError);
}

TEST(MakeTasks, GainTimesError) {
  const KinematicChain chain = desk10_chain();
  RobotState s{case_q0(), Eigen::VectorXd::Zero(10), 0.0};
  Obstacle far{0.05, {{0.0, Eigen::Vector3d(10, 0, 0)}}};
  const ChainFrames f = forward_kinematics(chain, s.q);
  TaskBinding pos;
  pos.id = 3;
  pos.kind = TaskKind::hand_position;
  pos.gain = 2.0;
  pos.target_position = f.tip.translation() + Eigen::Vector3d(0.1, 0, 0);
  const std::vector<TaskBinding> bindings{pos};
  const SceneEval scene = evaluate_scene(chain, s, far, bindings);
  EXPECT_NEAR(scene.position_error, 0.1, 1e-15);
  const GeneratedProblem g = make_tasks(chain, s, scene, bindings, {}, 0.004);
  ASSERT_EQ(g.tasks.size(), 1u);
  EXPECT_LE((g.tasks[0].b - Eigen::Vector3d(0.2, 0, 0)).norm(), 1e-15);
  EXPECT_EQ(g.tasks[0].A, point_jacobian(chain, s.q, chain.tip_link(), chain.tip.translation()));
}

TEST(MakeTasks, AvoidanceTarget) {
  const KinematicChain single = single_joint_chain();
  RobotState s{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), 0.0};
  Obstacle obs{0.05, {{0.0, Eigen::Vector3d(1, 0.08, 0)}}};
  TaskBinding arm;
  arm.id = 4;
  arm.kind = TaskKind::arm_avoidance;
  arm.gain = 2.0;
  arm.d_safe = 0.05;
  arm.activation_distance = 0.12;
  const SceneEval scene = evaluate_scene(single, s, obs, {arm});
  ASSERT_NEAR(scene.arm.d_min, 0.03, 1e-15);
  const GeneratedProblem g = make_tasks(single, s, scene, {arm}, {}, 0.004);
  EXPECT_NEAR(g.tasks[0].b(0), 0.04, 1e-15);
  // Escape direction: positive b along A moves away, here by turning clockwise.
  EXPECT_NEAR(g.tasks[0].A(0, 0), -1.0, 1e-15);

  // Beyond the activation distance the row is zero.
  Obstacle away{0.05, {{0.0, Eigen::Vector3d(1, 0.3, 0)}}};
  const GeneratedProblem g2 = make_tasks(single, s, evaluate_scene(single, s, away, {arm}), {arm}, {}, 0.004);
  EXPECT_EQ(g2.tasks[0].A.norm(), 0.0);
  EXPECT_EQ(g2.tasks[0].b(0), 0.0);
}

TEST(MakeTasks, EquilibriumGivesZeroCommand) {
  const KinematicChain chain = desk10_chain();
  RobotState s{case_q0(), Eigen::VectorXd::Zero(10), 0.0};
  const ChainFrames f = forward_kinematics(chain, s.q);
  Obstacle far{0.05, {{0.0, Eigen::Vector3d(10, 0, 0)}}};
  std::vector<TaskBinding> bindings(4);
  bindings[0].kind = TaskKind::torso_avoidance;
  bindings[0].d_safe = 0.1;
  bindings[0].activation_distance = 0.25;
  bindings[1].kind = TaskKind::hand_orientation;
  bindings[1].target_rotation = f.tip.linear();
  bindings[2].kind = TaskKind::hand_position;
  bindings[2].target_position = f.tip.translation();
  bindings[3].kind = TaskKind::arm_avoidance;
  bindings[3].activation_distance = 0.12;
  for (int k = 0; k < 4; ++k) bindings[k].id = k + 1;
  const std::vector<ConstraintBinding> cons{{1, ConstraintKind::joint_velocity, 1},
                                            {2, ConstraintKind::joint_position, 1}};
  const SceneEval scene = evaluate_scene(chain, s, far, bindings);
  const GeneratedProblem g = make_tasks(chain, s, scene, bindings, cons, 0.004);
  for (const auto& t : g.tasks) EXPECT_LE(t.b.norm(), 1e-15);
  const TaskLibrary lib(10, g.tasks, g.constraints);
  const PriorityMatrix psi{{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 1, 1, 0}, {1, 1, 1, 1}};
  EXPECT_LE(solve_hierarchy(psi, lib).x.norm(), 1e-6);
}

TEST(MakeTasks, ConstraintBounds) {
  const KinematicChain chain = desk10_chain();
  Eigen::VectorXd q = case_q0();
  q(6) = -0.001;  // elbow 1 mrad under its upper limit
  RobotState s{q, Eigen::VectorXd::Zero(10), 0.0};
  Obstacle far{0.05, {{0.0, Eigen::Vector3d(10, 0, 0)}}};
  const std::vector<ConstraintBinding> cons{{1, ConstraintKind::joint_velocity, 1},
                                            {2, ConstraintKind::joint_position, 2}};
  const GeneratedProblem g = make_tasks(chain, s, evaluate_scene(chain, s, far, {}), {}, cons, 0.004);
  ASSERT_EQ(g.constraints.size(), 2u);
  EXPECT_EQ(g.constraints[0].upper, Eigen::VectorXd::Constant(10, 2.0));
  EXPECT_EQ(g.constraints[1].level, 2);
  EXPECT_NEAR(g.constraints[1].upper(6), 0.25, 1e-12);
  EXPECT_NEAR(g.constraints[1].lower(3), (-3.0 + 0.8) / 0.004, 1e-9);
}

TEST(Step, Examples) {
  const KinematicChain chain = desk10_chain();
  RobotState s{case_q0(), Eigen::VectorXd::Zero(10), 1.0};
  const StepResult still = step(chain, s, Eigen::VectorXd::Zero(10), 0.01);
  EXPECT_EQ(still.state.q, s.q);
  EXPECT_DOUBLE_EQ(still.state.t, 1.01);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(10);
  x(0) = 1.0;
  const StepResult moved = step(chain, s, x, 0.01);
  EXPECT_DOUBLE_EQ(moved.state.q(0), s.q(0) + 0.01);
  EXPECT_EQ(moved.state.qdot, x);
  EXPECT_EQ(moved.velocity_excess, 0.0);
  x(2) = -2.5;
  EXPECT_DOUBLE_EQ(step(chain, s, x, 0.01).velocity_excess, 0.5);
  EXPECT_THROW(step(chain, s, x, 0.0), DimensionError);
  EXPECT_THROW(step(chain, s, Eigen::VectorXd::Zero(3), 0.01), DimensionError);
}

TEST(ClosedLoop, HandPositionConverges) {
  const KinematicChain chain = desk10_chain();
  const double dt = 0.004;
  RobotState s{case_q0(), Eigen::VectorXd::Zero(10), 0.0};
  TaskBinding pos;
  pos.id = 1;
  pos.kind = TaskKind::hand_position;
  pos.gain = 2.0;
  pos.target_position = forward_kinematics(chain, s.q).tip.translation() + Eigen::Vector3d(0.1, -0.1, 0.05);
  const std::vector<TaskBinding> bindings{pos};
  const std::vector<ConstraintBinding> cons{{1, ConstraintKind::joint_velocity, 1},
                                            {2, ConstraintKind::joint_position, 1}};
  Obstacle far{0.05, {{0.0, Eigen::Vector3d(10, 0, 0)}}};
  const SolverConfig cfg;
  double prev_error = std::numeric_limits<double>::infinity();
  for (int k = 0; k < static_cast<int>(5.0 / dt); ++k) {
    const SceneEval scene = evaluate_scene(chain, s, far, bindings);
    if (k > 10) EXPECT_LE(scene.position_error, prev_error + 1e-12);
    prev_error = scene.position_error;
    const GeneratedProblem g = make_tasks(chain, s, scene, bindings, cons, dt);
    const TaskLibrary lib(10, g.tasks, g.constraints);
    const HierarchySolution sol = solve_strict_hierarchy(PriorityMatrix{{1}}, lib, cfg);
    const StepResult r = step(chain, s, sol.x, dt);
    EXPECT_LE(r.velocity_excess, cfg.qp_tolerance);
    for (int j = 0; j < 10; ++j) {
      EXPECT_GE(r.state.q(j), chain.joints[j].q_min - cfg.qp_tolerance * dt);
      EXPECT_LE(r.state.q(j), chain.joints[j].q_max + cfg.qp_tolerance * dt);
    }
    s = r.state;
  }
  EXPECT_LE(evaluate_scene(chain, s, far, bindings).position_error, 1e-4);
}

TEST(Obstacle, PiecewiseLinearPath) {
  Obstacle o{0.05, {{0.0, Eigen::Vector3d(0, 0, 0)}, {2.0, Eigen::Vector3d(2, 0, 0)}, {4.0, Eigen::Vector3d(2, 2, 0)}}};
  EXPECT_NO_THROW(o.check());
  EXPECT_EQ(o.center(-1.0), Eigen::Vector3d::Zero());
  EXPECT_EQ(o.center(1.0), Eigen::Vector3d(1, 0, 0));
  EXPECT_EQ(o.center(3.0), Eigen::Vector3d(2, 1, 0));
  EXPECT_EQ(o.center(9.0), Eigen::Vector3d(2, 2, 0));
  Obstacle bad = o;
  bad.radius = 0.0;
  EXPECT_THROW(bad.check(), ConfigError);
  bad = o;
  std::swap(bad.waypoints[0], bad.waypoints[1]);
  EXPECT_THROW(bad.check(), ConfigError);
}
