#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace rhp_hqp {

struct Joint {
  std::string name;
  Eigen::Isometry3d offset = Eigen::Isometry3d::Identity();  // from parent link frame
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();           // in the joint frame, unit norm
  double q_min = -M_PI;
  double q_max = M_PI;
  double qd_max = 2.0;                                       // rad/s
  std::vector<Eigen::Vector3d> points;                       // collision points on this link
};

/// Open serial chain of revolute joints. Link k is the body moved by joint k.
struct KinematicChain {
  std::vector<Joint> joints;
  Eigen::Isometry3d tip = Eigen::Isometry3d::Identity();  // hand frame on the last link
  std::vector<int> torso_links;
  std::vector<int> arm_links;
  int shoulder_link = 0;
  int wrist_link = 0;

  int dof() const { return static_cast<int>(joints.size()); }
  int tip_link() const { return dof() - 1; }
  /// Throws ConfigError on a non-unit axis or bad link indices.
  void check() const;
};

/// 10-DOF desk-scale upper body: three waist joints then a seven-joint arm.
KinematicChain desk10_chain();

struct ChainFrames {
  std::vector<Eigen::Isometry3d> links;  // world pose of every link frame
  Eigen::Isometry3d tip;
};

ChainFrames forward_kinematics(const KinematicChain& chain, const Eigen::VectorXd& q);

/// 3 x n linear Jacobian of `point` (link coordinates) on `link`.
Eigen::MatrixXd point_jacobian(const KinematicChain& chain, const ChainFrames& frames, int link,
                               const Eigen::Vector3d& point);
Eigen::MatrixXd point_jacobian(const KinematicChain& chain, const Eigen::VectorXd& q, int link,
                               const Eigen::Vector3d& point);

/// 3 x n angular Jacobian of `link`: world joint axes up to it, zero after.
Eigen::MatrixXd orientation_jacobian(const KinematicChain& chain, const ChainFrames& frames,
                                     int link);
Eigen::MatrixXd orientation_jacobian(const KinematicChain& chain, const Eigen::VectorXd& q,
                                     int link);

/// Rotation vector of R (axis times angle, angle in [0, pi]).
Eigen::Vector3d rotation_log(const Eigen::Matrix3d& R);

/// Closest collision point of the given links to a sphere.
struct DistanceResult {
  double d_min = 0.0;          // m, negative when penetrating
  int link = -1;
  int point = -1;              // index into chain.joints[link].points
  Eigen::Vector3d witness = Eigen::Vector3d::Zero();
  Eigen::RowVectorXd gradient; // d d_min / dq
};

DistanceResult min_distance(const KinematicChain& chain, const ChainFrames& frames,
                            const std::vector<int>& links, const Eigen::Vector3d& center,
                            double radius);

/// |wrist - shoulder| divided by the fully stretched length at rest.
double elbow_extension(const KinematicChain& chain, const ChainFrames& frames);

}  // namespace rhp_hqp
