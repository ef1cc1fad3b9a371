#include "rhp_hqp/kinematics.hpp"

#include <cmath>
#include <limits>

#include "rhp_hqp/error.hpp"

namespace rhp_hqp {

namespace {

Eigen::Isometry3d translation(double x, double y, double z) {
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  T.translation() = Eigen::Vector3d(x, y, z);
  return T;
}

std::vector<Eigen::Vector3d> points_along_z(double from, double to, double step) {
  std::vector<Eigen::Vector3d> pts;
  const int count = static_cast<int>(std::round(std::abs(to - from) / step));
  const double dir = to >= from ? 1.0 : -1.0;
  for (int k = 0; k <= count; ++k) pts.emplace_back(0.0, 0.0, from + dir * step * k);
  return pts;
}

Joint make_joint(std::string name, Eigen::Isometry3d offset, Eigen::Vector3d axis, double q_min,
                 double q_max) {
  Joint j;
  j.name = std::move(name);
  j.offset = offset;
  j.axis = axis;
  j.q_min = q_min;
  j.q_max = q_max;
  j.qd_max = 2.0;
  return j;
}

}  // namespace

void KinematicChain::check() const {
  if (joints.empty()) throw ConfigError("kinematic chain has no joints");
  for (const auto& j : joints) {
    if (std::abs(j.axis.norm() - 1.0) > 1e-12) {
      throw ConfigError("joint '" + j.name + "' axis is not unit norm");
    }
    if (!(j.q_min < j.q_max)) throw ConfigError("joint '" + j.name + "' has empty limits");
    if (!(j.qd_max > 0.0)) throw ConfigError("joint '" + j.name + "' needs qd_max > 0");
  }
  auto check_link = [&](int link, const char* what) {
    if (link < 0 || link >= dof()) throw ConfigError(std::string(what) + " link out of range");
  };
  for (int l : torso_links) check_link(l, "torso");
  for (int l : arm_links) check_link(l, "arm");
  check_link(shoulder_link, "shoulder");
  check_link(wrist_link, "wrist");
}

KinematicChain desk10_chain() {
  using V = Eigen::Vector3d;
  KinematicChain c;
  c.joints.push_back(make_joint("waist_yaw", translation(0, 0, 0), V::UnitZ(), -1.2, 1.2));
  c.joints.push_back(make_joint("waist_pitch", translation(0, 0, 0.05), V::UnitY(), -0.6, 1.0));
  c.joints.push_back(make_joint("waist_roll", translation(0, 0, 0.05), V::UnitX(), -0.6, 0.6));
  c.joints.push_back(make_joint("shoulder_pitch", translation(0, 0.2, 0.45), V::UnitY(), -3.0, 1.5));
  c.joints.push_back(make_joint("shoulder_roll", translation(0, 0, 0), V::UnitX(), -0.5, 2.5));
  c.joints.push_back(make_joint("shoulder_yaw", translation(0, 0, 0), V::UnitZ(), -2.5, 2.5));
  c.joints.push_back(make_joint("elbow", translation(0, 0, -0.3), V::UnitY(), -2.6, 0.0));
  c.joints.push_back(make_joint("forearm_yaw", translation(0, 0, 0), V::UnitZ(), -2.5, 2.5));
  c.joints.push_back(make_joint("wrist_pitch", translation(0, 0, -0.28), V::UnitY(), -1.6, 1.6));
  c.joints.push_back(make_joint("wrist_roll", translation(0, 0, 0), V::UnitX(), -1.6, 1.6));
  c.tip = translation(0, 0, -0.1);

  // Torso column and shoulder bar ride on the last waist link.
  c.joints[2].points = points_along_z(0.05, 0.45, 0.05);
  for (double y = 0.05; y < 0.2; y += 0.05) c.joints[2].points.emplace_back(0.0, y, 0.4);
  c.joints[5].points = points_along_z(-0.05, -0.3, 0.05);   // upper arm
  c.joints[7].points = points_along_z(-0.04, -0.28, 0.04);  // forearm
  c.joints[9].points = points_along_z(-0.05, -0.1, 0.05);   // hand
  c.torso_links = {2};
  c.arm_links = {5, 7, 9};
  c.shoulder_link = 3;
  c.wrist_link = 8;
  return c;
}

ChainFrames forward_kinematics(const KinematicChain& chain, const Eigen::VectorXd& q) {
  if (q.size() != chain.dof()) throw DimensionError("forward_kinematics: q has wrong size");
  ChainFrames f;
  f.links.reserve(chain.joints.size());
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  for (int k = 0; k < chain.dof(); ++k) {
    const Joint& j = chain.joints[static_cast<size_t>(k)];
    T = T * j.offset * Eigen::AngleAxisd(q(k), j.axis);
    f.links.push_back(T);
  }
  f.tip = T * chain.tip;
  return f;
}

Eigen::MatrixXd point_jacobian(const KinematicChain& chain, const ChainFrames& frames, int link,
                               const Eigen::Vector3d& point) {
  if (link < 0 || link >= chain.dof()) throw DimensionError("point_jacobian: bad link index");
  const Eigen::Vector3d p = frames.links[static_cast<size_t>(link)] * point;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, chain.dof());
  for (int k = 0; k <= link; ++k) {
    const auto& T = frames.links[static_cast<size_t>(k)];
    const Eigen::Vector3d axis = T.linear() * chain.joints[static_cast<size_t>(k)].axis;
    J.col(k) = axis.cross(p - T.translation());
  }
  return J;
}

Eigen::MatrixXd point_jacobian(const KinematicChain& chain, const Eigen::VectorXd& q, int link,
                               const Eigen::Vector3d& point) {
  return point_jacobian(chain, forward_kinematics(chain, q), link, point);
}

Eigen::MatrixXd orientation_jacobian(const KinematicChain& chain, const ChainFrames& frames,
                                     int link) {
  if (link < 0 || link >= chain.dof()) throw DimensionError("orientation_jacobian: bad link index");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, chain.dof());
  for (int k = 0; k <= link; ++k) {
    J.col(k) = frames.links[static_cast<size_t>(k)].linear() * chain.joints[static_cast<size_t>(k)].axis;
  }
  return J;
}

Eigen::MatrixXd orientation_jacobian(const KinematicChain& chain, const Eigen::VectorXd& q,
                                     int link) {
  return orientation_jacobian(chain, forward_kinematics(chain, q), link);
}

Eigen::Vector3d rotation_log(const Eigen::Matrix3d& R) {
  const Eigen::AngleAxisd aa(R);
  return aa.angle() * aa.axis();
}

DistanceResult min_distance(const KinematicChain& chain, const ChainFrames& frames,
                            const std::vector<int>& links, const Eigen::Vector3d& center,
                            double radius) {
  DistanceResult best;
  best.d_min = std::numeric_limits<double>::infinity();
  for (int link : links) {
    const auto& pts = chain.joints[static_cast<size_t>(link)].points;
    for (size_t k = 0; k < pts.size(); ++k) {
      const Eigen::Vector3d p = frames.links[static_cast<size_t>(link)] * pts[k];
      const double d = (p - center).norm() - radius;
      if (d < best.d_min || (d == best.d_min && link < best.link)) {
        best.d_min = d;
        best.link = link;
        best.point = static_cast<int>(k);
        best.witness = p;
      }
    }
  }
  best.gradient = Eigen::RowVectorXd::Zero(chain.dof());
  if (best.link < 0) return best;
  const Eigen::Vector3d diff = best.witness - center;
  const double norm = diff.norm();
  if (norm > 0.0) {
    const Eigen::MatrixXd J = point_jacobian(
        chain, frames, best.link, chain.joints[static_cast<size_t>(best.link)].points[static_cast<size_t>(best.point)]);
    best.gradient = (diff / norm).transpose() * J;
  }
  return best;
}

double elbow_extension(const KinematicChain& chain, const ChainFrames& frames) {
  double stretched = 0.0;
  for (int k = chain.shoulder_link + 1; k <= chain.wrist_link; ++k) {
    stretched += chain.joints[static_cast<size_t>(k)].offset.translation().norm();
  }
  if (stretched <= 0.0) return 0.0;
  const Eigen::Vector3d span = frames.links[static_cast<size_t>(chain.wrist_link)].translation() -
                               frames.links[static_cast<size_t>(chain.shoulder_link)].translation();
  return span.norm() / stretched;
}

}  // namespace rhp_hqp
