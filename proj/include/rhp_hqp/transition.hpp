#pragma once

#include <map>
#include <string_view>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rhp_hqp/task_model.hpp"

namespace rhp_hqp {

struct CandidateSet {
  std::vector<PriorityMatrix> candidates;
  std::vector<std::string> labels;

  int size() const { return static_cast<int>(candidates.size()); }
  int index_of(const std::string& label) const;
  /// Throws ConfigError unless all candidates share a shape and validate.
  void check() const;
};

enum class Ramp { linear, smoothstep };

struct BlendPolicy {
  double d_low = 0.05;   // m, at or below: avoidance candidate only
  double d_high = 0.2;   // m, at or above: nominal candidate only
  Ramp ramp = Ramp::linear;
  double rate_limit = 0.01;  // max priority change per control cycle
  /// Event tag -> candidate that becomes the nominal target.
  std::map<std::string, int> event_targets;

  void check() const;
};

enum class ScheduleMode { nominal, transitioning, avoidance };

std::string_view to_string(ScheduleMode mode);

struct ScheduleState {
  Eigen::VectorXd p;        // proportions over the candidates
  int nominal = 0;          // candidate followed while the obstacle is far
  int avoidance = 0;        // candidate followed while the obstacle is near
  int target_candidate = 0; // dominant candidate of the current goal
  ScheduleMode mode = ScheduleMode::nominal;

  static ScheduleState at(int candidates, int nominal, int avoidance);
};

/// Weight of the nominal candidate: 0 at or below d_low, 1 at or above d_high.
double proportion_from_distance(double d_min, const BlendPolicy& policy);

/// Convex combination sum_k p_k Psi_k.
PriorityMatrix blend(const CandidateSet& set, const Eigen::VectorXd& p);

/// Events tags always accepted in addition to the policy's event targets.
inline constexpr const char* kObstacleNearEvent = "obstacle_near";
inline constexpr const char* kObstacleClearEvent = "obstacle_clear";

/// Applies the events, sets the goal proportions
///   p* = s e_nominal + (1 - s) e_avoidance,   s = proportion_from_distance(d_min),
/// and moves p along the segment towards p* so that half the L1 change is at
/// most rate_limit. That bounds every entry change of the blended matrix by
/// rate_limit.
ScheduleState step_schedule(const ScheduleState& state, double d_min,
                            const std::vector<std::string>& events, const BlendPolicy& policy);

}  // namespace rhp_hqp
