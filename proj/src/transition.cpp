#include "rhp_hqp/transition.hpp"

#include <algorithm>
#include <cmath>

#include "rhp_hqp/error.hpp"

namespace rhp_hqp {

int CandidateSet::index_of(const std::string& label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw ConfigError("unknown candidate hierarchy '" + label + "'");
  return static_cast<int>(it - labels.begin());
}

void CandidateSet::check() const {
  if (candidates.empty()) throw ConfigError("at least one candidate hierarchy is required");
  if (labels.size() != candidates.size()) throw ConfigError("one label per candidate required");
  for (size_t k = 0; k < candidates.size(); ++k) {
    const auto& c = candidates[k];
    if (c.levels() != candidates.front().levels() || c.tasks() != candidates.front().tasks()) {
      throw ConfigError("candidate '" + labels[k] + "' differs in shape from the first");
    }
    if (auto v = validate_priority_matrix(c)) {
      throw ConfigError("candidate '" + labels[k] + "' violates the " +
                        (v->rule == PriorityRule::range ? "range" : "monotonicity") +
                        " rule at level " + std::to_string(v->level) + ", task column " +
                        std::to_string(v->task));
    }
  }
}

void BlendPolicy::check() const {
  if (!(d_low > 0.0 && d_low < d_high)) throw ConfigError("blend policy needs 0 < d_low < d_high");
  if (!(rate_limit > 0.0)) throw ConfigError("blend policy needs rate_limit > 0");
}

std::string_view to_string(ScheduleMode mode) {
  switch (mode) {
    case ScheduleMode::nominal: return "nominal";
    case ScheduleMode::transitioning: return "transitioning";
    case ScheduleMode::avoidance: return "avoidance";
  }
  return "unknown";
}

ScheduleState ScheduleState::at(int candidates, int nominal, int avoidance) {
  ScheduleState s;
  s.p = Eigen::VectorXd::Zero(candidates);
  s.p(nominal) = 1.0;
  s.nominal = nominal;
  s.avoidance = avoidance;
  s.target_candidate = nominal;
  s.mode = ScheduleMode::nominal;
  return s;
}

double proportion_from_distance(double d_min, const BlendPolicy& policy) {
  if (d_min >= policy.d_high) return 1.0;
  if (d_min <= policy.d_low) return 0.0;
  const double t = (d_min - policy.d_low) / (policy.d_high - policy.d_low);
  return policy.ramp == Ramp::smoothstep ? t * t * (3.0 - 2.0 * t) : t;
}

PriorityMatrix blend(const CandidateSet& set, const Eigen::VectorXd& p) {
  if (p.size() != set.size()) throw DimensionError("blend: one proportion per candidate");
  if ((p.array() < 0.0).any() || std::abs(p.sum() - 1.0) > 1e-9) {
    throw DimensionError("blend: proportions must be non-negative and sum to 1");
  }
  // Exact vertices stay bitwise equal to the candidate.
  for (int k = 0; k < p.size(); ++k) {
    if (p(k) == 1.0) return set.candidates[static_cast<size_t>(k)];
  }
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(set.candidates.front().levels(),
                                                 set.candidates.front().tasks());
  for (int k = 0; k < p.size(); ++k) {
    if (p(k) != 0.0) values += p(k) * set.candidates[static_cast<size_t>(k)].values();
  }
  return PriorityMatrix(values.cwiseMax(0.0).cwiseMin(1.0));
}

ScheduleState step_schedule(const ScheduleState& state, double d_min,
                            const std::vector<std::string>& events, const BlendPolicy& policy) {
  ScheduleState next = state;
  const auto n = state.p.size();
  for (const auto& tag : events) {
    if (tag == kObstacleNearEvent || tag == kObstacleClearEvent) continue;
    const auto it = policy.event_targets.find(tag);
    if (it == policy.event_targets.end()) throw ConfigError("unknown schedule event '" + tag + "'");
    if (it->second < 0 || it->second >= n) throw ConfigError("event '" + tag + "' targets no candidate");
    next.nominal = it->second;
  }

  const double s = proportion_from_distance(d_min, policy);
  Eigen::VectorXd goal = Eigen::VectorXd::Zero(n);
  goal(next.nominal) += s;
  goal(next.avoidance) += 1.0 - s;
  next.target_candidate = s >= 0.5 ? next.nominal : next.avoidance;

  const Eigen::VectorXd delta = goal - state.p;
  const double change = 0.5 * delta.lpNorm<1>();
  if (change <= policy.rate_limit) {
    next.p = goal;
  } else {
    next.p = state.p + (policy.rate_limit / change) * delta;
    next.p = next.p.cwiseMax(0.0);
    next.p /= next.p.sum();
  }

  if (next.p(next.nominal) == 1.0) {
    next.mode = ScheduleMode::nominal;
  } else if (next.p(next.avoidance) == 1.0) {
    next.mode = ScheduleMode::avoidance;
  } else {
    next.mode = ScheduleMode::transitioning;
  }
  return next;
}

}  // namespace rhp_hqp
