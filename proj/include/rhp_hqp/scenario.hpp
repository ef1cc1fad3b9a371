#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rhp_hqp/hqp_solver.hpp"
#include "rhp_hqp/kinematics.hpp"
#include "rhp_hqp/robot_sim.hpp"
#include "rhp_hqp/run_log.hpp"
#include "rhp_hqp/transition.hpp"

namespace rhp_hqp {

inline constexpr int kScenarioSchemaVersion = 1;

enum class RunMode { rhp_hqp, strict_hqp_baseline };

std::string_view to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& name);

enum class EventPredicate { elbow_extension_above, time_after, d_min_below };

/// Emits `tag` on every cycle where the predicate holds.
struct EventRule {
  std::string tag;
  EventPredicate when = EventPredicate::time_after;
  double threshold = 0.0;
  int target = 0;  // candidate index that becomes nominal
};

struct Scenario {
  std::string name;
  double duration = 0.0;  // s
  double dt = 0.004;      // s
  std::uint64_t seed = 0;
  RunMode mode = RunMode::rhp_hqp;

  KinematicChain chain;
  Eigen::VectorXd q0;
  Obstacle obstacle;
  std::vector<TaskBinding> tasks;
  std::vector<ConstraintBinding> constraints;

  CandidateSet hierarchy;
  int nominal = 0;
  int avoidance = 0;
  BlendPolicy policy;
  std::vector<EventRule> events;
  SolverConfig solver;

  int cycles() const;
  /// Throws ConfigError describing the first inconsistency.
  void check() const;
};

/// Reads a YAML scenario file (see README for the schema).
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& yaml_text, const std::string& name = "scenario");

struct RunResult {
  RunLog log;
  RunSummary summary;
};

/// Closed loop: schedule -> tasks -> hierarchy solve -> integrate, once per cycle.
/// Solver failures are rethrown as SolverError naming the cycle.
RunResult run_scenario(const Scenario& scenario);

}  // namespace rhp_hqp
