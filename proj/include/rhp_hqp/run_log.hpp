#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rhp_hqp {

/// One control cycle. q and qdot are the state the cycle started from.
struct CycleRecord {
  int cycle = 0;
  double t = 0.0;
  Eigen::VectorXd q;
  Eigen::VectorXd qdot;
  Eigen::VectorXd command;
  Eigen::VectorXd accel;         // finite difference of consecutive commands
  Eigen::MatrixXd psi;
  Eigen::VectorXd p;
  double d_min = 0.0;            // arm to obstacle surface
  double d_torso = 0.0;
  Eigen::Vector3d hand = Eigen::Vector3d::Zero();
  double position_error = 0.0;
  double orientation_error = 0.0;
  double extension = 0.0;
  int mode = 0;                  // ScheduleMode as integer
  Eigen::VectorXd task_residuals;
  double kkt = 0.0;
  double velocity_excess = 0.0;
  // Wall-clock data, kept apart from the deterministic columns.
  Eigen::VectorXd level_seconds;
  Eigen::VectorXi level_iterations;
  double solve_seconds = 0.0;
};

struct RunLog {
  std::string scenario;
  std::string mode;
  double dt = 0.0;
  int dof = 0;
  int levels = 0;
  int tasks = 0;
  int candidates = 0;
  std::vector<std::string> candidate_labels;
  std::vector<CycleRecord> records;
};

struct RunSummary {
  int cycles = 0;
  double max_orientation_error = 0.0;       // rad
  double max_position_error = 0.0;          // m
  double integrated_position_error = 0.0;   // m s, trapezoidal
  double min_d_min = 0.0;                   // m
  double min_d_torso = 0.0;                 // m
  double mean_solve_seconds = 0.0;
  double max_solve_seconds = 0.0;
  double mean_solve_seconds_transition = 0.0;
  double mean_solve_seconds_steady = 0.0;
  int transition_cycles = 0;
  double max_velocity_jump = 0.0;           // rad/s between consecutive commands
  double max_velocity_jump_transition = 0.0;
  double max_velocity_jump_steady = 0.0;
  double max_kkt = 0.0;
  double max_velocity_excess = 0.0;
  double final_position_error = 0.0;
  std::optional<double> obstacle_departure_time;  // s
  std::optional<double> recovery_time;            // s after departure until error < 1 mm
  std::vector<std::string> vertices_reached;      // candidate labels whose proportion hit 1
};

/// Recomputes every summary figure from the records.
RunSummary summarize(const RunLog& log, double d_high);

/// Deterministic per-cycle table: header names in column order.
std::vector<std::string> log_columns(const RunLog& log);
std::vector<std::string> timing_columns(const RunLog& log);

/// Writes log.csv, timing.csv, summary.json and plot_*.csv into `dir`.
void emit_outputs(const RunLog& log, const RunSummary& summary, const std::filesystem::path& dir);

/// Parses the files written by emit_outputs back into a log (timing data
/// included when timing.csv exists).
RunLog read_log(const std::filesystem::path& dir_or_csv);

struct DivergenceReport {
  int cycles = 0;
  std::vector<double> command_diff;  // per-cycle max |cmd_a - cmd_b|
  std::vector<double> q_diff;
  double max_command_diff = 0.0;
  double max_q_diff = 0.0;
  int first_exceeding = -1;          // cycle index, -1 if none
};

DivergenceReport compare_runs(const RunLog& a, const RunLog& b, double threshold);

}  // namespace rhp_hqp
