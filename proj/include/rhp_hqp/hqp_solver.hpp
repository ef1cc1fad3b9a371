#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rhp_hqp/projection.hpp"
#include "rhp_hqp/qp_solver.hpp"
#include "rhp_hqp/task_model.hpp"

namespace rhp_hqp {

struct SolverConfig {
  double regularization = 1e-8;  // epsilon * |u|^2 added to every level
  double qp_tolerance = 1e-8;    // KKT residual bound accepted per level
  int max_qp_iterations = 500;
  double rank_tol = kDefaultRankTolerance;
};

/// Constraint of an upper level with its slack frozen at that level's optimum.
struct FrozenConstraint {
  const Constraint* constraint = nullptr;
  Eigen::VectorXd slack;
};

/// Data of a single level QP.
struct LevelProblem {
  Eigen::MatrixXd A;         // sorted stacked task rows
  Eigen::VectorXd b_hat;     // shifted target
  Eigen::MatrixXd W_hat;     // occupation-scaled weight
  Eigen::MatrixXd P_prev;
  Eigen::VectorXd x_prev;
  std::vector<const Constraint*> new_constraints;  // get slack variables here
  std::vector<FrozenConstraint> frozen;
};

/// b_hat = Lambda b + (I - Lambda) A x_prev, with `lambda` the full per-row
/// occupation of the stacked task rows.
Eigen::VectorXd shifted_target(const Eigen::VectorXd& lambda, const Eigen::VectorXd& b,
                               const Eigen::MatrixXd& A, const Eigen::VectorXd& x_prev);

/// Variables z = (u, v). H = blkdiag((AP)^T W_hat (AP) + eps I, I) and g the
/// matching linear term; rows for new constraints carry the slack, rows of
/// frozen constraints are shifted by their stored slack.
QPProblem build_level_qp(const LevelProblem& level, const SolverConfig& config);

inline Eigen::VectorXd accumulate(const Eigen::VectorXd& x_prev, const Eigen::MatrixXd& P_prev,
                                  const Eigen::VectorXd& u_star) {
  return x_prev + P_prev * u_star;
}

struct LevelSolution {
  int level = 0;
  Eigen::VectorXd u_star;
  Eigen::VectorXd v_star;
  Eigen::VectorXd x_star;
  Eigen::MatrixXd P;            // projection after this level
  std::vector<int> tasks;       // task columns solved here, in sorted order
  std::vector<int> retained;    // retained stacked rows
  std::vector<ActiveBound> active;
  std::vector<double> task_residuals;  // |A x* - b| per entry of `tasks`
  QPStatus status = QPStatus::optimal;
  int qp_iterations = 0;
  double kkt = 0.0;
  double seconds = 0.0;
};

struct HierarchySolution {
  Eigen::VectorXd x;
  std::vector<LevelSolution> levels;

  double total_seconds() const;
  int total_iterations() const;
};

/// Recursive hierarchical projection HQP: for each level, build the
/// projection, solve the level QP and accumulate.
HierarchySolution solve_hierarchy(const PriorityMatrix& psi, const TaskLibrary& library,
                                  const SolverConfig& config = {});

/// Strict-hierarchy reference: identical level QPs, but each level is solved in
/// the SVD null space of every task row already placed above it. Needs a
/// binary priority matrix.
HierarchySolution solve_strict_hierarchy(const PriorityMatrix& psi, const TaskLibrary& library,
                                         const SolverConfig& config = {});

}  // namespace rhp_hqp
