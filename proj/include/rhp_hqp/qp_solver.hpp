#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace rhp_hqp {

/// min 1/2 z^T H z + g^T z  s.t.  lo <= G z <= hi.
/// Infinite bounds are allowed; H must be symmetric positive definite.
struct QPProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::MatrixXd G;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  int variables() const { return static_cast<int>(H.rows()); }
  int constraints() const { return static_cast<int>(G.rows()); }
};

enum class QPStatus { optimal, max_iterations, infeasible };

std::string_view to_string(QPStatus status);

struct KktResiduals {
  double stationarity = 0.0;     // |H z + g - G^T lambda|_inf
  double primal = 0.0;           // largest bound violation
  double complementarity = 0.0;  // largest |lambda_i| * distance to its bound
  double dual = 0.0;             // largest multiplier sign violation

  double max() const;
};

/// Active constraint: row index and which bound it sits on.
struct ActiveBound {
  int row = 0;
  bool upper = false;

  friend bool operator==(const ActiveBound&, const ActiveBound&) = default;
};

struct QPResult {
  Eigen::VectorXd z;
  /// Signed multipliers: positive on an active lower bound, negative on an
  /// active upper bound, zero otherwise.
  Eigen::VectorXd lambda;
  std::vector<ActiveBound> active;
  QPStatus status = QPStatus::optimal;
  int iterations = 0;
  KktResiduals kkt;
};

struct QPSettings {
  double feasibility_tolerance = 1e-12;
  int max_iterations = 500;
};

/// Dense dual active-set method (Goldfarb-Idnani). Starts at the
/// unconstrained minimiser and repeatedly adds the most violated bound,
/// dropping bounds whose multipliers would turn negative.
QPResult solve_qp(const QPProblem& qp, const QPSettings& settings = {});

KktResiduals kkt_residuals(const QPProblem& qp, const Eigen::VectorXd& z,
                           const Eigen::VectorXd& lambda);

double qp_objective(const QPProblem& qp, const Eigen::VectorXd& z);

}  // namespace rhp_hqp
