#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rhp_hqp/task_model.hpp"

namespace rhp_hqp {

inline constexpr double kDefaultRankTolerance = 1e-10;

/// Linearly independent subset of rows, kept in their original order.
struct RowReduction {
  Eigen::MatrixXd rows;
  std::vector<int> indices;

  int rank() const { return static_cast<int>(indices.size()); }
};

/// Gauss-Jordan elimination over the rows of `B` in order. A row is kept when
/// its residual against the rows kept before it has max-norm above
/// tol * max(1, max|B|), so earlier (higher-priority) rows win rank conflicts.
RowReduction row_full_rank(const Eigen::MatrixXd& B, double tol = kDefaultRankTolerance);

/// n x r orthonormal basis of the row space of a full-row-rank `B` from a QR
/// decomposition of its transpose. Column k spans row k after orthogonalising
/// against rows 0..k-1; each column's first entry with magnitude above 1e-12
/// is positive. Throws InternalError if `B` turns out rank deficient.
Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& B, double tol = kDefaultRankTolerance);

/// Full occupation diagonal: alpha of each stacked row's owning task.
Eigen::VectorXd full_occupation(const LevelStack& stack);

/// Occupation diagonal restricted to the retained rows.
Eigen::VectorXd occupation_matrix(const LevelStack& stack, const std::vector<int>& row_indices);

/// P_prev (I - Q diag(lambda) Q^T).
Eigen::MatrixXd rhp_update(const Eigen::MatrixXd& P_prev, const Eigen::MatrixXd& Q,
                           const Eigen::VectorXd& lambda);

/// Everything produced while building the projection of one level.
struct RhpLevel {
  int level = 0;
  LevelStack stack;
  std::vector<int> retained;   // r_i, indices into stack rows
  Eigen::MatrixXd Q;           // n x r
  Eigen::VectorXd lambda;      // r retained occupations
  Eigen::MatrixXd P;           // projection of the upper `level` levels

  int rank() const { return static_cast<int>(retained.size()); }
};

/// One recursion step: select, sort, reduce rows of A P_prev, orthonormalise,
/// pick occupations and update the projection. With no task selected at
/// `level` the returned P is a copy of P_prev.
RhpLevel compute_rhp(const PriorityMatrix& psi, const TaskLibrary& library, int level,
                     const Eigen::MatrixXd& P_prev, double tol = kDefaultRankTolerance);

/// I - A^+ A with the pseudoinverse from an SVD whose singular values below
/// tol * max(1, max|A|) are treated as zero.
Eigen::MatrixXd null_space_projector(const Eigen::MatrixXd& A, int n,
                                     double tol = kDefaultRankTolerance);

}  // namespace rhp_hqp
