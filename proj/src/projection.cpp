#include "rhp_hqp/projection.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "rhp_hqp/error.hpp"

namespace rhp_hqp {

namespace {

double scaled_tolerance(const Eigen::MatrixXd& M, double tol) {
  const double max_abs = M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff();
  return tol * std::max(1.0, max_abs);
}

}  // namespace

RowReduction row_full_rank(const Eigen::MatrixXd& B, double tol) {
  const Eigen::Index n = B.cols();
  const double threshold = scaled_tolerance(B, tol);

  // Reduced rows: basis(k, pivots[k]) == 1 and basis(k, pivots[l]) == 0 for l != k.
  Eigen::MatrixXd basis(B.rows(), n);
  std::vector<Eigen::Index> pivots;
  RowReduction out;

  for (Eigen::Index i = 0; i < B.rows(); ++i) {
    Eigen::RowVectorXd residual = B.row(i);
    for (size_t k = 0; k < pivots.size(); ++k) {
      const double coeff = residual(pivots[k]);
      if (coeff != 0.0) residual -= coeff * basis.row(static_cast<Eigen::Index>(k));
    }
    Eigen::Index pivot = 0;
    const double peak = residual.cwiseAbs().maxCoeff(&pivot);
    if (peak <= threshold) continue;

    residual /= residual(pivot);
    residual(pivot) = 1.0;
    for (size_t k = 0; k < pivots.size(); ++k) {
      const auto row = static_cast<Eigen::Index>(k);
      const double coeff = basis(row, pivot);
      if (coeff != 0.0) {
        basis.row(row) -= coeff * residual;
        basis(row, pivot) = 0.0;
      }
    }
    basis.row(static_cast<Eigen::Index>(pivots.size())) = residual;
    pivots.push_back(pivot);
    out.indices.push_back(static_cast<int>(i));
  }

  out.rows.resize(static_cast<Eigen::Index>(out.indices.size()), n);
  for (size_t k = 0; k < out.indices.size(); ++k) {
    out.rows.row(static_cast<Eigen::Index>(k)) = B.row(out.indices[k]);
  }
  return out;
}

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& B, double tol) {
  const Eigen::Index r = B.rows();
  const Eigen::Index n = B.cols();
  if (r == 0) return Eigen::MatrixXd(n, 0);
  if (r > n) throw InternalError("orthonormal_basis: more rows than columns");

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(B.transpose());
  const Eigen::MatrixXd R = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  const double threshold = scaled_tolerance(B, tol);
  for (Eigen::Index k = 0; k < r; ++k) {
    if (std::abs(R(k, k)) <= threshold) {
      std::ostringstream msg;
      msg << "orthonormal_basis: row " << k << " is dependent (|R_kk| = " << std::abs(R(k, k))
          << "); row reduction tolerance mismatch";
      throw InternalError(msg.str());
    }
  }

  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
  for (Eigen::Index k = 0; k < r; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(Q(i, k)) > 1e-12) {
        if (Q(i, k) < 0.0) Q.col(k) = -Q.col(k);
        break;
      }
    }
  }
  return Q;
}

Eigen::VectorXd full_occupation(const LevelStack& stack) {
  Eigen::VectorXd diag(std::accumulate(stack.dims.begin(), stack.dims.end(), 0));
  int offset = 0;
  for (size_t k = 0; k < stack.order.size(); ++k) {
    diag.segment(offset, stack.dims[k]).setConstant(stack.alphas[k]);
    offset += stack.dims[k];
  }
  return diag;
}

Eigen::VectorXd occupation_matrix(const LevelStack& stack, const std::vector<int>& row_indices) {
  const Eigen::VectorXd full = full_occupation(stack);
  Eigen::VectorXd lambda(static_cast<Eigen::Index>(row_indices.size()));
  for (size_t k = 0; k < row_indices.size(); ++k) {
    const int idx = row_indices[k];
    if (idx < 0 || idx >= full.size()) {
      throw InternalError("occupation_matrix: retained row " + std::to_string(idx) +
                          " outside stack of " + std::to_string(full.size()) + " rows");
    }
    lambda(static_cast<Eigen::Index>(k)) = full(idx);
  }
  return lambda;
}

Eigen::MatrixXd rhp_update(const Eigen::MatrixXd& P_prev, const Eigen::MatrixXd& Q,
                           const Eigen::VectorXd& lambda) {
  if (Q.rows() != P_prev.cols() || Q.cols() != lambda.size()) {
    throw DimensionError("rhp_update: Q and lambda do not conform with P");
  }
  if (lambda.size() == 0 || (lambda.array() == 0.0).all()) return P_prev;
  return P_prev - (P_prev * Q) * lambda.asDiagonal() * Q.transpose();
}

RhpLevel compute_rhp(const PriorityMatrix& psi, const TaskLibrary& library, int level,
                     const Eigen::MatrixXd& P_prev, double tol) {
  RhpLevel out;
  out.level = level;
  const std::vector<int> selected = select_level_tasks(psi, level);
  if (selected.empty()) {
    out.Q.resize(library.n(), 0);
    out.P = P_prev;
    return out;
  }
  out.stack = sort_descending(selected, psi, level, library);
  const RowReduction reduced = row_full_rank(out.stack.A * P_prev, tol);
  out.retained = reduced.indices;
  out.Q = orthonormal_basis(reduced.rows, tol);
  out.lambda = occupation_matrix(out.stack, out.retained);
  out.P = rhp_update(P_prev, out.Q, out.lambda);
  return out;
}

Eigen::MatrixXd null_space_projector(const Eigen::MatrixXd& A, int n, double tol) {
  if (A.cols() != n) throw DimensionError("null_space_projector: A must have n columns");
  Eigen::MatrixXd N = Eigen::MatrixXd::Identity(n, n);
  if (A.rows() == 0) return N;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const double threshold = scaled_tolerance(A, tol);
  const auto& sigma = svd.singularValues();
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    if (sigma(k) > threshold) {
      const auto v = svd.matrixV().col(k);
      N -= v * v.transpose();
    }
  }
  return N;
}

}  // namespace rhp_hqp
