#include "rhp_hqp/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rhp_hqp/error.hpp"

namespace rhp_hqp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDependentTolerance = 1e-10;

struct Bounds {
  const QPProblem& qp;

  Eigen::VectorXd normal(const ActiveBound& a) const {
    return a.upper ? Eigen::VectorXd(-qp.G.row(a.row).transpose())
                   : Eigen::VectorXd(qp.G.row(a.row).transpose());
  }
  double rhs(const ActiveBound& a) const { return a.upper ? -qp.hi(a.row) : qp.lo(a.row); }
};

// Null-space factorisation of the active normals, N = [Y Z] [R; 0], with the
// reduced Hessian Z^T H Z. Keeps N^T z = b exact even when H is badly scaled.
struct ActiveSpace {
  Eigen::MatrixXd Y;
  Eigen::MatrixXd Z;
  Eigen::MatrixXd R;
  Eigen::LLT<Eigen::MatrixXd> reduced;

  ActiveSpace(const QPProblem& qp, const std::vector<ActiveBound>& active) {
    const Bounds bounds{qp};
    const Eigen::Index nv = qp.variables();
    const auto q = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd N(nv, q);
    for (Eigen::Index k = 0; k < q; ++k) N.col(k) = bounds.normal(active[static_cast<size_t>(k)]);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(N);
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(nv, nv);
    Y = Q.leftCols(q);
    Z = Q.rightCols(nv - q);
    R = qr.matrixQR().topLeftCorner(q, q).triangularView<Eigen::Upper>();
    if (nv > q) reduced.compute(Z.transpose() * qp.H * Z);
  }

  // Component of v along the free directions, scaled by the reduced Hessian inverse.
  Eigen::VectorXd free_solve(const Eigen::VectorXd& v) const {
    if (Z.cols() == 0) return Eigen::VectorXd::Zero(Y.rows());
    return Z * reduced.solve(Z.transpose() * v);
  }

  // u with N u = v, for v in the range of N.
  Eigen::VectorXd multipliers(const Eigen::VectorXd& v) const {
    return R.triangularView<Eigen::Upper>().solve(Y.transpose() * v);
  }
};

// Equality-constrained minimiser on the active bounds and its multipliers,
// H z + g = N u.
void solve_on_active(const QPProblem& qp, const std::vector<ActiveBound>& active, Eigen::VectorXd& z,
                     Eigen::VectorXd& u) {
  const Bounds bounds{qp};
  const ActiveSpace space(qp, active);
  const auto q = static_cast<Eigen::Index>(active.size());
  Eigen::VectorXd b(q);
  for (Eigen::Index k = 0; k < q; ++k) b(k) = bounds.rhs(active[static_cast<size_t>(k)]);
  const Eigen::VectorXd z0 =
      space.Y * space.R.transpose().triangularView<Eigen::Lower>().solve(b);
  z = z0 - space.free_solve(qp.H * z0 + qp.g);
  u = space.multipliers(qp.H * z + qp.g);
}

}  // namespace

std::string_view to_string(QPStatus status) {
  switch (status) {
    case QPStatus::optimal: return "optimal";
    case QPStatus::max_iterations: return "max_iterations";
    case QPStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

double KktResiduals::max() const {
  return std::max({stationarity, primal, complementarity, dual});
}

double qp_objective(const QPProblem& qp, const Eigen::VectorXd& z) {
  return 0.5 * z.dot(qp.H * z) + qp.g.dot(z);
}

KktResiduals kkt_residuals(const QPProblem& qp, const Eigen::VectorXd& z,
                           const Eigen::VectorXd& lambda) {
  KktResiduals r;
  const Eigen::VectorXd grad = qp.H * z + qp.g - qp.G.transpose() * lambda;
  r.stationarity = grad.size() ? grad.cwiseAbs().maxCoeff() : 0.0;
  const Eigen::VectorXd Gz = qp.G * z;
  for (Eigen::Index i = 0; i < qp.G.rows(); ++i) {
    r.primal = std::max({r.primal, qp.lo(i) - Gz(i), Gz(i) - qp.hi(i)});
    const double l = lambda(i);
    if (l > 0.0) {
      r.complementarity = std::max(r.complementarity, l * std::abs(Gz(i) - qp.lo(i)));
    } else if (l < 0.0) {
      r.complementarity = std::max(r.complementarity, -l * std::abs(qp.hi(i) - Gz(i)));
    }
    // A positive multiplier on a row with no finite lower bound is a sign error.
    if (l > 0.0 && !std::isfinite(qp.lo(i))) r.dual = std::max(r.dual, l);
    if (l < 0.0 && !std::isfinite(qp.hi(i))) r.dual = std::max(r.dual, -l);
  }
  return r;
}

QPResult solve_qp(const QPProblem& qp, const QPSettings& settings) {
  const int nv = qp.variables();
  const int m = qp.constraints();
  if (qp.H.cols() != nv || qp.g.size() != nv || (m > 0 && qp.G.cols() != nv) ||
      qp.lo.size() != m || qp.hi.size() != m) {
    throw DimensionError("solve_qp: inconsistent problem dimensions");
  }

  QPResult result;
  result.lambda = Eigen::VectorXd::Zero(m);
  const Eigen::LLT<Eigen::MatrixXd> llt(qp.H);
  if (llt.info() != Eigen::Success) {
    throw SolverError("solve_qp: Hessian is not positive definite");
  }

  const Bounds bounds{qp};
  std::vector<ActiveBound> active;
  std::vector<double> u;
  std::vector<char> row_active(static_cast<size_t>(m), 0);
  Eigen::VectorXd z = -llt.solve(qp.g);

  auto finish = [&](QPStatus status) {
    Eigen::VectorXd u_final;
    solve_on_active(qp, active, z, u_final);
    result.z = z;
    for (size_t k = 0; k < active.size(); ++k) {
      const double value = u_final(static_cast<Eigen::Index>(k));
      result.lambda(active[k].row) = active[k].upper ? -value : value;
    }
    result.active = active;
    std::sort(result.active.begin(), result.active.end(),
              [](const ActiveBound& a, const ActiveBound& b) { return a.row < b.row; });
    result.status = status;
    result.kkt = kkt_residuals(qp, result.z, result.lambda);
    return result;
  };

  while (true) {
    // Most violated inactive bound.
    ActiveBound candidate;
    double worst = settings.feasibility_tolerance;
    bool found = false;
    const Eigen::VectorXd Gz = qp.G * z;
    for (int i = 0; i < m; ++i) {
      if (row_active[static_cast<size_t>(i)]) continue;
      const double below = qp.lo(i) - Gz(i);
      const double above = Gz(i) - qp.hi(i);
      if (below > worst) {
        worst = below;
        candidate = {i, false};
        found = true;
      }
      if (above > worst) {
        worst = above;
        candidate = {i, true};
        found = true;
      }
    }
    if (!found) return finish(QPStatus::optimal);

    const Eigen::VectorXd np = bounds.normal(candidate);
    const double bp = bounds.rhs(candidate);
    double up = 0.0;

    while (true) {
      if (++result.iterations > settings.max_iterations) return finish(QPStatus::max_iterations);

      const auto q = static_cast<Eigen::Index>(active.size());
      const ActiveSpace space(qp, active);
      const Eigen::VectorXd step = space.free_solve(np);
      const Eigen::VectorXd r = q > 0 ? space.multipliers(np - qp.H * step) : Eigen::VectorXd(0);

      // Largest dual step keeping active multipliers non-negative.
      double t_dual = kInf;
      Eigen::Index drop = -1;
      for (Eigen::Index k = 0; k < q; ++k) {
        if (r(k) > 0.0) {
          const double t = u[static_cast<size_t>(k)] / r(k);
          if (t < t_dual) {
            t_dual = t;
            drop = k;
          }
        }
      }

      // Full primal step to make the candidate bound tight.
      const double curvature = np.dot(step);
      double t_primal = kInf;
      if (space.Z.cols() > 0 && (space.Z.transpose() * np).norm() > kDependentTolerance * np.norm()) {
        t_primal = (bp - np.dot(z)) / curvature;
      }

      const double t = std::min(t_dual, t_primal);
      if (!std::isfinite(t)) return finish(QPStatus::infeasible);

      if (std::isfinite(t_primal)) z += t * step;
      for (Eigen::Index k = 0; k < q; ++k) u[static_cast<size_t>(k)] -= t * r(k);
      up += t;

      if (t_primal <= t_dual) {
        active.push_back(candidate);
        u.push_back(up);
        row_active[static_cast<size_t>(candidate.row)] = 1;
        // Re-solve on the new active set so rounding does not accumulate.
        Eigen::VectorXd u_exact;
        solve_on_active(qp, active, z, u_exact);
        for (size_t k = 0; k < u.size(); ++k) u[k] = std::max(0.0, u_exact(static_cast<Eigen::Index>(k)));
        break;
      }
      row_active[static_cast<size_t>(active[static_cast<size_t>(drop)].row)] = 0;
      active.erase(active.begin() + drop);
      u.erase(u.begin() + drop);
    }
  }
}

}  // namespace rhp_hqp
