#include "rhp_hqp/hqp_solver.hpp"

#include <chrono>
#include <functional>
#include <sstream>

#include "rhp_hqp/error.hpp"

namespace rhp_hqp {

Eigen::VectorXd shifted_target(const Eigen::VectorXd& lambda, const Eigen::VectorXd& b,
                               const Eigen::MatrixXd& A, const Eigen::VectorXd& x_prev) {
  if (lambda.size() != b.size() || A.rows() != b.size() || A.cols() != x_prev.size()) {
    throw DimensionError("shifted_target: inconsistent dimensions");
  }
  const Eigen::VectorXd current = A * x_prev;
  return lambda.cwiseProduct(b) + (Eigen::VectorXd::Ones(b.size()) - lambda).cwiseProduct(current);
}

QPProblem build_level_qp(const LevelProblem& level, const SolverConfig& config) {
  const auto n = level.P_prev.cols();
  if (level.P_prev.rows() != n || level.x_prev.size() != n ||
      (level.A.rows() > 0 && level.A.cols() != n) || level.b_hat.size() != level.A.rows() ||
      level.W_hat.rows() != level.A.rows() || level.W_hat.cols() != level.A.rows()) {
    throw DimensionError("build_level_qp: inconsistent level dimensions");
  }

  Eigen::Index slack_count = 0;
  Eigen::Index row_count = 0;
  for (const Constraint* c : level.new_constraints) {
    if (c->C.cols() != n) throw DimensionError("build_level_qp: constraint column mismatch");
    slack_count += c->rows();
  }
  row_count += slack_count;
  for (const auto& f : level.frozen) {
    if (f.constraint->C.cols() != n || f.slack.size() != f.constraint->rows()) {
      throw DimensionError("build_level_qp: frozen constraint mismatch");
    }
    row_count += f.constraint->rows();
  }

  const Eigen::Index nz = n + slack_count;
  QPProblem qp;
  qp.H.setZero(nz, nz);
  qp.g.setZero(nz);
  qp.G.setZero(row_count, nz);
  qp.lo.resize(row_count);
  qp.hi.resize(row_count);

  const Eigen::MatrixXd AP = level.A * level.P_prev;
  const Eigen::VectorXd offset = level.A * level.x_prev - level.b_hat;
  qp.H.topLeftCorner(n, n) = AP.transpose() * level.W_hat * AP;
  qp.H.topLeftCorner(n, n).diagonal().array() += config.regularization;
  qp.H.bottomRightCorner(slack_count, slack_count).setIdentity();
  qp.g.head(n) = AP.transpose() * (level.W_hat * offset);

  Eigen::Index row = 0;
  Eigen::Index slack = n;
  for (const Constraint* c : level.new_constraints) {
    const auto m = c->C.rows();
    const Eigen::VectorXd cx = c->C * level.x_prev;
    qp.G.block(row, 0, m, n) = c->C * level.P_prev;
    qp.G.block(row, slack, m, m).setIdentity();
    qp.lo.segment(row, m) = c->lower - cx;
    qp.hi.segment(row, m) = c->upper - cx;
    row += m;
    slack += m;
  }
  for (const auto& f : level.frozen) {
    const Constraint& c = *f.constraint;
    const auto m = c.C.rows();
    const Eigen::VectorXd shift = c.C * level.x_prev + f.slack;
    qp.G.block(row, 0, m, n) = c.C * level.P_prev;
    qp.lo.segment(row, m) = c.lower - shift;
    qp.hi.segment(row, m) = c.upper - shift;
    row += m;
  }
  return qp;
}

double HierarchySolution::total_seconds() const {
  double s = 0.0;
  for (const auto& l : levels) s += l.seconds;
  return s;
}

int HierarchySolution::total_iterations() const {
  int it = 0;
  for (const auto& l : levels) it += l.qp_iterations;
  return it;
}

namespace {

struct ProjectionStep {
  LevelStack stack;
  Eigen::VectorXd lambda_full;
  std::vector<int> retained;
  Eigen::MatrixXd P;
};

using ProjectionFn = std::function<ProjectionStep(int level, const Eigen::MatrixXd& P_prev)>;

HierarchySolution run_levels(const PriorityMatrix& psi, const TaskLibrary& library,
                             const SolverConfig& config, const ProjectionFn& project) {
  if (auto violation = validate_priority_matrix(psi, library.task_count())) {
    std::ostringstream msg;
    msg << "invalid priority matrix at level " << violation->level << ", task column "
        << violation->task;
    throw DimensionError(msg.str());
  }
  const int n = library.n();
  for (const auto& c : library.constraints()) {
    if (c.level > psi.levels()) {
      throw DimensionError("constraint " + std::to_string(c.id) + " assigned to level " +
                           std::to_string(c.level) + " beyond hierarchy depth " +
                           std::to_string(psi.levels()));
    }
  }

  HierarchySolution out;
  out.x = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
  std::vector<FrozenConstraint> frozen;
  const QPSettings qp_settings{1e-12, config.max_qp_iterations};

  for (int level = 1; level <= psi.levels(); ++level) {
    const auto start = std::chrono::steady_clock::now();
    ProjectionStep step = project(level, P);

    LevelProblem problem;
    problem.A = step.stack.empty() ? Eigen::MatrixXd(0, n) : step.stack.A;
    problem.b_hat = step.stack.empty()
                        ? Eigen::VectorXd(0)
                        : shifted_target(step.lambda_full, step.stack.b, step.stack.A, out.x);
    problem.W_hat = step.stack.empty() ? Eigen::MatrixXd(0, 0)
                                       : Eigen::MatrixXd(step.lambda_full.asDiagonal() * step.stack.W);
    problem.P_prev = P;
    problem.x_prev = out.x;
    for (const auto& c : library.constraints()) {
      if (c.level == level) problem.new_constraints.push_back(&c);
    }
    problem.frozen = frozen;

    const QPProblem qp = build_level_qp(problem, config);
    const QPResult result = solve_qp(qp, qp_settings);
    if (result.status != QPStatus::optimal) {
      std::ostringstream msg;
      msg << "level " << level << ": QP " << to_string(result.status) << " after "
          << result.iterations << " iterations (" << qp.variables() << " variables, "
          << qp.constraints() << " rows, primal residual " << result.kkt.primal << ")";
      throw SolverError(msg.str());
    }

    LevelSolution sol;
    sol.level = level;
    sol.u_star = result.z.head(n);
    sol.v_star = result.z.tail(qp.variables() - n);
    sol.x_star = accumulate(out.x, P, sol.u_star);
    sol.tasks = step.stack.order;
    sol.retained = step.retained;
    sol.active = result.active;
    sol.status = result.status;
    sol.qp_iterations = result.iterations;
    sol.kkt = result.kkt.max();

    Eigen::Index offset = 0;
    for (const Constraint* c : problem.new_constraints) {
      frozen.push_back({c, sol.v_star.segment(offset, c->rows())});
      offset += c->rows();
    }
    out.x = sol.x_star;
    P = std::move(step.P);
    sol.P = P;
    const auto stop = std::chrono::steady_clock::now();
    sol.seconds = std::chrono::duration<double>(stop - start).count();

    for (int j : sol.tasks) {
      const Task& t = library.task(j);
      sol.task_residuals.push_back((t.A * out.x - t.b).norm());
    }
    out.levels.push_back(std::move(sol));
  }
  return out;
}

}  // namespace

HierarchySolution solve_hierarchy(const PriorityMatrix& psi, const TaskLibrary& library,
                                  const SolverConfig& config) {
  return run_levels(psi, library, config, [&](int level, const Eigen::MatrixXd& P_prev) {
    RhpLevel rhp = compute_rhp(psi, library, level, P_prev, config.rank_tol);
    ProjectionStep step;
    step.lambda_full = rhp.stack.empty() ? Eigen::VectorXd(0) : full_occupation(rhp.stack);
    step.stack = std::move(rhp.stack);
    step.retained = std::move(rhp.retained);
    step.P = std::move(rhp.P);
    return step;
  });
}

HierarchySolution solve_strict_hierarchy(const PriorityMatrix& psi, const TaskLibrary& library,
                                         const SolverConfig& config) {
  if (!psi.is_binary()) {
    throw DimensionError("strict hierarchy baseline needs a binary priority matrix");
  }
  const int n = library.n();
  return run_levels(psi, library, config, [&](int level, const Eigen::MatrixXd&) {
    ProjectionStep step;
    const std::vector<int> selected = select_level_tasks(psi, level);
    if (!selected.empty()) {
      step.stack = sort_descending(selected, psi, level, library);
      step.lambda_full = Eigen::VectorXd::Ones(step.stack.rows());
    }
    int rows = 0;
    for (int j = 0; j < library.task_count(); ++j) {
      if (psi.alpha(level, j) == 1.0) rows += library.task(j).dim();
    }
    Eigen::MatrixXd upper(rows, n);
    int offset = 0;
    for (int j = 0; j < library.task_count(); ++j) {
      if (psi.alpha(level, j) != 1.0) continue;
      const Task& t = library.task(j);
      upper.middleRows(offset, t.dim()) = t.A;
      offset += t.dim();
    }
    step.P = null_space_projector(upper, n, config.rank_tol);
    return step;
  });
}

}  // namespace rhp_hqp
