#include "rhp_hqp/task_model.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "rhp_hqp/error.hpp"

namespace rhp_hqp {

namespace {

constexpr double kSpdTolerance = 1e-12;

}  // namespace

void check_task(const Task& task, int n) {
  std::ostringstream msg;
  if (task.A.rows() < 1 || task.A.cols() != n) {
    msg << "task " << task.id << " (" << task.name << "): A is " << task.A.rows() << "x"
        << task.A.cols() << ", expected d x " << n;
    throw DimensionError(msg.str());
  }
  if (task.b.size() != task.A.rows()) {
    msg << "task " << task.id << ": b has " << task.b.size() << " rows, A has " << task.A.rows();
    throw DimensionError(msg.str());
  }
  if (task.W.rows() != task.A.rows() || task.W.cols() != task.A.rows()) {
    msg << "task " << task.id << ": W must be " << task.A.rows() << "x" << task.A.rows();
    throw DimensionError(msg.str());
  }
  if (!task.W.isApprox(task.W.transpose(), 1e-12)) {
    msg << "task " << task.id << ": W is not symmetric";
    throw ConfigError(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(task.W, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= kSpdTolerance) {
    msg << "task " << task.id << ": W is not positive definite";
    throw ConfigError(msg.str());
  }
}

void check_constraint(const Constraint& c, int n) {
  std::ostringstream msg;
  if (c.C.cols() != n) {
    msg << "constraint " << c.id << ": C has " << c.C.cols() << " columns, expected " << n;
    throw DimensionError(msg.str());
  }
  if (c.lower.size() != c.C.rows() || c.upper.size() != c.C.rows()) {
    msg << "constraint " << c.id << ": bound vectors must have " << c.C.rows() << " entries";
    throw DimensionError(msg.str());
  }
  if ((c.lower.array() > c.upper.array()).any()) {
    msg << "constraint " << c.id << ": lower bound exceeds upper bound";
    throw ConfigError(msg.str());
  }
  if (c.level < 1) {
    msg << "constraint " << c.id << ": level must be >= 1";
    throw ConfigError(msg.str());
  }
}

TaskLibrary::TaskLibrary(int n, std::vector<Task> tasks, std::vector<Constraint> constraints)
    : n_(n), tasks_(std::move(tasks)), constraints_(std::move(constraints)) {
  if (n_ < 1) throw DimensionError("task library needs at least one variable");
  std::set<int> ids;
  for (const auto& t : tasks_) {
    check_task(t, n_);
    if (!ids.insert(t.id).second) {
      throw ConfigError("duplicate task id " + std::to_string(t.id));
    }
  }
  for (const auto& c : constraints_) check_constraint(c, n_);
}

PriorityMatrix::PriorityMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  const auto n_cols = n_rows == 0 ? 0 : static_cast<Eigen::Index>(rows.begin()->size());
  values_.resize(n_rows, n_cols);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != n_cols) {
      throw DimensionError("ragged priority matrix literal");
    }
    Eigen::Index j = 0;
    for (double v : row) values_(i, j++) = v;
    ++i;
  }
}

bool PriorityMatrix::is_binary() const {
  return ((values_.array() == 0.0) || (values_.array() == 1.0)).all();
}

std::optional<PriorityViolation> validate_priority_matrix(const PriorityMatrix& psi,
                                                          int expected_tasks) {
  if (expected_tasks >= 0 && psi.tasks() != expected_tasks) {
    throw DimensionError("priority matrix has " + std::to_string(psi.tasks()) +
                         " columns but the task library has " + std::to_string(expected_tasks));
  }
  for (int level = 1; level <= psi.levels(); ++level) {
    for (int j = 0; j < psi.tasks(); ++j) {
      const double a = psi.alpha(level, j);
      if (!(a >= 0.0 && a <= 1.0)) return PriorityViolation{level, j, PriorityRule::range};
      if (a < psi.alpha(level - 1, j)) return PriorityViolation{level, j, PriorityRule::monotone};
    }
  }
  return std::nullopt;
}

std::vector<int> select_level_tasks(const PriorityMatrix& psi, int level) {
  std::vector<int> selected;
  for (int j = 0; j < psi.tasks(); ++j) {
    if (psi.alpha(level, j) != psi.alpha(level - 1, j)) selected.push_back(j);
  }
  return selected;
}

LevelStack sort_descending(const std::vector<int>& columns, const PriorityMatrix& psi, int level,
                           const TaskLibrary& library) {
  LevelStack stack;
  stack.order = columns;
  std::stable_sort(stack.order.begin(), stack.order.end(), [&](int a, int b) {
    const double pa = psi.alpha(level, a);
    const double pb = psi.alpha(level, b);
    if (pa != pb) return pa > pb;
    return library.task(a).id < library.task(b).id;
  });

  int rows = 0;
  for (int j : stack.order) {
    stack.dims.push_back(library.task(j).dim());
    stack.alphas.push_back(psi.alpha(level, j));
    rows += library.task(j).dim();
  }

  const int n = library.n();
  stack.A.setZero(rows, n);
  stack.b.setZero(rows);
  stack.W.setZero(rows, rows);
  int offset = 0;
  for (int j : stack.order) {
    const Task& t = library.task(j);
    const int d = t.dim();
    stack.A.middleRows(offset, d) = t.A;
    stack.b.segment(offset, d) = t.b;
    stack.W.block(offset, offset, d, d) = t.W;
    offset += d;
  }
  return stack;
}

}  // namespace rhp_hqp
