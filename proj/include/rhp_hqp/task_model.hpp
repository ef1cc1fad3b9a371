#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rhp_hqp {

/// Equality task A x = b weighted by the SPD matrix W.
struct Task {
  int id = 0;
  std::string name;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd W;

  int dim() const { return static_cast<int>(A.rows()); }
};

/// Two-sided inequality lower <= C x <= upper, enforced from `level` downward.
struct Constraint {
  int id = 0;
  Eigen::MatrixXd C;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  int level = 1;

  int rows() const { return static_cast<int>(C.rows()); }
};

/// Task and constraint set over `n` optimization variables. Column j of a
/// priority matrix refers to tasks[j].
class TaskLibrary {
 public:
  TaskLibrary() = default;
  TaskLibrary(int n, std::vector<Task> tasks, std::vector<Constraint> constraints = {});

  int n() const { return n_; }
  int task_count() const { return static_cast<int>(tasks_.size()); }
  const std::vector<Task>& tasks() const { return tasks_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const Task& task(int column) const { return tasks_.at(static_cast<size_t>(column)); }

 private:
  int n_ = 0;
  std::vector<Task> tasks_;
  std::vector<Constraint> constraints_;
};

/// n_l x n_t matrix of priority values. Levels are numbered from 1 (highest
/// priority); level 0 is the empty hierarchy with every value zero.
class PriorityMatrix {
 public:
  PriorityMatrix() = default;
  explicit PriorityMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {}
  PriorityMatrix(std::initializer_list<std::initializer_list<double>> rows);

  int levels() const { return static_cast<int>(values_.rows()); }
  int tasks() const { return static_cast<int>(values_.cols()); }
  const Eigen::MatrixXd& values() const { return values_; }

  /// Priority of task column `task` at `level` (0 <= level <= levels()).
  double alpha(int level, int task) const {
    return level == 0 ? 0.0 : values_(level - 1, task);
  }

  bool is_binary() const;

  friend bool operator==(const PriorityMatrix& a, const PriorityMatrix& b) {
    return a.values_.rows() == b.values_.rows() && a.values_.cols() == b.values_.cols() &&
           a.values_ == b.values_;
  }

 private:
  Eigen::MatrixXd values_;
};

enum class PriorityRule { range, monotone };

struct PriorityViolation {
  int level = 0;  // 1-based
  int task = 0;   // column index
  PriorityRule rule = PriorityRule::range;
};

/// Returns the first violation in row-major order, or nothing when every
/// value lies in [0, 1] and every column is non-decreasing down the levels.
/// Throws DimensionError if `expected_tasks` >= 0 and the column count differs.
std::optional<PriorityViolation> validate_priority_matrix(const PriorityMatrix& psi,
                                                          int expected_tasks = -1);

/// Task columns whose value changes between level-1 and level.
std::vector<int> select_level_tasks(const PriorityMatrix& psi, int level);

/// Selected tasks of one level sorted by descending priority and stacked.
struct LevelStack {
  std::vector<int> order;   // task columns, highest priority first
  std::vector<int> dims;    // row count of each ordered task
  std::vector<double> alphas;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd W;        // block diagonal

  int rows() const { return static_cast<int>(A.rows()); }
  bool empty() const { return order.empty(); }
};

/// Orders by alpha descending, ties by ascending task id, then stacks A, b
/// and block-diagonal W.
LevelStack sort_descending(const std::vector<int>& columns, const PriorityMatrix& psi, int level,
                           const TaskLibrary& library);

/// Checks task and constraint shapes and W positive definiteness.
void check_task(const Task& task, int n);
void check_constraint(const Constraint& constraint, int n);

}  // namespace rhp_hqp
