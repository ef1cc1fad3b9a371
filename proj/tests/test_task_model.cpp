#include <random>

#include <gtest/gtest.h>

#include "rhp_hqp/error.hpp"
#include "rhp_hqp/task_model.hpp"
#include "support/oracles.hpp"

using namespace rhp_hqp;

namespace {

const PriorityMatrix kCase2Psi1{{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 1, 1, 0}, {1, 1, 1, 1}};

Task make_task(int id, Eigen::MatrixXd A, Eigen::VectorXd b) {
  Task t;
  t.id = id;
  t.name = "t" + std::to_string(id);
  t.W = Eigen::MatrixXd::Identity(A.rows(), A.rows());
  t.A = std::move(A);
  t.b = std::move(b);
  return t;
}

TaskLibrary random_library(std::mt19937_64& rng, int n, const std::vector<int>& dims) {
  std::vector<Task> tasks;
  for (size_t k = 0; k < dims.size(); ++k) {
    tasks.push_back(make_task(static_cast<int>(k) + 1, oracle::random_matrix(rng, dims[k], n),
                              oracle::random_vector(rng, dims[k])));
  }
  return TaskLibrary(n, tasks);
}

}  // namespace

TEST(ValidatePriorityMatrix, LowerTriangularOnesIsValid) {
  EXPECT_FALSE(validate_priority_matrix(kCase2Psi1).has_value());
}

TEST(ValidatePriorityMatrix, AllZeroIsValid) {
  EXPECT_FALSE(validate_priority_matrix(PriorityMatrix(Eigen::MatrixXd::Zero(3, 4))).has_value());
}

TEST(ValidatePriorityMatrix, NonMonotoneColumnReportsSecondLevel) {
  const PriorityMatrix psi{{0, 1}, {0, 0}, {0, 1}};
  const auto v = validate_priority_matrix(psi);
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(v->level, 2);
  EXPECT_EQ(v->task, 1);
  EXPECT_EQ(v->rule, PriorityRule::monotone);
}

TEST(ValidatePriorityMatrix, OutOfRangeValue) {
  const auto v = validate_priority_matrix(PriorityMatrix{{0.5, 1.5}});
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(v->rule, PriorityRule::range);
  EXPECT_EQ(v->task, 1);
  EXPECT_TRUE(validate_priority_matrix(PriorityMatrix{{-0.1}}).has_value());
}

TEST(ValidatePriorityMatrix, ContinuousDecreaseRejected) {
  EXPECT_TRUE(validate_priority_matrix(PriorityMatrix{{0.5}, {0.3}}).has_value());
  EXPECT_FALSE(validate_priority_matrix(PriorityMatrix{{0.3}, {0.5}, {1.0}}).has_value());
}

TEST(ValidatePriorityMatrix, ShapeMismatchThrows) {
  EXPECT_THROW(validate_priority_matrix(kCase2Psi1, 3), DimensionError);
  EXPECT_NO_THROW(validate_priority_matrix(kCase2Psi1, 4));
}

TEST(SelectLevelTasks, Case2Psi1Levels) {
  EXPECT_EQ(select_level_tasks(kCase2Psi1, 1), std::vector<int>({0}));
  EXPECT_EQ(select_level_tasks(kCase2Psi1, 2), std::vector<int>({1}));
  EXPECT_EQ(select_level_tasks(kCase2Psi1, 3), std::vector<int>({2}));
  EXPECT_EQ(select_level_tasks(kCase2Psi1, 4), std::vector<int>({3}));
}

TEST(SelectLevelTasks, IdenticalRowsSelectNothing) {
  const PriorityMatrix psi{{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 1, 0, 0}, {1, 1, 0, 1}};
  EXPECT_TRUE(select_level_tasks(psi, 3).empty());
  EXPECT_EQ(select_level_tasks(psi, 4), std::vector<int>({3}));
}

TEST(SelectLevelTasks, LevelOneSelectsEveryPositiveEntry) {
  const PriorityMatrix psi{{0.2, 0, 1}, {0.7, 0, 1}};
  EXPECT_EQ(select_level_tasks(psi, 1), std::vector<int>({0, 2}));
  EXPECT_EQ(select_level_tasks(psi, 2), std::vector<int>({0}));
}

TEST(SelectLevelTasks, PartitionsChangePoints) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int levels = 1 + trial % 5;
    const int tasks = 1 + trial % 6;
    Eigen::MatrixXd v(levels, tasks);
    for (int j = 0; j < tasks; ++j) {
      double a = 0.0;
      for (int i = 0; i < levels; ++i) {
        // Mix of repeats, zeros and increases, kept monotone.
        const double r = u(rng);
        if (r > 0.5) a = std::min(1.0, a + (r > 0.8 ? 1.0 : u(rng) * 0.5));
        v(i, j) = a;
      }
    }
    const PriorityMatrix psi(v);
    ASSERT_FALSE(validate_priority_matrix(psi).has_value());
    for (int i = 1; i <= levels; ++i) {
      const auto sel = select_level_tasks(psi, i);
      std::vector<int> expected;
      for (int j = 0; j < tasks; ++j) {
        if (psi.alpha(i, j) != psi.alpha(i - 1, j)) expected.push_back(j);
      }
      EXPECT_EQ(sel, expected);
      for (int j : sel) {
        if (psi.alpha(i - 1, j) == 0.0) EXPECT_GT(psi.alpha(i, j), 0.0);
      }
    }
  }
}

TEST(SortDescending, HigherAlphaFirst) {
  std::mt19937_64 rng(1);
  const TaskLibrary lib = random_library(rng, 4, {1, 1, 1});
  const PriorityMatrix psi{{0.9, 0, 0.4}};
  const LevelStack s = sort_descending({0, 2}, psi, 1, lib);
  EXPECT_EQ(s.order, std::vector<int>({0, 2}));
  const PriorityMatrix swapped{{0.4, 0, 0.9}};
  EXPECT_EQ(sort_descending({0, 2}, swapped, 1, lib).order, std::vector<int>({2, 0}));
}

TEST(SortDescending, TiesByAscendingId) {
  std::vector<Task> tasks;
  for (int id : {4, 2, 7}) tasks.push_back(make_task(id, Eigen::MatrixXd::Identity(1, 3), Eigen::VectorXd::Ones(1)));
  const TaskLibrary lib(3, tasks);
  const PriorityMatrix psi{{0.5, 0.5, 0.5}};
  // Columns hold ids 4, 2, 7.
  EXPECT_EQ(sort_descending({0, 1, 2}, psi, 1, lib).order, std::vector<int>({1, 0, 2}));
}

TEST(SortDescending, SingleTaskStackIsItself) {
  std::mt19937_64 rng(2);
  const TaskLibrary lib = random_library(rng, 5, {3});
  const LevelStack s = sort_descending({0}, PriorityMatrix{{1}}, 1, lib);
  EXPECT_EQ(s.A, lib.task(0).A);
  EXPECT_EQ(s.b, lib.task(0).b);
  EXPECT_EQ(s.W, lib.task(0).W);
}

TEST(SortDescending, StackShapesAndBlocks) {
  std::mt19937_64 rng(3);
  const TaskLibrary lib = random_library(rng, 6, {2, 3, 1});
  const PriorityMatrix psi{{0.3, 0.8, 0.3}};
  const LevelStack s = sort_descending({0, 1, 2}, psi, 1, lib);
  ASSERT_EQ(s.order, std::vector<int>({1, 0, 2}));
  EXPECT_EQ(s.rows(), 6);
  EXPECT_EQ(s.dims, std::vector<int>({3, 2, 1}));
  EXPECT_EQ(s.alphas, std::vector<double>({0.8, 0.3, 0.3}));
  EXPECT_EQ(s.A.topRows(3), lib.task(1).A);
  EXPECT_EQ(s.A.middleRows(3, 2), lib.task(0).A);
  EXPECT_EQ(s.b.tail(1), lib.task(2).b);
  EXPECT_EQ(s.W.block(3, 3, 2, 2), lib.task(0).W);
  EXPECT_EQ(s.W.block(0, 3, 3, 3), Eigen::MatrixXd::Zero(3, 3));
}

TEST(TaskLibrary, RejectsBadTasks) {
  const Task good = make_task(1, Eigen::MatrixXd::Identity(2, 3), Eigen::VectorXd::Zero(2));
  EXPECT_NO_THROW(TaskLibrary(3, {good}));
  EXPECT_THROW(TaskLibrary(4, {good}), DimensionError);

  Task bad_b = good;
  bad_b.b = Eigen::VectorXd::Zero(3);
  EXPECT_THROW(TaskLibrary(3, {bad_b}), DimensionError);

  Task indefinite = good;
  indefinite.W(1, 1) = 0.0;
  EXPECT_THROW(TaskLibrary(3, {indefinite}), ConfigError);

  Task asymmetric = good;
  asymmetric.W(0, 1) = 0.5;
  EXPECT_THROW(TaskLibrary(3, {asymmetric}), ConfigError);

  Task dup = good;
  EXPECT_THROW(TaskLibrary(3, {good, dup}), ConfigError);
}

TEST(TaskLibrary, RejectsBadConstraints) {
  Constraint c;
  c.id = 1;
  c.C = Eigen::MatrixXd::Identity(2, 3);
  c.lower = Eigen::VectorXd::Constant(2, -1.0);
  c.upper = Eigen::VectorXd::Constant(2, 1.0);
  EXPECT_NO_THROW(TaskLibrary(3, {}, {c}));
  Constraint crossed = c;
  crossed.lower(0) = 2.0;
  EXPECT_THROW(TaskLibrary(3, {}, {crossed}), ConfigError);
  EXPECT_THROW(TaskLibrary(2, {}, {c}), DimensionError);
}

TEST(PriorityMatrix, BinaryDetection) {
  EXPECT_TRUE(kCase2Psi1.is_binary());
  EXPECT_FALSE((PriorityMatrix{{1, 0.5}}).is_binary());
  EXPECT_EQ(kCase2Psi1.alpha(0, 2), 0.0);
  EXPECT_EQ(kCase2Psi1.alpha(3, 2), 1.0);
}
