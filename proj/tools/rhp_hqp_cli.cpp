// Scenario runner for the RHP-HQP controller.
//
//   rhp_hqp_cli run <config>... [--out DIR] [--mode rhp_hqp|strict_hqp_baseline]
//   rhp_hqp_cli compare <logA> <logB> [--threshold X]
//   rhp_hqp_cli validate <config>...
//
// Exit codes: 0 success, 1 usage, 2 dimension, 3 config, 4 solver, 5 I/O,
// 6 internal, 7 compare threshold exceeded.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rhp_hqp/error.hpp"
#include "rhp_hqp/run_log.hpp"
#include "rhp_hqp/scenario.hpp"

namespace fs = std::filesystem;
using namespace rhp_hqp;

namespace {

constexpr int kExitDiverged = 7;

int exit_code(const Error& e) { return static_cast<int>(e.category()); }

void print_summary(const std::string& name, const RunSummary& s, const fs::path& dir) {
  std::printf("%s: %d cycles -> %s\n", name.c_str(), s.cycles, dir.string().c_str());
  std::printf("  max orientation error  %.6g rad\n", s.max_orientation_error);
  std::printf("  max position error     %.6g m\n", s.max_position_error);
  std::printf("  integrated pos. error  %.6g m s\n", s.integrated_position_error);
  std::printf("  min d_min              %.6g m\n", s.min_d_min);
  std::printf("  mean / max solve time  %.6g / %.6g ms\n", 1e3 * s.mean_solve_seconds,
              1e3 * s.max_solve_seconds);
  std::printf("  max velocity jump      %.6g rad/s\n", s.max_velocity_jump);
}

int run_one(const fs::path& config, const fs::path& out_dir, const std::optional<std::string>& mode,
            std::mutex& io) {
  try {
    Scenario sc = load_scenario(config);
    if (mode) sc.mode = run_mode_from_string(*mode);
    const RunResult result = run_scenario(sc);
    emit_outputs(result.log, result.summary, out_dir);
    std::lock_guard lock(io);
    print_summary(sc.name, result.summary, out_dir);
    return 0;
  } catch (const Error& e) {
    std::lock_guard lock(io);
    std::cerr << config.string() << ": " << e.what() << '\n';
    return exit_code(e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical task-priority controller with smooth priority transitions"};
  app.require_subcommand(1);

  std::vector<std::string> run_configs;
  std::string out_dir;
  std::optional<std::string> mode;
  auto* run = app.add_subcommand("run", "Run scenario configs and write logs");
  run->add_option("config", run_configs, "Scenario file(s)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (default $RHP_HQP_OUT or ./out)");
  run->add_option("--mode", mode, "rhp_hqp or strict_hqp_baseline")
      ->check(CLI::IsMember({"rhp_hqp", "strict_hqp_baseline"}));

  std::string log_a, log_b;
  double threshold = 1e-6;
  auto* compare = app.add_subcommand("compare", "Per-cycle divergence of two run logs");
  compare->add_option("logA", log_a, "Run directory or log.csv")->required();
  compare->add_option("logB", log_b, "Run directory or log.csv")->required();
  compare->add_option("--threshold", threshold, "Divergence threshold");

  std::vector<std::string> validate_configs;
  auto* validate = app.add_subcommand("validate", "Parse and check scenario configs");
  validate->add_option("config", validate_configs, "Scenario file(s)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (*run) {
    if (out_dir.empty()) {
      const char* env = std::getenv("RHP_HQP_OUT");
      out_dir = env && *env ? env : "out";
    }
    std::mutex io;
    std::vector<int> codes(run_configs.size(), 0);
    auto dir_for = [&](size_t k) {
      return run_configs.size() == 1 ? fs::path(out_dir)
                                     : fs::path(out_dir) / fs::path(run_configs[k]).stem();
    };
    if (run_configs.size() == 1) {
      codes[0] = run_one(run_configs[0], dir_for(0), mode, io);
    } else {
      // One isolated worker per scenario.
      std::vector<std::thread> workers;
      for (size_t k = 0; k < run_configs.size(); ++k) {
        workers.emplace_back([&, k] { codes[k] = run_one(run_configs[k], dir_for(k), mode, io); });
      }
      for (auto& w : workers) w.join();
    }
    for (int c : codes) {
      if (c != 0) return c;
    }
    return 0;
  }

  if (*compare) {
    try {
      const RunLog a = read_log(log_a);
      const RunLog b = read_log(log_b);
      const DivergenceReport rep = compare_runs(a, b, threshold);
      std::printf("cycles                 %d\n", rep.cycles);
      std::printf("max command divergence %.17g\n", rep.max_command_diff);
      std::printf("max q divergence       %.17g\n", rep.max_q_diff);
      if (rep.first_exceeding >= 0) {
        std::printf("first cycle above %.3g: %d\n", threshold, rep.first_exceeding);
        return kExitDiverged;
      }
      std::printf("no cycle above %.3g\n", threshold);
      return 0;
    } catch (const Error& e) {
      std::cerr << e.what() << '\n';
      return exit_code(e);
    }
  }

  if (*validate) {
    for (const auto& path : validate_configs) {
      try {
        const Scenario sc = load_scenario(path);
        std::printf("%s: ok (%d joints, %zu tasks, %d candidates, %d cycles)\n", path.c_str(),
                    sc.chain.dof(), sc.tasks.size(), sc.hierarchy.size(), sc.cycles());
      } catch (const Error& e) {
        std::cerr << path << ": " << e.what() << '\n';
        return exit_code(e);
      }
    }
    return 0;
  }
  return 1;
}
