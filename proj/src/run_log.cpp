#include "rhp_hqp/run_log.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "rhp_hqp/error.hpp"

namespace rhp_hqp {

namespace {

constexpr int kTransitionMode = 1;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw IoError(path.string() + ": cannot parse number '" + s + "'");
  }
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void close_checked(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void add_indexed(std::vector<std::string>& cols, const std::string& prefix, int count) {
  for (int k = 0; k < count; ++k) cols.push_back(prefix + std::to_string(k));
}

// Writes `t` plus the selected per-cycle vectors for one plot.
template <typename Fn>
void write_plot(const std::filesystem::path& path, const RunLog& log,
                const std::vector<std::string>& names, Fn values) {
  auto out = open_out(path);
  out << "t";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (const auto& r : log.records) {
    out << fmt(r.t);
    for (double v : values(r)) out << ',' << fmt(v);
    out << '\n';
  }
  close_checked(out, path);
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

RunSummary summarize(const RunLog& log, double d_high) {
  RunSummary s;
  const auto& recs = log.records;
  s.cycles = static_cast<int>(recs.size());
  if (recs.empty()) return s;

  s.min_d_min = recs.front().d_min;
  s.min_d_torso = recs.front().d_torso;
  double total = 0.0, total_transition = 0.0, total_steady = 0.0;
  int steady = 0;
  std::vector<bool> reached(static_cast<size_t>(log.candidates), false);

  for (size_t k = 0; k < recs.size(); ++k) {
    const auto& r = recs[k];
    s.max_orientation_error = std::max(s.max_orientation_error, r.orientation_error);
    s.max_position_error = std::max(s.max_position_error, r.position_error);
    s.min_d_min = std::min(s.min_d_min, r.d_min);
    s.min_d_torso = std::min(s.min_d_torso, r.d_torso);
    s.max_solve_seconds = std::max(s.max_solve_seconds, r.solve_seconds);
    s.max_kkt = std::max(s.max_kkt, r.kkt);
    s.max_velocity_excess = std::max(s.max_velocity_excess, r.velocity_excess);
    total += r.solve_seconds;
    if (r.mode == kTransitionMode) {
      total_transition += r.solve_seconds;
      ++s.transition_cycles;
    } else {
      total_steady += r.solve_seconds;
      ++steady;
    }
    for (Eigen::Index c = 0; c < r.p.size() && c < log.candidates; ++c) {
      if (r.p(c) >= 1.0) reached[static_cast<size_t>(c)] = true;
    }
    if (k > 0) {
      const auto& prev = recs[k - 1];
      const double jump = (r.command - prev.command).cwiseAbs().maxCoeff();
      s.max_velocity_jump = std::max(s.max_velocity_jump, jump);
      if (r.mode == kTransitionMode || prev.mode == kTransitionMode) {
        s.max_velocity_jump_transition = std::max(s.max_velocity_jump_transition, jump);
      } else {
        s.max_velocity_jump_steady = std::max(s.max_velocity_jump_steady, jump);
      }
      s.integrated_position_error +=
          0.5 * (r.position_error + prev.position_error) * (r.t - prev.t);
    }
  }
  s.mean_solve_seconds = total / static_cast<double>(recs.size());
  if (s.transition_cycles > 0) s.mean_solve_seconds_transition = total_transition / s.transition_cycles;
  if (steady > 0) s.mean_solve_seconds_steady = total_steady / steady;
  s.final_position_error = recs.back().position_error;

  for (int c = 0; c < log.candidates; ++c) {
    if (reached[static_cast<size_t>(c)] && static_cast<size_t>(c) < log.candidate_labels.size()) {
      s.vertices_reached.push_back(log.candidate_labels[static_cast<size_t>(c)]);
    }
  }

  // Departure: start of the final stretch with d_min >= d_high, provided the
  // obstacle came closer than d_high before it.
  size_t first_clear = recs.size();
  for (size_t k = recs.size(); k-- > 0;) {
    if (recs[k].d_min < d_high) break;
    first_clear = k;
  }
  if (first_clear > 0 && first_clear < recs.size()) {
    s.obstacle_departure_time = recs[first_clear].t;
    size_t settled = recs.size();
    for (size_t k = recs.size(); k-- > first_clear;) {
      if (recs[k].position_error >= 1e-3) break;
      settled = k;
    }
    if (settled < recs.size()) s.recovery_time = recs[settled].t - recs[first_clear].t;
  }
  return s;
}

std::vector<std::string> log_columns(const RunLog& log) {
  std::vector<std::string> cols = {"cycle", "t"};
  add_indexed(cols, "q_", log.dof);
  add_indexed(cols, "qdot_", log.dof);
  add_indexed(cols, "cmd_", log.dof);
  add_indexed(cols, "accel_", log.dof);
  for (int i = 1; i <= log.levels; ++i) {
    for (int j = 1; j <= log.tasks; ++j) cols.push_back("psi_" + std::to_string(i) + "_" + std::to_string(j));
  }
  add_indexed(cols, "p_", log.candidates);
  for (const char* c : {"d_min", "d_torso", "hand_x", "hand_y", "hand_z", "position_error",
                        "orientation_error", "extension", "mode"}) {
    cols.emplace_back(c);
  }
  add_indexed(cols, "residual_", log.tasks);
  cols.emplace_back("kkt");
  cols.emplace_back("velocity_excess");
  return cols;
}

std::vector<std::string> timing_columns(const RunLog& log) {
  std::vector<std::string> cols = {"cycle", "t", "solve_seconds"};
  add_indexed(cols, "level_seconds_", log.levels);
  add_indexed(cols, "level_iterations_", log.levels);
  return cols;
}

void emit_outputs(const RunLog& log, const RunSummary& summary, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

  {
    const auto path = dir / "log.csv";
    auto out = open_out(path);
    const auto cols = log_columns(log);
    for (size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
    out << '\n';
    for (const auto& r : log.records) {
      std::vector<std::string> row = {std::to_string(r.cycle), fmt(r.t)};
      for (const auto* v : {&r.q, &r.qdot, &r.command, &r.accel}) {
        for (Eigen::Index k = 0; k < v->size(); ++k) row.push_back(fmt((*v)(k)));
      }
      for (Eigen::Index i = 0; i < r.psi.rows(); ++i) {
        for (Eigen::Index j = 0; j < r.psi.cols(); ++j) row.push_back(fmt(r.psi(i, j)));
      }
      for (Eigen::Index k = 0; k < r.p.size(); ++k) row.push_back(fmt(r.p(k)));
      for (double v : {r.d_min, r.d_torso, r.hand.x(), r.hand.y(), r.hand.z(), r.position_error,
                       r.orientation_error, r.extension}) {
        row.push_back(fmt(v));
      }
      row.push_back(std::to_string(r.mode));
      for (Eigen::Index k = 0; k < r.task_residuals.size(); ++k) row.push_back(fmt(r.task_residuals(k)));
      row.push_back(fmt(r.kkt));
      row.push_back(fmt(r.velocity_excess));
      for (size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << row[k];
      out << '\n';
    }
    close_checked(out, path);
  }

  {
    const auto path = dir / "timing.csv";
    auto out = open_out(path);
    const auto cols = timing_columns(log);
    for (size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
    out << '\n';
    for (const auto& r : log.records) {
      out << r.cycle << ',' << fmt(r.t) << ',' << fmt(r.solve_seconds);
      for (Eigen::Index k = 0; k < r.level_seconds.size(); ++k) out << ',' << fmt(r.level_seconds(k));
      for (Eigen::Index k = 0; k < r.level_iterations.size(); ++k) out << ',' << r.level_iterations(k);
      out << '\n';
    }
    close_checked(out, path);
  }

  {
    const auto path = dir / "summary.json";
    auto out = open_out(path);
    auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string("null"); };
    auto quoted = [](const std::string& s) { return nlohmann::json(s).dump(); };
    out << "{\n";
    out << "  \"schema_version\": 1,\n";
    out << "  \"scenario\": " << quoted(log.scenario) << ",\n";
    out << "  \"mode\": " << quoted(log.mode) << ",\n";
    out << "  \"dt\": " << fmt(log.dt) << ",\n";
    out << "  \"dof\": " << log.dof << ",\n";
    out << "  \"levels\": " << log.levels << ",\n";
    out << "  \"tasks\": " << log.tasks << ",\n";
    out << "  \"candidates\": [";
    for (size_t k = 0; k < log.candidate_labels.size(); ++k) {
      out << (k ? ", " : "") << quoted(log.candidate_labels[k]);
    }
    out << "],\n";
    out << "  \"cycles\": " << summary.cycles << ",\n";
    out << "  \"max_orientation_error\": " << fmt(summary.max_orientation_error) << ",\n";
    out << "  \"max_position_error\": " << fmt(summary.max_position_error) << ",\n";
    out << "  \"integrated_position_error\": " << fmt(summary.integrated_position_error) << ",\n";
    out << "  \"min_d_min\": " << fmt(summary.min_d_min) << ",\n";
    out << "  \"min_d_torso\": " << fmt(summary.min_d_torso) << ",\n";
    out << "  \"mean_solve_seconds\": " << fmt(summary.mean_solve_seconds) << ",\n";
    out << "  \"max_solve_seconds\": " << fmt(summary.max_solve_seconds) << ",\n";
    out << "  \"mean_solve_seconds_transition\": " << fmt(summary.mean_solve_seconds_transition) << ",\n";
    out << "  \"mean_solve_seconds_steady\": " << fmt(summary.mean_solve_seconds_steady) << ",\n";
    out << "  \"transition_cycles\": " << summary.transition_cycles << ",\n";
    out << "  \"max_velocity_jump\": " << fmt(summary.max_velocity_jump) << ",\n";
    out << "  \"max_velocity_jump_transition\": " << fmt(summary.max_velocity_jump_transition) << ",\n";
    out << "  \"max_velocity_jump_steady\": " << fmt(summary.max_velocity_jump_steady) << ",\n";
    out << "  \"max_kkt\": " << fmt(summary.max_kkt) << ",\n";
    out << "  \"max_velocity_excess\": " << fmt(summary.max_velocity_excess) << ",\n";
    out << "  \"final_position_error\": " << fmt(summary.final_position_error) << ",\n";
    out << "  \"obstacle_departure_time\": " << opt(summary.obstacle_departure_time) << ",\n";
    out << "  \"recovery_time\": " << opt(summary.recovery_time) << ",\n";
    out << "  \"vertices_reached\": [";
    for (size_t k = 0; k < summary.vertices_reached.size(); ++k) {
      out << (k ? ", " : "") << quoted(summary.vertices_reached[k]);
    }
    out << "]\n}\n";
    close_checked(out, path);
  }

  write_plot(dir / "plot_proportions.csv", log,
             log.candidate_labels, [](const CycleRecord& r) { return to_std(r.p); });
  std::vector<std::string> joints;
  add_indexed(joints, "joint_", log.dof);
  write_plot(dir / "plot_joint_velocity.csv", log, joints,
             [](const CycleRecord& r) { return to_std(r.command); });
  write_plot(dir / "plot_joint_acceleration.csv", log, joints,
             [](const CycleRecord& r) { return to_std(r.accel); });
  write_plot(dir / "plot_hand_position.csv", log, {"x", "y", "z", "position_error"},
             [](const CycleRecord& r) {
               return std::vector<double>{r.hand.x(), r.hand.y(), r.hand.z(), r.position_error};
             });
  write_plot(dir / "plot_min_distance.csv", log, {"d_min", "d_torso"},
             [](const CycleRecord& r) { return std::vector<double>{r.d_min, r.d_torso}; });
  write_plot(dir / "plot_orientation_error.csv", log, {"orientation_error"},
             [](const CycleRecord& r) { return std::vector<double>{r.orientation_error}; });
  write_plot(dir / "plot_solve_time.csv", log, {"solve_seconds"},
             [](const CycleRecord& r) { return std::vector<double>{r.solve_seconds}; });
}

namespace {

struct Table {
  std::vector<std::string> header;
  std::map<std::string, size_t> index;
  std::vector<std::vector<double>> rows;
};

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": missing header");
  t.header = split(line, ',');
  for (size_t k = 0; k < t.header.size(); ++k) t.index[t.header[k]] = k;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != t.header.size()) {
      throw IoError(path.string() + ": row has " + std::to_string(fields.size()) +
                    " fields, header has " + std::to_string(t.header.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_double(f, path));
    t.rows.push_back(std::move(row));
  }
  return t;
}

int count_prefix(const Table& t, const std::string& prefix) {
  int n = 0;
  while (t.index.count(prefix + std::to_string(n))) ++n;
  return n;
}

}  // namespace

RunLog read_log(const std::filesystem::path& dir_or_csv) {
  const bool is_dir = std::filesystem::is_directory(dir_or_csv);
  const auto csv = is_dir ? dir_or_csv / "log.csv" : dir_or_csv;
  const auto base = csv.parent_path();
  const Table t = read_table(csv);

  RunLog log;
  log.dof = count_prefix(t, "q_");
  log.candidates = count_prefix(t, "p_");
  log.tasks = count_prefix(t, "residual_");
  while (t.index.count("psi_" + std::to_string(log.levels + 1) + "_1")) ++log.levels;

  const auto summary_path = base / "summary.json";
  if (std::filesystem::exists(summary_path)) {
    std::ifstream in(summary_path);
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw IoError(summary_path.string() + ": invalid JSON");
    log.scenario = j.value("scenario", "");
    log.mode = j.value("mode", "");
    log.dt = j.value("dt", 0.0);
    log.candidate_labels = j.value("candidates", std::vector<std::string>{});
  }

  auto col = [&](const std::string& name) {
    const auto it = t.index.find(name);
    if (it == t.index.end()) throw IoError(csv.string() + ": missing column '" + name + "'");
    return it->second;
  };
  auto vec = [&](const std::vector<double>& row, const std::string& prefix, int n) {
    Eigen::VectorXd v(n);
    for (int k = 0; k < n; ++k) v(k) = row[col(prefix + std::to_string(k))];
    return v;
  };

  for (const auto& row : t.rows) {
    CycleRecord r;
    r.cycle = static_cast<int>(row[col("cycle")]);
    r.t = row[col("t")];
    r.q = vec(row, "q_", log.dof);
    r.qdot = vec(row, "qdot_", log.dof);
    r.command = vec(row, "cmd_", log.dof);
    r.accel = vec(row, "accel_", log.dof);
    r.psi.resize(log.levels, log.tasks);
    for (int i = 0; i < log.levels; ++i) {
      for (int j = 0; j < log.tasks; ++j) {
        r.psi(i, j) = row[col("psi_" + std::to_string(i + 1) + "_" + std::to_string(j + 1))];
      }
    }
    r.p = vec(row, "p_", log.candidates);
    r.d_min = row[col("d_min")];
    r.d_torso = row[col("d_torso")];
    r.hand = Eigen::Vector3d(row[col("hand_x")], row[col("hand_y")], row[col("hand_z")]);
    r.position_error = row[col("position_error")];
    r.orientation_error = row[col("orientation_error")];
    r.extension = row[col("extension")];
    r.mode = static_cast<int>(row[col("mode")]);
    r.task_residuals = vec(row, "residual_", log.tasks);
    r.kkt = row[col("kkt")];
    r.velocity_excess = row[col("velocity_excess")];
    log.records.push_back(std::move(r));
  }
  if (log.dt == 0.0 && log.records.size() > 1) log.dt = log.records[1].t - log.records[0].t;

  const auto timing_path = base / "timing.csv";
  if (std::filesystem::exists(timing_path)) {
    const Table tt = read_table(timing_path);
    if (tt.rows.size() == log.records.size()) {
      const int levels = count_prefix(tt, "level_seconds_");
      for (size_t k = 0; k < tt.rows.size(); ++k) {
        auto& r = log.records[k];
        const auto& row = tt.rows[k];
        r.solve_seconds = row[tt.index.at("solve_seconds")];
        r.level_seconds.resize(levels);
        r.level_iterations.resize(levels);
        for (int l = 0; l < levels; ++l) {
          r.level_seconds(l) = row[tt.index.at("level_seconds_" + std::to_string(l))];
          r.level_iterations(l) = static_cast<int>(row[tt.index.at("level_iterations_" + std::to_string(l))]);
        }
      }
    }
  }
  return log;
}

DivergenceReport compare_runs(const RunLog& a, const RunLog& b, double threshold) {
  if (a.records.size() != b.records.size()) {
    throw DimensionError("compare_runs: logs have " + std::to_string(a.records.size()) + " and " +
                         std::to_string(b.records.size()) + " cycles");
  }
  if (a.dof != b.dof) throw DimensionError("compare_runs: logs differ in joint count");
  if (a.dt != 0.0 && b.dt != 0.0 && std::abs(a.dt - b.dt) > 1e-15) {
    throw DimensionError("compare_runs: logs differ in dt");
  }
  DivergenceReport rep;
  rep.cycles = static_cast<int>(a.records.size());
  for (size_t k = 0; k < a.records.size(); ++k) {
    const auto& ra = a.records[k];
    const auto& rb = b.records[k];
    const double dc = a.dof ? (ra.command - rb.command).cwiseAbs().maxCoeff() : 0.0;
    const double dq = a.dof ? (ra.q - rb.q).cwiseAbs().maxCoeff() : 0.0;
    rep.command_diff.push_back(dc);
    rep.q_diff.push_back(dq);
    rep.max_command_diff = std::max(rep.max_command_diff, dc);
    rep.max_q_diff = std::max(rep.max_q_diff, dq);
    if (rep.first_exceeding < 0 && std::max(dc, dq) > threshold) rep.first_exceeding = ra.cycle;
  }
  return rep;
}

}  // namespace rhp_hqp
