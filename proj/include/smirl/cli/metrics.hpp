#pragma once

#include <charconv>
#include <deque>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "smirl/training/trainer.hpp"

namespace smirl::cli {

inline constexpr const char* kMetricsSchema = "# smirl-metrics v1";
inline constexpr const char* kMetricsColumns =
    "run_id,seed,episode,smirl_return,task_return,deaths,rows_cleared,falls,captures,steps_in_safe_room,epsilon,wall_ms";
inline constexpr const char* kRollingSchema = "# smirl-rolling v1";
inline constexpr const char* kRollingColumns =
    "run_id,seed,episode,window,smirl_return,task_return,deaths,rows_cleared,falls,captures,steps_in_safe_room";

/// Shortest decimal text that parses back to the same double.
inline std::string format_real(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline void write_metrics_header(std::ostream& out) { out << kMetricsSchema << '\n' << kMetricsColumns << '\n'; }

inline void write_metrics_row(std::ostream& out, const training::MetricsRow& r) {
  const auto& s = r.stats;
  out << r.run_id << ',' << r.seed << ',' << r.episode << ',' << format_real(s.smirl_return) << ','
      << format_real(s.task_return) << ',' << format_real(s.deaths) << ',' << format_real(s.rows_cleared) << ','
      << format_real(s.falls) << ',' << format_real(s.captures) << ',' << format_real(s.steps_in_safe_room) << ','
      << format_real(r.epsilon) << ',' << format_real(r.wall_ms) << '\n';
}

/// Means over the last `window` episodes, one row per episode.
class RollingWindow {
 public:
  explicit RollingWindow(std::size_t window = 100) : window_(window) {}

  void write_header(std::ostream& out) const { out << kRollingSchema << '\n' << kRollingColumns << '\n'; }

  void add(std::ostream& out, const training::MetricsRow& r) {
    rows_.push_back(r.stats);
    if (rows_.size() > window_) rows_.pop_front();
    training::EpisodeStats m;
    for (const auto& s : rows_) {
      m.smirl_return += s.smirl_return;
      m.task_return += s.task_return;
      m.deaths += s.deaths;
      m.rows_cleared += s.rows_cleared;
      m.falls += s.falls;
      m.captures += s.captures;
      m.steps_in_safe_room += s.steps_in_safe_room;
    }
    const double n = static_cast<double>(rows_.size());
    out << r.run_id << ',' << r.seed << ',' << r.episode << ',' << rows_.size() << ',' << format_real(m.smirl_return / n)
        << ',' << format_real(m.task_return / n) << ',' << format_real(m.deaths / n) << ','
        << format_real(m.rows_cleared / n) << ',' << format_real(m.falls / n) << ',' << format_real(m.captures / n)
        << ',' << format_real(m.steps_in_safe_room / n) << '\n';
  }

 private:
  std::size_t window_;
  std::deque<training::EpisodeStats> rows_;
};

/// Concatenates per-seed metrics files under one header.
inline void merge_metrics(const std::vector<std::string>& parts, const std::string& out_path) {
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
  write_metrics_header(out);
  for (const auto& p : parts) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot read '" + p + "'");
    std::string line;
    std::getline(in, line);
    if (line != kMetricsSchema) throw std::runtime_error(p + ": not a v1 metrics file");
    std::getline(in, line);
    while (std::getline(in, line)) out << line << '\n';
  }
}

}  // namespace smirl::cli
