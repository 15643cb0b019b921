#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "geospin/config.hpp"
#include "geospin/errors.hpp"

// Deterministic result emission. Numbers are written with %.17g so files
// round-trip exactly and repeated runs are byte identical; nothing time or
// environment dependent may enter an emitted file.

namespace geospin {

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells) {
    if (cells.size() != columns.size())
      throw invariant_error("row width does not match table '" + name + "'");
    rows.push_back(std::move(cells));
  }
};

enum class FeasibilityVerdict { PASS, MARGINAL, FAIL };

inline const char* verdict_name(FeasibilityVerdict v) {
  switch (v) {
    case FeasibilityVerdict::PASS: return "PASS";
    case FeasibilityVerdict::MARGINAL: return "MARGINAL";
    case FeasibilityVerdict::FAIL: return "FAIL";
  }
  return "?";
}

struct FeasibilityReport {
  FeasibilityVerdict verdict = FeasibilityVerdict::PASS;
  double total_ps = 0.0;
  double t_relax_ps = 0.0;
  double ratio = 0.0;
};

struct RunReport {
  std::string kind;
  std::string config_echo;
  std::string config_hash;
  std::string convention;
  std::vector<std::string> summary;   // human-readable result lines
  std::vector<Table> tables;
  std::vector<std::string> warnings;
  std::optional<FeasibilityReport> feasibility;
  int point_errors = 0;
  std::vector<std::string> files_written;
  double wall_seconds = 0.0;  // stdout only, never serialized
};

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::error_code ec;
  std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream f(p, std::ios::binary);  // binary: fixed newlines everywhere
  if (!f) throw io_error("cannot open output file '" + p.string() + "'");
  return f;
}

inline void check_stream(const std::ofstream& f, const std::filesystem::path& p) {
  if (!f) throw io_error("write failed for '" + p.string() + "'");
}

}  // namespace detail

// CSV: comment line with the config hash, header row, data rows. '.' decimal
// point comes with the C locale formatting used throughout.
inline void write_csv(const std::filesystem::path& path, const Table& t,
                      const std::string& config_hash) {
  auto f = detail::open_out(path);
  f << "# config_hash=" << config_hash << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    f << (i ? "," : "") << t.columns[i];
  f << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      f << (i ? "," : "") << row[i];
    f << "\n";
  }
  detail::check_stream(f, path);
}

// Two-column whitespace table, gnuplot friendly.
inline void write_plot(const std::filesystem::path& path,
                       const std::vector<double>& x,
                       const std::vector<double>& y, const std::string& x_label,
                       const std::string& y_label,
                       const std::string& config_hash) {
  if (x.size() != y.size()) throw invariant_error("plot columns differ in length");
  auto f = detail::open_out(path);
  f << "# config_hash=" << config_hash << "\n";
  f << "# " << x_label << "  " << y_label << "\n";
  for (std::size_t i = 0; i < x.size(); ++i)
    f << format_full(x[i]) << " " << format_full(y[i]) << "\n";
  detail::check_stream(f, path);
}

inline void write_text(const std::filesystem::path& path,
                       const std::vector<std::string>& lines,
                       const std::string& config_hash) {
  auto f = detail::open_out(path);
  f << "# config_hash=" << config_hash << "\n";
  for (const auto& l : lines) f << l << "\n";
  detail::check_stream(f, path);
}

}  // namespace geospin
