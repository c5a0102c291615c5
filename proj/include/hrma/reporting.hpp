#pragma once

// Output plumbing: CSV tables, hand-written SVG figures, and the Cauchy-data
// config format with its builtin examples.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hrma/format.hpp"
#include "hrma/ma_measure.hpp"
#include "hrma/toric_geometry.hpp"

namespace hrma::report {

/// A CSV table with one header row. Reals are written with format_real.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }

  /// Throws std::invalid_argument when the width differs from the header.
  void add_row(std::vector<std::string> cells);

  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline std::string cell(double v) { return format_real(v); }
inline std::string cell(bool v) { return v ? "true" : "false"; }
inline std::string cell(std::size_t v) { return std::to_string(v); }
inline std::string cell(int v) { return std::to_string(v); }

/// SVG canvas mapping a data box onto a fixed pixel frame (y axis upward).
class SvgFigure {
 public:
  SvgFigure(double width, double height, mass::Box data_box, std::string title = {});

  void polyline(std::span<const mass::Point> pts, std::string_view stroke, double stroke_width = 1.5);
  void rect(mass::Box box, std::string_view fill, double opacity = 1.0);
  void label(double t, double y, std::string_view text);

  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  double width_, height_;
  mass::Box box_;
  std::string title_;
  std::vector<std::string> body_;

  double px(double t) const;
  double py(double y) const;
};

/// Parse failure; `field` names the offending key (or "line N" for syntax).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Cauchy data plus the numerical knobs of a run.
struct RunConfig {
  toric::ToricCauchyData data;
  std::string name;
  std::size_t moment_nodes = 4097;
  std::size_t x_nodes = 241;
  std::size_t s_mesh = 400;
  std::size_t raster = 1024;
  std::optional<double> T;

  /// Throws ConfigError for grid sizes below 64 or non-positive T.
  void validate() const;
};

/// Builtin names accepted by `builtin`.
std::vector<std::string> builtin_names();
/// "fubini-study" or "p1xp1"; ConfigError("builtin") otherwise.
RunConfig builtin(std::string_view name);

/// Line-based `key = value` format; '#' starts a comment. See README.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace hrma::report
