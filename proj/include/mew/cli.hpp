#pragma once

// Command-line front end: config files, JSON/CSV reports and the
// analyze / verify / invariants / constraints / rescale commands.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mew/analyzer.hpp"

namespace mew::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kConfigError = 2, kExpressionError = 3 };

/// Contents of a run configuration file:
///
///   [structure]            u, P11, P12, P22 as double-quoted expressions
///   [region]               xmin, xmax, ymin, ymax, nx, ny
///   [points]               list = "x,y; x,y"
///   [tolerances]           tol_root, tol_res_low, tol_res_high, tol_residual, jet_order
///   [options]              mode = real|complex, orientation = +1|-1
struct RunConfig {
  std::string u = "0", p11 = "0", p12 = "0", p22 = "0";
  std::optional<GridSpec> region;
  std::vector<Point> points;
  Settings settings;
  Mode mode = Mode::Real;
  int orientation = 1;

  /// Parses the expressions; throws ExprError naming the offending field.
  MoebiusStructure structure() const;
  /// Region nodes followed by the explicit points.
  std::vector<Point> nodes() const;
  /// Throws ConfigError on an invalid region, tolerance or option.
  void validate() const;
};

/// Throws ConfigError for unreadable or malformed files.
RunConfig load_config(const std::string& path);
RunConfig parse_config(std::istream& in);

/// "x,y;x,y" with optional whitespace; throws ConfigError.
std::vector<Point> parse_points(std::string_view text);
Mode parse_mode(std::string_view text);
int parse_orientation(std::string_view text);

nlohmann::json to_json(const ResidualReport& r);
nlohmann::json to_json(const Verdict& v, Mode mode);
nlohmann::json to_json(const PointInvariants& inv);
nlohmann::json invariants_json(const MoebiusStructure& s, Point p, const Settings& settings);
nlohmann::json constraints_json(const MoebiusStructure& s, Point p, const Settings& settings);
nlohmann::json structure_json(const RunConfig& cfg);

/// The full analyze report and its CSV counterpart.
nlohmann::json report_json(const RunConfig& cfg, const RegionReport& report);
std::string grid_csv(const RegionReport& report);

/// Entry point of the mewcheck executable.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mew::cli
