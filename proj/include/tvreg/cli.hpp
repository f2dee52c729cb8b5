#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tvreg/dataset.hpp"
#include "tvreg/locstat.hpp"
#include "tvreg/select.hpp"
#include "tvreg/sim.hpp"
#include "tvreg/smooth.hpp"

namespace tvreg::cli {

/// Stable process exit codes.
enum ExitCode : int { kSuccess = 0, kParseError = 2, kNumericalError = 3, kConfigError = 4 };

enum class Command { Simulate, Study, Select, Fit, Bandwidths };
enum class Format { Csv, Json };

/// Lattice along one axis: `count` equally spaced points from lo to hi.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t count = 1;
  std::vector<double> points() const;
};

struct RunConfig {
  Command command = Command::Select;
  std::optional<std::string> input_path;
  std::optional<std::string> output_path;  // stdout when empty
  Format format = Format::Csv;
  std::uint64_t seed = 20150601;

  std::optional<std::vector<Interval>> region_x;
  std::optional<Interval> region_t;
  std::optional<BandwidthConstants> bandwidth_constants;
  std::optional<std::size_t> cv_folds;
  std::optional<std::vector<double>> c_grid;
  FoldStyle fold_style = FoldStyle::Interleaved;
  bool intercept = true;

  // study / simulate
  std::vector<Design> designs;
  std::vector<std::size_t> sizes;
  std::vector<double> noise;
  std::optional<std::size_t> replications;
  bool full_scale = false;

  // fit
  ModelKind model = ModelKind::I;
  std::vector<Axis> grid_x;
  std::optional<Axis> grid_t;

  // bandwidths without data
  std::optional<std::size_t> n;
  std::optional<std::vector<double>> iqr;
};

/// Parsed CSV input: a raw series (`date,value` header) or a regression
/// dataset (`y,x1,...,xd` header).
using Ingested = std::variant<std::vector<double>, Dataset>;

Ingested parse_csv(std::string_view text);
Ingested ingest_csv(const std::string& path);

/// Dataset from a CSV file; series input is differenced into (x, y).
Dataset load_dataset(const std::string& path);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

std::string dataset_to_csv(const Dataset& data);
std::string series_to_csv(std::span<const double> series);

std::string report_to_csv(const SelectionReport& report);
std::string report_to_json(const SelectionReport& report, const Region& region);
std::string study_to_csv(const std::vector<CellResult>& cells, const StudyGrid& grid);
std::string study_to_json(const std::vector<CellResult>& cells, const StudyGrid& grid);

/// Region used by `select` and `fit`: explicit overrides, otherwise the
/// central 95% range of each predictor and the time interval [0.2, 0.8].
Region resolve_region(const RunConfig& config, const Dataset& data);
BandwidthPlan resolve_plan(const RunConfig& config, const Dataset& data);
CvPlan resolve_cv(const RunConfig& config);
StudyGrid resolve_grid(const RunConfig& config);

/// Each command returns the serialized output; run() writes it.
std::string cmd_simulate(const RunConfig& config);
std::string cmd_study(const RunConfig& config, bool* within_budget = nullptr);
std::string cmd_select(const RunConfig& config);
std::string cmd_fit(const RunConfig& config);
std::string cmd_bandwidths(const RunConfig& config);

/// Dispatches a parsed config and writes the result; returns an ExitCode.
int run(const RunConfig& config);

/// Full command line entry point (argv[0] is the program name).
int main(int argc, const char* const* argv);

}  // namespace tvreg::cli
