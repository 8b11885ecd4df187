#pragma once

// Experiment runner: split -> cascade -> SVM -> accuracy over a grid of
// pipelines and split protocols, with JSON and text reports.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "genet/cascade.hpp"
#include "genet/classify.hpp"
#include "genet/dataset.hpp"

namespace genet {

inline constexpr int kReportFormatVersion = 1;

/// One grid column: a split mode and its per-class count.
struct SplitColumn {
  SplitMode mode = SplitMode::TrainPerClass;
  std::size_t per_class = 1;
  friend bool operator==(const SplitColumn&, const SplitColumn&) = default;
};

struct RunConfig {
  std::string data_path;
  DataFormat format = DataFormat::Csv;
  std::vector<std::string> pipelines;
  std::optional<std::size_t> k1;  ///< unset: dataset-name default
  std::optional<std::size_t> k2;
  std::vector<SplitColumn> columns;
  double svm_cost = 1.0;
  FeatureScaling svm_scaling = FeatureScaling::Rms;
  std::uint64_t seed = 0;
  std::size_t repeats = 10;

  /// Throws InvalidArgument / ParseError on an unusable configuration.
  void validate() const;
};

/// The eight pipelines of the reference experiments, with their dimensions.
[[nodiscard]] std::vector<std::string> default_pipelines();

/// k1/k2 defaults keyed on the dataset name: ORL 10/500, PIE/Pose 2/440,
/// Yale 10/500. Unknown names get MfaParams{}.
[[nodiscard]] MfaParams default_mfa_params(std::string_view dataset_name);

/// Grid columns for a named preset ("orl", "pie", "yale"); empty if unknown.
[[nodiscard]] std::vector<SplitColumn> preset_columns(std::string_view preset);

/// Preset name guessed from a dataset name, or empty.
[[nodiscard]] std::string preset_for_dataset(std::string_view dataset_name);

struct LayerSummary {
  std::string kind;
  std::size_t requested_dim = 0;
  std::vector<std::size_t> actual_dims;  ///< one per repeat
  double max_residual_ratio = 0.0;       ///< max residual / residual scale over repeats
  std::vector<std::string> warnings;     ///< distinct, in first-seen order
};

struct CellResult {
  std::string pipeline;  ///< canonical text
  SplitColumn column;
  std::vector<double> accuracies;  ///< one per completed repeat
  double mean = 0.0;
  double stddev = 0.0;  ///< sample standard deviation, 0 for one repeat
  std::vector<LayerSummary> layers;
  std::vector<std::string> warnings;
  std::optional<std::string> error;
  double seconds = 0.0;  ///< wall clock; kept out of the JSON report
};

struct DatasetInfo {
  std::string name;
  std::size_t dim = 0;
  std::size_t samples = 0;
  int classes = 0;
  std::size_t height = 0;
  std::size_t width = 0;
};

struct BenchReport {
  RunConfig config;
  MfaParams mfa;
  DatasetInfo dataset;
  std::vector<std::string> assumptions;
  std::vector<std::string> pipelines;  ///< canonical text, row order
  std::vector<SplitColumn> columns;
  std::vector<CellResult> cells;       ///< row-major: pipeline, then column

  [[nodiscard]] const CellResult& cell(std::size_t row, std::size_t col) const {
    return cells.at(row * columns.size() + col);
  }
  [[nodiscard]] bool ok() const;
};

/// Seed of the split protocol for one grid column.
[[nodiscard]] std::uint64_t column_seed(std::uint64_t run_seed, const SplitColumn& column);

/// Seed of the SVM for one cell and repeat; depends on the pipeline text
/// rather than its row so a cell gives the same result alone or in a grid.
[[nodiscard]] std::uint64_t cell_svm_seed(std::uint64_t run_seed, std::string_view pipeline,
                                          const SplitColumn& column, std::size_t repeat);

/// Runs every (pipeline, column) cell. Cell failures are recorded, not thrown.
/// If `model_out` is given, the model of the first cell's first repeat is
/// stored there (empty string when that fit failed).
[[nodiscard]] BenchReport run_grid(const Dataset& data, const RunConfig& config,
                                   std::string* model_out = nullptr);

/// Loads the dataset named by the config, then run_grid().
[[nodiscard]] BenchReport run_config(const RunConfig& config, std::string* model_out = nullptr);

/// Deterministic machine-readable report (no timings).
[[nodiscard]] std::string report_json(const BenchReport& report);
/// Wall-clock times per cell, kept separate so the report stays reproducible.
[[nodiscard]] std::string timings_json(const BenchReport& report);
/// Table with pipelines as rows and split columns as columns.
[[nodiscard]] std::string report_table(const BenchReport& report);

/// Reads the config echo of a report so the run can be repeated.
[[nodiscard]] RunConfig config_from_report(std::string_view report_json_text);

/// Human-readable description of a saved model.
[[nodiscard]] std::string inspect_model(const CascadeModel& model);

/// Summary of a dataset file for conversion checks.
[[nodiscard]] std::string describe_dataset(const Dataset& data);

[[nodiscard]] std::string to_string(const SplitColumn& column);
[[nodiscard]] std::string_view to_string(DataFormat format) noexcept;
[[nodiscard]] DataFormat parse_format(std::string_view text);

}  // namespace genet
