#include "genet/bench.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <sstream>

#include "genet/random.hpp"

namespace genet {

using Json = nlohmann::ordered_json;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool contains(std::string_view haystack, std::string_view needle) {
  return haystack.find(needle) != std::string_view::npos;
}

// FNV-1a, so seeds do not depend on std::hash.
std::uint64_t text_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void add_unique(std::vector<std::string>& list, const std::string& item) {
  if (std::find(list.begin(), list.end(), item) == list.end()) list.push_back(item);
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
  return buf;
}

}  // namespace

std::string to_string(const SplitColumn& column) {
  return SplitProtocol{column.mode, column.per_class, 0, 1}.describe();
}

std::string_view to_string(DataFormat format) noexcept {
  return format == DataFormat::Csv ? "csv" : "bin";
}

DataFormat parse_format(std::string_view text) {
  const std::string t = lower(text);
  if (t == "csv") return DataFormat::Csv;
  if (t == "bin" || t == "binary") return DataFormat::Binary;
  throw Error(ErrorCode::InvalidArgument, "unknown data format '" + std::string(text) + "'");
}

void RunConfig::validate() const {
  if (pipelines.empty()) throw Error(ErrorCode::InvalidArgument, "no pipeline given");
  for (const auto& p : pipelines) (void)parse_pipeline(p);
  if (columns.empty()) throw Error(ErrorCode::InvalidArgument, "no split protocol given");
  for (const auto& c : columns) {
    if (c.per_class < 1) throw Error(ErrorCode::InvalidArgument, "per-class count must be >= 1");
  }
  if (repeats < 1) throw Error(ErrorCode::InvalidArgument, "repeats must be >= 1");
  if (!(svm_cost > 0.0) || !std::isfinite(svm_cost)) {
    throw Error(ErrorCode::InvalidArgument, "SVM cost must be positive");
  }
  if ((k1 && *k1 < 1) || (k2 && *k2 < 1)) {
    throw Error(ErrorCode::InvalidArgument, "k1 and k2 must be >= 1");
  }
}

std::vector<std::string> default_pipelines() {
  return {"PCA+MFA+PCA+MFA(100,70,60,40)", "PCA+MFA(100,40)",
          "LDA+MFA+LDA+MFA(100,70,60,40)", "LDA+MFA(100,40)",
          "LDA+MFA+PCA+MFA(100,70,60,40)", "PCA+MFA+LDA+MFA(100,70,60,40)",
          "PCA+MFA+MFA(100,70,40)",        "LDA+MFA+MFA(100,70,40)"};
}

std::string preset_for_dataset(std::string_view dataset_name) {
  const std::string n = lower(dataset_name);
  if (contains(n, "orl")) return "orl";
  if (contains(n, "pie") || contains(n, "pose")) return "pie";
  if (contains(n, "yale")) return "yale";
  return {};
}

MfaParams default_mfa_params(std::string_view dataset_name) {
  const std::string preset = preset_for_dataset(dataset_name);
  if (preset == "pie") return {2, 440};
  if (preset == "orl" || preset == "yale") return {10, 500};
  return {};
}

std::vector<SplitColumn> preset_columns(std::string_view preset) {
  const std::string p = lower(preset);
  if (p == "orl") {
    std::vector<SplitColumn> cols;
    for (std::size_t k = 1; k <= 5; ++k) cols.push_back({SplitMode::TrainPerClass, k});
    return cols;
  }
  if (p == "pie") {
    return {{SplitMode::TestPerClass, 30}, {SplitMode::TestPerClass, 20},
            {SplitMode::TestPerClass, 10}};
  }
  if (p == "yale") return {{SplitMode::TestPerClass, 1}};
  return {};
}

std::uint64_t column_seed(std::uint64_t run_seed, const SplitColumn& column) {
  return derive_seed({run_seed, column.mode == SplitMode::TrainPerClass ? 1u : 2u,
                      static_cast<std::uint64_t>(column.per_class)});
}

std::uint64_t cell_svm_seed(std::uint64_t run_seed, std::string_view pipeline,
                            const SplitColumn& column, std::size_t repeat) {
  return derive_seed({column_seed(run_seed, column), text_hash(pipeline),
                      static_cast<std::uint64_t>(repeat)});
}

bool BenchReport::ok() const {
  return std::none_of(cells.begin(), cells.end(), [](const CellResult& c) { return c.error.has_value(); });
}

namespace {

CellResult run_cell(const Dataset& data, const CascadeSpec& spec, const SplitColumn& column,
                    const RunConfig& config, const MfaParams& mfa, std::string* model_out) {
  CellResult cell;
  cell.pipeline = spec.canonical();
  cell.column = column;
  for (const auto& layer : spec.layers) {
    LayerSummary s;
    s.kind = std::string(to_string(layer.kind));
    s.requested_dim = layer.out_dim;
    cell.layers.push_back(std::move(s));
  }
  const auto start = std::chrono::steady_clock::now();
  const SplitProtocol protocol{column.mode, column.per_class, column_seed(config.seed, column),
                               config.repeats};
  for (std::size_t r = 0; r < config.repeats; ++r) {
    try {
      const Split sp = split(data, protocol, r);
      const CascadeModel model = fit_cascade(spec, sp.train.x, sp.train.labels, mfa);
      if (model_out != nullptr && r == 0) *model_out = save_model(model);
      for (const auto& w : model.report.warnings) add_unique(cell.warnings, w);
      for (std::size_t i = 0; i < model.report.layers.size(); ++i) {
        const LayerReport& lr = model.report.layers[i];
        LayerSummary& s = cell.layers[i];
        s.actual_dims.push_back(lr.actual_dim);
        s.max_residual_ratio = std::max(s.max_residual_ratio, lr.max_residual / lr.residual_scale);
        for (const auto& w : lr.warnings) add_unique(s.warnings, w);
      }
      const Mat train_features = transform_cascade(model, sp.train.x);
      const Mat test_features = transform_cascade(model, sp.test.x);
      SvmConfig svm;
      svm.cost = config.svm_cost;
      svm.scaling = config.svm_scaling;
      svm.seed = cell_svm_seed(config.seed, cell.pipeline, column, r);
      const SvmModel classifier = svm_fit(train_features, sp.train.labels, svm);
      cell.accuracies.push_back(
          accuracy(svm_predict(classifier, test_features), sp.test.labels.ids()));
    } catch (const std::exception& e) {
      cell.error = "repeat " + std::to_string(r + 1) + ": " + e.what();
      break;
    }
  }
  if (!cell.accuracies.empty()) {
    double sum = 0.0;
    for (double a : cell.accuracies) sum += a;
    cell.mean = sum / static_cast<double>(cell.accuracies.size());
    if (cell.accuracies.size() > 1) {
      double sq = 0.0;
      for (double a : cell.accuracies) sq += (a - cell.mean) * (a - cell.mean);
      cell.stddev = std::sqrt(sq / static_cast<double>(cell.accuracies.size() - 1));
    }
  }
  cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return cell;
}

}  // namespace

BenchReport run_grid(const Dataset& data, const RunConfig& config, std::string* model_out) {
  config.validate();
  BenchReport report;
  report.config = config;
  report.dataset = {data.name,         data.dim(),    data.size(), data.labels.num_classes(),
                    data.height,       data.width};
  report.columns = config.columns;

  const MfaParams named = default_mfa_params(data.name);
  report.mfa = {config.k1.value_or(named.k1), config.k2.value_or(named.k2)};
  const std::string preset = preset_for_dataset(data.name);
  if (!config.k1 || !config.k2) {
    report.assumptions.push_back(
        "MFA k1=" + std::to_string(report.mfa.k1) + ", k2=" + std::to_string(report.mfa.k2) +
        (preset.empty() ? " from the generic default" : " from the " + preset + " dataset default"));
  }
  if (preset == "yale") {
    report.assumptions.push_back(
        "Yale B pipeline dimensions follow the shared pipeline list; no per-dataset "
        "dimensions are given for it");
  }
  if (preset == "pie") {
    report.assumptions.push_back("PIE variant used: " + data.name);
  }
  report.assumptions.push_back("headline accuracy is the mean over repeats");

  if (model_out != nullptr) model_out->clear();
  bool first = true;
  for (const auto& text : config.pipelines) {
    const CascadeSpec spec = parse_pipeline(text);
    report.pipelines.push_back(spec.canonical());
    for (const auto& column : config.columns) {
      report.cells.push_back(
          run_cell(data, spec, column, config, report.mfa, first ? model_out : nullptr));
      first = false;
    }
  }
  return report;
}

BenchReport run_config(const RunConfig& config, std::string* model_out) {
  config.validate();
  return run_grid(load_dataset(config.data_path, config.format), config, model_out);
}

namespace {

Json column_json(const SplitColumn& c) {
  return Json{{"mode", c.mode == SplitMode::TrainPerClass ? "train_per_class" : "test_per_class"},
              {"per_class", c.per_class}};
}

SplitColumn column_from_json(const Json& j) {
  const std::string mode = j.at("mode").get<std::string>();
  if (mode != "train_per_class" && mode != "test_per_class") {
    throw Error(ErrorCode::FormatError, "report: unknown split mode '" + mode + "'");
  }
  return {mode == "train_per_class" ? SplitMode::TrainPerClass : SplitMode::TestPerClass,
          j.at("per_class").get<std::size_t>()};
}

Json config_json(const RunConfig& c) {
  Json j;
  j["data"] = c.data_path;
  j["format"] = std::string(to_string(c.format));
  j["pipelines"] = c.pipelines;
  j["k1"] = c.k1 ? Json(*c.k1) : Json(nullptr);
  j["k2"] = c.k2 ? Json(*c.k2) : Json(nullptr);
  j["columns"] = Json::array();
  for (const auto& col : c.columns) j["columns"].push_back(column_json(col));
  j["svm_cost"] = c.svm_cost;
  j["svm_scaling"] = std::string(to_string(c.svm_scaling));
  j["seed"] = c.seed;
  j["repeats"] = c.repeats;
  return j;
}

}  // namespace

std::string report_json(const BenchReport& report) {
  Json j;
  j["format_version"] = kReportFormatVersion;
  j["config"] = config_json(report.config);
  const SvmConfig svm_defaults;
  j["fixed_settings"] = {{"svm_max_epochs", svm_defaults.max_epochs},
                         {"svm_tolerance", svm_defaults.tolerance},
                         {"ridge", kDefaultRidge}};
  j["dataset"] = {{"name", report.dataset.name},       {"dim", report.dataset.dim},
                  {"samples", report.dataset.samples}, {"classes", report.dataset.classes},
                  {"height", report.dataset.height},   {"width", report.dataset.width}};
  j["mfa"] = {{"k1", report.mfa.k1}, {"k2", report.mfa.k2}};
  j["assumptions"] = report.assumptions;
  j["columns"] = Json::array();
  for (const auto& c : report.columns) j["columns"].push_back(to_string(c));
  j["rows"] = Json::array();
  for (std::size_t r = 0; r < report.pipelines.size(); ++r) {
    Json row;
    row["pipeline"] = report.pipelines[r];
    row["cells"] = Json::array();
    for (std::size_t c = 0; c < report.columns.size(); ++c) {
      const CellResult& cell = report.cell(r, c);
      Json cj;
      cj["column"] = to_string(cell.column);
      cj["status"] = cell.error ? "error" : "ok";
      cj["mean"] = cell.mean;
      cj["stddev"] = cell.stddev;
      cj["accuracies"] = cell.accuracies;
      cj["layers"] = Json::array();
      for (const auto& l : cell.layers) {
        cj["layers"].push_back({{"kind", l.kind},
                                {"requested_dim", l.requested_dim},
                                {"actual_dims", l.actual_dims},
                                {"max_residual_ratio", l.max_residual_ratio},
                                {"warnings", l.warnings}});
      }
      cj["warnings"] = cell.warnings;
      cj["error"] = cell.error ? Json(*cell.error) : Json(nullptr);
      row["cells"].push_back(std::move(cj));
    }
    j["rows"].push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

std::string timings_json(const BenchReport& report) {
  Json j;
  j["format_version"] = kReportFormatVersion;
  j["cells"] = Json::array();
  for (const auto& cell : report.cells) {
    j["cells"].push_back(
        {{"pipeline", cell.pipeline}, {"column", to_string(cell.column)}, {"seconds", cell.seconds}});
  }
  return j.dump(2) + "\n";
}

RunConfig config_from_report(std::string_view report_json_text) {
  Json j;
  try {
    j = Json::parse(report_json_text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("report is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != kReportFormatVersion) {
      throw Error(ErrorCode::FormatError, "unsupported report format version");
    }
    const Json& c = j.at("config");
    RunConfig cfg;
    cfg.data_path = c.at("data").get<std::string>();
    cfg.format = parse_format(c.at("format").get<std::string>());
    cfg.pipelines = c.at("pipelines").get<std::vector<std::string>>();
    if (!c.at("k1").is_null()) cfg.k1 = c.at("k1").get<std::size_t>();
    if (!c.at("k2").is_null()) cfg.k2 = c.at("k2").get<std::size_t>();
    for (const auto& col : c.at("columns")) cfg.columns.push_back(column_from_json(col));
    cfg.svm_cost = c.at("svm_cost").get<double>();
    cfg.svm_scaling = parse_feature_scaling(c.at("svm_scaling").get<std::string>());
    cfg.seed = c.at("seed").get<std::uint64_t>();
    cfg.repeats = c.at("repeats").get<std::size_t>();
    cfg.validate();
    return cfg;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("report config is incomplete: ") + e.what());
  }
}

std::string report_table(const BenchReport& report) {
  std::vector<std::string> header{"pipeline"};
  for (const auto& c : report.columns) header.push_back(to_string(c));
  std::vector<std::vector<std::string>> rows;
  for (std::size_t r = 0; r < report.pipelines.size(); ++r) {
    std::vector<std::string> row{report.pipelines[r]};
    for (std::size_t c = 0; c < report.columns.size(); ++c) {
      const CellResult& cell = report.cell(r, c);
      row.push_back(cell.error ? std::string("ERROR") : percent(cell.mean));
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t k = 0; k < header.size(); ++k) {
    width[k] = header[k].size();
    for (const auto& row : rows) width[k] = std::max(width[k], row[k].size());
  }
  std::ostringstream out;
  out << "dataset " << report.dataset.name << " (" << report.dataset.samples << " samples, "
      << report.dataset.classes << " classes, dim " << report.dataset.dim << "), k1="
      << report.mfa.k1 << " k2=" << report.mfa.k2 << ", " << report.config.repeats
      << " repeats, seed " << report.config.seed << "\n";
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      out << (k == 0 ? "" : "  ") << row[k] << std::string(width[k] - row[k].size(), ' ');
    }
    out << "\n";
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  for (const auto& cell : report.cells) {
    if (cell.error) {
      out << "error in " << cell.pipeline << " / " << to_string(cell.column) << ": " << *cell.error
          << "\n";
    }
  }
  return out.str();
}

std::string inspect_model(const CascadeModel& model) {
  std::ostringstream out;
  out << "pipeline: " << model.spec.source_text << "\n";
  out << "canonical: " << model.spec.canonical() << "\n";
  out << "input dim: " << model.input_dim() << ", output dim: " << model.output_dim() << "\n";
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const LayerModel& layer = model.layers[i];
    const LayerReport& rep = model.report.layers.at(i);
    out << "layer " << i + 1 << ": " << to_string(layer.spec.kind) << " " << layer.input_dim()
        << " -> " << layer.out_dim_actual() << " (requested " << layer.spec.out_dim << ")";
    if (layer.spec.kind == LayerKind::MFA) {
      out << " k1=" << layer.spec.k1.value_or(0) << " k2=" << layer.spec.k2.value_or(0);
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", rep.max_residual / rep.residual_scale);
    out << ", relative residual " << buf << "\n";
    for (const auto& w : rep.warnings) out << "  warning: " << w << "\n";
  }
  for (const auto& w : model.report.warnings) out << "warning: " << w << "\n";
  return out.str();
}

std::string describe_dataset(const Dataset& data) {
  std::ostringstream out;
  out << "name: " << data.name << "\n";
  out << "image: " << data.height << "x" << data.width << " (dim " << data.dim() << ")\n";
  out << "samples: " << data.size() << ", classes: " << data.labels.num_classes() << "\n";
  std::size_t lo = data.size();
  std::size_t hi = 0;
  for (int c = 1; c <= data.labels.num_classes(); ++c) {
    lo = std::min(lo, data.labels.class_size(c));
    hi = std::max(hi, data.labels.class_size(c));
  }
  out << "samples per class: " << lo << ".." << hi << "\n";
  if (data.size() > 0) {
    out << "value range: " << data.x.minCoeff() << ".." << data.x.maxCoeff() << "\n";
  }
  return out.str();
}

}  // namespace genet
