// genet command-line front end: eval, bench, inspect, convert-check.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "genet/bench.hpp"

namespace {

struct CommonFlags {
  std::string data;
  std::string format;
  std::optional<std::size_t> k1;
  std::optional<std::size_t> k2;
  double svm_cost = 1.0;
  std::string svm_scaling = "rms";
  std::uint64_t seed = 0;
  std::size_t repeats = 10;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--data", f.data, "Dataset file")->required()->envname("GENET_DATA");
  cmd->add_option("--format", f.format, "csv or bin (default: from the file extension)")
      ->check(CLI::IsMember({"csv", "bin"}, CLI::ignore_case))
      ->envname("GENET_FORMAT");
  cmd->add_option("--k1", f.k1, "MFA same-class neighbours")->envname("GENET_K1");
  cmd->add_option("--k2", f.k2, "MFA between-class pairs per class")->envname("GENET_K2");
  cmd->add_option("--svm-cost", f.svm_cost, "SVM cost C")->envname("GENET_SVM_COST");
  cmd->add_option("--svm-scaling", f.svm_scaling, "Feature scaling before the SVM: rms or none")
      ->check(CLI::IsMember({"rms", "none"}))
      ->envname("GENET_SVM_SCALING");
  cmd->add_option("--seed", f.seed, "Run seed")->envname("GENET_SEED");
  cmd->add_option("--repeats", f.repeats, "Random splits per cell")->envname("GENET_REPEATS");
  cmd->add_option("--out", f.out, "JSON report path")->envname("GENET_OUT");
}

genet::DataFormat resolve_format(const std::string& flag, const std::string& path) {
  if (!flag.empty()) return genet::parse_format(flag);
  const auto ext = std::filesystem::path(path).extension().string();
  return ext == ".bin" ? genet::DataFormat::Binary : genet::DataFormat::Csv;
}

genet::RunConfig base_config(const CommonFlags& f) {
  genet::RunConfig cfg;
  // Absolute, so the config echo in a report can be re-run from anywhere.
  cfg.data_path = std::filesystem::absolute(f.data).lexically_normal().string();
  cfg.format = resolve_format(f.format, f.data);
  cfg.k1 = f.k1;
  cfg.k2 = f.k2;
  cfg.svm_cost = f.svm_cost;
  cfg.svm_scaling = genet::parse_feature_scaling(f.svm_scaling);
  cfg.seed = f.seed;
  cfg.repeats = f.repeats;
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw genet::Error(genet::ErrorCode::IoError, "cannot write " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw genet::Error(genet::ErrorCode::IoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int finish(const genet::BenchReport& report, const std::string& out) {
  std::cout << genet::report_table(report);
  if (!out.empty()) {
    write_text(out, genet::report_json(report));
    write_text(out + ".timings.json", genet::timings_json(report));
  }
  return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cascaded graph-embedding layers with a linear SVM"};
  app.require_subcommand(1);

  // eval
  CommonFlags eval_flags;
  std::string pipeline;
  std::optional<std::size_t> eval_train;
  std::optional<std::size_t> eval_test;
  std::string model_out;
  auto* eval = app.add_subcommand("eval", "Fit and score one pipeline under one split protocol");
  add_common(eval, eval_flags);
  eval->add_option("--pipeline", pipeline, "e.g. \"PCA+MFA(100,40)\"")
      ->required()
      ->envname("GENET_PIPELINE");
  auto* train_opt = eval->add_option("--train-per-class", eval_train, "Training samples per class");
  auto* test_opt = eval->add_option("--test-per-class", eval_test, "Test samples per class");
  train_opt->excludes(test_opt);
  eval->add_option("--model-out", model_out, "Save the model fitted on the first split");

  // bench
  CommonFlags bench_flags;
  std::vector<std::string> pipelines;
  std::vector<std::size_t> bench_train;
  std::vector<std::size_t> bench_test;
  std::string preset;
  std::string rerun;
  auto* bench = app.add_subcommand("bench", "Run the pipeline x split grid");
  add_common(bench, bench_flags);
  bench->add_option("--pipeline", pipelines, "Pipeline (repeatable; default: the eight standard ones)");
  auto* btrain = bench->add_option("--train-per-class", bench_train, "Comma-separated counts")
                     ->delimiter(',');
  auto* btest =
      bench->add_option("--test-per-class", bench_test, "Comma-separated counts")->delimiter(',');
  btrain->excludes(btest);
  bench->add_option("--preset", preset, "Split columns preset: orl, pie or yale")
      ->check(CLI::IsMember({"orl", "pie", "yale"}, CLI::ignore_case))
      ->envname("GENET_PRESET");

  auto* again = app.add_subcommand("rerun", "Repeat the run described by a JSON report");
  again->add_option("report", rerun, "Report written by eval or bench")->required();
  std::string rerun_out;
  again->add_option("--out", rerun_out, "JSON report path");

  // inspect
  std::string model_path;
  auto* inspect = app.add_subcommand("inspect", "Summarize a saved model");
  inspect->add_option("model", model_path, "Model file")->required();

  // convert-check
  std::string check_data;
  std::string check_format;
  auto* check = app.add_subcommand("convert-check", "Validate a converted dataset file");
  check->add_option("--data", check_data, "Dataset file")->required()->envname("GENET_DATA");
  check->add_option("--format", check_format, "csv or bin")
      ->check(CLI::IsMember({"csv", "bin"}, CLI::ignore_case));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*eval) {
      genet::RunConfig cfg = base_config(eval_flags);
      cfg.pipelines = {pipeline};
      if (eval_test) {
        cfg.columns = {{genet::SplitMode::TestPerClass, *eval_test}};
      } else if (eval_train) {
        cfg.columns = {{genet::SplitMode::TrainPerClass, *eval_train}};
      } else {
        throw genet::Error(genet::ErrorCode::InvalidArgument,
                           "eval needs --train-per-class or --test-per-class");
      }
      std::string model_bytes;
      const auto report = genet::run_config(cfg, model_out.empty() ? nullptr : &model_bytes);
      if (!model_out.empty() && !model_bytes.empty()) write_text(model_out, model_bytes);
      return finish(report, eval_flags.out);
    }
    if (*bench) {
      genet::RunConfig cfg = base_config(bench_flags);
      cfg.pipelines = pipelines.empty() ? genet::default_pipelines() : pipelines;
      for (auto k : bench_train) cfg.columns.push_back({genet::SplitMode::TrainPerClass, k});
      for (auto k : bench_test) cfg.columns.push_back({genet::SplitMode::TestPerClass, k});
      const genet::Dataset data = genet::load_dataset(cfg.data_path, cfg.format);
      if (cfg.columns.empty()) {
        const std::string name = preset.empty() ? genet::preset_for_dataset(data.name) : preset;
        cfg.columns = genet::preset_columns(name);
        if (cfg.columns.empty()) {
          throw genet::Error(genet::ErrorCode::InvalidArgument,
                             "no split columns: pass --train-per-class, --test-per-class or --preset");
        }
      }
      return finish(genet::run_grid(data, cfg), bench_flags.out);
    }
    if (*again) {
      const genet::RunConfig cfg = genet::config_from_report(read_text(rerun));
      return finish(genet::run_config(cfg), rerun_out);
    }
    if (*inspect) {
      std::cout << genet::inspect_model(genet::load_model_file(model_path));
      return 0;
    }
    if (*check) {
      const auto data = genet::load_dataset(check_data, resolve_format(check_format, check_data));
      std::cout << genet::describe_dataset(data) << "ok\n";
      return 0;
    }
  } catch (const genet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
