#include "genet/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "genet/random.hpp"

namespace genet {

namespace {

void check_training_input(const Mat& y, const LabelSet& labels) {
  require_finite(y, "classifier features");
  if (static_cast<std::size_t>(y.cols()) != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "feature columns do not match label count");
  }
  if (labels.size() < 2) throw Error(ErrorCode::TooFewSamples, "classifier needs N >= 2");
  if (labels.num_classes() < 2) throw Error(ErrorCode::SingleClass, "classifier needs two classes");
}

struct BinaryResult {
  Vec w;  // feature weights followed by the bias
  std::size_t epochs = 0;
};

// Dual coordinate descent for min 1/2 |w|^2 + C sum max(0, 1 - y_i w^T x_i)
// over the bias-augmented features, 0 <= alpha_i <= C.
BinaryResult train_binary(const Mat& y, const std::vector<double>& sign, const SvmConfig& cfg,
                          std::uint64_t seed) {
  const Eigen::Index dim = y.rows();
  const std::size_t n = sign.size();
  BinaryResult out;
  out.w = Vec::Zero(dim + 1);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> qd(n);
  for (std::size_t i = 0; i < n; ++i) {
    qd[i] = y.col(static_cast<Eigen::Index>(i)).squaredNorm() + 1.0;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);

  double alpha_sum = 0.0;
  double previous = 0.0;
  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    for (std::size_t i : order) {
      const auto col = static_cast<Eigen::Index>(i);
      const double margin = out.w.head(dim).dot(y.col(col)) + out.w[dim];
      const double grad = sign[i] * margin - 1.0;
      double pg = grad;
      if (alpha[i] == 0.0) pg = std::min(grad, 0.0);
      else if (alpha[i] == cfg.cost) pg = std::max(grad, 0.0);
      if (std::abs(pg) <= 1e-12) continue;
      const double old = alpha[i];
      alpha[i] = std::clamp(old - grad / qd[i], 0.0, cfg.cost);
      const double step = (alpha[i] - old) * sign[i];
      out.w.head(dim) += step * y.col(col);
      out.w[dim] += step;
      alpha_sum += alpha[i] - old;
    }
    out.epochs = epoch + 1;
    const double dual = alpha_sum - 0.5 * out.w.squaredNorm();
    if (epoch > 0 && std::abs(dual - previous) < cfg.tolerance * std::max(1.0, std::abs(dual))) {
      break;
    }
    previous = dual;
  }
  return out;
}

}  // namespace

SvmModel svm_fit(const Mat& y, const LabelSet& labels, const SvmConfig& config) {
  check_training_input(y, labels);
  if (!(config.cost > 0.0) || !std::isfinite(config.cost)) {
    throw Error(ErrorCode::InvalidArgument, "SVM cost must be positive");
  }
  if (config.max_epochs < 1) throw Error(ErrorCode::InvalidArgument, "SVM needs max_epochs >= 1");

  const int nc = labels.num_classes();
  SvmModel model;
  model.config = config;
  model.center = Vec::Zero(y.rows());
  if (config.scaling == FeatureScaling::Rms) {
    model.center = y.rowwise().mean();
    const double rms = std::sqrt((y.colwise() - model.center).squaredNorm() /
                                 static_cast<double>(y.cols()));
    if (rms > 0.0) model.scale = rms;
  }
  const Mat z = svm_standardize(model, y);
  model.weights = Mat::Zero(y.rows(), nc);
  model.biases = Vec::Zero(nc);
  std::vector<double> sign(labels.size());
  for (int c = 1; c <= nc; ++c) {
    for (std::size_t i = 0; i < labels.size(); ++i) sign[i] = labels[i] == c ? 1.0 : -1.0;
    const BinaryResult r =
        train_binary(z, sign, config, derive_seed({config.seed, static_cast<std::uint64_t>(c)}));
    model.classes.push_back(c);
    model.weights.col(c - 1) = r.w.head(y.rows());
    model.biases[c - 1] = r.w[y.rows()];
    model.epochs.push_back(r.epochs);
  }
  return model;
}

Mat svm_standardize(const SvmModel& model, const Mat& y) {
  require_finite(y, "classifier features");
  if (model.center.size() == 0) return y;
  return (y.colwise() - model.center) / model.scale;
}

Mat svm_scores(const SvmModel& model, const Mat& y) {
  if (y.rows() != model.weights.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "SVM expects " + std::to_string(model.weights.rows()) + " features, got " +
                    std::to_string(y.rows()));
  }
  Mat scores = model.weights.transpose() * svm_standardize(model, y);
  scores.colwise() += model.biases;
  return scores;
}

namespace {

// Index order of `classes` ascending by id, so ties resolve to the smaller id.
std::vector<std::size_t> ascending_ids(const std::vector<int>& classes) {
  std::vector<std::size_t> order(classes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return classes[a] < classes[b]; });
  return order;
}

}  // namespace

std::vector<int> svm_predict(const SvmModel& model, const Mat& y) {
  const Mat scores = svm_scores(model, y);
  const auto order = ascending_ids(model.classes);
  std::vector<int> out(static_cast<std::size_t>(y.cols()));
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    std::size_t best = order.front();
    for (std::size_t k : order) {
      if (scores(static_cast<Eigen::Index>(k), j) > scores(static_cast<Eigen::Index>(best), j)) {
        best = k;
      }
    }
    out[static_cast<std::size_t>(j)] = model.classes[best];
  }
  return out;
}

double svm_primal_objective(const SvmModel& model, const Mat& y, const LabelSet& labels,
                            std::size_t class_index) {
  const auto k = static_cast<Eigen::Index>(class_index);
  const int c = model.classes.at(class_index);
  const Vec w = model.weights.col(k);
  const double b = model.biases[k];
  const Mat z = svm_standardize(model, y);
  double hinge = 0.0;
  for (Eigen::Index i = 0; i < z.cols(); ++i) {
    const double s = labels[static_cast<std::size_t>(i)] == c ? 1.0 : -1.0;
    hinge += std::max(0.0, 1.0 - s * (w.dot(z.col(i)) + b));
  }
  return 0.5 * (w.squaredNorm() + b * b) + model.config.cost * hinge;
}

std::string_view to_string(FeatureScaling scaling) noexcept {
  return scaling == FeatureScaling::Rms ? "rms" : "none";
}

FeatureScaling parse_feature_scaling(std::string_view text) {
  if (text == "rms") return FeatureScaling::Rms;
  if (text == "none") return FeatureScaling::None;
  throw Error(ErrorCode::InvalidArgument,
              "unknown feature scaling \"" + std::string(text) + "\" (expected rms or none)");
}

NearestMeanModel nearest_class_mean_fit(const Mat& y, const LabelSet& labels) {
  require_finite(y, "classifier features");
  if (static_cast<std::size_t>(y.cols()) != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "feature columns do not match label count");
  }
  NearestMeanModel model;
  model.means = Mat::Zero(y.rows(), labels.num_classes());
  for (int c = 1; c <= labels.num_classes(); ++c) {
    model.classes.push_back(c);
    for (std::size_t i : labels.members(c)) {
      model.means.col(c - 1) += y.col(static_cast<Eigen::Index>(i));
    }
    model.means.col(c - 1) /= static_cast<double>(labels.class_size(c));
  }
  return model;
}

std::vector<int> nearest_class_mean_predict(const NearestMeanModel& model, const Mat& y) {
  if (y.rows() != model.means.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "nearest-mean feature dimension mismatch");
  }
  const auto order = ascending_ids(model.classes);
  std::vector<int> out(static_cast<std::size_t>(y.cols()));
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    std::size_t best = order.front();
    double best_d = (y.col(j) - model.means.col(static_cast<Eigen::Index>(best))).squaredNorm();
    for (std::size_t k : order) {
      const double d = (y.col(j) - model.means.col(static_cast<Eigen::Index>(k))).squaredNorm();
      if (d < best_d) {
        best = k;
        best_d = d;
      }
    }
    out[static_cast<std::size_t>(j)] = model.classes[best];
  }
  return out;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorCode::DimensionMismatch, "prediction and truth lengths differ");
  }
  if (truth.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace genet
