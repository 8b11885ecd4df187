#pragma once

// One-vs-rest linear SVM over embedded features, a nearest-class-mean
// baseline, and accuracy.

#include <cstdint>
#include <string_view>
#include <vector>

#include "genet/graph.hpp"
#include "genet/matrix.hpp"

namespace genet {

/// Preprocessing of the features before the SVM sees them.
enum class FeatureScaling {
  None,  ///< raw features
  /// Centre on the training mean and divide by one scalar, the RMS distance of
  /// the training features to that mean. Isotropic, so the geometry is kept
  /// and only the effective cost changes.
  Rms,
};

struct SvmConfig {
  double cost = 1.0;
  FeatureScaling scaling = FeatureScaling::Rms;
  std::size_t max_epochs = 1000;
  /// Training stops once the dual objective changes by less than this
  /// (relative to max(1, |objective|)) over a full epoch.
  double tolerance = 1e-6;
  std::uint64_t seed = 0;

  friend bool operator==(const SvmConfig&, const SvmConfig&) = default;
};

struct SvmModel {
  std::vector<int> classes;  ///< class id per column of `weights`
  Mat weights;               ///< feature_dim x num_classes
  Vec biases;                ///< one per class
  Vec center;                ///< subtracted from features before scoring
  double scale = 1.0;        ///< features are divided by this after centring
  SvmConfig config;
  std::vector<std::size_t> epochs;  ///< epochs used per class

  [[nodiscard]] std::size_t feature_dim() const noexcept {
    return static_cast<std::size_t>(weights.rows());
  }
};

/// Trains one L2-regularized hinge-loss classifier per class (class vs rest)
/// by dual coordinate descent. The bias is learned as the weight of an extra
/// constant feature equal to 1.
[[nodiscard]] SvmModel svm_fit(const Mat& y, const LabelSet& labels, const SvmConfig& config = {});

/// Features as the weights see them: (y - center) / scale.
[[nodiscard]] Mat svm_standardize(const SvmModel& model, const Mat& y);

/// Per-class scores w_c^T z + b_c on the standardized features, num_classes x N.
[[nodiscard]] Mat svm_scores(const SvmModel& model, const Mat& y);

/// Argmax of the class scores; ties go to the smaller class id.
[[nodiscard]] std::vector<int> svm_predict(const SvmModel& model, const Mat& y);

/// Primal objective 1/2 ||w||^2 + 1/2 b^2 + C sum hinge for one class, on the
/// standardized features.
[[nodiscard]] double svm_primal_objective(const SvmModel& model, const Mat& y,
                                          const LabelSet& labels, std::size_t class_index);

struct NearestMeanModel {
  std::vector<int> classes;
  Mat means;  ///< feature_dim x num_classes
};

[[nodiscard]] NearestMeanModel nearest_class_mean_fit(const Mat& y, const LabelSet& labels);

/// Euclidean-nearest class mean; ties go to the smaller class id.
[[nodiscard]] std::vector<int> nearest_class_mean_predict(const NearestMeanModel& model,
                                                          const Mat& y);

/// Fraction of positions where predicted == truth. Empty input gives 0.
[[nodiscard]] std::string_view to_string(FeatureScaling scaling) noexcept;
[[nodiscard]] FeatureScaling parse_feature_scaling(std::string_view text);

[[nodiscard]] double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

}  // namespace genet
