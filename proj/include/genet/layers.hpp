#pragma once

// PCA, LDA and MFA as fit/transform layers over the graph embedding solver.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "genet/graph.hpp"
#include "genet/matrix.hpp"

namespace genet {

enum class LayerKind { PCA, LDA, MFA };

[[nodiscard]] std::string_view to_string(LayerKind kind) noexcept;
[[nodiscard]] bool is_supervised(LayerKind kind) noexcept;

struct LayerSpec {
  LayerKind kind = LayerKind::PCA;
  std::size_t out_dim = 1;
  // Only meaningful for MFA; cascades fill them from the run configuration.
  std::optional<std::size_t> k1;
  std::optional<std::size_t> k2;

  /// Throws InvalidArgument when the spec breaks its invariants.
  void validate() const;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct LayerModel {
  LayerSpec spec;
  Vec mean;        ///< training mean of the layer input
  Mat projection;  ///< input_dim x out_dim_actual

  [[nodiscard]] std::size_t input_dim() const noexcept {
    return static_cast<std::size_t>(mean.size());
  }
  [[nodiscard]] std::size_t out_dim_actual() const noexcept {
    return static_cast<std::size_t>(projection.cols());
  }
};

/// Diagnostics gathered while fitting one layer.
struct LayerReport {
  std::size_t input_dim = 0;
  std::size_t requested_dim = 0;
  std::size_t actual_dim = 0;
  std::size_t solve_dim = 0;  ///< size of the eigenproblem actually solved
  double max_residual = 0.0;
  double residual_scale = 1.0;
  std::vector<std::string> warnings;

  friend bool operator==(const LayerReport&, const LayerReport&) = default;
};

struct LayerFit {
  LayerModel model;
  LayerReport report;
};

/// Fits one layer on the columns of `x`. `labels` may be empty for PCA.
[[nodiscard]] LayerFit fit_layer(const LayerSpec& spec, const Mat& x, const LabelSet& labels,
                                 const EmbeddingOptions& options = {});

/// Y = projection^T (X - mean 1^T).
[[nodiscard]] Mat transform_layer(const LayerModel& model, const Mat& x);

}  // namespace genet
