#pragma once

// Multi-layer GENet cascades: pipeline parsing, sequential fitting,
// transformation and the versioned binary model container.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "genet/layers.hpp"

namespace genet {

struct CascadeSpec {
  std::vector<LayerSpec> layers;
  std::string source_text;

  /// Canonical pipeline text, e.g. "PCA+MFA(100,40)".
  [[nodiscard]] std::string canonical() const;
};

/// Parses `NAME(+NAME)*(d1,...,dk)` with names PCA/LDA/MFA in any case.
/// Whitespace around tokens is ignored. Throws ParseError.
[[nodiscard]] CascadeSpec parse_pipeline(std::string_view text);

struct MfaParams {
  std::size_t k1 = 10;
  std::size_t k2 = 500;
};

struct CascadeReport {
  std::vector<LayerReport> layers;
  std::vector<std::string> warnings;  ///< cascade-level notes (e.g. supervised first layer)

  friend bool operator==(const CascadeReport&, const CascadeReport&) = default;
};

struct CascadeModel {
  CascadeSpec spec;
  std::vector<LayerModel> layers;
  CascadeReport report;

  [[nodiscard]] std::size_t input_dim() const;
  [[nodiscard]] std::size_t output_dim() const;
};

/// Fits layer i on the output of layers 0..i-1. MFA layers without their own
/// k1/k2 take them from `mfa`. Errors are rethrown with the layer index.
[[nodiscard]] CascadeModel fit_cascade(const CascadeSpec& spec, const Mat& x,
                                       const LabelSet& labels, const MfaParams& mfa = {},
                                       const EmbeddingOptions& options = {});

[[nodiscard]] Mat transform_cascade(const CascadeModel& model, const Mat& x);

inline constexpr std::string_view kModelMagic{"GENET\0", 6};
inline constexpr std::uint16_t kModelFormatVersion = 1;

[[nodiscard]] std::string save_model(const CascadeModel& model);
[[nodiscard]] CascadeModel load_model(std::string_view bytes);

void save_model_file(const CascadeModel& model, const std::string& path);
[[nodiscard]] CascadeModel load_model_file(const std::string& path);

}  // namespace genet
