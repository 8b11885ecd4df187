#include "genet/layers.hpp"

#include <algorithm>
#include <cmath>

namespace genet {

std::string_view to_string(LayerKind kind) noexcept {
  switch (kind) {
    case LayerKind::PCA: return "PCA";
    case LayerKind::LDA: return "LDA";
    case LayerKind::MFA: return "MFA";
  }
  return "?";
}

bool is_supervised(LayerKind kind) noexcept { return kind != LayerKind::PCA; }

void LayerSpec::validate() const {
  if (out_dim < 1) throw Error(ErrorCode::InvalidArgument, "layer out_dim must be >= 1");
  if (kind == LayerKind::MFA) {
    if ((k1 && *k1 < 1) || (k2 && *k2 < 1)) {
      throw Error(ErrorCode::InvalidArgument, "MFA needs k1 >= 1 and k2 >= 1");
    }
  } else if (k1 || k2) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(to_string(kind)) + " layer does not take k1/k2");
  }
}

namespace {

LayerFit fit_pca(const LayerSpec& spec, const Centered& c, const EmbeddingOptions& options) {
  const auto m = static_cast<std::size_t>(c.centered.rows());
  const auto n = static_cast<std::size_t>(c.centered.cols());
  LayerFit fit;
  fit.report.input_dim = m;
  fit.report.requested_dim = spec.out_dim;

  std::size_t cap = spec.out_dim;
  const char* reason = nullptr;
  if (m < cap) cap = m, reason = "input dimension";
  if (n - 1 < cap) cap = n - 1, reason = "N-1";

  PrincipalBasis pb = principal_basis(c.centered, cap, options.rank_tolerance);
  const auto keep = static_cast<std::size_t>(pb.basis.cols());
  if (keep == 0) throw Error(ErrorCode::DimensionTooLarge, "data has no variance to project on");
  if (keep < cap) reason = "numerical rank";
  if (reason != nullptr) {
    fit.report.warnings.push_back("requested dimension " + std::to_string(spec.out_dim) +
                                  " clamped to " + std::to_string(keep) + " (" + reason + ")");
  }

  // Residual of C u = lambda u without forming the m x m covariance.
  const double inv_n = 1.0 / static_cast<double>(n);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < pb.basis.cols(); ++j) {
    const Vec u = pb.basis.col(j);
    const Vec cu = c.centered * (c.centered.transpose() * u) * inv_n;
    worst = std::max(worst, (cu - pb.variances[static_cast<std::size_t>(j)] * u).norm());
  }
  // ||C||_F from whichever Gram form is smaller; both share the nonzero spectrum.
  const Mat gram = m <= n ? Mat(c.centered * c.centered.transpose())
                          : Mat(c.centered.transpose() * c.centered);
  fit.report.max_residual = worst;
  fit.report.residual_scale = 1.0 + gram.norm() * inv_n + std::sqrt(static_cast<double>(m));
  fit.report.solve_dim = std::min(m, n);

  fit.model.spec = spec;
  fit.model.mean = c.mean;
  fit.model.projection = std::move(pb.basis);
  fit.report.actual_dim = keep;
  return fit;
}

LayerFit fit_graph_layer(const LayerSpec& spec, const Mat& x, const Centered& c,
                         const QuadraticForms& forms, const EmbeddingOptions& options) {
  Embedding e = solve_embedding(c.centered, forms, spec.out_dim, options);
  LayerFit fit;
  fit.report.input_dim = static_cast<std::size_t>(x.rows());
  fit.report.requested_dim = spec.out_dim;
  fit.report.actual_dim = e.actual_dim;
  fit.report.solve_dim = e.reduced_dim;
  fit.report.max_residual = e.max_residual;
  fit.report.residual_scale = e.residual_scale;
  fit.report.warnings = std::move(e.warnings);
  fit.model.spec = spec;
  fit.model.mean = c.mean;
  fit.model.projection = std::move(e.projection);
  return fit;
}

}  // namespace

LayerFit fit_layer(const LayerSpec& spec, const Mat& x, const LabelSet& labels,
                   const EmbeddingOptions& options) {
  spec.validate();
  require_finite(x, "layer input");
  if (x.cols() < 2) throw Error(ErrorCode::TooFewSamples, "a layer needs at least two samples");
  if (is_supervised(spec.kind)) {
    if (labels.empty()) {
      throw Error(ErrorCode::LabelRequired,
                  std::string(to_string(spec.kind)) + " layer requires class labels");
    }
    if (labels.size() != static_cast<std::size_t>(x.cols())) {
      throw Error(ErrorCode::DimensionMismatch, "label count does not match sample count");
    }
  }
  const Centered c = center_columns(x);

  switch (spec.kind) {
    case LayerKind::PCA:
      return fit_pca(spec, c, options);
    case LayerKind::LDA:
      return fit_graph_layer(spec, x, c, lda_forms(labels), options);
    case LayerKind::MFA: {
      if (!spec.k1 || !spec.k2) {
        throw Error(ErrorCode::InvalidArgument, "MFA layer is missing k1/k2");
      }
      return fit_graph_layer(spec, x, c, mfa_forms(x, labels, *spec.k1, *spec.k2), options);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown layer kind");
}

Mat transform_layer(const LayerModel& model, const Mat& x) {
  if (x.rows() != model.mean.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "layer expects " + std::to_string(model.mean.size()) + " rows, got " +
                    std::to_string(x.rows()));
  }
  require_finite(x, "transform input");
  return model.projection.transpose() * (x.colwise() - model.mean);
}

}  // namespace genet
