#pragma once

// Graph embedding primitives: intrinsic/penalty graph builders for PCA, LDA
// and Marginal Fisher Analysis, graph Laplacians, and the linearized
// graph-preserving eigenproblem that turns a graph pair into a projection.

#include <Eigen/SparseCore>

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <span>
#include <string>
#include <vector>

#include "genet/matrix.hpp"

namespace genet {

/// Class label per sample. Ids are contiguous 1..num_classes() and every
/// class has at least one member.
class LabelSet {
 public:
  LabelSet() = default;

  /// Validates that `ids` only uses 1..max(ids) and leaves no class empty.
  static LabelSet from_ids(std::vector<int> ids);

  /// Maps arbitrary raw labels to 1..Nc in order of first appearance.
  static LabelSet remap(std::span<const long long> raw);

  [[nodiscard]] std::size_t size() const noexcept { return ids_.size(); }
  [[nodiscard]] bool empty() const noexcept { return ids_.empty(); }
  [[nodiscard]] int num_classes() const noexcept { return static_cast<int>(members_.size()); }
  [[nodiscard]] int operator[](std::size_t i) const { return ids_[i]; }
  [[nodiscard]] const std::vector<int>& ids() const noexcept { return ids_; }

  /// Sample indices of class `c` (1-based id), ascending.
  [[nodiscard]] const std::vector<std::size_t>& members(int c) const {
    return members_.at(static_cast<std::size_t>(c - 1));
  }
  [[nodiscard]] std::size_t class_size(int c) const { return members(c).size(); }

  friend bool operator==(const LabelSet& a, const LabelSet& b) { return a.ids_ == b.ids_; }

 private:
  std::vector<int> ids_;
  std::vector<std::vector<std::size_t>> members_;
};

/// How a graph pair turns into an optimization over projection directions.
enum class Criterion {
  /// Maximize w^T X L X^T w subject to w^T w = 1 (B is the identity acting on
  /// directions, as for PCA).
  MaximizeVariance,
  /// Minimize w^T X L X^T w subject to w^T X B X^T w = const.
  MinimizeRatio,
};

struct GraphPair {
  Mat W;  ///< N x N intrinsic similarity, symmetric, zero diagonal
  Mat B;  ///< N x N constraint: identity or a penalty Laplacian
  Criterion criterion = Criterion::MinimizeRatio;
  /// Extra cap on the embedding dimension (LDA: Nc - 1).
  std::optional<std::size_t> max_dim;
};

struct Laplacian {
  Mat D;
  Mat L;
};

/// D_ii = sum_{j != i} W_ij, L = D - W.
[[nodiscard]] Laplacian laplacian(const Mat& w);

/// W_ij = 1/N off the diagonal, B = I.
[[nodiscard]] GraphPair pca_graph(std::size_t n);

/// W_ij = 1/n_c for distinct same-class samples, B = I - ee^T/N.
[[nodiscard]] GraphPair lda_graph(const LabelSet& labels);

/// Same intrinsic graph as lda_graph() but with the between-class scatter
/// Laplacian as constraint, so X B X^T is S_B rather than the total scatter.
[[nodiscard]] GraphPair lda_between_graph(const LabelSet& labels);

/// Full table of squared Euclidean distances between the columns of `x`.
[[nodiscard]] Mat pairwise_sq_distances(const Mat& x);

/// Undirected unit-weight graph as a sorted list of (i, j) with i < j.
struct EdgeList {
  std::size_t nodes = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

[[nodiscard]] Mat to_dense(const EdgeList& graph);
[[nodiscard]] Eigen::SparseMatrix<double> sparse_laplacian(const EdgeList& graph);

/// Links i and j iff i is among the k1 nearest same-class neighbours of j or
/// the reverse. Distance ties go to the smaller sample index.
[[nodiscard]] EdgeList mfa_intrinsic_edges(const Mat& x, const LabelSet& labels, std::size_t k1);

/// For each class c, links the k2 closest pairs (i in c, j not in c). Ties
/// are ordered by (i, j).
[[nodiscard]] EdgeList mfa_penalty_edges(const Mat& x, const LabelSet& labels, std::size_t k2);

/// Dense adjacency of mfa_intrinsic_edges().
[[nodiscard]] Mat mfa_intrinsic_graph(const Mat& x, const LabelSet& labels, std::size_t k1);

/// Dense adjacency of mfa_penalty_edges().
[[nodiscard]] Mat mfa_penalty_graph(const Mat& x, const LabelSet& labels, std::size_t k2);

/// Builds the MFA graph pair: intrinsic kNN graph and penalty Laplacian.
[[nodiscard]] GraphPair mfa_graph(const Mat& x, const LabelSet& labels, std::size_t k1,
                                  std::size_t k2);

/// The two quadratic forms Z -> Z L Z^T and Z -> Z B Z^T of a graph pair,
/// evaluated on a (possibly reduced) data matrix Z whose columns are samples.
/// Layers use these instead of GraphPair so large N never needs N x N storage.
struct QuadraticForms {
  std::function<Mat(const Mat&)> intrinsic;
  std::function<Mat(const Mat&)> constraint;
  Criterion criterion = Criterion::MinimizeRatio;
  std::optional<std::size_t> max_dim;
  /// True when both L and B annihilate the ones vector, so a common offset of
  /// the samples does not change either form.
  bool translation_invariant = true;
};

[[nodiscard]] QuadraticForms forms_of(const GraphPair& graph);

/// S_W and S_B computed from class means; equal to the lda_between_graph()
/// forms without building any N x N matrix.
[[nodiscard]] QuadraticForms lda_forms(const LabelSet& labels);

/// MFA forms backed by sparse Laplacians of the kNN and penalty edge lists.
[[nodiscard]] QuadraticForms mfa_forms(const Mat& x, const LabelSet& labels, std::size_t k1,
                                       std::size_t k2);

struct EmbeddingOptions {
  double ridge = kDefaultRidge;
  /// Relative eigenvalue cutoff that defines the numerical rank of the data.
  double rank_tolerance = 1e-10;
};

struct Embedding {
  Mat projection;                    ///< m x d_actual
  std::vector<double> eigenvalues;   ///< one per projection column
  std::size_t requested_dim = 0;
  std::size_t actual_dim = 0;
  std::size_t reduced_dim = 0;       ///< dimension the eigenproblem was solved in
  double max_residual = 0.0;         ///< max ||A w - lambda M w|| over kept pairs
  double residual_scale = 1.0;       ///< 1 + ||A||_F + ||M||_F
  std::vector<std::string> warnings;
};

/// Orthonormal basis of the leading principal directions of the columns of
/// `centered` (which must already be centered), largest variance first.
/// Directions whose variance is below rank_tolerance * largest are dropped.
struct PrincipalBasis {
  Mat basis;                   ///< m x r
  std::vector<double> variances;  ///< eigenvalues of X X^T / N, descending
};
[[nodiscard]] PrincipalBasis principal_basis(const Mat& centered, std::size_t max_dim,
                                             double rank_tolerance = 1e-10);

/// Solves the linearized graph-preserving criterion for `d` directions.
///
/// The requested dimension is clamped to min(d, m, N - 1, graph.max_dim) and
/// to the numerical rank of the centered data; each clamp adds a warning.
/// For MinimizeRatio the data is first projected onto its principal subspace
/// when that subspace is smaller than m, and the result is composed back.
[[nodiscard]] Embedding solve_embedding(const Mat& x, const GraphPair& graph, std::size_t d,
                                        const EmbeddingOptions& options = {});

/// Same solver over precomputed quadratic forms.
[[nodiscard]] Embedding solve_embedding(const Mat& x, const QuadraticForms& forms, std::size_t d,
                                        const EmbeddingOptions& options = {});

}  // namespace genet
