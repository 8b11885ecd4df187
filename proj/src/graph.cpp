#include "genet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <memory>
#include <unordered_map>

namespace genet {

LabelSet LabelSet::from_ids(std::vector<int> ids) {
  LabelSet out;
  int max_id = 0;
  for (int id : ids) {
    if (id < 1) throw Error(ErrorCode::InvalidArgument, "class ids must be >= 1");
    max_id = std::max(max_id, id);
  }
  out.members_.resize(static_cast<std::size_t>(max_id));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out.members_[static_cast<std::size_t>(ids[i] - 1)].push_back(i);
  }
  for (std::size_t c = 0; c < out.members_.size(); ++c) {
    if (out.members_[c].empty()) {
      throw Error(ErrorCode::EmptyClass, "class " + std::to_string(c + 1) + " has no samples");
    }
  }
  out.ids_ = std::move(ids);
  return out;
}

LabelSet LabelSet::remap(std::span<const long long> raw) {
  std::unordered_map<long long, int> seen;
  std::vector<int> ids;
  ids.reserve(raw.size());
  for (long long v : raw) {
    auto [it, inserted] = seen.try_emplace(v, static_cast<int>(seen.size()) + 1);
    ids.push_back(it->second);
  }
  return from_ids(std::move(ids));
}

Laplacian laplacian(const Mat& w) {
  if (w.rows() != w.cols()) throw Error(ErrorCode::NonSquare, "laplacian: W is not square");
  require_finite(w, "laplacian W");
  if (!is_symmetric(w)) throw Error(ErrorCode::NonSymmetric, "laplacian: W is not symmetric");
  const Eigen::Index n = w.rows();
  Laplacian out;
  out.D = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) sum += w(i, j);
    }
    out.D(i, i) = sum;
  }
  out.L = out.D - w;
  // Eq. (1) sums over j != i, so any diagonal weight drops out of L entirely.
  for (Eigen::Index i = 0; i < n; ++i) out.L(i, i) = out.D(i, i);
  return out;
}

GraphPair pca_graph(std::size_t n) {
  if (n < 2) throw Error(ErrorCode::TooFewSamples, "pca_graph needs N >= 2");
  const auto size = static_cast<Eigen::Index>(n);
  GraphPair g;
  g.W = Mat::Constant(size, size, 1.0 / static_cast<double>(n));
  g.W.diagonal().setZero();
  g.B = Mat::Identity(size, size);
  g.criterion = Criterion::MaximizeVariance;
  return g;
}

namespace {

void require_multiclass(const LabelSet& labels, const char* what) {
  if (labels.size() < 2) throw Error(ErrorCode::TooFewSamples, std::string(what) + " needs N >= 2");
  if (labels.num_classes() < 2) {
    throw Error(ErrorCode::SingleClass, std::string(what) + " needs at least two classes");
  }
}

Mat lda_intrinsic(const LabelSet& labels) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  Mat w = Mat::Zero(n, n);
  for (int c = 1; c <= labels.num_classes(); ++c) {
    const auto& idx = labels.members(c);
    const double weight = 1.0 / static_cast<double>(idx.size());
    for (std::size_t a : idx) {
      for (std::size_t b : idx) {
        if (a != b) w(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = weight;
      }
    }
  }
  return w;
}

Mat centering_matrix(Eigen::Index n) {
  return Mat::Identity(n, n) - Mat::Constant(n, n, 1.0 / static_cast<double>(n));
}

}  // namespace

GraphPair lda_graph(const LabelSet& labels) {
  // A single class is a valid (if degenerate) graph; layers reject it.
  if (labels.size() < 2) throw Error(ErrorCode::TooFewSamples, "lda_graph needs N >= 2");
  GraphPair g;
  g.W = lda_intrinsic(labels);
  g.B = centering_matrix(static_cast<Eigen::Index>(labels.size()));
  g.criterion = Criterion::MinimizeRatio;
  g.max_dim = static_cast<std::size_t>(labels.num_classes() - 1);
  return g;
}

GraphPair lda_between_graph(const LabelSet& labels) {
  GraphPair g = lda_graph(labels);
  g.B -= laplacian(g.W).L;
  return g;
}

Mat pairwise_sq_distances(const Mat& x) {
  require_finite(x, "pairwise distance input");
  const Eigen::Index n = x.cols();
  Mat d = Mat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = (x.col(i) - x.col(j)).squaredNorm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

namespace {

void require_matching(const Mat& x, const LabelSet& labels) {
  if (static_cast<std::size_t>(x.cols()) != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "data has " + std::to_string(x.cols()) + " samples but " +
                    std::to_string(labels.size()) + " labels");
  }
  require_finite(x, "graph input");
}

double sq_distance(const Mat& x, std::size_t i, std::size_t j) {
  return (x.col(static_cast<Eigen::Index>(i)) - x.col(static_cast<Eigen::Index>(j))).squaredNorm();
}

void finalize(EdgeList& g) {
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
}

std::pair<std::size_t, std::size_t> ordered(std::size_t a, std::size_t b) {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

}  // namespace

Mat to_dense(const EdgeList& graph) {
  const auto n = static_cast<Eigen::Index>(graph.nodes);
  Mat w = Mat::Zero(n, n);
  for (auto [i, j] : graph.edges) {
    w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
    w(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = 1.0;
  }
  return w;
}

Eigen::SparseMatrix<double> sparse_laplacian(const EdgeList& graph) {
  std::vector<double> degree(graph.nodes, 0.0);
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(graph.edges.size() * 2 + graph.nodes);
  for (auto [i, j] : graph.edges) {
    degree[i] += 1.0;
    degree[j] += 1.0;
    entries.emplace_back(static_cast<int>(i), static_cast<int>(j), -1.0);
    entries.emplace_back(static_cast<int>(j), static_cast<int>(i), -1.0);
  }
  for (std::size_t i = 0; i < graph.nodes; ++i) {
    if (degree[i] != 0.0) entries.emplace_back(static_cast<int>(i), static_cast<int>(i), degree[i]);
  }
  const auto n = static_cast<Eigen::Index>(graph.nodes);
  Eigen::SparseMatrix<double> l(n, n);
  l.setFromTriplets(entries.begin(), entries.end());
  return l;
}

EdgeList mfa_intrinsic_edges(const Mat& x, const LabelSet& labels, std::size_t k1) {
  require_matching(x, labels);
  if (k1 < 1) throw Error(ErrorCode::InvalidArgument, "mfa_intrinsic_graph needs k1 >= 1");
  EdgeList g;
  g.nodes = labels.size();

  std::vector<std::size_t> order;
  for (int c = 1; c <= labels.num_classes(); ++c) {
    const auto& idx = labels.members(c);
    const auto nc = static_cast<Eigen::Index>(idx.size());
    Mat dist = Mat::Zero(nc, nc);
    for (Eigen::Index a = 0; a < nc; ++a) {
      for (Eigen::Index b = a + 1; b < nc; ++b) {
        dist(a, b) = dist(b, a) = sq_distance(x, idx[static_cast<std::size_t>(a)],
                                              idx[static_cast<std::size_t>(b)]);
      }
    }
    for (Eigen::Index a = 0; a < nc; ++a) {
      order.clear();
      for (Eigen::Index b = 0; b < nc; ++b) {
        if (b != a) order.push_back(static_cast<std::size_t>(b));
      }
      // Members are ascending, so local order matches sample-index order.
      const std::size_t take = std::min(k1, order.size());
      std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take),
                        order.end(), [&](std::size_t u, std::size_t v) {
                          const double du = dist(static_cast<Eigen::Index>(u), a);
                          const double dv = dist(static_cast<Eigen::Index>(v), a);
                          return du < dv || (du == dv && u < v);
                        });
      for (std::size_t t = 0; t < take; ++t) {
        g.edges.push_back(ordered(idx[static_cast<std::size_t>(a)], idx[order[t]]));
      }
    }
  }
  finalize(g);
  return g;
}

EdgeList mfa_penalty_edges(const Mat& x, const LabelSet& labels, std::size_t k2) {
  require_matching(x, labels);
  if (k2 < 1) throw Error(ErrorCode::InvalidArgument, "mfa_penalty_graph needs k2 >= 1");
  require_multiclass(labels, "mfa_penalty_graph");
  EdgeList g;
  g.nodes = labels.size();

  struct Pair {
    double dist;
    std::size_t inside;
    std::size_t outside;
  };
  const auto closer = [](const Pair& a, const Pair& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.inside != b.inside) return a.inside < b.inside;
    return a.outside < b.outside;
  };

  std::vector<Pair> pairs;
  for (int c = 1; c <= labels.num_classes(); ++c) {
    pairs.clear();
    for (std::size_t i : labels.members(c)) {
      for (std::size_t j = 0; j < labels.size(); ++j) {
        if (labels[j] != c) pairs.push_back({sq_distance(x, i, j), i, j});
      }
    }
    const std::size_t take = std::min(k2, pairs.size());
    std::partial_sort(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(take), pairs.end(),
                      closer);
    for (std::size_t t = 0; t < take; ++t) {
      g.edges.push_back(ordered(pairs[t].inside, pairs[t].outside));
    }
  }
  finalize(g);
  return g;
}

Mat mfa_intrinsic_graph(const Mat& x, const LabelSet& labels, std::size_t k1) {
  return to_dense(mfa_intrinsic_edges(x, labels, k1));
}

Mat mfa_penalty_graph(const Mat& x, const LabelSet& labels, std::size_t k2) {
  return to_dense(mfa_penalty_edges(x, labels, k2));
}

GraphPair mfa_graph(const Mat& x, const LabelSet& labels, std::size_t k1, std::size_t k2) {
  GraphPair g;
  g.W = mfa_intrinsic_graph(x, labels, k1);
  g.B = laplacian(mfa_penalty_graph(x, labels, k2)).L;
  g.criterion = Criterion::MinimizeRatio;
  return g;
}

namespace {

bool annihilates_ones(const Mat& a) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return a.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-10 * scale * static_cast<double>(a.cols());
}

Mat symmetrized(Mat f) { return 0.5 * (f + f.transpose()); }

}  // namespace

QuadraticForms forms_of(const GraphPair& graph) {
  if (graph.W.rows() != graph.B.rows() || graph.W.cols() != graph.B.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "graph W and B differ in size");
  }
  auto lap = std::make_shared<const Mat>(laplacian(graph.W).L);
  auto b = std::make_shared<const Mat>(graph.B);
  QuadraticForms f;
  f.intrinsic = [lap](const Mat& z) { return symmetrized(z * (*lap * z.transpose())); };
  f.constraint = [b](const Mat& z) { return symmetrized(z * (*b * z.transpose())); };
  f.criterion = graph.criterion;
  f.max_dim = graph.max_dim;
  f.translation_invariant = annihilates_ones(*lap) && annihilates_ones(*b);
  return f;
}

namespace {

// Column c-1 holds the mean of class c.
Mat class_means(const Mat& z, const LabelSet& labels) {
  Mat means = Mat::Zero(z.rows(), labels.num_classes());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    means.col(labels[i] - 1) += z.col(static_cast<Eigen::Index>(i));
  }
  for (int c = 1; c <= labels.num_classes(); ++c) {
    means.col(c - 1) /= static_cast<double>(labels.class_size(c));
  }
  return means;
}

}  // namespace

QuadraticForms lda_forms(const LabelSet& labels) {
  require_multiclass(labels, "lda_forms");
  auto shared = std::make_shared<const LabelSet>(labels);
  QuadraticForms f;
  f.intrinsic = [shared](const Mat& z) {
    const Mat means = class_means(z, *shared);
    Mat within = z;
    for (std::size_t i = 0; i < shared->size(); ++i) {
      within.col(static_cast<Eigen::Index>(i)) -= means.col((*shared)[i] - 1);
    }
    return symmetrized(within * within.transpose());
  };
  f.constraint = [shared](const Mat& z) {
    const Mat means = class_means(z, *shared);
    const Vec overall = z.rowwise().mean();
    Mat between = means.colwise() - overall;
    for (int c = 1; c <= shared->num_classes(); ++c) {
      between.col(c - 1) *= std::sqrt(static_cast<double>(shared->class_size(c)));
    }
    return symmetrized(between * between.transpose());
  };
  f.criterion = Criterion::MinimizeRatio;
  f.max_dim = static_cast<std::size_t>(labels.num_classes() - 1);
  return f;
}

QuadraticForms mfa_forms(const Mat& x, const LabelSet& labels, std::size_t k1, std::size_t k2) {
  auto intrinsic = std::make_shared<const Eigen::SparseMatrix<double>>(
      sparse_laplacian(mfa_intrinsic_edges(x, labels, k1)));
  auto penalty = std::make_shared<const Eigen::SparseMatrix<double>>(
      sparse_laplacian(mfa_penalty_edges(x, labels, k2)));
  QuadraticForms f;
  f.intrinsic = [intrinsic](const Mat& z) {
    return symmetrized(z * Mat(*intrinsic * z.transpose()));
  };
  f.constraint = [penalty](const Mat& z) { return symmetrized(z * Mat(*penalty * z.transpose())); };
  f.criterion = Criterion::MinimizeRatio;
  return f;
}

PrincipalBasis principal_basis(const Mat& centered, std::size_t max_dim, double rank_tolerance) {
  const Eigen::Index m = centered.rows();
  const Eigen::Index n = centered.cols();
  PrincipalBasis out;
  if (m == 0 || n == 0 || max_dim == 0) {
    out.basis = Mat(m, 0);
    return out;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  const bool gram_route = n < m;
  const Mat small = gram_route ? Mat(centered.transpose() * centered)
                               : Mat(centered * centered.transpose());
  const EigList spectrum = sym_eig(0.5 * (small + small.transpose()));
  const double top = std::max(spectrum.back().value, 0.0);
  const double cutoff = rank_tolerance * top;

  std::vector<Vec> columns;
  for (auto it = spectrum.rbegin(); it != spectrum.rend(); ++it) {
    if (columns.size() >= max_dim) break;
    if (!(it->value > cutoff) || top == 0.0) break;
    Vec u = gram_route ? Vec(centered * it->vector / std::sqrt(it->value)) : it->vector;
    u.normalize();
    canonicalize_sign(u);
    columns.push_back(std::move(u));
    out.variances.push_back(it->value * inv_n);
  }
  out.basis = Mat(m, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    out.basis.col(static_cast<Eigen::Index>(j)) = columns[j];
  }
  return out;
}

namespace {

struct DimCap {
  std::size_t value;
  const char* reason;
};

std::size_t clamp_dim(std::size_t requested, const std::vector<DimCap>& caps,
                      std::vector<std::string>& warnings) {
  std::size_t d = requested;
  const char* binding = nullptr;
  for (const auto& cap : caps) {
    if (cap.value < d) {
      d = cap.value;
      binding = cap.reason;
    }
  }
  if (binding != nullptr) {
    warnings.push_back("requested dimension " + std::to_string(requested) + " clamped to " +
                       std::to_string(d) + " (" + binding + ")");
  }
  return d;
}

}  // namespace

Embedding solve_embedding(const Mat& x, const GraphPair& graph, std::size_t d,
                          const EmbeddingOptions& options) {
  if (graph.W.rows() != x.cols() || graph.W.cols() != x.cols() || graph.B.rows() != x.cols() ||
      graph.B.cols() != x.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "graph size does not match sample count");
  }
  return solve_embedding(x, forms_of(graph), d, options);
}

Embedding solve_embedding(const Mat& x, const QuadraticForms& forms, std::size_t d,
                          const EmbeddingOptions& options) {
  require_finite(x, "solve_embedding data");
  const auto m = static_cast<std::size_t>(x.rows());
  const auto n = static_cast<std::size_t>(x.cols());
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "embedding dimension must be >= 1");
  if (n < 2) throw Error(ErrorCode::TooFewSamples, "solve_embedding needs N >= 2");

  Embedding out;
  out.requested_dim = d;
  std::vector<DimCap> caps{{m, "input dimension"}, {n - 1, "N-1"}};
  if (forms.max_dim) caps.push_back({*forms.max_dim, "classes-1"});

  if (forms.criterion == Criterion::MaximizeVariance) {
    const Mat a = forms.intrinsic(x);
    const EigList spectrum = sym_eig(a);
    // Rounding in X L X^T leaves tiny eigenvalues on constant data, so the
    // rank cutoff is also floored against the data scale.
    double top = std::max(spectrum.back().value, 0.0);
    if (top <= 1e-13 * x.squaredNorm()) top = 0.0;
    std::size_t rank = 0;
    for (const auto& p : spectrum) {
      if (top > 0.0 && p.value > options.rank_tolerance * top) ++rank;
    }
    caps.push_back({rank, "numerical rank"});
    const std::size_t keep = clamp_dim(d, caps, out.warnings);
    if (keep == 0) throw Error(ErrorCode::DimensionTooLarge, "no feasible embedding dimension");

    out.projection = Mat(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(keep));
    EigList kept;
    for (std::size_t j = 0; j < keep; ++j) {
      const auto& p = spectrum[spectrum.size() - 1 - j];
      out.projection.col(static_cast<Eigen::Index>(j)) = p.vector;
      out.eigenvalues.push_back(p.value);
      kept.push_back(p);
    }
    const Mat identity = Mat::Identity(a.rows(), a.cols());
    out.max_residual = max_residual(a, identity, kept);
    out.residual_scale = 1.0 + a.norm() + identity.norm();
    out.actual_dim = keep;
    out.reduced_dim = m;
    return out;
  }

  // With translation-invariant forms the data can be restricted to its
  // centered principal subspace without changing either form.
  std::optional<Mat> basis;
  std::size_t rank = m;
  if (forms.translation_invariant) {
    const Vec mean = x.rowwise().mean();
    PrincipalBasis pb = principal_basis(x.colwise() - mean, m, options.rank_tolerance);
    rank = static_cast<std::size_t>(pb.basis.cols());
    if (rank < m) basis = std::move(pb.basis);
  }
  caps.push_back({rank, "numerical rank"});
  const std::size_t keep = clamp_dim(d, caps, out.warnings);
  if (keep == 0) throw Error(ErrorCode::DimensionTooLarge, "no feasible embedding dimension");

  const Mat z = basis ? Mat(basis->transpose() * x) : x;
  const Mat a = forms.intrinsic(z);
  const Mat mm = forms.constraint(z);
  EigList pairs = gen_eig(a, mm, options.ridge);
  pairs.resize(keep);

  const Mat v = stack_vectors(pairs, 0, keep);
  out.projection = basis ? Mat(*basis * v) : v;
  for (Eigen::Index j = 0; j < out.projection.cols(); ++j) {
    canonicalize_sign(out.projection.col(j));
  }
  for (const auto& p : pairs) out.eigenvalues.push_back(p.value);
  out.max_residual = max_residual(a, mm, pairs);
  out.residual_scale = 1.0 + a.norm() + mm.norm();
  out.actual_dim = keep;
  out.reduced_dim = static_cast<std::size_t>(z.rows());
  return out;
}

}  // namespace genet
