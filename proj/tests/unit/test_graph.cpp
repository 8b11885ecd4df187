#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "genet/graph.hpp"
#include "genet/random.hpp"
#include "reference_oracle.hpp"

using namespace genet;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected genet::Error");
  return ErrorCode::InvalidArgument;
}

Mat row(std::initializer_list<double> values) {
  Mat x(1, static_cast<Eigen::Index>(values.size()));
  Eigen::Index j = 0;
  for (double v : values) x(0, j++) = v;
  return x;
}

double rel_frob(const Mat& a, const Mat& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

}  // namespace

TEST_CASE("LabelSet validation and remapping") {
  const auto ls = LabelSet::from_ids({1, 2, 1, 3});
  CHECK(ls.num_classes() == 3);
  CHECK(ls.members(1) == std::vector<std::size_t>{0, 2});
  CHECK(code_of([] { (void)LabelSet::from_ids({1, 3}); }) == ErrorCode::EmptyClass);
  CHECK(code_of([] { (void)LabelSet::from_ids({0, 1}); }) == ErrorCode::InvalidArgument);

  const std::vector<long long> raw{7, 3, 7, 9, 3};
  const auto mapped = LabelSet::remap(raw);
  CHECK(mapped.ids() == std::vector<int>{1, 2, 1, 3, 2});
}

TEST_CASE("laplacian of small graphs") {
  Mat w(2, 2);
  w << 0, 1, 1, 0;
  const auto lap = laplacian(w);
  CHECK(lap.D == Mat::Identity(2, 2));
  Mat expected(2, 2);
  expected << 1, -1, -1, 1;
  CHECK(lap.L == expected);

  const auto empty = laplacian(Mat::Zero(3, 3));
  CHECK(empty.D.isZero());
  CHECK(empty.L.isZero());

  CHECK(code_of([] { (void)laplacian(Mat::Zero(2, 3)); }) == ErrorCode::NonSquare);
  Mat asym = Mat::Zero(2, 2);
  asym(0, 1) = 1;
  CHECK(code_of([&] { (void)laplacian(asym); }) == ErrorCode::NonSymmetric);
}

TEST_CASE("laplacian entrywise on random symmetric weights") {
  Mat w = oracle::random_symmetric(11, 5);
  w.diagonal().setZero();
  const auto lap = laplacian(w);
  for (Eigen::Index i = 0; i < 5; ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < 5; ++j) {
      if (j != i) {
        sum += w(i, j);
        CHECK(lap.L(i, j) == doctest::Approx(-w(i, j)));
      }
    }
    CHECK(lap.D(i, i) == doctest::Approx(sum));
    CHECK(std::abs(lap.L.row(i).sum()) < 1e-10);
  }
}

TEST_CASE("pca_graph matches the common graph embedding table") {
  const auto g2 = pca_graph(2);
  Mat w2(2, 2);
  w2 << 0, 0.5, 0.5, 0;
  CHECK(g2.W == w2);
  CHECK(g2.B == Mat::Identity(2, 2));

  const auto g4 = pca_graph(4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) CHECK(g4.W(i, j) == (i == j ? 0.0 : 0.25));
  }
  for (std::size_t n : {2u, 5u, 9u}) {
    const auto lap = laplacian(pca_graph(n).W);
    const double expected = static_cast<double>(n - 1) / static_cast<double>(n);
    for (Eigen::Index i = 0; i < lap.D.rows(); ++i) CHECK(lap.D(i, i) == doctest::Approx(expected));
  }
  CHECK(code_of([] { (void)pca_graph(1); }) == ErrorCode::TooFewSamples);
}

TEST_CASE("lda_graph weights and centering constraint") {
  const auto g = lda_graph(LabelSet::from_ids({1, 1, 2, 2}));
  Mat w = Mat::Zero(4, 4);
  w(0, 1) = w(1, 0) = w(2, 3) = w(3, 2) = 0.5;
  CHECK(g.W == w);
  CHECK((g.B - (Mat::Identity(4, 4) - Mat::Constant(4, 4, 0.25))).norm() < 1e-15);
  CHECK(g.max_dim == 1);

  CHECK(lda_graph(LabelSet::from_ids({1, 2, 3, 4})).W.isZero());
}

TEST_CASE("lda_graph single class reproduces the within-class scatter") {
  const auto g = lda_graph(LabelSet::from_ids({1, 1, 1}));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j) CHECK(g.W(i, j) == doctest::Approx(1.0 / 3.0));
    }
  }
  const Mat x = oracle::random_matrix(5, 4, 3);
  const auto s = oracle::brute_scatter(x, {1, 1, 1});
  CHECK(rel_frob(x * laplacian(g.W).L * x.transpose(), s.within) < 1e-8);
}

TEST_CASE("graph forms agree with covariance and scatter sums") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto f = oracle::random_labeled(seed, 4, 17, 3);
    const auto labels = LabelSet::from_ids(f.labels);
    const auto n = static_cast<double>(f.x.cols());

    const Mat cov = oracle::brute_covariance(f.x);
    const Mat pca_form = f.x * laplacian(pca_graph(f.labels.size()).W).L * f.x.transpose() / n;
    CHECK(rel_frob(pca_form, cov) < 1e-8);

    const auto s = oracle::brute_scatter(f.x, f.labels);
    const auto lda = lda_graph(labels);
    CHECK(rel_frob(f.x * laplacian(lda.W).L * f.x.transpose(), s.within) < 1e-8);
    CHECK(rel_frob(n * cov - s.within, s.between) < 1e-8);
    CHECK(rel_frob(f.x * lda.B * f.x.transpose(), n * cov) < 1e-8);

    const auto between = lda_between_graph(labels);
    CHECK(rel_frob(f.x * between.B * f.x.transpose(), s.between) < 1e-8);

    const auto forms = lda_forms(labels);
    CHECK(rel_frob(forms.intrinsic(f.x), s.within) < 1e-8);
    CHECK(rel_frob(forms.constraint(f.x), s.between) < 1e-8);
  }
}

TEST_CASE("graph Laplacians are positive semidefinite") {
  const auto f = oracle::random_labeled(3, 3, 20, 3);
  const auto labels = LabelSet::from_ids(f.labels);
  for (const Mat& w : {Mat(pca_graph(20).W), Mat(lda_graph(labels).W),
                       mfa_intrinsic_graph(f.x, labels, 3), mfa_penalty_graph(f.x, labels, 10)}) {
    CHECK(is_symmetric(w));
    CHECK(w.diagonal().isZero());
    Eigen::SelfAdjointEigenSolver<Mat> es(laplacian(w).L);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("mfa_intrinsic_graph on a 1-D example") {
  const Mat w = mfa_intrinsic_graph(row({0, 1, 10}), LabelSet::from_ids({1, 1, 1}), 1);
  Mat expected = Mat::Zero(3, 3);
  expected(0, 1) = expected(1, 0) = expected(1, 2) = expected(2, 1) = 1;
  CHECK(w == expected);

  CHECK(mfa_intrinsic_graph(row({0, 5}), LabelSet::from_ids({1, 2}), 3).isZero());
}

TEST_CASE("mfa_intrinsic_graph connects small classes completely") {
  const auto f = oracle::random_labeled(8, 2, 12, 3);
  const auto labels = LabelSet::from_ids(f.labels);
  const Mat w = mfa_intrinsic_graph(f.x, labels, 50);
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      const bool same = f.labels[static_cast<std::size_t>(i)] == f.labels[static_cast<std::size_t>(j)];
      CHECK(w(i, j) == (same && i != j ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("mfa_penalty_graph examples") {
  const Mat single = mfa_penalty_graph(row({0, 3}), LabelSet::from_ids({1, 2}), 7);
  Mat expected = Mat::Zero(2, 2);
  expected(0, 1) = expected(1, 0) = 1;
  CHECK(single == expected);

  const Mat w = mfa_penalty_graph(row({0, 5, 6}), LabelSet::from_ids({1, 1, 2}), 1);
  Mat e3 = Mat::Zero(3, 3);
  e3(1, 2) = e3(2, 1) = 1;
  CHECK(w == e3);

  CHECK(code_of([] { (void)mfa_penalty_graph(row({0, 1}), LabelSet::from_ids({1, 1}), 1); }) ==
        ErrorCode::SingleClass);
  CHECK(code_of([] { (void)mfa_penalty_graph(row({0, 1}), LabelSet::from_ids({1, 2}), 0); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([] { (void)mfa_intrinsic_graph(row({0, 1}), LabelSet::from_ids({1, 2, 2}), 1); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("mfa graphs match brute-force enumeration") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto f = oracle::random_labeled(seed, 3, 20, 2);
    const auto labels = LabelSet::from_ids(f.labels);
    CHECK(mfa_intrinsic_graph(f.x, labels, 3) == oracle::brute_knn_graph(f.x, f.labels, 3));
    CHECK(mfa_penalty_graph(f.x, labels, 25) == oracle::brute_penalty_pairs(f.x, f.labels, 25));

    const auto t = oracle::tie_fixture(seed, 2, 30, 3);
    const auto tl = LabelSet::from_ids(t.labels);
    CHECK(mfa_intrinsic_graph(t.x, tl, 2) == oracle::brute_knn_graph(t.x, t.labels, 2));
    CHECK(mfa_penalty_graph(t.x, tl, 7) == oracle::brute_penalty_pairs(t.x, t.labels, 7));
  }
}

TEST_CASE("sparse mfa forms equal the dense graph forms") {
  const auto f = oracle::random_labeled(21, 5, 40, 4);
  const auto labels = LabelSet::from_ids(f.labels);
  const auto dense = forms_of(mfa_graph(f.x, labels, 3, 20));
  const auto sparse = mfa_forms(f.x, labels, 3, 20);
  CHECK(rel_frob(sparse.intrinsic(f.x), dense.intrinsic(f.x)) < 1e-12);
  CHECK(rel_frob(sparse.constraint(f.x), dense.constraint(f.x)) < 1e-12);
}

TEST_CASE("solve_embedding with the PCA graph finds the top principal directions") {
  const Mat x = oracle::random_matrix(31, 10, 50);
  const auto e = solve_embedding(x, pca_graph(50), 3);
  REQUIRE(e.actual_dim == 3);
  Eigen::SelfAdjointEigenSolver<Mat> es(oracle::brute_covariance(x));
  const Mat top = es.eigenvectors().rightCols(3);
  CHECK(oracle::max_principal_angle(e.projection, top) < 1e-6);
  CHECK(e.max_residual <= 1e-6 * e.residual_scale);
}

TEST_CASE("solve_embedding with the LDA graph recovers the Fisher direction") {
  const auto f = oracle::gaussian_blobs(5, 2, 100, 6.0);
  const auto labels = LabelSet::from_ids(f.labels);
  const auto e = solve_embedding(f.x, lda_graph(labels), 1);
  REQUIRE(e.projection.cols() == 1);

  const auto s = oracle::brute_scatter(f.x, f.labels);
  const Vec mean_diff = f.x.rightCols(100).rowwise().mean() - f.x.leftCols(100).rowwise().mean();
  const Vec fisher = s.within.ldlt().solve(mean_diff);
  CHECK(oracle::max_principal_angle(e.projection, fisher) < 1e-6);
  const double angle = oracle::max_principal_angle(e.projection, mean_diff);
  CHECK(angle * 180.0 / M_PI < 5.0);
}

TEST_CASE("solve_embedding clamps dimensions and tolerates degenerate scatter") {
  const auto f = oracle::random_labeled(4, 6, 5, 5);
  const auto e = solve_embedding(f.x, lda_graph(LabelSet::from_ids(f.labels)), 10);
  CHECK(e.actual_dim == 4);
  CHECK_FALSE(e.warnings.empty());
  CHECK(e.projection.allFinite());

  CHECK(code_of([&] { (void)solve_embedding(f.x, pca_graph(5), 0); }) == ErrorCode::InvalidArgument);
  const Mat constant = Mat::Ones(3, 5);
  CHECK(code_of([&] { (void)solve_embedding(constant, pca_graph(5), 1); }) ==
        ErrorCode::DimensionTooLarge);
}

TEST_CASE("solve_embedding is invariant to sample order") {
  const auto f = oracle::random_labeled(17, 6, 40, 3);
  const auto labels = LabelSet::from_ids(f.labels);
  const auto base = solve_embedding(f.x, mfa_graph(f.x, labels, 3, 15), 3);

  std::vector<std::size_t> perm(40);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(99);
  shuffle(std::span<std::size_t>(perm), rng);
  Mat xp(f.x.rows(), 40);
  std::vector<int> lp(40);
  for (std::size_t j = 0; j < 40; ++j) {
    xp.col(static_cast<Eigen::Index>(j)) = f.x.col(static_cast<Eigen::Index>(perm[j]));
    lp[j] = f.labels[perm[j]];
  }
  // Relabel so ids stay contiguous in first-appearance-independent form.
  const auto permuted = solve_embedding(xp, mfa_graph(xp, LabelSet::from_ids(lp), 3, 15), 3);
  CHECK(oracle::max_principal_angle(base.projection, permuted.projection) < 1e-8);
}
