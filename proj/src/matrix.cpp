#include "genet/matrix.hpp"

#include <cmath>
#include <string>

namespace genet {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonSymmetric: return "NonSymmetric";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::SingularConstraint: return "SingularConstraint";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LabelRequired: return "LabelRequired";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

void require_finite(const Mat& a, const char* what) {
  if (!a.allFinite()) {
    throw Error(ErrorCode::NonFinite, std::string(what) + " contains NaN or Inf");
  }
}

bool is_symmetric(const Mat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.norm());
  return (a - a.transpose()).norm() <= tol * scale;
}

void canonicalize_sign(Eigen::Ref<Vec> v) {
  if (v.size() == 0) return;
  const double cutoff = 1e-10 * v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > cutoff) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

namespace {

void require_square(const Mat& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::NonSquare, std::string(what) + " is " + std::to_string(a.rows()) + "x" +
                                          std::to_string(a.cols()));
  }
}

void require_symmetric(const Mat& a, const char* what) {
  require_square(a, what);
  if (!is_symmetric(a)) {
    throw Error(ErrorCode::NonSymmetric, std::string(what) + " is not symmetric");
  }
}

}  // namespace

EigList sym_eig(const Mat& a) {
  require_finite(a, "sym_eig input");
  require_symmetric(a, "sym_eig input");
  const Eigen::Index n = a.rows();
  EigList out;
  if (n == 0) return out;

  // Only the lower triangle is read; symmetrize first so a matrix that is
  // symmetric within tolerance gives the same answer as its transpose.
  const Mat sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> solver(sym, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NonFinite, "symmetric eigensolver did not converge");
  }
  out.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    EigPair p;
    p.value = solver.eigenvalues()[i];
    p.vector = solver.eigenvectors().col(i);
    p.vector.normalize();
    canonicalize_sign(p.vector);
    out.push_back(std::move(p));
  }
  return out;
}

EigList gen_eig(const Mat& a, const Mat& m, double ridge) {
  require_finite(a, "gen_eig A");
  require_finite(m, "gen_eig M");
  require_symmetric(a, "gen_eig A");
  require_symmetric(m, "gen_eig M");
  if (a.rows() != m.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "gen_eig: A and M differ in size");
  }
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    throw Error(ErrorCode::InvalidArgument, "gen_eig: ridge must be finite and >= 0");
  }
  const Eigen::Index n = a.rows();
  if (n == 0) return {};

  Mat reg = 0.5 * (m + m.transpose());
  const double shift = ridge * (reg.trace() / static_cast<double>(n));
  if (shift > 0.0) reg.diagonal().array() += shift;

  Eigen::LLT<Mat> chol(reg);
  if (chol.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularConstraint,
                "constraint matrix is not positive definite after ridge " + std::to_string(ridge));
  }
  const Mat lower = chol.matrixL();
  if (lower.diagonal().minCoeff() <= 0.0 || !lower.allFinite()) {
    throw Error(ErrorCode::SingularConstraint, "constraint factor has a zero pivot");
  }

  // C = L^-1 A L^-T with reg = L L^T.
  Mat tmp = lower.triangularView<Eigen::Lower>().solve(0.5 * (a + a.transpose()));
  Mat c = lower.triangularView<Eigen::Lower>().solve(tmp.transpose());
  c = 0.5 * (c + c.transpose());

  EigList pairs = sym_eig(c);
  const auto upper = lower.transpose().triangularView<Eigen::Upper>();
  for (auto& p : pairs) {
    p.vector = upper.solve(p.vector);
    canonicalize_sign(p.vector);
  }
  return pairs;
}

double max_residual(const Mat& a, const Mat& m, const EigList& pairs) {
  double worst = 0.0;
  for (const auto& p : pairs) {
    worst = std::max(worst, (a * p.vector - p.value * (m * p.vector)).norm());
  }
  return worst;
}

Centered center_columns(const Mat& x) {
  require_finite(x, "center_columns input");
  if (x.cols() < 1) {
    throw Error(ErrorCode::TooFewSamples, "center_columns needs at least one column");
  }
  Centered out;
  out.mean = x.rowwise().mean();
  out.centered = x.colwise() - out.mean;
  return out;
}

Mat stack_vectors(const EigList& pairs, std::size_t first, std::size_t count) {
  if (first + count > pairs.size()) {
    throw Error(ErrorCode::DimensionTooLarge, "stack_vectors: range exceeds spectrum");
  }
  const Eigen::Index rows = pairs.empty() ? 0 : pairs.front().vector.size();
  Mat out(rows, static_cast<Eigen::Index>(count));
  for (std::size_t j = 0; j < count; ++j) {
    out.col(static_cast<Eigen::Index>(j)) = pairs[first + j].vector;
  }
  return out;
}

}  // namespace genet
