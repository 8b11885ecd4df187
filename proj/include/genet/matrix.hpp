#pragma once

// Dense real linear algebra shared by every layer: matrix aliases, the
// symmetric and symmetric-definite eigensolvers, and column centering.
//
// Storage is Eigen's default column-major layout. Samples are columns.

#include <Eigen/Dense>

#include <vector>

#include "genet/error.hpp"

namespace genet {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct EigPair {
  double value = 0.0;
  Vec vector;
};

/// Eigen-decomposition result, ascending by value.
using EigList = std::vector<EigPair>;

/// Relative tolerance used to accept a matrix as symmetric.
inline constexpr double kSymmetryTolerance = 1e-10;

/// Default relative ridge added to constraint matrices before whitening.
inline constexpr double kDefaultRidge = 1e-8;

/// Throws NonFinite if any entry is NaN or Inf.
void require_finite(const Mat& a, const char* what);

/// True when ||A - A^T||_F <= tol * max(1, ||A||_F).
[[nodiscard]] bool is_symmetric(const Mat& a, double tol = kSymmetryTolerance);

/// Flips `v` so its first significant component is positive. Components with
/// magnitude below 1e-10 * max|v| are treated as zero.
void canonicalize_sign(Eigen::Ref<Vec> v);

/// Full spectrum of a symmetric matrix. Values ascending, vectors unit norm
/// with the sign convention of canonicalize_sign().
[[nodiscard]] EigList sym_eig(const Mat& a);

/// Solves A w = lambda M w for symmetric A and symmetric PSD M.
///
/// M is regularized to M + ridge * (trace(M) / n) * I and factored as R^T R;
/// the symmetric problem R^-T A R^-1 u = lambda u is then solved and mapped
/// back with w = R^-1 u. Returned vectors are orthonormal with respect to the
/// regularized M; when ridge is 0 that is M itself. Throws SingularConstraint
/// if the regularized M has no Cholesky factor.
[[nodiscard]] EigList gen_eig(const Mat& a, const Mat& m, double ridge = kDefaultRidge);

/// max_i ||A w_i - lambda_i M w_i||_2 over the given pairs.
[[nodiscard]] double max_residual(const Mat& a, const Mat& m, const EigList& pairs);

struct Centered {
  Mat centered;
  Vec mean;
};

/// Subtracts the row-wise mean of the columns from every column.
[[nodiscard]] Centered center_columns(const Mat& x);

/// Stacks the vectors of `pairs[first .. first+count)` as matrix columns.
[[nodiscard]] Mat stack_vectors(const EigList& pairs, std::size_t first, std::size_t count);

}  // namespace genet
