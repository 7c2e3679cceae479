#pragma once

// Empirical-norm primitives. Vectors live in R^n with
//   <x, y>_n = (1/n) sum x_i y_i,   ||x||_n^2 = <x, x>_n.
// An "orthonormal basis" everywhere in this library means orthonormal
// under <.,.>_n, stored column-wise, so Euclidean column norms are sqrt(n).

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace addcomp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

double empirical_norm_sq(const Vec& x);
double empirical_inner(const Vec& x, const Vec& y);

/// Largest singular value of a square matrix. The 1/n factors of the
/// empirical norm cancel in ||Ax||_n / ||x||_n, so this is the Euclidean
/// operator norm.
double spectral_norm(const Mat& a);

/// Columns orthonormal under <.,.>_n plus the input column each one came from.
struct OrthonormalBasis {
  Mat vectors;                      // n x d
  std::vector<Eigen::Index> source;  // source[k] = input column of vectors.col(k)

  Eigen::Index size() const { return vectors.cols(); }
  Eigen::Index dim() const { return vectors.rows(); }

  /// The sub-basis made of the listed columns (kept in the given order).
  OrthonormalBasis select(const std::vector<Eigen::Index>& cols) const;
  OrthonormalBasis prefix(Eigen::Index count) const;
};

inline constexpr double kDefaultDropTolerance = 1e-8;

/// Modified Gram-Schmidt with one re-orthogonalization pass. A column is
/// dropped when its residual empirical norm falls below
/// tol * (largest input column empirical norm).
OrthonormalBasis gram_schmidt_n(const Mat& columns, double tol = kDefaultDropTolerance);

/// sum_i <z, u_i>_n u_i
Vec orthogonal_project(const OrthonormalBasis& basis, const Vec& z);
Vec orthogonal_project(const Mat& basis, const Vec& z);

/// <z, u_i>_n for every basis vector.
Vec basis_coefficients(const Mat& basis, const Vec& z);

}  // namespace addcomp
