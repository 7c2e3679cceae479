#include "addcomp/linalg.hpp"

#include "addcomp/errors.hpp"

#include <cmath>
#include <string>

namespace addcomp {

double empirical_norm_sq(const Vec& x) {
  if (x.size() == 0) throw InvalidInput("empirical_norm_sq: empty vector");
  return x.squaredNorm() / static_cast<double>(x.size());
}

double empirical_inner(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) {
    throw InvalidInput("empirical_inner: length mismatch (" + std::to_string(x.size()) + " vs " +
                       std::to_string(y.size()) + ")");
  }
  if (x.size() == 0) throw InvalidInput("empirical_inner: empty vector");
  return x.dot(y) / static_cast<double>(x.size());
}

double spectral_norm(const Mat& a) {
  if (a.rows() != a.cols()) throw InvalidInput("spectral_norm: matrix is not square");
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

OrthonormalBasis OrthonormalBasis::select(const std::vector<Eigen::Index>& cols) const {
  OrthonormalBasis out;
  out.vectors.resize(vectors.rows(), static_cast<Eigen::Index>(cols.size()));
  out.source.reserve(cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k) {
    out.vectors.col(static_cast<Eigen::Index>(k)) = vectors.col(cols[k]);
    out.source.push_back(source[static_cast<std::size_t>(cols[k])]);
  }
  return out;
}

OrthonormalBasis OrthonormalBasis::prefix(Eigen::Index count) const {
  OrthonormalBasis out;
  out.vectors = vectors.leftCols(count);
  out.source.assign(source.begin(), source.begin() + count);
  return out;
}

OrthonormalBasis gram_schmidt_n(const Mat& columns, double tol) {
  const Eigen::Index n = columns.rows();
  const double scale = std::sqrt(static_cast<double>(n));

  double largest = 0.0;
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    largest = std::max(largest, columns.col(j).norm() / scale);
  }
  const double cutoff = tol * largest;

  // Work with Euclidean-unit vectors internally and rescale at the end.
  Mat q(n, columns.cols());
  OrthonormalBasis out;
  Eigen::Index kept = 0;
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    Vec v = columns.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < kept; ++k) v -= q.col(k).dot(v) * q.col(k);
    }
    const double residual = v.norm() / scale;
    if (largest == 0.0 || residual < cutoff) continue;
    q.col(kept++) = v / v.norm();
    out.source.push_back(j);
  }
  out.vectors = q.leftCols(kept) * scale;
  return out;
}

Vec basis_coefficients(const Mat& basis, const Vec& z) {
  if (basis.rows() != z.size()) throw InvalidInput("basis_coefficients: length mismatch");
  return basis.transpose() * z / static_cast<double>(z.size());
}

Vec orthogonal_project(const Mat& basis, const Vec& z) {
  if (basis.cols() == 0) return Vec::Zero(z.size());
  return basis * basis_coefficients(basis, z);
}

Vec orthogonal_project(const OrthonormalBasis& basis, const Vec& z) {
  return orthogonal_project(basis.vectors, z);
}

}  // namespace addcomp
