#pragma once

// Oblique projector onto E along F + (E+F)^perp.

#include "addcomp/linalg.hpp"

namespace addcomp {

inline constexpr double kDefaultRankTolerance = 1e-10;

class ObliqueProjector {
 public:
  /// E and F are n x D and n x D' column spans (F may have zero columns, and
  /// need not have independent columns). Throws DegenerateDesign when
  /// [E F] loses rank beyond `tol` relative to the largest column of E.
  static ObliqueProjector build(const Mat& E, const Mat& F, double tol = kDefaultRankTolerance);

  const Mat& matrix() const { return p_; }
  Eigen::Index n() const { return p_.rows(); }
  Eigen::Index dim_E() const { return dim_e_; }
  Eigen::Index dim_F() const { return dim_f_; }

  /// Range basis, orthonormal under <.,.>_n, obtained by Gram-Schmidt on the
  /// columns of E in their given order.
  const OrthonormalBasis& range_basis() const { return e_on_; }

  double rho() const { return rho_; }
  double rho_sq() const { return rho_ * rho_; }
  /// Tr(P' P).
  double trace_gram() const { return trace_gram_; }

  Vec apply(const Vec& z) const;

  /// Tr(P' pi_m P) for the span of an orthonormal (under <.,.>_n) basis.
  double trace_quadratic(const Mat& model_basis) const;
  double trace_quadratic(const OrthonormalBasis& model_basis) const {
    return trace_quadratic(model_basis.vectors);
  }

  /// Per-vector contributions t_i = Tr(P' pi_{u_i} P) = ||P' u_i||_n^2.
  /// trace_quadratic is their sum; no orthonormality check here.
  Vec unit_traces(const Mat& basis) const;

  /// Tr(P'(I - pi_V)P). Throws ConfigurationError unless
  /// Tr(P' pi_V P) <= Tr(P'P)/2.
  double residual_trace(const Mat& v_basis) const;
  double residual_trace(const OrthonormalBasis& v_basis) const {
    return residual_trace(v_basis.vectors);
  }

 private:
  Mat p_;
  Mat factor_;  // P = factor_ * Q', Q with orthonormal columns
  OrthonormalBasis e_on_;
  Eigen::Index dim_e_ = 0;
  Eigen::Index dim_f_ = 0;
  double rho_ = 0.0;
  double trace_gram_ = 0.0;
};

/// Throws InvalidInput unless the columns are orthonormal under <.,.>_n
/// within `tol` entrywise on the Gram matrix.
void require_orthonormal(const Mat& basis, double tol = 1e-8);

}  // namespace addcomp
