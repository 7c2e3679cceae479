#include "addcomp/projection.hpp"

#include "addcomp/errors.hpp"

#include <cmath>
#include <string>

namespace addcomp {

namespace {

double max_column_norm(const Mat& m) {
  double out = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) out = std::max(out, m.col(j).norm());
  return out;
}

}  // namespace

void require_orthonormal(const Mat& basis, double tol) {
  if (basis.cols() == 0) return;
  const Mat gram = basis.transpose() * basis / static_cast<double>(basis.rows());
  const double err = (gram - Mat::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff();
  if (err > tol) {
    throw InvalidInput("basis is not orthonormal under <.,.>_n (max Gram deviation " +
                       std::to_string(err) + ")");
  }
}

ObliqueProjector ObliqueProjector::build(const Mat& E, const Mat& F, double tol) {
  const Eigen::Index n = E.rows();
  if (F.cols() > 0 && F.rows() != n) throw InvalidInput("build_projector: E and F row counts differ");
  if (E.cols() + F.cols() > n) {
    throw ConfigurationError("build_projector: dim E + dim F = " +
                             std::to_string(E.cols() + F.cols()) + " exceeds n = " +
                             std::to_string(n));
  }

  ObliqueProjector out;
  out.dim_e_ = E.cols();
  out.dim_f_ = F.cols();

  // Remove the F component: z -> u solves least squares of (I - pi_F) z on
  // (I - pi_F) E, and P = E (E_perp' E_perp)^{-1} E_perp'.
  Mat e_perp = E;
  if (F.cols() > 0) {
    Eigen::ColPivHouseholderQR<Mat> fqr(F);
    const double f_scale = max_column_norm(F);
    Eigen::Index f_rank = 0;
    const auto& fr = fqr.matrixR();
    for (Eigen::Index k = 0; k < std::min(fr.rows(), fr.cols()); ++k) {
      if (std::abs(fr(k, k)) > tol * f_scale) ++f_rank;
    }
    const Mat qf = fqr.householderQ() * Mat::Identity(n, f_rank);
    e_perp -= qf * (qf.transpose() * E);
  }

  const Eigen::Index d = E.cols();
  if (d == 0) {
    out.p_ = Mat::Zero(n, n);
    return out;
  }

  Eigen::ColPivHouseholderQR<Mat> eqr(e_perp);
  const double e_scale = max_column_norm(E);
  const auto& er = eqr.matrixR();
  for (Eigen::Index k = 0; k < d; ++k) {
    if (!(std::abs(er(k, k)) > tol * e_scale)) {
      throw DegenerateDesign(
          "E ∩ F ≠ {0}: the sampled component space intersects the parasitic space "
          "(rank " + std::to_string(k) + " of " + std::to_string(d) + " at tolerance " +
          std::to_string(tol) + ")");
    }
  }

  const Mat q = eqr.householderQ() * Mat::Identity(n, d);
  const Mat r = er.topLeftCorner(d, d).triangularView<Eigen::Upper>();
  Mat e_perm = E * eqr.colsPermutation();
  out.factor_ = r.triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(e_perm);
  out.p_ = out.factor_ * q.transpose();

  Eigen::BDCSVD<Mat> svd(out.factor_);
  out.rho_ = svd.singularValues()(0);
  out.trace_gram_ = out.factor_.squaredNorm();
  out.e_on_ = gram_schmidt_n(E);
  return out;
}

Vec ObliqueProjector::apply(const Vec& z) const {
  if (z.size() != n()) {
    throw InvalidInput("apply: vector length " + std::to_string(z.size()) + " != " +
                       std::to_string(n()));
  }
  return p_ * z;
}

Vec ObliqueProjector::unit_traces(const Mat& basis) const {
  if (basis.rows() != n()) throw InvalidInput("unit_traces: basis length mismatch");
  if (basis.cols() == 0 || dim_e_ == 0) return Vec::Zero(basis.cols());
  // ||P' u||^2 = ||Q factor' u||^2 = ||factor' u||^2 (Euclidean), then /n.
  const Mat proj = factor_.transpose() * basis;
  return proj.colwise().squaredNorm().transpose() / static_cast<double>(n());
}

double ObliqueProjector::trace_quadratic(const Mat& model_basis) const {
  require_orthonormal(model_basis);
  return unit_traces(model_basis).sum();
}

double ObliqueProjector::residual_trace(const Mat& v_basis) const {
  const double tq = trace_quadratic(v_basis);
  if (tq > trace_gram_ / 2.0) {
    throw ConfigurationError("half-trace condition violated: Tr(P' pi P) = " + std::to_string(tq) +
                             " > Tr(P'P)/2 = " + std::to_string(trace_gram_ / 2.0));
  }
  return trace_gram_ - tq;
}

}  // namespace addcomp
