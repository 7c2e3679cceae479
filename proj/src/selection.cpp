#include "addcomp/selection.hpp"

#include "addcomp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace addcomp {

const char* to_string(Family f) { return f == Family::nested ? "nested" : "complete"; }

ModelCollection ModelCollection::nested(OrthonormalBasis basis, std::vector<Eigen::Index> sizes) {
  Eigen::Index previous = 0;
  for (auto s : sizes) {
    if (s <= previous || s > basis.size()) {
      throw InvalidInput("nested collection: prefix sizes must increase within 1.." +
                         std::to_string(basis.size()));
    }
    previous = s;
  }
  ModelCollection out;
  out.kind_ = Family::nested;
  out.basis_ = std::move(basis);
  out.sizes_ = std::move(sizes);
  return out;
}

ModelCollection ModelCollection::nested_haar(OrthonormalBasis basis, int depth) {
  std::vector<Eigen::Index> sizes;
  for (int k = 0; k <= depth; ++k) {
    const Eigen::Index columns = (Eigen::Index{1} << (k + 1)) - 1;
    const auto count = static_cast<Eigen::Index>(
        std::count_if(basis.source.begin(), basis.source.end(),
                      [&](Eigen::Index src) { return src < columns; }));
    if (count > 0 && (sizes.empty() || count > sizes.back())) sizes.push_back(count);
  }
  return nested(std::move(basis), std::move(sizes));
}

ModelCollection ModelCollection::complete(OrthonormalBasis basis) {
  ModelCollection out;
  out.kind_ = Family::complete;
  out.basis_ = std::move(basis);
  return out;
}

std::vector<Model> ModelCollection::nested_models() const {
  if (kind_ != Family::nested) throw InvalidInput("nested_models: collection is complete");
  std::vector<Model> out(1);
  for (auto s : sizes_) {
    Model m;
    for (Eigen::Index i = 0; i < s; ++i) m.members.push_back(i);
    out.push_back(std::move(m));
  }
  return out;
}

double penalty_multiplier(Family family, double C, Eigen::Index basis_size) {
  if (family == Family::nested) return 1.0 + C;
  return 1.0 + C + std::log(static_cast<double>(basis_size));
}

double penalty(const Mat& model_basis, const PenaltySpec& spec, const ObliqueProjector& P,
               Eigen::Index basis_size, double sigma2) {
  if (model_basis.cols() == 0) return 0.0;
  return penalty_multiplier(spec.family, spec.C, basis_size) * P.trace_quadratic(model_basis) *
         sigma2 / static_cast<double>(P.n());
}

Vec least_squares_fit(const Vec& Y, const Mat& model_basis) {
  return orthogonal_project(model_basis, Y);
}

double criterion_from_scratch(const Vec& Y, const Mat& model_basis, const PenaltySpec& spec,
                              const ObliqueProjector& P, Eigen::Index basis_size, double sigma2) {
  const Vec residual = Y - least_squares_fit(Y, model_basis);
  return empirical_norm_sq(residual) + penalty(model_basis, spec, P, basis_size, sigma2);
}

namespace {

void require_positive_variance(double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw InvalidInput("variance must be positive and finite, got " + std::to_string(sigma2));
  }
}

SelectionOutcome make_outcome(const ModelCollection& collection, Model chosen, const Vec& coeffs,
                              double criterion, double sigma2, const ObliqueProjector& P,
                              const Vec& unit_traces) {
  SelectionOutcome out;
  const Mat& u = collection.basis().vectors;
  out.estimate = Vec::Zero(u.rows());
  out.coefficients.resize(static_cast<Eigen::Index>(chosen.dim()));
  out.chosen_trace = 0.0;
  for (std::size_t k = 0; k < chosen.dim(); ++k) {
    const auto i = chosen.members[k];
    out.coefficients(static_cast<Eigen::Index>(k)) = coeffs(i);
    out.estimate += coeffs(i) * u.col(i);
    if (unit_traces.size() > 0) out.chosen_trace += unit_traces(i);
  }
  out.chosen = std::move(chosen);
  out.criterion = criterion;
  out.sigma2_used = sigma2;
  out.rho = P.rho();
  return out;
}

// Criterion over nested prefixes; ties go to the smaller model.
template <class PenaltyOf>
std::pair<Model, double> minimize_nested(const Vec& coeffs_sq, double norm_sq,
                                         const std::vector<Model>& models, PenaltyOf pen) {
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < models.size(); ++k) {
    double captured = 0.0;
    for (auto i : models[k].members) captured += coeffs_sq(i);
    const double value = (norm_sq - captured) + pen(models[k]);
    if (value < best_value) {
      best_value = value;
      best = k;
    }
  }
  return {models[best], best_value};
}

}  // namespace

SelectionOutcome select_nested(const Vec& Y, const ModelCollection& collection,
                               const PenaltySpec& spec, double sigma2, const ObliqueProjector& P) {
  if (spec.family != Family::nested || collection.kind() != Family::nested) {
    throw InvalidInput("select_nested: requires a nested collection and nested penalty");
  }
  require_positive_variance(sigma2);
  const Mat& u = collection.basis().vectors;
  const Vec coeffs = basis_coefficients(u, Y);
  const Vec t = P.unit_traces(u);
  const double scale =
      penalty_multiplier(spec.family, spec.C, collection.basis_size()) * sigma2 / static_cast<double>(P.n());
  auto [model, value] =
      minimize_nested(coeffs.array().square().matrix(), empirical_norm_sq(Y),
                      collection.nested_models(), [&](const Model& m) {
                        double tr = 0.0;
                        for (auto i : m.members) tr += t(i);
                        return scale * tr;
                      });
  return make_outcome(collection, std::move(model), coeffs, value, sigma2, P, t);
}

Vec complete_thresholds(const ModelCollection& collection, const PenaltySpec& spec, double sigma2,
                        const ObliqueProjector& P) {
  const double scale = penalty_multiplier(Family::complete, spec.C, collection.basis_size()) *
                       sigma2 / static_cast<double>(P.n());
  return scale * P.unit_traces(collection.basis().vectors);
}

SelectionOutcome select_complete_threshold(const Vec& Y, const ModelCollection& collection,
                                           const PenaltySpec& spec, double sigma2,
                                           const ObliqueProjector& P) {
  if (spec.family != Family::complete) {
    throw InvalidInput("select_complete_threshold: requires the complete penalty");
  }
  require_positive_variance(sigma2);
  const Mat& u = collection.basis().vectors;
  const Vec coeffs = basis_coefficients(u, Y);
  const Vec t = P.unit_traces(u);
  const Vec thresholds = complete_thresholds(collection, spec, sigma2, P);
  Model chosen;
  double value = empirical_norm_sq(Y);
  for (Eigen::Index i = 0; i < u.cols(); ++i) {
    const double gain = coeffs(i) * coeffs(i);
    const double cost = thresholds(i);
    if (gain >= cost) {
      chosen.members.push_back(i);
      value -= gain - cost;
    }
  }
  return make_outcome(collection, std::move(chosen), coeffs, value, sigma2, P, t);
}

double estimate_variance(const Vec& Y, const Mat& v_basis, const ObliqueProjector& P) {
  const double denominator = P.residual_trace(v_basis);
  if (!(denominator > 0.0)) {
    throw ConfigurationError("estimate_variance: Tr(P'(I - pi)P) is not positive");
  }
  const Vec residual = Y - orthogonal_project(v_basis, Y);
  return residual.squaredNorm() / denominator;
}

OrthonormalBasis default_variance_space(const OrthonormalBasis& basis, const ObliqueProjector& P) {
  const Vec t = P.unit_traces(basis.vectors);
  const double budget = P.trace_gram() / 2.0;
  double running = 0.0;
  Eigen::Index count = 0;
  while (count < t.size() && running + t(count) <= budget) running += t(count++);
  return basis.prefix(count);
}

namespace {

SelectionOutcome dispatch(const Vec& Y, const ModelCollection& collection, const PenaltySpec& spec,
                          double sigma2, const ObliqueProjector& P) {
  if (spec.family == Family::nested) return select_nested(Y, collection, spec, sigma2, P);
  return select_complete_threshold(Y, collection, spec, sigma2, P);
}

}  // namespace

SelectionOutcome select(const Vec& Y, const ModelCollection& collection, const PenaltySpec& spec,
                        const ObliqueProjector& P) {
  if (spec.known_variance()) return dispatch(Y, collection, spec, *spec.sigma2, P);
  const OrthonormalBasis v = default_variance_space(P.range_basis(), P);
  return dispatch(Y, collection, spec, estimate_variance(Y, v.vectors, P), P);
}

SelectionOutcome select(const Vec& Y, const ModelCollection& collection, const PenaltySpec& spec,
                        const ObliqueProjector& P, const Mat& v_basis) {
  if (spec.known_variance()) return dispatch(Y, collection, spec, *spec.sigma2, P);
  return dispatch(Y, collection, spec, estimate_variance(Y, v_basis, P), P);
}

double oracle_denominator(const Vec& s_true, const ModelCollection& collection,
                          const ObliqueProjector& P, double sigma2) {
  const Mat& u = collection.basis().vectors;
  const Vec coeffs = basis_coefficients(u, s_true);
  const Vec t = P.unit_traces(u);
  const double n = static_cast<double>(P.n());
  const double norm_sq = empirical_norm_sq(s_true);

  if (collection.kind() == Family::complete) {
    const double outside_e = norm_sq - coeffs.squaredNorm();
    double total = std::max(outside_e, 0.0);
    for (Eigen::Index i = 0; i < u.cols(); ++i) {
      total += std::min(coeffs(i) * coeffs(i), t(i) * sigma2 / n);
    }
    return total;
  }

  double best = std::numeric_limits<double>::infinity();
  for (const auto& m : collection.nested_models()) {
    double captured = 0.0;
    double tr = 0.0;
    for (auto i : m.members) {
      captured += coeffs(i) * coeffs(i);
      tr += t(i);
    }
    best = std::min(best, (norm_sq - captured) + tr * sigma2 / n);
  }
  return best;
}

SelectionOutcome select_classic(const Vec& Z, const ModelCollection& collection, double C,
                                double sigma2) {
  require_positive_variance(sigma2);
  const Mat& u = collection.basis().vectors;
  const Vec coeffs = basis_coefficients(u, Z);
  const double n = static_cast<double>(Z.size());
  auto [model, value] =
      minimize_nested(coeffs.array().square().matrix(), empirical_norm_sq(Z),
                      collection.nested_models(), [&](const Model& m) {
                        return C * static_cast<double>(m.dim()) * sigma2 / n;
                      });
  SelectionOutcome out;
  out.estimate = Vec::Zero(Z.size());
  out.coefficients.resize(static_cast<Eigen::Index>(model.dim()));
  for (std::size_t k = 0; k < model.dim(); ++k) {
    const auto i = model.members[k];
    out.coefficients(static_cast<Eigen::Index>(k)) = coeffs(i);
    out.estimate += coeffs(i) * u.col(i);
  }
  out.chosen = std::move(model);
  out.criterion = value;
  out.sigma2_used = sigma2;
  out.rho = 1.0;
  out.chosen_trace = static_cast<double>(out.chosen.dim());
  return out;
}

}  // namespace addcomp
