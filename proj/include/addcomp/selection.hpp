#pragma once

// Penalized least-squares model selection among subspaces of Im(P).
//
// Models are index sets over an orthonormal (under <.,.>_n) basis u_1..u_D
// of E, so that
//   ||Y - pi_m Y||_n^2 = ||Y||_n^2 - sum_{i in m} <Y,u_i>_n^2
//   Tr(P' pi_m P)      = sum_{i in m} ||P' u_i||_n^2.
// Both collections are minimized exactly with these identities.

#include "addcomp/linalg.hpp"
#include "addcomp/projection.hpp"

#include <optional>
#include <vector>

namespace addcomp {

enum class Family { nested, complete };

const char* to_string(Family f);

struct Model {
  std::vector<Eigen::Index> members;  // positions in the collection basis, ascending

  std::size_t dim() const { return members.size(); }
  bool operator==(const Model&) const = default;
};

class ModelCollection {
 public:
  /// Cumulative prefixes of `basis` with the given sizes (ascending, each
  /// in 1..basis.size()). The empty model is always a candidate.
  static ModelCollection nested(OrthonormalBasis basis, std::vector<Eigen::Index> sizes);

  /// Haar levels: prefix k holds the vectors whose source column is one of
  /// the first 2^{k+1} - 1 Haar columns, k = 0..depth.
  static ModelCollection nested_haar(OrthonormalBasis basis, int depth);

  /// Every subset of the basis; never enumerated.
  static ModelCollection complete(OrthonormalBasis basis);

  Family kind() const { return kind_; }
  const OrthonormalBasis& basis() const { return basis_; }
  Eigen::Index basis_size() const { return basis_.size(); }

  /// Empty model first, then increasing prefixes. Nested collections only.
  std::vector<Model> nested_models() const;

 private:
  Family kind_ = Family::nested;
  OrthonormalBasis basis_;
  std::vector<Eigen::Index> sizes_;
};

struct PenaltySpec {
  Family family = Family::nested;
  double C = 1.5;
  std::optional<double> sigma2;  // nullopt: estimate it

  bool known_variance() const { return sigma2.has_value(); }
};

struct SelectionOutcome {
  Model chosen;
  Vec estimate;       // s~ at the design points
  Vec coefficients;   // <Y,u_i>_n for i in chosen.members, same order
  double criterion = 0.0;
  double sigma2_used = 0.0;
  double rho = 0.0;
  double chosen_trace = 0.0;  // Tr(P' pi_m^ P)
};

/// (1 + C) for nested, (1 + C + log D) for complete (natural log).
double penalty_multiplier(Family family, double C, Eigen::Index basis_size);

/// pen(m) for the span of `model_basis`; 0 for the empty model.
double penalty(const Mat& model_basis, const PenaltySpec& spec, const ObliqueProjector& P,
               Eigen::Index basis_size, double sigma2);

/// ||Y - pi_m Y||_n^2 + pen(m), evaluated from scratch on the model's vectors.
double criterion_from_scratch(const Vec& Y, const Mat& model_basis, const PenaltySpec& spec,
                              const ObliqueProjector& P, Eigen::Index basis_size, double sigma2);

/// s^_m = pi_m Y.
Vec least_squares_fit(const Vec& Y, const Mat& model_basis);

SelectionOutcome select_nested(const Vec& Y, const ModelCollection& collection,
                               const PenaltySpec& spec, double sigma2, const ObliqueProjector& P);

/// Per-vector thresholds (1 + C + log D) t_i sigma2 / n on <Y,u_i>_n^2.
Vec complete_thresholds(const ModelCollection& collection, const PenaltySpec& spec, double sigma2,
                        const ObliqueProjector& P);

/// Keeps exactly the u_i with <Y,u_i>_n^2 >= (1 + C + log D) t_i sigma2 / n,
/// which minimizes the criterion over all 2^D subsets.
SelectionOutcome select_complete_threshold(const Vec& Y, const ModelCollection& collection,
                                           const PenaltySpec& spec, double sigma2,
                                           const ObliqueProjector& P);

/// n ||Y - pi_V Y||_n^2 / Tr(P'(I - pi_V)P). Throws ConfigurationError when
/// V violates the half-trace condition.
double estimate_variance(const Vec& Y, const Mat& v_basis, const ObliqueProjector& P);

/// Largest prefix of `basis` whose Tr(P' pi P) stays within Tr(P'P)/2.
OrthonormalBasis default_variance_space(const OrthonormalBasis& basis, const ObliqueProjector& P);

/// Resolves sigma^2 (known, or estimated on the default variance space)
/// and dispatches on spec.family.
SelectionOutcome select(const Vec& Y, const ModelCollection& collection, const PenaltySpec& spec,
                        const ObliqueProjector& P);

/// Same, estimating sigma^2 on an explicit variance space.
SelectionOutcome select(const Vec& Y, const ModelCollection& collection, const PenaltySpec& spec,
                        const ObliqueProjector& P, const Mat& v_basis);

/// inf_m { ||s - s_m||_n^2 + Tr(P' pi_m P) sigma2 / n } over the collection.
double oracle_denominator(const Vec& s_true, const ModelCollection& collection,
                          const ObliqueProjector& P, double sigma2);

/// Baseline ignoring the parasitic components:
/// argmin ||Z - pi_m Z||_n^2 + C dim(S_m) sigma2 / n over the nested models.
SelectionOutcome select_classic(const Vec& Z, const ModelCollection& collection, double C,
                                double sigma2);

}  // namespace addcomp
