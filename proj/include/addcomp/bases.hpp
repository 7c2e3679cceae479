#pragma once

// Haar wavelet and sine/cosine dictionaries sampled at design points.

#include "addcomp/linalg.hpp"

#include <compare>
#include <vector>

namespace addcomp {

/// phi_{level,shift}(x) = 2^{level/2} phi(2^level x - shift), 0 <= shift < 2^level.
struct HaarIndex {
  int level = 0;
  int shift = 0;

  /// Position k = 2^level + shift in the flat ordering (1-based).
  int flat() const { return (1 << level) + shift; }
  auto operator<=>(const HaarIndex&) const = default;
};

/// Column label of the parasitic dictionary: component 0 is the constant
/// vector, otherwise `frequency` is the psi_k index (odd: cos, even: sin).
struct FourierIndex {
  int component = 0;
  int frequency = 0;
  auto operator<=>(const FourierIndex&) const = default;
};

template <class Label>
struct SampledBasis {
  Mat matrix;  // n x D, column k = basis function k at the design points
  std::vector<Label> labels;

  Eigen::Index size() const { return matrix.cols(); }
};

using HaarBasis = SampledBasis<HaarIndex>;
using ParasiticBasis = SampledBasis<FourierIndex>;

/// Covariate of interest x and parasitic covariates y (n x K).
struct DesignPoints {
  Vec x;
  Mat y;

  Eigen::Index n() const { return x.size(); }
  Eigen::Index components() const { return y.cols(); }
};

/// Throws InvalidInput if any coordinate is outside [0,1] or sizes disagree.
void validate_design(const DesignPoints& design);

double haar_mother(double u);
double haar_eval(HaarIndex idx, double x);

/// k even: sin((k/2) pi y); k odd: cos(((k+1)/2) pi y).
double fourier_eval(int k, double y);

struct Dimensions {
  int haar_depth = 0;       // d_n
  int haar_size = 0;        // D_n = 2^{d_n+1} - 1
  int fourier_order = 0;    // d_n'
  int parasitic_size = 0;   // D_n' = 2 K d_n' + 1
};

/// d_n = floor(log(2 sqrt(n) + 1/2) / log 2).
int haar_depth_for(int n);

/// Dimensions used by the simulation study. K = 0 yields d_n' = 0 and a
/// parasitic space reduced to the constant vector. Throws ConfigurationError
/// when D_n + 2 K d_n' >= n.
Dimensions dims_for(int n, int K);

/// Haar columns ordered by k = 2^i + j, i = 0..depth.
HaarBasis build_E(const Vec& x, int depth);

/// 1_n, then for each parasitic covariate the 2*order columns
/// cos(pi y), sin(pi y), cos(2 pi y), sin(2 pi y), ...
ParasiticBasis build_F(const Mat& y, int order);

/// All Haar indices with level <= depth, in flat order.
std::vector<HaarIndex> haar_grid(int depth);

}  // namespace addcomp
