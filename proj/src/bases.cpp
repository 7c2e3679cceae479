#include "addcomp/bases.hpp"

#include "addcomp/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace addcomp {

namespace {

void require_unit_interval(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw InvalidInput(std::string(what) + " = " + std::to_string(v) + " is outside [0,1]");
  }
}

}  // namespace

void validate_design(const DesignPoints& design) {
  if (design.x.size() == 0) throw InvalidInput("design has no points");
  if (design.y.cols() > 0 && design.y.rows() != design.x.size()) {
    throw InvalidInput("parasitic covariates have " + std::to_string(design.y.rows()) +
                       " rows, expected " + std::to_string(design.x.size()));
  }
  for (Eigen::Index i = 0; i < design.x.size(); ++i) require_unit_interval(design.x(i), "x");
  for (Eigen::Index j = 0; j < design.y.cols(); ++j) {
    const std::string name = "y" + std::to_string(j + 1);
    for (Eigen::Index i = 0; i < design.y.rows(); ++i) {
      require_unit_interval(design.y(i, j), name.c_str());
    }
  }
}

double haar_mother(double u) {
  if (u >= 0.0 && u < 0.5) return 1.0;
  if (u >= 0.5 && u < 1.0) return -1.0;
  return 0.0;
}

double haar_eval(HaarIndex idx, double x) {
  require_unit_interval(x, "haar_eval: x");
  if (idx.level < 0 || idx.shift < 0 || idx.shift >= (1 << idx.level)) {
    throw InvalidInput("haar_eval: invalid index (" + std::to_string(idx.level) + "," +
                       std::to_string(idx.shift) + ")");
  }
  const double scale = std::ldexp(1.0, idx.level);
  return std::sqrt(scale) * haar_mother(scale * x - idx.shift);
}

double fourier_eval(int k, double y) {
  if (k < 1) throw InvalidInput("fourier_eval: k must be >= 1, got " + std::to_string(k));
  if (k % 2 == 0) return std::sin((k / 2) * std::numbers::pi * y);
  return std::cos(((k + 1) / 2) * std::numbers::pi * y);
}

int haar_depth_for(int n) {
  if (n < 1) throw InvalidInput("haar_depth_for: n must be positive");
  return static_cast<int>(std::floor(std::log(2.0 * std::sqrt(static_cast<double>(n)) + 0.5) /
                                     std::log(2.0)));
}

Dimensions dims_for(int n, int K) {
  if (n < 4) throw InvalidInput("dims_for: n must be >= 4, got " + std::to_string(n));
  if (K < 0) throw InvalidInput("dims_for: K must be >= 0");
  Dimensions d;
  d.haar_depth = haar_depth_for(n);
  d.haar_size = (1 << (d.haar_depth + 1)) - 1;
  d.fourier_order =
      K == 0 ? 0
             : static_cast<int>(std::floor((4.0 * std::sqrt(static_cast<double>(n)) - 1.0) / (2.0 * K)));
  d.parasitic_size = 2 * K * d.fourier_order + 1;
  if (d.haar_size + 2 * K * d.fourier_order >= n) {
    throw ConfigurationError("dimension budget violated: D_n + sum_j D_n^(j) = " +
                             std::to_string(d.haar_size + 2 * K * d.fourier_order) +
                             " must be < n = " + std::to_string(n));
  }
  return d;
}

std::vector<HaarIndex> haar_grid(int depth) {
  std::vector<HaarIndex> grid;
  for (int i = 0; i <= depth; ++i) {
    for (int j = 0; j < (1 << i); ++j) grid.push_back({i, j});
  }
  return grid;
}

HaarBasis build_E(const Vec& x, int depth) {
  if (depth < 0) throw InvalidInput("build_E: negative depth");
  HaarBasis out;
  out.labels = haar_grid(depth);
  out.matrix.resize(x.size(), static_cast<Eigen::Index>(out.labels.size()));
  for (std::size_t k = 0; k < out.labels.size(); ++k) {
    for (Eigen::Index r = 0; r < x.size(); ++r) {
      out.matrix(r, static_cast<Eigen::Index>(k)) = haar_eval(out.labels[k], x(r));
    }
  }
  return out;
}

ParasiticBasis build_F(const Mat& y, int order) {
  if (order < 0) throw InvalidInput("build_F: negative order");
  const Eigen::Index n = y.rows();
  const Eigen::Index K = y.cols();
  ParasiticBasis out;
  out.matrix.resize(n, 1 + 2 * K * order);
  out.matrix.col(0).setOnes();
  out.labels.push_back({0, 0});
  Eigen::Index col = 1;
  for (Eigen::Index j = 0; j < K; ++j) {
    for (int k = 1; k <= 2 * order; ++k, ++col) {
      for (Eigen::Index r = 0; r < n; ++r) {
        require_unit_interval(y(r, j), "build_F: y");
        out.matrix(r, col) = fourier_eval(k, y(r, j));
      }
      out.labels.push_back({static_cast<int>(j + 1), k});
    }
  }
  return out;
}

}  // namespace addcomp
