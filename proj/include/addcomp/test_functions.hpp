#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace addcomp {

/// Centered test components on [0,1]: "f1".."f6" from the simulation study,
/// plus "zero" and "haar" (the Haar mother wavelet, which lies in every E).
class TestFunction {
 public:
  /// Throws InvalidInput for an unknown id.
  static TestFunction from_id(std::string_view id);

  /// Throws InvalidInput unless 0 <= x <= 1.
  double operator()(double x) const;

  const std::string& id() const { return id_; }
  /// Constant subtracted so that the integral over [0,1] vanishes.
  double centering() const { return centering_; }

 private:
  enum class Kind { f1, f2, f3, f4, f5, f6, zero, haar };
  static double raw(Kind kind, double x);

  Kind kind_ = Kind::zero;
  std::string id_;
  double centering_ = 0.0;
};

double eval_test_function(std::string_view id, double x);

std::vector<std::string> known_test_function_ids();

}  // namespace addcomp
