#include "addcomp/test_functions.hpp"

#include "addcomp/bases.hpp"
#include "addcomp/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace addcomp {

namespace {

constexpr double kQuadratureTolerance = 1e-10;

double adaptive_integral(double a, double b, auto&& f) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15,
                                                                        kQuadratureTolerance);
}

}  // namespace

std::vector<std::string> known_test_function_ids() {
  return {"f1", "f2", "f3", "f4", "f5", "f6", "zero", "haar"};
}

double TestFunction::raw(Kind kind, double x) {
  using std::numbers::pi;
  switch (kind) {
    case Kind::f1: return std::sin(4.0 * pi * std::min(x, 0.5));
    case Kind::f2: return std::cos(2.0 * pi * (x - 0.25) * (x - 0.25));
    case Kind::f3: return x + 2.0 * std::exp(-16.0 * x * x);
    case Kind::f4: return std::sin(2.0 * x) + 2.0 * std::exp(-16.0 * x * x);
    case Kind::f5: {
      const double e = std::exp(-10.0 * (x - 0.5));
      return (1.0 - e) / (1.0 + e);
    }
    case Kind::f6: return 6.0 * x * (1.0 - x) - 1.0;
    case Kind::zero: return 0.0;
    case Kind::haar: return haar_mother(x);
  }
  return 0.0;
}

TestFunction TestFunction::from_id(std::string_view id) {
  static constexpr std::array<std::pair<std::string_view, Kind>, 8> table{{
      {"f1", Kind::f1}, {"f2", Kind::f2}, {"f3", Kind::f3}, {"f4", Kind::f4},
      {"f5", Kind::f5}, {"f6", Kind::f6}, {"zero", Kind::zero}, {"haar", Kind::haar},
  }};
  const auto it = std::find_if(table.begin(), table.end(), [&](auto& e) { return e.first == id; });
  if (it == table.end()) throw InvalidInput("unknown test function id '" + std::string(id) + "'");

  TestFunction out;
  out.kind_ = it->second;
  out.id_ = std::string(id);
  // f1, f5, f6, the Haar mother and zero integrate to 0 exactly; only
  // f2..f4 carry a centering constant.
  if (out.kind_ == Kind::f2 || out.kind_ == Kind::f3 || out.kind_ == Kind::f4) {
    const Kind kind = out.kind_;
    auto f = [kind](double x) { return raw(kind, x); };
    out.centering_ = adaptive_integral(0.0, 0.5, f) + adaptive_integral(0.5, 1.0, f);
  }
  return out;
}

double TestFunction::operator()(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw InvalidInput("test function " + id_ + ": x = " + std::to_string(x) + " outside [0,1]");
  }
  return raw(kind_, x) - centering_;
}

double eval_test_function(std::string_view id, double x) { return TestFunction::from_id(id)(x); }

}  // namespace addcomp
