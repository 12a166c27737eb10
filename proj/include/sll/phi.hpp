#pragma once

#include <cmath>
#include <string>

#include "sll/errors.hpp"

namespace sll {

// Builtin regularizer family. Phi(x) is the penalty, phi(x) its (sub)gradient.
// The `beta` factor scales the whole penalty; `smoothed_l1` replaces sgn(x)
// by tanh(x/epsilon) for convergence studies.
struct PhiSpec {
  enum class Kind { none, l1, smoothed_l1, elastic, tanh_kind };

  Kind kind = Kind::none;
  double beta = 0.0;      // overall strength multiplier
  double epsilon = 1e-3;  // smoothed_l1
  double lambda1 = 0.0;   // elastic: lambda1 x^2 + lambda2 |x|
  double lambda2 = 0.0;
  double alpha = 2.0;     // tanh(alpha |x|)

  static PhiSpec none() { return {}; }
  static PhiSpec l1(double beta) { return {Kind::l1, beta}; }
  static PhiSpec smoothed_l1(double beta, double eps) { return {Kind::smoothed_l1, beta, eps}; }
  static PhiSpec elastic(double beta, double l1c, double l2c) {
    PhiSpec p{Kind::elastic, beta};
    p.lambda1 = l1c;
    p.lambda2 = l2c;
    return p;
  }
  static PhiSpec tanh_reg(double beta, double alpha) {
    PhiSpec p{Kind::tanh_kind, beta};
    p.alpha = alpha;
    return p;
  }

  bool is_zero() const { return kind == Kind::none || beta == 0.0; }

  // gradient phi(x) = beta * d/dx Phi_unit(x)
  double grad(double x) const {
    switch (kind) {
      case Kind::none:
        return 0.0;
      case Kind::l1:
        return beta * sgn(x);
      case Kind::smoothed_l1:
        return beta * std::tanh(x / epsilon);
      case Kind::elastic:
        return beta * (2.0 * lambda1 * x + lambda2 * sgn(x));
      case Kind::tanh_kind: {
        const double c = std::cosh(alpha * x);
        return beta * alpha * sgn(x) / (c * c);
      }
    }
    return 0.0;
  }

  // penalty beta * Phi_unit(x)
  double penalty(double x) const {
    switch (kind) {
      case Kind::none:
        return 0.0;
      case Kind::l1:
        return beta * std::abs(x);
      case Kind::smoothed_l1:
        // epsilon * log cosh(x/epsilon), stable for large |x|
        return beta * epsilon * log_cosh(x / epsilon);
      case Kind::elastic:
        return beta * (lambda1 * x * x + lambda2 * std::abs(x));
      case Kind::tanh_kind:
        return beta * std::tanh(alpha * std::abs(x));
    }
    return 0.0;
  }

  std::string name() const {
    switch (kind) {
      case Kind::none:
        return "none";
      case Kind::l1:
        return "l1";
      case Kind::smoothed_l1:
        return "smoothed_l1";
      case Kind::elastic:
        return "elastic";
      case Kind::tanh_kind:
        return "tanh";
    }
    return "none";
  }

 private:
  static double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }
  static double log_cosh(double u) {
    const double a = std::abs(u);
    return a + std::log1p(std::exp(-2.0 * a)) - M_LN2;
  }
};

}  // namespace sll
