#pragma once

#include <cmath>

namespace snlab {

// A real number stored as sign and natural log of its magnitude.
struct SignedLogValue {
  double log_abs = -INFINITY;
  int sign = 0;

  static SignedLogValue zero() { return {}; }
  static SignedLogValue from_double(double v);
  static SignedLogValue from_log(double log_abs, int sign);

  double to_double() const;
  bool is_zero() const { return sign == 0; }

  SignedLogValue operator*(const SignedLogValue& o) const;
  SignedLogValue operator/(const SignedLogValue& o) const;
  SignedLogValue operator-() const { return {log_abs, -sign}; }
};

double log_gamma(double x);

// Gamma on the whole real line except the poles; reflection for x < 0.
SignedLogValue gamma_signed(double x);

// Gamma(x+b)/Gamma(x).
double gamma_ratio(double x, double b);

// log(Gamma(x+b)/Gamma(x)) for x > 0 and x+b > 0.
double log_gamma_ratio(double x, double b);

double digamma(double x);

double euler_beta(double x, double y);
double log_euler_beta(double x, double y);

// log(pi / sin(pi*t)) for t in (0,1), i.e. log(Gamma(t)Gamma(1-t)).
// The complement 1-t is passed separately so values near 1 keep precision.
double log_reflection(double t, double one_minus_t);

inline constexpr double kPoleGuard = 1e-10;

}  // namespace snlab
