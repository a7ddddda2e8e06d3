#include "snlab/gamma_kit.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/sin_pi.hpp>

#include <limits>
#include <numbers>
#include <sstream>

#include "snlab/errors.hpp"

namespace snlab {

namespace {

std::string fmt(const char* what, double x) {
  std::ostringstream os;
  os.precision(17);
  os << what << ": " << x;
  return os.str();
}

void require_positive(const char* fn, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError(fmt(fn, x));
}

// Gamma(x)/Gamma(x+b), or 0 when it leaves the double range.
double delta_ratio_or_zero(double x, double b) {
  try {
    return boost::math::tgamma_delta_ratio(x, b);
  } catch (const std::exception&) {
    return 0.0;
  }
}

}  // namespace

SignedLogValue SignedLogValue::from_double(double v) {
  if (v == 0.0) return {};
  return {std::log(std::fabs(v)), v > 0 ? 1 : -1};
}

SignedLogValue SignedLogValue::from_log(double log_abs, int sign) {
  if (sign == 0) return {};
  return {log_abs, sign > 0 ? 1 : -1};
}

double SignedLogValue::to_double() const {
  if (sign == 0) return 0.0;
  return sign * std::exp(log_abs);
}

SignedLogValue SignedLogValue::operator*(const SignedLogValue& o) const {
  if (sign == 0 || o.sign == 0) return {};
  return {log_abs + o.log_abs, sign * o.sign};
}

SignedLogValue SignedLogValue::operator/(const SignedLogValue& o) const {
  if (o.sign == 0) throw DomainError("division by zero SignedLogValue");
  if (sign == 0) return {};
  return {log_abs - o.log_abs, sign * o.sign};
}

double log_gamma(double x) {
  require_positive("log_gamma argument must be positive", x);
  return boost::math::lgamma(x);
}

SignedLogValue gamma_signed(double x) {
  if (!std::isfinite(x)) throw DomainError(fmt("gamma_signed argument", x));
  if (x > 0.0) return {boost::math::lgamma(x), 1};
  const double nearest = std::round(x);
  if (std::fabs(x - nearest) <= kPoleGuard)
    throw PoleError(fmt("gamma_signed too close to pole", x));
  // Gamma(x) = pi / (sin(pi x) Gamma(1-x))
  const double s = boost::math::sin_pi(x);
  const double la = std::log(std::numbers::pi) - std::log(std::fabs(s)) -
                    boost::math::lgamma(1.0 - x);
  return {la, s > 0 ? 1 : -1};
}

double log_gamma_ratio(double x, double b) {
  require_positive("log_gamma_ratio base", x);
  require_positive("log_gamma_ratio shifted argument", x + b);
  if (b == 0.0) return 0.0;
  // tgamma_delta_ratio keeps full relative precision for huge x.
  if (std::fabs(b) <= 64.0) {
    const double r = delta_ratio_or_zero(x, b);
    if (std::isnormal(r)) return -std::log(r);
  }
  return boost::math::lgamma(x + b) - boost::math::lgamma(x);
}

double gamma_ratio(double x, double b) {
  require_positive("gamma_ratio base", x);
  require_positive("gamma_ratio shifted argument", x + b);
  if (std::fabs(b) <= 64.0) {
    const double r = delta_ratio_or_zero(x, b);
    if (std::isnormal(r)) return 1.0 / r;
  }
  return std::exp(log_gamma_ratio(x, b));
}

double digamma(double x) {
  require_positive("digamma argument must be positive", x);
  return boost::math::digamma(x);
}

double euler_beta(double x, double y) {
  require_positive("euler_beta x", x);
  require_positive("euler_beta y", y);
  return boost::math::beta(x, y);
}

double log_euler_beta(double x, double y) {
  require_positive("log_euler_beta x", x);
  require_positive("log_euler_beta y", y);
  return boost::math::lgamma(x) + boost::math::lgamma(y) -
         boost::math::lgamma(x + y);
}

double log_reflection(double t, double one_minus_t) {
  if (!(t > 0.0) || !(one_minus_t > 0.0))
    throw PoleError(fmt("log_reflection argument outside (0,1)", t));
  const double u = t <= one_minus_t ? t : one_minus_t;
  return std::log(std::numbers::pi) - std::log(boost::math::sin_pi(u));
}

}  // namespace snlab
