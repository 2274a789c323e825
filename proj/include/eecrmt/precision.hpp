#pragma once

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <limits>
#include <type_traits>

#include "eecrmt/errors.hpp"

namespace eecrmt {

// Variable-precision MPFR real. Arithmetic results take the larger precision
// of the operands; freshly constructed values take the thread's default.
using mp_real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                              boost::multiprecision::et_off>;

template <class Real>
inline constexpr bool is_mp_v = std::is_same_v<Real, mp_real>;

struct PrecisionContext {
  int digits = 15;
  double abs_tol = 1e-13;
  double rel_tol = 1e-13;

  // Tolerances three digits short of the working precision.
  static PrecisionContext with_digits(int digits) {
    PrecisionContext c;
    c.digits = digits;
    c.abs_tol = std::pow(10.0, -(digits - 3));
    c.rel_tol = c.abs_tol;
    return c;
  }

  void validate() const {
    if (digits < 15) throw ParamError("precision: digits must be >= 15");
    if (!(abs_tol > 0 && abs_tol < 1) || !(rel_tol > 0 && rel_tol < 1))
      throw ParamError("precision: tolerances must lie in (0, 1)");
  }
};

// Sets the thread's default mp precision for the lifetime of the guard.
class ScopedDigits {
 public:
  explicit ScopedDigits(int digits) : saved_(mp_real::default_precision()) {
    mp_real::default_precision(static_cast<unsigned>(digits));
  }
  ~ScopedDigits() { mp_real::default_precision(saved_); }
  ScopedDigits(const ScopedDigits&) = delete;
  ScopedDigits& operator=(const ScopedDigits&) = delete;

 private:
  unsigned saved_;
};

// Decimal digits carried by the current working type.
template <class Real>
int working_digits() {
  if constexpr (is_mp_v<Real>)
    return static_cast<int>(mp_real::default_precision());
  else
    return std::numeric_limits<Real>::digits10 + 1;
}

template <class Real>
Real working_epsilon() {
  if constexpr (is_mp_v<Real>) {
    using std::pow;
    return pow(mp_real(10), -static_cast<int>(mp_real::default_precision()) + 1);
  } else {
    return std::numeric_limits<Real>::epsilon();
  }
}

// Re-rounds x to the current default precision (no-op for builtin types).
template <class Real>
Real promote(const Real& x) {
  if constexpr (is_mp_v<Real>)
    return mp_real(x, mp_real::default_precision());
  else
    return x;
}

template <class Real>
double to_double(const Real& x) {
  return static_cast<double>(x);
}

template <class Real>
Real pi_value() {
  if constexpr (is_mp_v<Real>)
    return boost::math::constants::pi<mp_real>();
  else
    return static_cast<Real>(3.141592653589793238462643383279502884L);
}

template <class Real>
Real infinity_value() {
  return std::numeric_limits<Real>::infinity();
}

}  // namespace eecrmt
