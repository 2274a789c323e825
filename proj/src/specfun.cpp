#include "eecrmt/specfun.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace eecrmt {

namespace {

using std::abs;
using std::cos;
using std::exp;
using std::floor;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;

template <class Real>
bool is_nonpositive_integer(const Real& x) {
  return x <= 0 && floor(x) == x;
}

template <class Fn>
auto guarded(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::overflow_error& e) {
    throw OverflowError(std::string(name) + ": " + e.what());
  } catch (const std::domain_error& e) {
    throw DomainError(std::string(name) + ": " + e.what());
  } catch (const boost::math::evaluation_error& e) {
    throw ConvergenceError(std::string(name) + ": " + e.what(), 0.0, 0.0);
  }
}

// Digits needed beyond the target so that the Maclaurin sums survive their
// cancellation: terms grow like exp(zeta), Ai(x) shrinks like exp(-zeta).
int series_guard_digits(double x) {
  const double zeta = 2.0 / 3.0 * std::pow(std::abs(x), 1.5);
  const double loss = (x > 0 ? 2 * zeta : zeta) / std::log(10.0);
  return static_cast<int>(std::ceil(loss)) + 6;
}

// The asymptotic series reaches relative accuracy ~exp(-2 zeta) at its
// smallest term.
bool asymptotic_accurate(double x, int digits) {
  const double zeta = 2.0 / 3.0 * std::pow(std::abs(x), 1.5);
  return 2 * zeta >= (digits + 3) * std::log(10.0);
}

AiryValues<mp_real> airy_series_mp(const mp_real& x_in, int digits) {
  ScopedDigits guard(digits);
  const mp_real x = promote(x_in);
  const mp_real three = 3;
  const mp_real c1 = pow(three, mp_real(-2) / 3) / boost::math::tgamma(mp_real(2) / 3);
  const mp_real c2 = pow(three, mp_real(-1) / 3) / boost::math::tgamma(mp_real(1) / 3);
  const mp_real x3 = x * x * x;
  const mp_real eps = working_epsilon<mp_real>();

  mp_real fk = 1, gk = x, fpk = x * x / 2, gpk = 1;
  mp_real f = fk, g = gk, fp = fpk, gp = gpk;
  const double ax = std::abs(static_cast<double>(x));
  for (int k = 1; k < 100000; ++k) {
    const mp_real kk = k;
    fk *= x3 / ((3 * kk - 1) * (3 * kk));
    gk *= x3 / ((3 * kk) * (3 * kk + 1));
    if (k >= 2) fpk *= x3 / ((3 * kk - 3) * (3 * kk - 1));
    gpk *= x3 / ((3 * kk - 2) * (3 * kk));
    f += fk;
    g += gk;
    if (k >= 2) fp += fpk;
    gp += gpk;
    const bool past_peak = 9.0 * k * k > ax * ax * ax + 1;
    const mp_real tail = abs(fk) + abs(gk) + abs(fpk) + abs(gpk);
    if (past_peak && tail <= eps * (abs(f) + abs(g) + abs(fp) + abs(gp))) break;
  }
  const mp_real s3 = sqrt(three);
  return {c1 * f - c2 * g, c1 * fp - c2 * gp, s3 * (c1 * f + c2 * g), s3 * (c1 * fp + c2 * gp)};
}

// Asymptotic expansions at |x| large, summed to the smallest term. For
// positive x, Ai/Ai' carry exp(-zeta) and Bi/Bi' carry exp(zeta); `scaled`
// returns those exponentials factored out (ai*e^zeta, bi*e^-zeta).
template <class Real>
struct AsymptoticParts {
  AiryValues<Real> v;
  Real zeta;
};

template <class Real>
AsymptoticParts<Real> airy_asymptotic(const Real& x, bool scaled) {
  const Real pi = pi_value<Real>();
  const Real eps = working_epsilon<Real>();
  const Real ax = abs(x);
  const Real zeta = Real(2) / 3 * ax * sqrt(ax);
  const Real x14 = sqrt(sqrt(ax));
  const Real rpi = sqrt(pi);

  // u_k, v_k coefficients times zeta^-k, accumulated with the sign patterns
  // each branch needs.
  Real u = 1, su = 1, su_alt = 1, sv = 1, sv_alt = 1;
  Real pu = 1, qu = 0, pv = 1, qv = 0;
  Real prev = 2;
  const Real inv = 1 / zeta;
  Real zpow = 1;
  for (int k = 1; k < 10000; ++k) {
    const Real kk = k;
    u *= (6 * kk - 5) * (6 * kk - 3) * (6 * kk - 1) / ((2 * kk - 1) * 216 * kk);
    const Real v = -(6 * kk + 1) / (6 * kk - 1) * u;
    zpow *= inv;
    const Real tu = u * zpow;
    const Real tv = v * zpow;
    const Real mag = abs(tu) + abs(tv);
    if (mag >= prev) break;
    prev = mag;
    const bool odd = (k % 2) == 1;
    su += tu;
    sv += tv;
    su_alt += odd ? -tu : tu;
    sv_alt += odd ? -tv : tv;
    // Oscillatory branch: P collects even k with sign (-1)^(k/2), Q odd k
    // with sign (-1)^((k-1)/2).
    const int half = k / 2;
    const Real sgn = (half % 2 == 0) ? Real(1) : Real(-1);
    if (odd) {
      qu += sgn * tu;
      qv += sgn * tv;
    } else {
      pu += sgn * tu;
      pv += sgn * tv;
    }
    if (mag <= eps * Real(1e-3)) break;
  }

  AiryValues<Real> r;
  if (x > 0) {
    const Real em = scaled ? Real(1) : exp(-zeta);
    const Real ep = scaled ? Real(1) : exp(zeta);
    r.ai = em / (2 * rpi * x14) * su_alt;
    r.aip = -x14 * em / (2 * rpi) * sv_alt;
    r.bi = ep / (rpi * x14) * su;
    r.bip = x14 * ep / rpi * sv;
  } else {
    const Real th = zeta - pi / 4;
    const Real c = cos(th), s = sin(th);
    r.ai = (c * pu + s * qu) / (rpi * x14);
    r.aip = x14 / rpi * (s * pv - c * qv);
    r.bi = (-s * pu + c * qu) / (rpi * x14);
    r.bip = x14 / rpi * (c * pv + s * qv);
  }
  return {r, zeta};
}

}  // namespace

template <class Real>
Real gamma_fn(const Real& x) {
  if (is_nonpositive_integer(x)) throw PoleError("gamma_fn: pole at non-positive integer");
  return guarded("gamma_fn", [&] { return Real(boost::math::tgamma(x)); });
}

template <class Real>
Real gamma_fn(const Real& x, const PrecisionContext& ctx) {
  ctx.validate();
  if constexpr (is_mp_v<Real>) {
    ScopedDigits g(ctx.digits);
    return gamma_fn<Real>(promote(x));
  } else {
    return gamma_fn<Real>(x);
  }
}

template <class Real>
Real log_gamma_fn(const Real& x) {
  if (is_nonpositive_integer(x)) throw PoleError("log_gamma_fn: pole at non-positive integer");
  return guarded("log_gamma_fn", [&] { return Real(boost::math::lgamma(x)); });
}

template <class Real>
Real beta_fn(const Real& a, const Real& b) {
  if (!(a > 0) || !(b > 0)) throw DomainError("beta_fn: arguments must be positive");
  return guarded("beta_fn", [&] { return Real(boost::math::beta(a, b)); });
}

template <class Real>
Real upper_gamma_reg(const Real& a, const Real& x) {
  if (!(a > 0) || x < 0) throw DomainError("upper_gamma_reg: requires a > 0 and x >= 0");
  if (x == 0) return Real(1);
  return guarded("upper_gamma_reg", [&] { return Real(boost::math::gamma_q(a, x)); });
}

template <class Real>
Real upper_gamma_reg(const Real& a, const Real& x, const PrecisionContext& ctx) {
  ctx.validate();
  if constexpr (is_mp_v<Real>) {
    ScopedDigits g(ctx.digits);
    return upper_gamma_reg<Real>(promote(a), promote(x));
  } else {
    return upper_gamma_reg<Real>(a, x);
  }
}

template <class Real>
Real lower_gamma_reg(const Real& a, const Real& x) {
  if (!(a > 0) || x < 0) throw DomainError("lower_gamma_reg: requires a > 0 and x >= 0");
  if (x == 0) return Real(0);
  return guarded("lower_gamma_reg", [&] { return Real(boost::math::gamma_p(a, x)); });
}

template <class Real>
Real upper_gamma(const Real& a, const Real& x) {
  if (!(a > 0) || x < 0) throw DomainError("upper_gamma: requires a > 0 and x >= 0");
  if (x == 0) return gamma_fn<Real>(a);
  return guarded("upper_gamma", [&] { return Real(boost::math::tgamma(a, x)); });
}

template <class Real>
Real lower_gamma(const Real& a, const Real& x) {
  if (!(a > 0) || x < 0) throw DomainError("lower_gamma: requires a > 0 and x >= 0");
  if (x == 0) return Real(0);
  return guarded("lower_gamma", [&] { return Real(boost::math::tgamma_lower(a, x)); });
}

template <class Real>
Real reg_incomplete_beta(const Real& a, const Real& b, const Real& x) {
  if (!(a > 0) || !(b > 0) || x < 0 || x > 1)
    throw DomainError("reg_incomplete_beta: requires a, b > 0 and 0 <= x <= 1");
  if (x == 0) return Real(0);
  if (x == 1) return Real(1);
  return guarded("reg_incomplete_beta", [&] { return Real(boost::math::ibeta(a, b, x)); });
}

template <class Real>
Real reg_incomplete_beta(const Real& a, const Real& b, const Real& x, const PrecisionContext& ctx) {
  ctx.validate();
  if constexpr (is_mp_v<Real>) {
    ScopedDigits g(ctx.digits);
    return reg_incomplete_beta<Real>(promote(a), promote(b), promote(x));
  } else {
    return reg_incomplete_beta<Real>(a, b, x);
  }
}

template <class Real>
Real erfc_fn(const Real& x) {
  return guarded("erfc_fn", [&] { return Real(boost::math::erfc(x)); });
}

template <class Real>
AiryValues<Real> airy(const Real& x) {
  const int digits = working_digits<Real>();
  const double xd = to_double(x);
  if constexpr (!is_mp_v<Real>) {
    if (!std::isfinite(xd)) throw DomainError("airy: argument must be finite");
    if (xd > 0 && 2.0 / 3.0 * std::pow(xd, 1.5) > 709.0)
      throw OverflowError("airy: Bi(x) overflows double for x above 104.8");
  }
  if (asymptotic_accurate(xd, digits)) {
    if constexpr (is_mp_v<Real>) {
      ScopedDigits g(digits + 3);
      return airy_asymptotic<Real>(promote(x), false).v;
    } else {
      return airy_asymptotic<Real>(x, false).v;
    }
  }
  const int work = digits + 3 + series_guard_digits(xd);
  AiryValues<mp_real> s;
  if constexpr (is_mp_v<Real>)
    s = airy_series_mp(x, work);
  else
    s = airy_series_mp(mp_real(x, work), work);
  if constexpr (is_mp_v<Real>) {
    return {promote(s.ai), promote(s.aip), promote(s.bi), promote(s.bip)};
  } else {
    return {static_cast<Real>(s.ai), static_cast<Real>(s.aip), static_cast<Real>(s.bi),
            static_cast<Real>(s.bip)};
  }
}

template <class Real>
AiryValues<Real> airy(const Real& x, const PrecisionContext& ctx) {
  ctx.validate();
  if constexpr (is_mp_v<Real>) {
    ScopedDigits g(ctx.digits);
    return airy<Real>(promote(x));
  } else {
    return airy<Real>(x);
  }
}

template <class Real>
std::pair<Real, Real> airy_ai(const Real& x) {
  const int digits = working_digits<Real>();
  const double xd = to_double(x);
  if (xd > 0 && asymptotic_accurate(xd, digits)) {
    if constexpr (is_mp_v<Real>) {
      ScopedDigits g(digits + 3);
      auto p = airy_asymptotic<Real>(promote(x), true);
      const mp_real e = exp(-p.zeta);
      return {promote(mp_real(p.v.ai * e)), promote(mp_real(p.v.aip * e))};
    } else {
      auto p = airy_asymptotic<Real>(x, true);
      const Real e = exp(-p.zeta);
      return {p.v.ai * e, p.v.aip * e};
    }
  }
  const AiryValues<Real> v = airy<Real>(x);
  return {v.ai, v.aip};
}

#define EECRMT_INSTANTIATE(Real)                                                              \
  template Real gamma_fn<Real>(const Real&);                                                  \
  template Real gamma_fn<Real>(const Real&, const PrecisionContext&);                         \
  template Real log_gamma_fn<Real>(const Real&);                                              \
  template Real beta_fn<Real>(const Real&, const Real&);                                      \
  template Real upper_gamma_reg<Real>(const Real&, const Real&);                              \
  template Real upper_gamma_reg<Real>(const Real&, const Real&, const PrecisionContext&);     \
  template Real lower_gamma_reg<Real>(const Real&, const Real&);                              \
  template Real upper_gamma<Real>(const Real&, const Real&);                                  \
  template Real lower_gamma<Real>(const Real&, const Real&);                                  \
  template Real reg_incomplete_beta<Real>(const Real&, const Real&, const Real&);             \
  template Real reg_incomplete_beta<Real>(const Real&, const Real&, const Real&,              \
                                          const PrecisionContext&);                           \
  template Real erfc_fn<Real>(const Real&);                                                   \
  template AiryValues<Real> airy<Real>(const Real&);                                          \
  template AiryValues<Real> airy<Real>(const Real&, const PrecisionContext&);                 \
  template std::pair<Real, Real> airy_ai<Real>(const Real&);

EECRMT_INSTANTIATE(double)
EECRMT_INSTANTIATE(mp_real)

#undef EECRMT_INSTANTIATE

}  // namespace eecrmt
