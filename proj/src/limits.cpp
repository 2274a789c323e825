#include "eecrmt/limits.hpp"

#include <cmath>

#include "eecrmt/quadrature.hpp"
#include "eecrmt/specfun.hpp"

namespace eecrmt {

namespace {

// Panels of unit length on the oscillatory side keep each tanh-sinh rule
// within a few half-periods of Ai.
template <class Real, class F>
Real integrate_to_infinity(F&& f, const Real& s, const Real& join, const QuadOptions& opt) {
  Real total = 0;
  Real a = s;
  while (a < join) {
    Real b = a + 1;
    if (b > join) b = join;
    total += quad<Real>(f, a, b, opt).value;
    a = b;
  }
  total += quad<Real>(f, a, infinity_value<Real>(), opt).value;
  return total;
}

template <class Real>
QuadOptions tail_options(const PrecisionContext& ctx) {
  QuadOptions opt = QuadOptions::from(ctx);
  // The tails decay super-exponentially; accuracy is relative.
  opt.abs_tol = std::numeric_limits<double>::min();
  return opt;
}

}  // namespace

template <class Real>
Real f_hat_1(const Real& s, const PrecisionContext& ctx) {
  ctx.validate();
  ScopedDigits g(is_mp_v<Real> ? ctx.digits : static_cast<int>(mp_real::default_precision()));
  const Real x = promote(s);
  auto ai = [](const Real& t) { return airy_ai<Real>(t).first; };
  // Finite panels up to 12, then one exp-sinh panel for the tail.
  const Real join = x < 12 ? Real(12) : x;
  return integrate_to_infinity<Real>(ai, x, join, tail_options<Real>(ctx)) / 2;
}

template <class Real>
Real f_hat_2_antiderivative(const Real& s) {
  const auto [a, ap] = airy_ai<Real>(s);
  return Real(2) / 3 * s * s * a * a - Real(2) / 3 * s * ap * ap - a * ap / 3;
}

template <class Real>
Real f_hat_2_quadrature(const Real& s, const PrecisionContext& ctx) {
  ctx.validate();
  ScopedDigits g(is_mp_v<Real> ? ctx.digits + 5 : static_cast<int>(mp_real::default_precision()));
  const Real x = promote(s);
  auto f = [](const Real& t) {
    const auto [a, ap] = airy_ai<Real>(t);
    return ap * ap - t * a * a;
  };
  const Real join = x < 0 ? Real(0) : x;
  return integrate_to_infinity<Real>(f, x, join, tail_options<Real>(ctx));
}

template <class Real>
Real f_hat_2(const Real& s, const PrecisionContext& ctx) {
  ctx.validate();
  if (s <= Real(kFHat2Crossover)) {
    ScopedDigits g(is_mp_v<Real> ? ctx.digits : static_cast<int>(mp_real::default_precision()));
    return f_hat_2_antiderivative<Real>(promote(s));
  }
  return f_hat_2_quadrature<Real>(s, ctx);
}

double f_hat(int symmetry_class, double s, const PrecisionContext& ctx) {
  if (symmetry_class == 1) return f_hat_1<double>(s, ctx);
  if (symmetry_class == 2) return f_hat_2<double>(s, ctx);
  throw ParamError("f_hat: symmetry class must be 1 or 2");
}

double delta_asymptote(int symmetry_class, double s) {
  if (symmetry_class != 1 && symmetry_class != 2) throw ParamError("delta_asymptote: class must be 1 or 2");
  if (!(s > 0)) throw DomainError("delta_asymptote: s must be positive");
  const double pi = 3.141592653589793238462643383279502884;
  const double d1 = -std::pow(s, -2.25) * std::exp(-2.0 / 3 * std::pow(s, 1.5)) / (32 * std::sqrt(pi));
  if (symmetry_class == 1) return d1;
  return std::pow(s, -4.5) * std::exp(-4.0 / 3 * std::pow(s, 1.5)) / (1024 * pi);
}

#define EECRMT_INSTANTIATE(Real)                                                    \
  template Real f_hat_1<Real>(const Real&, const PrecisionContext&);                \
  template Real f_hat_2<Real>(const Real&, const PrecisionContext&);                \
  template Real f_hat_2_antiderivative<Real>(const Real&);                          \
  template Real f_hat_2_quadrature<Real>(const Real&, const PrecisionContext&);

EECRMT_INSTANTIATE(double)
EECRMT_INSTANTIATE(mp_real)

#undef EECRMT_INSTANTIATE

}  // namespace eecrmt
