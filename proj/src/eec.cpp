#include "eecrmt/eec.hpp"

#include <cmath>
#include <functional>

#include "eecrmt/poly.hpp"
#include "eecrmt/quadrature.hpp"
#include "eecrmt/specfun.hpp"

namespace eecrmt {

namespace {

using boost::multiprecision::abs;
using boost::multiprecision::log10;
using boost::multiprecision::pow;

ClassicalFamily classical_family(const EnsembleSpec& e) {
  switch (e.kind) {
    case EnsembleKind::GOE:
    case EnsembleKind::GUE:
      return HermiteMonic{};
    case EnsembleKind::Wishart:
    case EnsembleKind::CWishart:
      return LaguerreMonic{e.alpha};
    case EnsembleKind::Beta:
    case EnsembleKind::CBeta:
      return ShiftedJacobiMonic{e.alpha, e.beta_param};
    default:
      throw ParamError("no classical family for " + ensemble_name(e.kind));
  }
}

bool classical(EnsembleKind k) {
  return k != EnsembleKind::CondGOE && k != EnsembleKind::CustomSym && k != EnsembleKind::CustomHerm;
}

struct Termwise {
  mp_real sum;
  mp_real magnitude;  // sum of |terms|
};

// Runs `build` with guard digits until the cancellation it reports leaves at
// least `target` + 3 correct digits.
std::pair<mp_real, double> with_guard_digits(int target, const std::function<Termwise()>& build) {
  int work = target + 10;
  for (int attempt = 0;; ++attempt) {
    ScopedDigits g(work);
    const Termwise t = build();
    int lost = 0;
    if (t.magnitude > 0) {
      lost = t.sum == 0 ? work : static_cast<int>(std::ceil(static_cast<double>(log10(t.magnitude / abs(t.sum)))));
      lost = std::max(lost, 0);
    }
    const double err = static_cast<double>(t.magnitude * pow(mp_real(10), 1 - work));
    if (work - lost >= target + 3 || attempt >= 3) return {mp_real(t.sum, work), err};
    work = target + lost + 10;
  }
}

// int_x^inf lambda^k e^{-c lambda^2} d lambda for c = 1/2 (real) or 1 (complex),
// split at 0 for negative x so the incomplete gamma argument stays >= 0.
mp_real gaussian_monomial_tail(int k, const mp_real& x, bool unit_variance) {
  const mp_real a = mp_real(k + 1) / 2;
  const mp_real pre = unit_variance ? pow(mp_real(2), mp_real(k - 1) / 2) : mp_real(1) / 2;
  const mp_real u = unit_variance ? x * x / 2 : x * x;
  if (x >= 0) return pre * upper_gamma<mp_real>(a, u);
  const mp_real inner = x == 0 ? mp_real(0) : lower_gamma<mp_real>(a, u);
  return pre * (gamma_fn<mp_real>(a) + (k % 2 ? -inner : inner));
}

// int_x^inf lambda^{k+a} e^{-lambda/scale} over lambda > 0.
mp_real laguerre_monomial_tail(int k, const mp_real& a, const mp_real& x, const mp_real& scale) {
  const mp_real p = mp_real(k) + a + 1;
  const mp_real y = x > 0 ? x / scale : mp_real(0);
  return pow(scale, p) * (y > 0 ? upper_gamma<mp_real>(p, y) : gamma_fn<mp_real>(p));
}

// int_x^1 lambda^{k+a} (1 - lambda)^b over 0 < lambda < 1.
mp_real jacobi_monomial_tail(int k, const mp_real& a, const mp_real& b, const mp_real& x) {
  const mp_real p = mp_real(k) + a + 1, q = b + 1;
  if (x >= 1) return mp_real(0);
  const mp_real full = beta_fn<mp_real>(p, q);
  if (x <= 0) return full;
  return full * reg_incomplete_beta<mp_real>(q, p, 1 - x);
}

// Tail integrals of x^k w(x), k = 0..degree, for the classical weights.
std::function<mp_real(int)> monomial_tails(const EnsembleSpec& e, const mp_real& x) {
  const bool real = e.real_symmetric();
  switch (e.kind) {
    case EnsembleKind::GOE:
    case EnsembleKind::GUE:
      return [x, real](int k) { return gaussian_monomial_tail(k, x, real); };
    case EnsembleKind::Wishart:
    case EnsembleKind::CWishart: {
      const double a = real ? (e.alpha - 1) / 2 : e.alpha;
      const double scale = real ? 2 : 1;
      return [x, a, scale](int k) { return laguerre_monomial_tail(k, mp_real(a), x, mp_real(scale)); };
    }
    default: {
      const double a = real ? (e.alpha - 1) / 2 : e.alpha;
      const double b = real ? (e.beta_param - 1) / 2 : e.beta_param;
      return [x, a, b](int k) { return jacobi_monomial_tail(k, mp_real(a), mp_real(b), x); };
    }
  }
}

EECResult closed_form(const EnsembleSpec& e, double x, const PrecisionContext& ctx) {
  const ClassicalFamily f = classical_family(e);
  const int n = e.n;
  mp_real norm;
  const auto [value, err] = with_guard_digits(ctx.digits, [&]() {
    const mp_real xm(x);
    Vector<mp_real> c;
    if (e.real_symmetric()) {
      c = classical_poly<mp_real>(f, n - 1).coeffs();
      norm = sigma_gamma_constants<mp_real>(f, n - 1).gamma;
    } else {
      const Vector<mp_real> a = classical_poly<mp_real>(f, n - 1).coeffs();
      const Vector<mp_real> b = classical_poly<mp_real>(f, n).coeffs();
      c = poly_add<mp_real>(poly_mul<mp_real>(a, poly_derivative<mp_real>(b)),
                            Vector<mp_real>(-poly_mul<mp_real>(b, poly_derivative<mp_real>(a))));
      norm = h_constant<mp_real>(f, n - 1);
    }
    const auto tail = monomial_tails(e, xm);
    Termwise t{mp_real(0), mp_real(0)};
    for (int k = 0; k < c.size(); ++k) {
      if (c[k] == 0) continue;
      const mp_real term = c[k] * tail(k);
      t.sum += term;
      t.magnitude += abs(term);
    }
    t.sum /= norm;
    t.magnitude /= norm;
    return t;
  });
  return {x, static_cast<double>(value), EecMethod::closed_form, err};
}

std::unique_ptr<MomentProvider<mp_real>> sym_provider(const EnsembleSpec& e, const PrecisionContext& ctx) {
  switch (e.kind) {
    case EnsembleKind::GOE:
      return gaussian_moments<mp_real>(ctx);
    case EnsembleKind::Wishart:
      return laguerre_moments<mp_real>(e.alpha, ctx);
    case EnsembleKind::Beta:
      return jacobi_moments<mp_real>(e.alpha, e.beta_param, ctx);
    case EnsembleKind::CondGOE:
      return cond_goe_moments<mp_real>(ctx);
    default:
      return weight_spec_moments<mp_real>(e.weight_spec(), ctx);
  }
}

}  // namespace

bool EnsembleSpec::real_symmetric() const {
  switch (kind) {
    case EnsembleKind::GOE:
    case EnsembleKind::Wishart:
    case EnsembleKind::Beta:
    case EnsembleKind::CondGOE:
    case EnsembleKind::CustomSym:
      return true;
    default:
      return false;
  }
}

void EnsembleSpec::validate() const {
  if (n < 1) throw RangeError("ensemble: n must be >= 1");
  switch (kind) {
    case EnsembleKind::Wishart:
    case EnsembleKind::CWishart:
      if (!(alpha > -1)) throw ParamError("ensemble: alpha must exceed -1");
      break;
    case EnsembleKind::Beta:
    case EnsembleKind::CBeta:
      if (!(alpha > -1) || !(beta_param > -1)) throw ParamError("ensemble: alpha and beta must exceed -1");
      break;
    case EnsembleKind::CustomSym:
    case EnsembleKind::CustomHerm:
      if (!weight) throw ParamError("ensemble: custom kinds need a weight declaration");
      weight->validate();
      break;
    default:
      break;
  }
}

WeightSpec EnsembleSpec::weight_spec() const {
  switch (kind) {
    case EnsembleKind::GOE:
      return WeightSpec::gaussian();
    case EnsembleKind::GUE:
      return WeightSpec::hermite_herm();
    case EnsembleKind::Wishart:
      return WeightSpec::laguerre_skew(alpha);
    case EnsembleKind::CWishart:
      return WeightSpec::laguerre_herm(alpha);
    case EnsembleKind::Beta:
      return WeightSpec::jacobi_skew(alpha, beta_param);
    case EnsembleKind::CBeta:
      return WeightSpec::jacobi_herm(alpha, beta_param);
    case EnsembleKind::CondGOE:
      return WeightSpec::half_gaussian();
    default:
      if (!weight) throw ParamError("ensemble: custom kinds need a weight declaration");
      return *weight;
  }
}

std::string ensemble_name(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::GOE: return "goe";
    case EnsembleKind::GUE: return "gue";
    case EnsembleKind::Wishart: return "wishart";
    case EnsembleKind::CWishart: return "cwishart";
    case EnsembleKind::Beta: return "beta";
    case EnsembleKind::CBeta: return "cbeta";
    case EnsembleKind::CondGOE: return "condgoe";
    case EnsembleKind::CustomSym: return "customsym";
    case EnsembleKind::CustomHerm: return "customherm";
  }
  return "unknown";
}

EnsembleKind ensemble_from_name(const std::string& name) {
  for (auto k : {EnsembleKind::GOE, EnsembleKind::GUE, EnsembleKind::Wishart, EnsembleKind::CWishart,
                 EnsembleKind::Beta, EnsembleKind::CBeta, EnsembleKind::CondGOE, EnsembleKind::CustomSym,
                 EnsembleKind::CustomHerm})
    if (ensemble_name(k) == name) return k;
  throw ParamError("unknown ensemble '" + name + "'");
}

std::string method_name(EecMethod m) { return m == EecMethod::closed_form ? "closed_form" : "quadrature"; }

EECResult eec_sym(const EnsembleSpec& e, double x, const PrecisionContext& ctx) {
  e.validate();
  ctx.validate();
  if (!e.real_symmetric()) throw ParamError("eec_sym: " + ensemble_name(e.kind) + " is Hermitian");
  if (classical(e.kind)) return closed_form(e, x, ctx);
  return eec_quadrature(e, x, ctx);
}

EECResult eec_herm(const EnsembleSpec& e, double x, const PrecisionContext& ctx) {
  e.validate();
  ctx.validate();
  if (e.real_symmetric()) throw ParamError("eec_herm: " + ensemble_name(e.kind) + " is real symmetric");
  if (classical(e.kind)) return closed_form(e, x, ctx);
  return eec_quadrature(e, x, ctx);
}

EECResult eec(const EnsembleSpec& e, double x, const PrecisionContext& ctx) {
  return e.real_symmetric() ? eec_sym(e, x, ctx) : eec_herm(e, x, ctx);
}

EECResult eec_quadrature(const EnsembleSpec& e, double x, const PrecisionContext& ctx) {
  e.validate();
  ctx.validate();
  const int n = e.n;
  const int work = ctx.digits + 10 + n;
  ScopedDigits g(work);
  const PrecisionContext wctx = PrecisionContext::with_digits(work);
  const WeightSpec spec = e.weight_spec();

  Vector<mp_real> c;
  mp_real norm;
  if (e.real_symmetric()) {
    const auto provider = sym_provider(e, wctx);
    const auto sys = build_system(*provider, n);
    c = sys.phi_hat[n - 1].coeffs();
    norm = sys.gamma[n - 1];
  } else {
    const auto provider = weight_spec_moments<mp_real>(spec, wctx);
    const auto o = build_orthogonal(*provider, n);
    const Vector<mp_real>& a = o.phi[n - 1].coeffs();
    const Vector<mp_real>& b = o.phi[n].coeffs();
    c = poly_add<mp_real>(poly_mul<mp_real>(a, poly_derivative<mp_real>(b)),
                          Vector<mp_real>(-poly_mul<mp_real>(b, poly_derivative<mp_real>(a))));
    norm = o.h[n - 1];
  }

  if (x >= spec.upper) return {x, 0.0, EecMethod::quadrature, 0.0};
  const mp_real lo = x > spec.lower ? mp_real(x) : mp_real(spec.lower);
  const mp_real hi = std::isinf(spec.upper) ? infinity_value<mp_real>() : mp_real(spec.upper);
  QuadOptions opt = QuadOptions::from(ctx);
  opt.abs_tol = std::numeric_limits<double>::min();
  const auto w = spec.function<mp_real>();
  const auto r = quad<mp_real>([&](const mp_real& t) { return poly_eval<mp_real>(c, t) * w.density(t); }, lo, hi,
                               opt);
  return {x, static_cast<double>(r.value / norm), EecMethod::quadrature, static_cast<double>(r.err_est / abs(norm))};
}

EdgeScaling edge_scaling(const EnsembleSpec& e, int m) {
  e.validate();
  if (m < 1) throw RangeError("edge_scaling: index must be >= 1");
  const double md = m;
  switch (e.kind) {
    case EnsembleKind::GOE:
    case EnsembleKind::GUE:
      return {std::sqrt(2 * md), std::pow(2.0, -0.5) * std::pow(md, -1.0 / 6)};
    case EnsembleKind::Wishart:
    case EnsembleKind::CWishart: {
      const double ab = e.alpha / md;
      const double r = 1 + std::sqrt(1 + ab);
      return {r * r * md, std::pow(r, 4.0 / 3) / std::pow(1 + ab, 1.0 / 6) * std::cbrt(md)};
    }
    case EnsembleKind::Beta:
    case EnsembleKind::CBeta: {
      const double ab = e.alpha / md, bb = e.beta_param / md;
      if (bb == 0)
        throw DegenerateError(
            "edge_scaling: beta/m = 0 puts a hard edge at 1 and the soft-edge scale vanishes");
      const double den = 2 + ab + bb;
      const double phi = std::acos((bb - ab) / den), gam = std::acos((ab + bb) / den);
      const double s = std::sin(phi + gam);
      const double mu = (1 - std::cos(phi + gam)) / 2;
      const double sigma =
          0.5 * std::cbrt(2 * std::pow(s, 4) / (den * den * std::sin(phi) * std::sin(gam))) * std::pow(md, -2.0 / 3);
      return {mu, sigma};
    }
    default:
      throw ParamError("edge_scaling: no edge scaling for " + ensemble_name(e.kind));
  }
}

EECResult eec_scaled(const EnsembleSpec& e, double s, const PrecisionContext& ctx) {
  const EdgeScaling sc = edge_scaling(e, e.n - 1);
  return eec(e, sc.mu_n + sc.sigma_n * s, ctx);
}

RelativeError finite_n_relative_error(const EnsembleSpec& e, double x, const TailEstimate& mc,
                                      const PrecisionContext& ctx) {
  if (!(mc.p_hat > 0)) throw DegenerateError("relative error: Monte Carlo tail estimate is zero");
  const double v = eec(e, x, ctx).value;
  return {(v - mc.p_hat) / mc.p_hat, v * mc.std_error / (mc.p_hat * mc.p_hat)};
}

}  // namespace eecrmt
