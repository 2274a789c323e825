#include "eecrmt/skewortho.hpp"

#include <Eigen/QR>

#include <cmath>
#include <string>

#include "eecrmt/quadrature.hpp"
#include "eecrmt/specfun.hpp"

namespace eecrmt {

namespace {

using std::abs;
using std::exp;
using std::pow;
using std::sqrt;

bool finite(double v) { return std::isfinite(v); }

// Options for an integral nested inside another: its error is noise to the
// outer rule, so it has to be resolved further.
QuadOptions tighter(const QuadOptions& opt) {
  QuadOptions o = opt;
  o.abs_tol /= 100;
  o.rel_tol /= 100;
  return o;
}

template <class Real>
Real real_infinity_or(double v) {
  if (std::isinf(v)) return v > 0 ? infinity_value<Real>() : -infinity_value<Real>();
  return Real(v);
}

// Recursion for e^{-x^2/2} on the line or the half-line x > 0:
//   s_ij = 2 int x^{i+j-1} e^{-x^2} - [half line] delta_{j1} mu_i + (j-1) s_{i,j-2}.
template <class Real>
class GaussianRecursionMoments final : public MomentProvider<Real> {
 public:
  GaussianRecursionMoments(bool half_line, const PrecisionContext& ctx)
      : MomentProvider<Real>(ctx), half_(half_line) {}

  Real mu(int i) const override {
    ScopedDigits g(this->ctx_.digits);
    return mu_raw(i);
  }

  Real skew(int i, int j) const override { return skew_matrix(std::max(i, j) + 1)(i, j); }

  Vector<Real> moments(int count) const override {
    ScopedDigits g(this->ctx_.digits);
    Vector<Real> v(count);
    for (int i = 0; i < count; ++i) v[i] = mu_raw(i);
    return v;
  }

  Matrix<Real> skew_matrix(int n) const override {
    ScopedDigits g(this->ctx_.digits);
    Matrix<Real> S = Matrix<Real>::Zero(n, n);
    auto fill_row = [&](int i) {
      for (int j = 1; j < n; ++j) {
        Real v = 2 * m2(i + j - 1);
        if (half_ && j == 1) v -= mu_raw(i);
        if (j >= 2) v += Real(j - 1) * S(i, j - 2);
        S(i, j) = v;
      }
    };
    fill_row(0);
    for (int i = 1; i < n; ++i) {
      S(i, 0) = -S(0, i);
      fill_row(i);
    }
    Matrix<Real> A = (S - S.transpose()) / 2;
    return A;
  }

 private:
  Real mu_raw(int i) const {
    const Real a = Real(i + 1) / 2;
    if (half_) return pow(Real(2), Real(i - 1) / 2) * gamma_fn<Real>(a);
    if (i % 2) return Real(0);
    return pow(Real(2), Real(i + 1) / 2) * gamma_fn<Real>(a);
  }

  // int x^k e^{-x^2} over the support.
  Real m2(int k) const {
    const Real g = gamma_fn<Real>(Real(k + 1) / 2);
    if (half_) return g / 2;
    return k % 2 ? Real(0) : g;
  }

  bool half_;
};

// x^a e^{-x/2} with a = (alpha - 1)/2; substituting x = r u, y = r (1 - u),
//   s_ij = 2^{p+q} Gamma(p) Gamma(q) (2 I_{1/2}(p, q) - 1),  p = i+a+1, q = j+a+1.
template <class Real>
class LaguerreMoments final : public MomentProvider<Real> {
 public:
  LaguerreMoments(double alpha, const PrecisionContext& ctx) : MomentProvider<Real>(ctx), alpha_(alpha) {
    if (!(alpha > -1)) throw ParamError("laguerre_moments: alpha must exceed -1");
  }

  Real mu(int i) const override {
    ScopedDigits g(this->ctx_.digits);
    const Real p = Real(i) + a();
    return pow(Real(2), p + 1) * gamma_fn<Real>(p + 1);
  }

  Real skew(int i, int j) const override {
    ScopedDigits g(this->ctx_.digits);
    return skew_raw(i, j);
  }

  Matrix<Real> skew_matrix(int n) const override {
    ScopedDigits g(this->ctx_.digits);
    Matrix<Real> S = Matrix<Real>::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        S(i, j) = skew_raw(i, j);
        S(j, i) = -S(i, j);
      }
    return S;
  }

 private:
  Real a() const { return (Real(alpha_) - 1) / 2; }

  Real skew_raw(int i, int j) const {
    if (i == j) return Real(0);
    if (i > j) return -skew_raw(j, i);
    const Real p = Real(i) + a() + 1, q = Real(j) + a() + 1;
    return pow(Real(2), p + q) * gamma_fn<Real>(p) * gamma_fn<Real>(q) *
           (2 * reg_incomplete_beta<Real>(p, q, Real(1) / 2) - 1);
  }

  double alpha_;
};

template <class Real>
class QuadratureMoments final : public MomentProvider<Real> {
 public:
  using Cumulative = std::function<Vector<Real>(const Real&, int)>;

  QuadratureMoments(WeightFunction<Real> w, const PrecisionContext& ctx, std::vector<Real> mu_override,
                    Cumulative cumulative)
      : MomentProvider<Real>(ctx),
        w_(std::move(w)),
        override_(std::move(mu_override)),
        cumulative_(std::move(cumulative)) {
    if (!(w_.lower < w_.upper)) throw ParamError("weight support must satisfy lower < upper");
  }

  Real mu(int i) const override { return moments(i + 1)[i]; }
  Real skew(int i, int j) const override { return skew_matrix(std::max(i, j) + 1)(i, j); }

  Vector<Real> moments(int count) const override {
    ScopedDigits g(this->ctx_.digits);
    Vector<Real> v(count);
    const int known = std::min<int>(count, static_cast<int>(override_.size()));
    for (int i = 0; i < known; ++i) v[i] = promote(override_[i]);
    if (known < count) {
      const Vector<Real> q = raw_moments(count);
      for (int i = known; i < count; ++i) v[i] = q[i];
    }
    return v;
  }

  Matrix<Real> skew_matrix(int n) const override {
    ScopedDigits g(this->ctx_.digits);
    const Vector<Real> mu = moments(n);
    const int pairs = n * (n - 1) / 2;
    Matrix<Real> S = Matrix<Real>::Zero(n, n);
    if (pairs == 0) return S;
    const QuadOptions opt = QuadOptions::from(this->ctx_);
    const QuadOptions inner = tighter(opt);
    const Real lo = real_infinity_or<Real>(w_.lower);
    const Real hi = real_infinity_or<Real>(w_.upper);
    const Real centre = mu[1] / mu[0];
    auto integrand = [&](const Real& x) -> Vector<Real> {
      Vector<Real> v = Vector<Real>::Zero(pairs);
      const Real wx = w_.density(x);
      if (wx == 0) return v;
      Vector<Real> M;
      if (cumulative_) {
        M = cumulative_(x, n);
      } else {
        // Integrate over whichever side of the mean lies away from the bulk
        // of the weight, so the rule never sees a narrow peak inside a long
        // interval.
        ScopedDigits guard(this->ctx_.digits + 5);
        auto powers = [&](const Real& y) {
          Vector<Real> m(n);
          Real p = w_.density(y);
          for (int j = 0; j < n; ++j, p *= y) m[j] = p;
          return m;
        };
        if (x >= centre)
          M = mu - quad_vector<Real>(powers, x, hi, n, inner).value;
        else
          M = quad_vector<Real>(powers, lo, x, n, inner).value;
      }
      Real xp = wx;
      int idx = 0;
      for (int i = 0; i < n; ++i, xp *= x)
        for (int j = i + 1; j < n; ++j) v[idx++] = xp * (mu[j] - 2 * M[j]);
      return v;
    };
    const Vector<Real> s =
        quad_vector<Real>(integrand, lo, hi, pairs, opt).value;
    int idx = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        S(i, j) = s[idx++];
        S(j, i) = -S(i, j);
      }
    return S;
  }

 private:
  Vector<Real> raw_moments(int count) const {
    const QuadOptions opt = QuadOptions::from(this->ctx_);
    return quad_vector<Real>(
               [&](const Real& x) {
                 Vector<Real> m(count);
                 Real p = w_.density(x);
                 for (int j = 0; j < count; ++j, p *= x) m[j] = p;
                 return m;
               },
               real_infinity_or<Real>(w_.lower), real_infinity_or<Real>(w_.upper), count, opt)
        .value;
  }

  WeightFunction<Real> w_;
  std::vector<Real> override_;
  Cumulative cumulative_;
};

}  // namespace

// ---------------------------------------------------------------------------
// WeightSpec

void WeightSpec::validate() const {
  if (std::isnan(lower) || std::isnan(upper) || !(lower < upper))
    throw ParamError("weight: support must satisfy lower < upper");
  if (finite(lower) && !(power_lower > -1)) throw MomentError("weight: power at lower end must exceed -1");
  if (finite(upper) && !(power_upper > -1)) throw MomentError("weight: power at upper end must exceed -1");
  const bool decays_right = exp_quadratic > 0 || (exp_quadratic == 0 && exp_linear > 0);
  const bool decays_left = exp_quadratic > 0 || (exp_quadratic == 0 && exp_linear < 0);
  if (!finite(upper) && !decays_right)
    throw MomentError("weight: no exponential decay towards +inf, moments of all orders do not exist");
  if (!finite(lower) && !decays_left)
    throw MomentError("weight: no exponential decay towards -inf, moments of all orders do not exist");
  if (!moments.empty() && !(moments[0] > 0)) throw MomentError("weight: mu_0 must be positive");
}

template <class Real>
Real WeightSpec::operator()(const Real& x) const {
  if (x <= Real(lower) && finite(lower)) return Real(0);
  if (x >= Real(upper) && finite(upper)) return Real(0);
  Real v = exp(-Real(exp_linear) * x - Real(exp_quadratic) * x * x);
  if (finite(lower) && power_lower != 0) v *= pow(x - Real(lower), Real(power_lower));
  if (finite(upper) && power_upper != 0) v *= pow(Real(upper) - x, Real(power_upper));
  return v;
}

template <class Real>
WeightFunction<Real> WeightSpec::function() const {
  WeightSpec copy = *this;
  return {[copy](const Real& x) { return copy.template operator()<Real>(x); }, lower, upper};
}

WeightSpec WeightSpec::gaussian() {
  WeightSpec w;
  w.exp_quadratic = 0.5;
  return w;
}

WeightSpec WeightSpec::half_gaussian() {
  WeightSpec w;
  w.lower = 0;
  w.exp_quadratic = 0.5;
  return w;
}

WeightSpec WeightSpec::laguerre_skew(double alpha) {
  WeightSpec w;
  w.lower = 0;
  w.power_lower = (alpha - 1) / 2;
  w.exp_linear = 0.5;
  return w;
}

WeightSpec WeightSpec::jacobi_skew(double alpha, double beta) {
  WeightSpec w;
  w.lower = 0;
  w.upper = 1;
  w.power_lower = (alpha - 1) / 2;
  w.power_upper = (beta - 1) / 2;
  return w;
}

WeightSpec WeightSpec::hermite_herm() {
  WeightSpec w;
  w.exp_quadratic = 1;
  return w;
}

WeightSpec WeightSpec::laguerre_herm(double alpha) {
  WeightSpec w;
  w.lower = 0;
  w.power_lower = alpha;
  w.exp_linear = 1;
  return w;
}

WeightSpec WeightSpec::jacobi_herm(double alpha, double beta) {
  WeightSpec w;
  w.lower = 0;
  w.upper = 1;
  w.power_lower = alpha;
  w.power_upper = beta;
  return w;
}

// ---------------------------------------------------------------------------
// Providers

template <class Real>
Vector<Real> MomentProvider<Real>::moments(int count) const {
  Vector<Real> v(count);
  for (int i = 0; i < count; ++i) v[i] = mu(i);
  return v;
}

template <class Real>
Matrix<Real> MomentProvider<Real>::skew_matrix(int n) const {
  Matrix<Real> S = Matrix<Real>::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      S(i, j) = skew(i, j);
      S(j, i) = -S(i, j);
    }
  return S;
}

template <class Real>
std::unique_ptr<MomentProvider<Real>> gaussian_moments(const PrecisionContext& ctx) {
  return std::make_unique<GaussianRecursionMoments<Real>>(false, ctx);
}

template <class Real>
std::unique_ptr<MomentProvider<Real>> cond_goe_moments(const PrecisionContext& ctx) {
  return std::make_unique<GaussianRecursionMoments<Real>>(true, ctx);
}

template <class Real>
std::unique_ptr<MomentProvider<Real>> laguerre_moments(double alpha, const PrecisionContext& ctx) {
  return std::make_unique<LaguerreMoments<Real>>(alpha, ctx);
}

template <class Real>
std::unique_ptr<MomentProvider<Real>> jacobi_moments(double alpha, double beta,
                                                     const PrecisionContext& ctx) {
  if (!(alpha > -1) || !(beta > -1)) throw ParamError("jacobi_moments: alpha, beta must exceed -1");
  const WeightSpec spec = WeightSpec::jacobi_skew(alpha, beta);
  const int digits = ctx.digits;
  // Closed forms with a = (alpha-1)/2, b = (beta-1)/2:
  //   mu_j = B(j+a+1, b+1),  M_j(x) = B_x(j+a+1, b+1),
  // the latter by one incomplete beta at the top index and the downward
  // recurrence B_x(p, q) = ((p+q) B_x(p+1, q) + x^p (1-x)^q) / p.
  auto closed_mu = [alpha, beta](int count) {
    std::vector<Real> mu(count);
    const Real a = (Real(alpha) - 1) / 2, b = (Real(beta) - 1) / 2;
    for (int j = 0; j < count; ++j) mu[j] = beta_fn<Real>(Real(j) + a + 1, b + 1);
    return mu;
  };
  auto cumulative = [alpha, beta, digits](const Real& x, int count) {
    ScopedDigits g(digits + 5);
    const Real a = (Real(alpha) - 1) / 2, q = (Real(beta) - 1) / 2 + 1;
    const Real& xx = x;
    const Real one_minus = 1 - xx;
    Vector<Real> M(count);
    Real p = Real(count - 1) + a + 1;
    M[count - 1] = reg_incomplete_beta<Real>(p, q, xx) * beta_fn<Real>(p, q);
    const Real tail = pow(one_minus, q);
    for (int j = count - 2; j >= 0; --j) {
      p = Real(j) + a + 1;
      M[j] = ((p + q) * M[j + 1] + pow(xx, p) * tail) / p;
    }
    return M;
  };
  ScopedDigits g(digits);
  auto mu = closed_mu(64);
  return std::make_unique<QuadratureMoments<Real>>(spec.function<Real>(), ctx, std::move(mu),
                                                   cumulative);
}

template <class Real>
std::unique_ptr<MomentProvider<Real>> quadrature_moments(const WeightFunction<Real>& w,
                                                         const PrecisionContext& ctx,
                                                         std::vector<Real> mu_override) {
  return std::make_unique<QuadratureMoments<Real>>(w, ctx, std::move(mu_override),
                                                   typename QuadratureMoments<Real>::Cumulative{});
}

template <class Real>
std::unique_ptr<MomentProvider<Real>> weight_spec_moments(const WeightSpec& spec,
                                                          const PrecisionContext& ctx) {
  spec.validate();
  ScopedDigits g(ctx.digits);
  std::vector<Real> mu;
  for (double m : spec.moments) mu.push_back(Real(m));
  return quadrature_moments<Real>(spec.function<Real>(), ctx, std::move(mu));
}

// ---------------------------------------------------------------------------
// Pfaffian and the skew-orthogonal system

template <class Real>
Real pfaffian(const Matrix<Real>& S) {
  if (S.rows() != S.cols()) throw SkewError("pfaffian: matrix must be square");
  const int n = static_cast<int>(S.rows());
  Real scale = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max<Real>(scale, abs(S(i, j)));
  const Real tol = 1000 * working_epsilon<Real>() * scale;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      if (abs(S(i, j) + S(j, i)) > tol) throw SkewError("pfaffian: matrix is not skew-symmetric");
  if (n % 2) return Real(0);
  Matrix<Real> A = S;
  Real pf = 1;
  for (int k = 0; k + 1 < n; k += 2) {
    int p = k + 1;
    for (int i = k + 2; i < n; ++i)
      if (abs(A(k, i)) > abs(A(k, p))) p = i;
    if (p != k + 1) {
      A.row(k + 1).swap(A.row(p));
      A.col(k + 1).swap(A.col(p));
      pf = -pf;
    }
    const Real piv = A(k, k + 1);
    if (piv == 0) return Real(0);
    pf *= piv;
    std::vector<Real> al(n), be(n);
    for (int i = k + 2; i < n; ++i) {
      al[i] = A(k + 1, i) / piv;
      be[i] = -A(k, i) / piv;
    }
    for (int i = k + 2; i < n; ++i) A.col(i) += al[i] * A.col(k) + be[i] * A.col(k + 1);
    for (int i = k + 2; i < n; ++i) A.row(i) += al[i] * A.row(k) + be[i] * A.row(k + 1);
  }
  return pf;
}

template <class Real>
SkewOrthoSystem<Real> build_system(const MomentProvider<Real>& m, int n) {
  if (n < 1) throw RangeError("build_system: size must be >= 1");
  const PrecisionContext& ctx = m.context();
  ScopedDigits guard(ctx.digits);
  SkewOrthoSystem<Real> sys;
  sys.n = n;
  sys.digits = ctx.digits;
  sys.mu = m.moments(n);
  sys.S = m.skew_matrix(n);
  if (!(sys.mu[0] > 0)) throw MomentError("build_system: mu_0 must be positive");

  Real smax = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) smax = std::max<Real>(smax, abs(sys.S(i, j)));
  const Real threshold = pow(Real(10), -(ctx.digits - 10)) * smax;

  Matrix<Real> U = Matrix<Real>::Identity(n, n);
  Matrix<Real> A = sys.S;
  for (int k = 0; 2 * k + 1 < n; ++k) {
    const int p = 2 * k;
    const Real sigma = A(p, p + 1);
    if (!(sigma > threshold))
      throw PivotError("build_system: 2x2 pivot of leading size " + std::to_string(p + 2) +
                           " is below the threshold; raise the working precision",
                       p + 2);
    sys.sigma.push_back(sigma);
    // Column operations zero A(p, c) and A(p+1, c); rows mirror them.
    std::vector<Real> al(n), be(n);
    for (int c = p + 2; c < n; ++c) {
      al[c] = A(p + 1, c) / sigma;
      be[c] = -A(p, c) / sigma;
    }
    for (int c = p + 2; c < n; ++c) {
      U.col(c) += al[c] * U.col(p) + be[c] * U.col(p + 1);
      A.col(c) += al[c] * A.col(p) + be[c] * A.col(p + 1);
    }
    for (int c = p + 2; c < n; ++c) A.row(c) += al[c] * A.row(p) + be[c] * A.row(p + 1);
  }

  // Shear each 2x2 block so that odd positions of mu^T U vanish.
  Vector<Real> gt = U.transpose() * sys.mu;
  sys.gamma.assign(n, Real(0));
  for (int k = 0; 2 * k + 1 < n; ++k) {
    const int p = 2 * k;
    if (gt[p] == 0)
      throw PivotError("build_system: gamma_" + std::to_string(p) + " vanished", p + 1);
    const Real c = gt[p + 1] / gt[p];
    U.col(p + 1) -= c * U.col(p);
    sys.gamma[p] = gt[p];
    sys.gamma[p + 1] = sys.sigma[k] / gt[p];
  }
  if (n % 2) sys.gamma[n - 1] = (U.col(n - 1).transpose() * sys.mu)(0, 0);
  sys.U = U;

  for (int i = 0; i < n; ++i) sys.phi.emplace_back(Vector<Real>(U.col(i).head(i + 1)));
  for (int i = 0; i < n; ++i) {
    if (i % 2 == 0) {
      sys.phi_hat.push_back(sys.phi[i]);
      continue;
    }
    Vector<Real> lower = Vector<Real>::Zero(i);
    for (int k = 1; k < i; k += 2) lower.head(k + 1) += (sys.gamma[i] / sys.gamma[k]) * sys.phi[k].coeffs();
    sys.phi_hat.push_back(sys.phi[i].plus_lower(lower));
  }
  return sys;
}

template <class Real>
MonicPoly<Real> hat_varphi(const SkewOrthoSystem<Real>& sys, int n) {
  if (n < 0 || n >= sys.n) throw RangeError("hat_varphi: index outside the built system");
  return sys.phi_hat[n];
}

template <class Real>
MonicPoly<Real> inverse_relation(const SkewOrthoSystem<Real>& sys, int n) {
  if (n < 3 || n % 2 == 0 || n >= sys.n)
    throw RangeError("inverse_relation: needs odd n >= 3 inside the built system");
  ScopedDigits g(sys.digits);
  const Real r = sys.gamma[n] / sys.gamma[n - 2];
  return sys.phi_hat[n].plus_lower(Vector<Real>(-r * sys.phi_hat[n - 2].coeffs()));
}

template <class Real>
Real norm_const_sym(const SkewOrthoSystem<Real>& sys, int n) {
  if (n < 1 || n > sys.n) throw RangeError("norm_const_sym: size outside the built system");
  ScopedDigits g(sys.digits);
  Real c = 1;
  for (int k = 0; k < n / 2; ++k) c *= sys.sigma[k];
  if (n % 2) c *= sys.gamma[n - 1];
  return c;
}

template <class Real>
Real norm_const_herm(const std::vector<Real>& h) {
  Real c = 1;
  for (const Real& v : h) c *= v;
  return c;
}

template <class Real>
OrthoSystem<Real> build_orthogonal(const MomentProvider<Real>& m, int n) {
  if (n < 0) throw RangeError("build_orthogonal: negative degree");
  ScopedDigits g(m.context().digits);
  const Vector<Real> mu = m.moments(2 * n + 1);
  auto inner = [&](const Vector<Real>& p, const Vector<Real>& q) {
    Real s = 0;
    for (int a = 0; a < p.size(); ++a)
      for (int b = 0; b < q.size(); ++b) s += p[a] * q[b] * mu[a + b];
    return s;
  };
  OrthoSystem<Real> out;
  for (int k = 0; k <= n; ++k) {
    Vector<Real> p = Vector<Real>::Zero(k + 1);
    p[k] = 1;
    for (int j = 0; j < k; ++j) {
      Vector<Real> pj = Vector<Real>::Zero(k + 1);
      pj.head(j + 1) = out.phi[j].coeffs();
      p -= (inner(p, pj) / out.h[j]) * pj;
    }
    const Real h = inner(p, p);
    if (!(h > 0)) throw PivotError("build_orthogonal: non-positive norm, raise the precision", k + 1);
    out.phi.emplace_back(p);
    out.h.push_back(h);
  }
  return out;
}

PfIntResult pf_int_oracle(const WeightFunction<double>& g, const std::vector<MonicPoly<double>>& polys,
                          int n, const PrecisionContext& ctx) {
  if (n != 2 && n != 3) throw RangeError("pf_int_oracle: n must be 2 or 3");
  if (static_cast<int>(polys.size()) < n) throw DegreeError("pf_int_oracle: need n polynomials");
  for (int i = 0; i < n; ++i)
    if (polys[i].degree() != i) throw DegreeError("pf_int_oracle: polynomial i must have degree i");
  const double lo = g.lower, hi = g.upper;
  const QuadOptions outer = QuadOptions::from(ctx);
  const QuadOptions middle = tighter(outer);
  const QuadOptions inner = n == 3 ? tighter(middle) : middle;

  auto provider = quadrature_moments<double>(g, ctx);
  const Vector<double> mu = provider->moments(std::max(n, 2));
  // Lower ranges (lo, x) are split at the mean so the mass of g never sits
  // in a small corner of a long interval.
  const double centre = mu[1] / mu[0];
  auto from_lower = [&](auto&& f, double x, const QuadOptions& opt) {
    if (x > centre && lo < centre)
      return quad<double>(f, lo, centre, opt).value + quad<double>(f, centre, x, opt).value;
    return quad<double>(f, lo, x, opt).value;
  };

  double lhs = 0;
  if (n == 2) {
    lhs = quad<double>(
              [&](double y) {
                const double gy = g.density(y);
                if (gy == 0) return 0.0;
                return gy * from_lower([&](double x) { return g.density(x) * (y - x); }, y, inner);
              },
              lo, hi, outer)
              .value;
  } else {
    lhs = quad<double>(
              [&](double z) {
                const double gz = g.density(z);
                if (gz == 0) return 0.0;
                return gz * from_lower(
                                [&](double y) {
                                  const double gy = g.density(y);
                                  if (gy == 0) return 0.0;
                                  return gy * (z - y) *
                                         from_lower(
                                             [&](double x) { return g.density(x) * (y - x) * (z - x); },
                                             y, inner);
                                },
                                z, middle);
              },
              lo, hi, outer)
              .value;
  }

  const Matrix<double> Smono = provider->skew_matrix(n);
  Matrix<double> C = Matrix<double>::Zero(n, n);
  for (int i = 0; i < n; ++i) C.col(i).head(i + 1) = polys[i].coeffs();
  const Matrix<double> Sp = C.transpose() * Smono * C;
  double rhs = 0;
  if (n % 2 == 0) {
    rhs = pfaffian<double>(Sp);
  } else {
    Matrix<double> B = Matrix<double>::Zero(n + 1, n + 1);
    B.topLeftCorner(n, n) = Sp;
    const Vector<double> s = C.transpose() * mu.head(n);
    B.col(n).head(n) = s;
    B.row(n).head(n) = -s.transpose();
    rhs = pfaffian<double>(B);
  }
  return {lhs, rhs};
}

OrthogonalityObstruction orthogonality_obstruction(const SkewOrthoSystem<mp_real>& sys) {
  if (sys.n < 4) throw RangeError("orthogonality_obstruction: needs hat phi_0..hat phi_3");
  ScopedDigits g(sys.digits);
  const int pairs[4][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}};
  Matrix<mp_real> A(4, 3);
  Vector<mp_real> b(4);
  for (int r = 0; r < 4; ++r) {
    const Vector<mp_real> prod =
        poly_mul<mp_real>(sys.phi_hat[pairs[r][0]].coeffs(), sys.phi_hat[pairs[r][1]].coeffs());
    for (int k = 1; k <= 3; ++k) A(r, k - 1) = k < prod.size() ? prod[k] : mp_real(0);
    b[r] = -prod[0];
  }
  const Vector<mp_real> nu = A.colPivHouseholderQr().solve(b);
  const mp_real res = (A * nu - b).norm();
  return {static_cast<double>(res),
          {static_cast<double>(nu[0]), static_cast<double>(nu[1]), static_cast<double>(nu[2])}};
}

#define EECRMT_INSTANTIATE(Real)                                                                   \
  template class MomentProvider<Real>;                                                             \
  template Real WeightSpec::operator()<Real>(const Real&) const;                                   \
  template WeightFunction<Real> WeightSpec::function<Real>() const;                                \
  template std::unique_ptr<MomentProvider<Real>> gaussian_moments<Real>(const PrecisionContext&);  \
  template std::unique_ptr<MomentProvider<Real>> cond_goe_moments<Real>(const PrecisionContext&);  \
  template std::unique_ptr<MomentProvider<Real>> laguerre_moments<Real>(double,                    \
                                                                        const PrecisionContext&);  \
  template std::unique_ptr<MomentProvider<Real>> jacobi_moments<Real>(double, double,              \
                                                                      const PrecisionContext&);    \
  template std::unique_ptr<MomentProvider<Real>> quadrature_moments<Real>(                         \
      const WeightFunction<Real>&, const PrecisionContext&, std::vector<Real>);                    \
  template std::unique_ptr<MomentProvider<Real>> weight_spec_moments<Real>(const WeightSpec&,      \
                                                                           const PrecisionContext&); \
  template Real pfaffian<Real>(const Matrix<Real>&);                                               \
  template SkewOrthoSystem<Real> build_system<Real>(const MomentProvider<Real>&, int);              \
  template MonicPoly<Real> hat_varphi<Real>(const SkewOrthoSystem<Real>&, int);                    \
  template MonicPoly<Real> inverse_relation<Real>(const SkewOrthoSystem<Real>&, int);              \
  template Real norm_const_sym<Real>(const SkewOrthoSystem<Real>&, int);                           \
  template Real norm_const_herm<Real>(const std::vector<Real>&);                                   \
  template OrthoSystem<Real> build_orthogonal<Real>(const MomentProvider<Real>&, int);

EECRMT_INSTANTIATE(double)
EECRMT_INSTANTIATE(mp_real)

#undef EECRMT_INSTANTIATE

}  // namespace eecrmt
