#include "eecrmt/painleve.hpp"

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "eecrmt/limits.hpp"
#include "eecrmt/poly.hpp"
#include "eecrmt/quadrature.hpp"
#include "eecrmt/specfun.hpp"

namespace eecrmt {

namespace {

constexpr int kMaxTerm = 3;

mp_real mp_pow10(int e) { return pow(mp_real(10), e); }

// zeta = (2/3) x^{3/2}.
double zeta_of(double x) { return 2.0 / 3.0 * std::pow(x, 1.5); }

// Clenshaw evaluation of sum c_k T_k(t).
mp_real clenshaw(const std::vector<mp_real>& c, const mp_real& t) {
  mp_real b1 = 0, b2 = 0;
  for (std::size_t k = c.size(); k-- > 1;) {
    mp_real b0 = 2 * t * b1 - b2 + c[k];
    b2 = std::move(b1);
    b1 = std::move(b0);
  }
  return t * b1 - b2 + c[0];
}

// Panels of width 2 in zeta on [1, x_hi]. On each panel and for each term
// m, the Chebyshev series of
//   HA(x) = int_x^b Bi f_m,   HB(x) = int_x^b Ai f_m
// plus the tails beyond b, so that
//   q_m(x) = 2 pi (Ai(x) A_m(x) - Bi(x) B_m(x)),  A_m = HA + tailA, ...
struct QTermTable {
  std::vector<mp_real> bounds;  // increasing, panels.size() + 1 entries
  std::array<std::vector<std::vector<mp_real>>, kMaxTerm + 1> ha, hb;
  std::array<std::vector<mp_real>, kMaxTerm + 1> tail_a, tail_b;  // at each panel's right end
};

// Lobatto-point values (t_j = cos(pi j/(K-1))) to Chebyshev coefficients,
// then to the coefficients of H(t) = int_t^1 f * half_width.
std::vector<mp_real> right_antiderivative(const std::vector<mp_real>& f, const std::vector<mp_real>& cos_table,
                                          const mp_real& half_width, int digits) {
  const int K = static_cast<int>(f.size());
  const int n = K - 1;
  std::vector<mp_real> c(K + 2, mp_real(0));
  mp_real cmax = 0;
  for (int k = 0; k < K; ++k) {
    mp_real s = 0;
    for (int j = 0; j <= n; ++j) {
      mp_real term = f[j] * cos_table[(static_cast<long>(j) * k) % (2 * n)];
      if (j == 0 || j == n) term /= 2;
      s += term;
    }
    s = s * 2 / n;
    if (k == 0 || k == n) s /= 2;
    c[k] = s;
    cmax = std::max(cmax, mp_real(abs(s)));
  }
  if (cmax > 0 && std::max(abs(c[n]), abs(c[n - 1])) > mp_pow10(-(digits - 5)) * cmax)
    throw ConvergenceError("q_expansion_term: Chebyshev series did not resolve a panel", 0, 0);

  // G' = f with G(1) = 0; H = -half_width * G.
  std::vector<mp_real> g(K + 1, mp_real(0));
  g[1] = c[0] - c[2] / 2;
  for (int k = 2; k <= K; ++k) g[k] = (c[k - 1] - c[k + 1]) / (2 * k);
  mp_real sum = 0;
  for (int k = 1; k <= K; ++k) sum += g[k];
  g[0] = -sum;
  for (auto& v : g) v *= -half_width;
  return g;
}

std::shared_ptr<const QTermTable> build_table(int digits, double cap) {
  ScopedDigits guard(digits);
  const double ln10 = std::log(10.0);
  const double z_lo = zeta_of(1.0);
  // Truncating at zeta_hi leaves a relative error below exp(-2 (zeta_hi - zeta(x)))
  // for every query x <= cap.
  const double z_hi = zeta_of(cap) + digits * ln10 / 2 + 2;
  const int panels = static_cast<int>(std::ceil((z_hi - z_lo) / 2));
  const int K = digits + 24;
  const int n = K - 1;

  auto table = std::make_shared<QTermTable>();
  table->bounds.resize(panels + 1);
  table->bounds[0] = mp_real(1);
  for (int j = 1; j <= panels; ++j) {
    // Exact x on the boundaries keeps neighbouring panels consistent.
    const mp_real z = mp_real(z_lo) + 2 * j;
    table->bounds[j] = pow(mp_real(1.5) * z, mp_real(2) / 3);
  }
  for (int m = 1; m <= kMaxTerm; ++m) {
    table->ha[m].resize(panels);
    table->hb[m].resize(panels);
    table->tail_a[m].assign(panels, mp_real(0));
    table->tail_b[m].assign(panels, mp_real(0));
  }

  const mp_real pi = pi_value<mp_real>();
  std::vector<mp_real> cos_table(2 * n);
  for (int i = 0; i < 2 * n; ++i) cos_table[i] = cos(pi * i / n);

  std::vector<mp_real> ai(K), bi(K);
  std::array<std::vector<mp_real>, kMaxTerm + 1> qv;
  for (auto& v : qv) v.resize(K);
  std::vector<mp_real> fa(K), fb(K);
  std::array<mp_real, kMaxTerm + 1> run_a, run_b;  // tails at the current right end
  for (auto& v : run_a) v = 0;
  for (auto& v : run_b) v = 0;

  for (int p = panels - 1; p >= 0; --p) {
    const mp_real& a = table->bounds[p];
    const mp_real& b = table->bounds[p + 1];
    const mp_real mid = (a + b) / 2, half = (b - a) / 2;
    for (int j = 0; j <= n; ++j) {
      const mp_real x = mid + half * cos_table[j];
      const auto v = airy<mp_real>(x);
      ai[j] = v.ai;
      bi[j] = v.bi;
      qv[0][j] = v.ai;
    }
    for (int m = 1; m <= kMaxTerm; ++m) {
      for (int j = 0; j <= n; ++j) {
        mp_real f = 0;
        for (int i1 = 0; i1 <= m - 1; ++i1)
          for (int i2 = 0; i1 + i2 <= m - 1; ++i2) f += qv[i1][j] * qv[i2][j] * qv[m - 1 - i1 - i2][j];
        fa[j] = bi[j] * f;
        fb[j] = ai[j] * f;
      }
      table->ha[m][p] = right_antiderivative(fa, cos_table, half, digits);
      table->hb[m][p] = right_antiderivative(fb, cos_table, half, digits);
      table->tail_a[m][p] = run_a[m];
      table->tail_b[m][p] = run_b[m];
      if (m < kMaxTerm) {
        for (int j = 0; j <= n; ++j) {
          const mp_real A = clenshaw(table->ha[m][p], cos_table[j]) + run_a[m];
          const mp_real B = clenshaw(table->hb[m][p], cos_table[j]) + run_b[m];
          qv[m][j] = 2 * pi * (ai[j] * A - bi[j] * B);
        }
      }
    }
    for (int m = 1; m <= kMaxTerm; ++m) {
      run_a[m] += clenshaw(table->ha[m][p], mp_real(-1));
      run_b[m] += clenshaw(table->hb[m][p], mp_real(-1));
    }
  }
  return table;
}

std::shared_ptr<const QTermTable> term_table(int digits, double cap) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_future<std::shared_ptr<const QTermTable>>> cache;
  const auto key = std::make_pair(digits, static_cast<int>(cap));
  std::promise<std::shared_ptr<const QTermTable>> promise;
  std::shared_future<std::shared_ptr<const QTermTable>> future;
  bool builder = false;
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it == cache.end()) {
      future = promise.get_future().share();
      cache.emplace(key, future);
      builder = true;
    } else {
      future = it->second;
    }
  }
  if (builder) {
    try {
      promise.set_value(build_table(digits, cap));
    } catch (...) {
      {
        std::lock_guard<std::mutex> lock(mutex);
        cache.erase(key);
      }
      promise.set_exception(std::current_exception());
    }
  }
  return future.get();
}

// (q_m(x), q_m'(x)) for m >= 1 at `digits` digits, evaluated with guard digits.
std::pair<mp_real, mp_real> q_term_pair(int m, const mp_real& x_in, int digits) {
  const int work = digits + 10;
  const double xd = static_cast<double>(x_in);
  double cap = 8;
  while (cap < xd) cap *= 2;
  auto table = term_table(work, cap);
  ScopedDigits guard(work);
  const mp_real x(x_in, work);
  const auto& bd = table->bounds;
  auto it = std::upper_bound(bd.begin(), bd.end(), x);
  std::size_t p = it == bd.begin() ? 0 : static_cast<std::size_t>(it - bd.begin()) - 1;
  p = std::min(p, bd.size() - 2);
  const mp_real t = (2 * x - bd[p] - bd[p + 1]) / (bd[p + 1] - bd[p]);
  const mp_real A = clenshaw(table->ha[m][p], t) + table->tail_a[m][p];
  const mp_real B = clenshaw(table->hb[m][p], t) + table->tail_b[m][p];
  const auto v = airy<mp_real>(x);
  const mp_real pi2 = 2 * pi_value<mp_real>();
  return {pi2 * (v.ai * A - v.bi * B), pi2 * (v.aip * A - v.bip * B)};
}

void check_class(int symmetry_class, const char* who) {
  if (symmetry_class != 1 && symmetry_class != 2)
    throw ParamError(std::string(who) + ": symmetry class must be 1 or 2");
}

// Ai + q1 beyond the anchor; q1 is dropped past x0 + 4, where it is below
// Ai * 1e-30 and far below any quantity evaluated on the grid.
constexpr double kTailCorrectionEnd = kPainleveAnchor + 4;

// From x0 on q1 < 3e-22 Ai, so q1 needs 20 fewer digits than q.
int correction_digits(int digits) { return std::max(15, digits - 20); }

mp_real tail_q(const mp_real& s, int digits) {
  mp_real v = airy_ai<mp_real>(s).first;
  if (s <= kTailCorrectionEnd) v += q_term_pair(1, s, correction_digits(digits)).first;
  return v;
}

// Digits beyond ctx.digits: 10 for rounding, plus the growth
// exp((2 sqrt 2/3)|x|^{3/2}) of perturbations about q ~ sqrt(-x/2) on the left.
int guard_digits(double s_min) {
  int g = 10;
  if (s_min < 0) g += static_cast<int>(std::ceil(2 * std::sqrt(2.0) / 3 * std::pow(-s_min, 1.5) / std::log(10.0)));
  return g;
}

}  // namespace

PainleveSolution::Point PainleveSolution::eval(const mp_real& x_in) const {
  ScopedDigits guard(digits_);
  const mp_real x(x_in, digits_);
  if (!(x <= grid_.front() && x >= grid_.back()))
    throw RangeError("PainleveSolution: x outside [s_min, x0]");
  // grid_ decreases; find i with grid_[i] >= x >= grid_[i + 1].
  auto it = std::lower_bound(grid_.begin(), grid_.end(), x, [](const mp_real& g, const mp_real& v) { return g > v; });
  std::size_t i = it == grid_.begin() ? 0 : static_cast<std::size_t>(it - grid_.begin()) - 1;
  i = std::min(i, segments_.size() - 1);
  const Segment& seg = segments_[i];
  const mp_real t = x - grid_[i];
  auto horner = [&](const std::vector<mp_real>& c) {
    mp_real acc = 0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * t + c[k];
    return acc;
  };
  Point pt;
  pt.q = horner(seg.q);
  mp_real d = 0;
  for (std::size_t k = seg.q.size(); k-- > 1;) d = d * t + seg.q[k] * static_cast<int>(k);
  pt.qprime = d;
  pt.I1 = horner(seg.I1);
  pt.I2 = horner(seg.I2);
  return pt;
}

PainleveSolution::Point PainleveSolution::eval(double x) const {
  ScopedDigits guard(digits_);
  return eval(mp_real(x));
}

PainleveSolution solve_hastings_mcleod(double s_min, const PrecisionContext& ctx) {
  ctx.validate();
  if (!(s_min >= kPainleveMinS && s_min < kPainleveAnchor))
    throw DomainError("solve_hastings_mcleod: s_min must lie in [-8, 10)");

  PainleveSolution sol;
  sol.ctx_ = ctx;
  sol.s_min_ = s_min;
  sol.x0_ = kPainleveAnchor;
  sol.digits_ = ctx.digits + guard_digits(s_min);
  const int D = sol.digits_;
  ScopedDigits guard(D);

  const mp_real x0(kPainleveAnchor);
  const auto a0 = airy<mp_real>(x0);
  const auto q1 = q_term_pair(1, x0, correction_digits(D));
  mp_real q = a0.ai + q1.first;
  mp_real p = a0.aip + q1.second;

  // I1 = int q, J = int q^2 and I2 = int (t - x0) q^2 over (x0, inf).
  QuadOptions opt;
  opt.abs_tol = DBL_MIN;
  opt.rel_tol = std::pow(10.0, -(D - 3));
  auto tail_integrand = [&](const mp_real& s) {
    const mp_real v = tail_q(s, D);
    Vector<mp_real> r(3);
    r << v, v * v, (s - x0) * v * v;
    return r;
  };
  const mp_real xc(kTailCorrectionEnd);
  const auto near = quad_vector<mp_real>(tail_integrand, x0, xc, 3, opt).value;
  const auto far = quad_vector<mp_real>(tail_integrand, xc, infinity_value<mp_real>(), 3, opt).value;
  mp_real I1 = near[0] + far[0];
  mp_real J = near[1] + far[1];
  mp_real I2 = near[2] + far[2];

  const mp_real tol = mp_pow10(-D);
  const int N = static_cast<int>(std::ceil(1.15 * D)) + 2;
  mp_real x = x0;
  const mp_real xend(s_min);

  auto push_point = [&] {
    sol.grid_.push_back(x);
    sol.q_.push_back(q);
    sol.qprime_.push_back(p);
    sol.I1_.push_back(I1);
    sol.I2_.push_back(I2);
  };
  push_point();

  std::vector<mp_real> a(N + 1), s2(N + 1), c3(N + 1), b(N + 1), j(N + 1), e(N + 1);
  for (int steps = 0; x > xend; ++steps) {
    if (steps > 100000) throw ConvergenceError("solve_hastings_mcleod: step budget exhausted", static_cast<double>(x), 0);
    a[0] = q;
    a[1] = p;
    for (int k = 0; k <= N; ++k) {
      if (k >= 2) {
        const mp_real am1 = k >= 3 ? a[k - 3] : mp_real(0);
        a[k] = (2 * c3[k - 2] + x * a[k - 2] + am1) / ((k - 1) * k);
      }
      mp_real s = 0;
      for (int i = 0; i <= k; ++i) s += a[i] * a[k - i];
      s2[k] = s;
      mp_real c = 0;
      for (int i = 0; i <= k; ++i) c += a[i] * s2[k - i];
      c3[k] = c;
    }
    b[0] = I1;
    j[0] = J;
    e[0] = I2;
    for (int k = 0; k < N; ++k) {
      b[k + 1] = -a[k] / (k + 1);
      j[k + 1] = -s2[k] / (k + 1);
    }
    for (int k = 0; k < N; ++k) e[k + 1] = -j[k] / (k + 1);

    // Step length putting the last two Taylor terms of every series at tol.
    mp_real h = 1;
    auto limit = [&](const std::vector<mp_real>& c, const mp_real& scale) {
      for (int k : {N - 1, N}) {
        if (c[k] == 0 || scale == 0) continue;
        const mp_real hk = pow(tol * scale / abs(c[k]), mp_real(1) / k);
        if (hk < h) h = hk;
      }
    };
    limit(a, std::max(abs(a[0]), abs(a[1])));
    limit(b, std::max(abs(b[0]), abs(b[1])));
    limit(j, std::max(abs(j[0]), abs(j[1])));
    limit(e, std::max(abs(e[0]), abs(e[1])));
    bool last = false;
    if (x - h <= xend) {
      h = x - xend;
      last = true;
    }
    const mp_real step = -h;

    PainleveSolution::Segment seg;
    seg.q.assign(a.begin(), a.end());
    seg.I1.assign(b.begin(), b.end());
    seg.I2.assign(e.begin(), e.end());
    auto sum = [&](const std::vector<mp_real>& c) {
      mp_real acc = 0;
      for (std::size_t k = c.size(); k-- > 0;) acc = acc * step + c[k];
      return acc;
    };
    q = sum(a);
    mp_real d = 0;
    for (int k = N; k >= 1; --k) d = d * step + a[k] * k;
    p = d;
    I1 = sum(b);
    J = sum(j);
    I2 = sum(e);
    x = last ? xend : mp_real(x + step);
    sol.segments_.push_back(std::move(seg));
    push_point();
    if (abs(q) > 1e6) throw BlowupError("solve_hastings_mcleod: |q| exceeded 1e6 before s_min");
  }
  return sol;
}

mp_real tw_upper_mp(int symmetry_class, const mp_real& s, const PainleveSolution& sol) {
  check_class(symmetry_class, "tw_upper");
  ScopedDigits guard(sol.working_digits());
  const auto pt = sol.eval(s);
  const mp_real exponent = symmetry_class == 2 ? mp_real(pt.I2) : mp_real((pt.I1 + pt.I2) / 2);
  return -expm1(-exponent);
}

double tw_upper(int symmetry_class, double s, const PainleveSolution& sol) {
  ScopedDigits guard(sol.working_digits());
  return static_cast<double>(tw_upper_mp(symmetry_class, mp_real(s), sol));
}

template <class Real>
Real wronskian_kernel(const Real& x, const Real& s, const PrecisionContext& ctx) {
  const auto ax = airy<Real>(x, ctx);
  const auto as = airy<Real>(s, ctx);
  return ax.ai * as.bi - ax.bi * as.ai;
}

template <class Real>
Real q_expansion_term(int m, const Real& x, const PrecisionContext& ctx) {
  if (m < 0 || m > kMaxTerm) throw ParamError("q_expansion_term: m must lie in 0..3");
  if (!(x >= 1)) throw DomainError("q_expansion_term: x must be >= 1");
  if (m == 0) {
    if constexpr (is_mp_v<Real>) {
      ScopedDigits guard(ctx.digits);
      return airy_ai<Real>(promote(x)).first;
    } else {
      return airy_ai<Real>(x).first;
    }
  }
  const int digits = is_mp_v<Real> ? ctx.digits : 15;
  mp_real v;
  {
    ScopedDigits guard(digits + 10);
    v = q_term_pair(m, mp_real(x), digits).first;
  }
  if constexpr (is_mp_v<Real>) {
    ScopedDigits guard(ctx.digits);
    return promote(v);
  } else {
    return static_cast<Real>(v);
  }
}

double q_term_asymptote(int m, double x) {
  if (m < 0) throw ParamError("q_term_asymptote: m must be non-negative");
  if (!(x > 0)) throw DomainError("q_term_asymptote: x must be positive");
  const double pi = 3.141592653589793238462643383279502884;
  return std::exp(-(4.0 * m + 2) / 3 * std::pow(x, 1.5) - (4.0 * m + 1) * std::log(2.0) -
                  (2.0 * m + 1) / 2 * std::log(pi) - (6.0 * m + 1) / 4 * std::log(x));
}

double verify_q_identity(const PainleveSolution& sol, double x, const PrecisionContext& ctx) {
  if (!(x >= sol.s_min() && x <= sol.x0())) throw RangeError("verify_q_identity: x outside the solution grid");
  const int D = sol.working_digits();
  ScopedDigits guard(D);
  const mp_real xm(x);
  const auto ax = airy<mp_real>(xm);
  QuadOptions opt;
  opt.abs_tol = std::min(ctx.abs_tol, std::pow(10.0, -(D - 3)));
  opt.rel_tol = std::min(ctx.rel_tol, std::pow(10.0, -(D - 3)));
  auto kernel = [&](const mp_real& s, const mp_real& qs) {
    const auto as = airy<mp_real>(s);
    return (ax.ai * as.bi - ax.bi * as.ai) * qs * qs * qs;
  };
  const mp_real x0(sol.x0()), xc(kTailCorrectionEnd);
  mp_real integral = quad<mp_real>([&](const mp_real& s) { return kernel(s, sol.eval(s).q); }, xm, x0, opt).value;
  integral += quad<mp_real>([&](const mp_real& s) { return kernel(s, tail_q(s, D)); }, x0, xc, opt).value;
  integral += quad<mp_real>([&](const mp_real& s) { return kernel(s, tail_q(s, D)); }, xc, infinity_value<mp_real>(), opt).value;
  const mp_real residual = sol.eval(xm).q - 2 * pi_value<mp_real>() * integral - ax.ai;
  return static_cast<double>(residual);
}

double ode_residual(const PainleveSolution& sol, double x) {
  const int D = sol.working_digits();
  ScopedDigits guard(D);
  const mp_real h = pow(mp_real(10), -mp_real(D) / 9);
  const mp_real xm(x);
  if (!(xm - 4 * h >= mp_real(sol.s_min()) && xm + 4 * h <= mp_real(sol.x0())))
    throw RangeError("ode_residual: stencil leaves the solution grid");
  const mp_real w[4] = {mp_real(4) / 5, mp_real(-1) / 5, mp_real(4) / 105, mp_real(-1) / 280};
  mp_real d2 = 0;
  for (int k = 1; k <= 4; ++k) d2 += w[k - 1] * (sol.eval(mp_real(xm + k * h)).qprime - sol.eval(mp_real(xm - k * h)).qprime);
  d2 /= h;
  const mp_real q = sol.eval(xm).q;
  return static_cast<double>(abs(d2 - 2 * q * q * q - xm * q));
}

double measured_delta(int symmetry_class, double s, const PainleveSolution& sol, const PrecisionContext& ctx) {
  check_class(symmetry_class, "measured_delta");
  const int d = std::max(30, ctx.digits);
  if (sol.ctx().digits < 30) throw PrecisionError("measured_delta: the solution must carry at least 30 digits");
  const auto fctx = PrecisionContext::with_digits(d);
  ScopedDigits guard(std::max(d, sol.working_digits()));
  const mp_real sm(s);
  const mp_real f = symmetry_class == 1 ? f_hat_1<mp_real>(sm, fctx) : f_hat_2<mp_real>(sm, fctx);
  const mp_real t = tw_upper_mp(symmetry_class, sm, sol);
  if (!(t > 0)) throw PrecisionError("measured_delta: Tracy-Widom tail is not positive at this precision");
  const mp_real err = abs(f) * mp_pow10(-(d - 3)) + t * mp_pow10(-(sol.ctx().digits - 3));
  const mp_real diff = f - t;
  if (abs(diff) <= 10 * err) throw PrecisionError("measured_delta: difference not resolved at this precision");
  return static_cast<double>(diff / t);
}

template double wronskian_kernel<double>(const double&, const double&, const PrecisionContext&);
template mp_real wronskian_kernel<mp_real>(const mp_real&, const mp_real&, const PrecisionContext&);
template double q_expansion_term<double>(int, const double&, const PrecisionContext&);
template mp_real q_expansion_term<mp_real>(int, const mp_real&, const PrecisionContext&);

}  // namespace eecrmt
