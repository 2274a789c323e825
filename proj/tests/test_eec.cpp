#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "eecrmt/eec.hpp"
#include "eecrmt/poly.hpp"
#include "eecrmt/quadrature.hpp"
#include "eecrmt/specfun.hpp"

using namespace eecrmt;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

EnsembleSpec make(EnsembleKind k, int n, double a = 0, double b = 0) {
  EnsembleSpec e;
  e.kind = k;
  e.n = n;
  e.alpha = a;
  e.beta_param = b;
  return e;
}

std::vector<double> grid(double a, double b, int count) {
  std::vector<double> g;
  for (int i = 0; i < count; ++i) g.push_back(a + (b - a) * i / (count - 1));
  return g;
}

// Probability that a single eigenvalue with weight w exceeds x.
double single_tail(const EnsembleSpec& e, double x) {
  const double a = e.alpha, b = e.beta_param;
  switch (e.kind) {
    case EnsembleKind::GOE: return std::erfc(x / std::sqrt(2.0)) / 2;
    case EnsembleKind::GUE: return std::erfc(x) / 2;
    case EnsembleKind::Wishart: return upper_gamma_reg<double>((a + 1) / 2, x / 2);
    case EnsembleKind::CWishart: return upper_gamma_reg<double>(a + 1, x);
    case EnsembleKind::Beta: return reg_incomplete_beta<double>((b + 1) / 2, (a + 1) / 2, 1 - x);
    case EnsembleKind::CBeta: return reg_incomplete_beta<double>(b + 1, a + 1, 1 - x);
    case EnsembleKind::CondGOE: return std::erfc(x / std::sqrt(2.0));
    default: return NAN;
  }
}

// E[chi] for n = 2 straight from the ordered eigenvalue density
// w(l1) w(l2) (l2 - l1)^beta on l1 < l2:
//   real symmetric: Pr(l2 >= x) - Pr(l1 >= x) = Pr(l1 < x <= l2),
//   Hermitian:      Pr(l2 >= x) + Pr(l1 >= x).
double two_eigenvalue_oracle(const EnsembleSpec& e, double x) {
  const WeightSpec spec = e.weight_spec();
  const auto w = spec.function<double>();
  const int beta = e.real_symmetric() ? 1 : 2;
  QuadOptions opt;
  opt.abs_tol = opt.rel_tol = 1e-12;
  QuadOptions inner = opt;
  inner.abs_tol = inner.rel_tol = 1e-14;
  const double lo = spec.lower, hi = spec.upper;
  auto mass = [&](double a1, double b1, double a2, double b2) {
    // l1 in (a1, b1), l2 in (a2, b2), l1 < l2
    return quad<double>(
               [&](double l2) {
                 const double w2 = w.density(l2);
                 if (w2 == 0) return 0.0;
                 const double top = std::min(l2, b1);
                 if (top <= a1) return 0.0;
                 return w2 * quad<double>([&](double l1) { return w.density(l1) * std::pow(l2 - l1, beta); },
                                          a1, top, inner)
                                 .value;
               },
               a2, b2, opt)
        .value;
  };
  const double c = std::clamp(x, lo, hi);
  const double total = mass(lo, hi, lo, hi);
  const double straddle = mass(lo, c, c, hi);  // l1 < x <= l2
  const double both_above = mass(c, hi, c, hi);
  if (beta == 1) return straddle / total;
  return (straddle + 2 * both_above) / total;
}

}  // namespace

TEST_CASE("single eigenvalue: EEC is the exact tail") {
  const std::vector<std::pair<EnsembleSpec, std::pair<double, double>>> cases = {
      {make(EnsembleKind::GOE, 1), {-3, 6}},
      {make(EnsembleKind::GUE, 1), {-3, 5}},
      {make(EnsembleKind::Wishart, 1, 2.0), {0.1, 25}},
      {make(EnsembleKind::CWishart, 1, 0.5), {0.1, 20}},
      {make(EnsembleKind::Beta, 1, 1.0, 2.0), {0.02, 0.98}},
      {make(EnsembleKind::CBeta, 1, 0.0, 1.5), {0.02, 0.98}},
      {make(EnsembleKind::CondGOE, 1), {0, 6}},
  };
  for (const auto& [e, range] : cases)
    for (double x : grid(range.first, range.second, 20)) {
      const double v = eec(e, x).value, t = single_tail(e, x);
      CHECK_MESSAGE(std::abs(v - t) <= 1e-12 * std::abs(t), ensemble_name(e.kind), " x=", x);
    }
}

TEST_CASE("small examples") {
  CHECK(eec_sym(make(EnsembleKind::GOE, 1), 0.0).value == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(eec_sym(make(EnsembleKind::Beta, 1, 1, 1), 0.5).value == doctest::Approx(0.5).epsilon(1e-15));
  for (double x : {0.0, 0.7, 3.0})
    CHECK(eec_herm(make(EnsembleKind::CWishart, 1), x).value == doctest::Approx(std::exp(-x)).epsilon(1e-14));
  CHECK(eec(make(EnsembleKind::Beta, 2, 1, 1), 1.5).value == 0.0);
  CHECK_THROWS_AS(eec_sym(make(EnsembleKind::GUE, 2), 0.0), ParamError);
  CHECK_THROWS_AS(eec_herm(make(EnsembleKind::GOE, 2), 0.0), ParamError);
  CHECK_THROWS_AS(eec(make(EnsembleKind::Wishart, 2, -1.5), 1.0), ParamError);
  CHECK_THROWS_AS(eec(make(EnsembleKind::GOE, 0), 1.0), RangeError);
  CHECK(ensemble_from_name("cwishart") == EnsembleKind::CWishart);
  CHECK_THROWS_AS(ensemble_from_name("goe4"), ParamError);
}

TEST_CASE("two eigenvalues: EEC equals the alternating / plain sum of order-statistic tails") {
  const std::vector<std::pair<EnsembleSpec, std::vector<double>>> cases = {
      {make(EnsembleKind::GOE, 2), {-1.0, 0.0, 1.5, 3.0}},
      {make(EnsembleKind::GUE, 2), {-0.5, 0.0, 1.0, 2.0}},
      {make(EnsembleKind::Wishart, 2, 1.0), {1.0, 4.0, 9.0}},
      {make(EnsembleKind::CWishart, 2, 0.5), {1.0, 3.0, 6.0}},
      {make(EnsembleKind::Beta, 2, 1.0, 2.0), {0.3, 0.6, 0.9}},
      {make(EnsembleKind::CBeta, 2, 1.0, 0.0), {0.3, 0.6, 0.9}},
      {make(EnsembleKind::CondGOE, 2), {0.5, 1.5, 3.0}},
  };
  for (const auto& [e, xs] : cases)
    for (double x : xs) {
      const double v = eec(e, x).value, o = two_eigenvalue_oracle(e, x);
      CHECK_MESSAGE(std::abs(v - o) <= 1e-9 * std::max(1e-3, std::abs(o)), ensemble_name(e.kind), " x=", x);
    }
}

TEST_CASE("closed-form and quadrature paths agree") {
  const std::vector<EnsembleSpec> kinds = {
      make(EnsembleKind::GOE, 1),          make(EnsembleKind::Wishart, 1, 1.5),
      make(EnsembleKind::Beta, 1, 0.5, 2), make(EnsembleKind::GUE, 1),
      make(EnsembleKind::CWishart, 1, 1),  make(EnsembleKind::CBeta, 1, 2, 0.5)};
  for (EnsembleSpec e : kinds)
    for (int n : {2, 3, 5}) {
      e.n = n;
      const EdgeScaling sc = edge_scaling(e, n);
      for (double s : {-2.0, 0.0, 2.0}) {
        const double x = sc.mu_n + sc.sigma_n * s;
        const auto a = eec(e, x), b = eec_quadrature(e, x);
        CHECK(a.method == EecMethod::closed_form);
        CHECK(b.method == EecMethod::quadrature);
        CHECK_MESSAGE(std::abs(a.value - b.value) <= 1e-10 * std::max(1.0, std::abs(a.value)),
                      ensemble_name(e.kind), " n=", n, " s=", s);
      }
    }
}

TEST_CASE("custom weights reproduce the built-in ensembles") {
  EnsembleSpec sym = make(EnsembleKind::CustomSym, 3);
  sym.weight = WeightSpec::gaussian();
  EnsembleSpec herm = make(EnsembleKind::CustomHerm, 3);
  herm.weight = WeightSpec::hermite_herm();
  for (double x : {0.5, 2.0, 3.5}) {
    CHECK(eec(sym, x).value == doctest::Approx(eec(make(EnsembleKind::GOE, 3), x).value).epsilon(1e-10));
    CHECK(eec(herm, x).value == doctest::Approx(eec(make(EnsembleKind::GUE, 3), x).value).epsilon(1e-10));
  }
  EnsembleSpec missing = make(EnsembleKind::CustomSym, 2);
  CHECK_THROWS_AS(eec(missing, 1.0), ParamError);
}

TEST_CASE("monotone beyond the bulk edge") {
  for (auto e : {make(EnsembleKind::GOE, 5), make(EnsembleKind::GUE, 5), make(EnsembleKind::Wishart, 4, 1.0),
                 make(EnsembleKind::CWishart, 4, 1.0), make(EnsembleKind::CondGOE, 3)}) {
    const double edge = e.kind == EnsembleKind::CondGOE ? 3.0 : edge_scaling(e, e.n).mu_n;
    double prev = 2;
    for (double x : grid(edge, edge * 2 + 4, 30)) {
      const double v = eec(e, x).value;
      CHECK(v <= prev);
      CHECK(v >= 0);
      prev = v;
    }
  }
}

TEST_CASE("large sizes keep their accuracy through guard digits") {
  for (auto e : {make(EnsembleKind::GOE, 40), make(EnsembleKind::GUE, 40), make(EnsembleKind::Wishart, 30, 2.0),
                 make(EnsembleKind::CBeta, 25, 3.0, 4.0)}) {
    for (double s : {0.0, 2.0, 4.0}) {
      const auto a = eec_scaled(e, s);
      const auto b = eec_scaled(e, s, PrecisionContext::with_digits(40));
      CHECK_MESSAGE(std::abs(a.value - b.value) <= 1e-13 * std::abs(b.value), ensemble_name(e.kind), " s=", s);
      CHECK(a.err_est <= 1e-13 * std::abs(a.value));
    }
  }
}

TEST_CASE("Hermitian EEC is the expected number of eigenvalues above x") {
  for (int n : {3, 12, 40}) {
    EnsembleSpec e = make(EnsembleKind::GUE, n);
    for (double x : {0.0, std::sqrt(2.0 * n), std::sqrt(2.0 * n) + 1}) {
      double count = 0;
      for (int k = 0; k < n; ++k) {
        const double hk = h_constant<double>(HermiteMonic{}, k);
        count += quad<double>(
                     [&](double t) {
                       const double p = classical_eval<double>(HermiteMonic{}, k, t);
                       return p * p * std::exp(-t * t) / hk;
                     },
                     x, kInf, QuadOptions{})
                     .value;
      }
      CHECK(eec(e, x).value == doctest::Approx(count).epsilon(1e-11));
    }
  }
}

TEST_CASE("edge scalings") {
  const auto goe = edge_scaling(make(EnsembleKind::GOE, 4), 4);
  CHECK(goe.mu_n == doctest::Approx(std::sqrt(8.0)));
  CHECK(goe.sigma_n == doctest::Approx(std::pow(2.0, -0.5) * std::pow(4.0, -1.0 / 6)));
  const auto w = edge_scaling(make(EnsembleKind::Wishart, 7), 7);
  CHECK(w.mu_n == doctest::Approx(28.0));
  CHECK(w.sigma_n == doctest::Approx(std::pow(2.0, 4.0 / 3) * std::cbrt(7.0)));
  CHECK_THROWS_AS(edge_scaling(make(EnsembleKind::Beta, 5, 0, 0), 5), DegenerateError);
  CHECK_THROWS_AS(edge_scaling(make(EnsembleKind::CondGOE, 3), 3), ParamError);
  const auto b = edge_scaling(make(EnsembleKind::Beta, 10, 10, 10), 10);
  // abar = bbar = 1: cos(phi) = 0, cos(gamma) = 1/2.
  CHECK(b.mu_n == doctest::Approx((1 - std::cos(M_PI / 2 + M_PI / 3)) / 2));
  CHECK(b.sigma_n > 0);
  const auto wish = make(EnsembleKind::Wishart, 5);
  CHECK(eec_scaled(wish, 0.0).value == doctest::Approx(eec(wish, 16.0).value).epsilon(1e-15));
  const auto goe2 = make(EnsembleKind::GOE, 2);
  CHECK(eec_scaled(goe2, 0.0).value == doctest::Approx(eec(goe2, std::sqrt(2.0)).value).epsilon(1e-15));
}

TEST_CASE("relative error against a tail estimate") {
  const auto e = make(EnsembleKind::GOE, 3);
  const double v = eec(e, 3.0).value;
  const auto r = finite_n_relative_error(e, 3.0, TailEstimate{v, 1e-4, 1000000});
  CHECK(std::abs(r.value) < 1e-15);
  CHECK(r.std_error == doctest::Approx(1e-4 / v));
  CHECK_THROWS_AS(finite_n_relative_error(e, 3.0, TailEstimate{0.0, 0.0, 100}), DegenerateError);
}
