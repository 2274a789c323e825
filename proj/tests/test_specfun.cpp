#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/special_functions/airy.hpp>

#include <cmath>
#include <random>

#include "eecrmt/specfun.hpp"

using namespace eecrmt;

namespace {
const double kPi = 3.141592653589793;
}

TEST_CASE("gamma_fn on integers and half integers") {
  PrecisionContext ctx;
  CHECK(gamma_fn(5.0, ctx) == doctest::Approx(24.0).epsilon(1e-15));
  CHECK(gamma_fn(0.5, ctx) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-15));
  CHECK(gamma_fn(1.5, ctx) == doctest::Approx(std::sqrt(kPi) / 2).epsilon(1e-15));
  CHECK_THROWS_AS(gamma_fn(0.0, ctx), PoleError);
  CHECK_THROWS_AS(gamma_fn(-3.0, ctx), PoleError);
}

TEST_CASE("gamma_fn at 50 digits") {
  auto ctx = PrecisionContext::with_digits(50);
  ScopedDigits g(50);
  mp_real v = gamma_fn(mp_real(0.5), ctx);
  mp_real want = sqrt(boost::math::constants::pi<mp_real>());
  CHECK(abs(v - want) < mp_real("1e-48"));
}

TEST_CASE("regularized incomplete gamma") {
  PrecisionContext ctx;
  CHECK(upper_gamma_reg(1.0, 2.0, ctx) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(upper_gamma_reg(3.7, 0.0, ctx) == 1.0);
  CHECK_THROWS_AS(upper_gamma_reg(0.0, 1.0, ctx), DomainError);
  CHECK_THROWS_AS(upper_gamma_reg(1.0, -1.0, ctx), DomainError);

  // Oracle: tanh-sinh quadrature of the defining integral.
  auto r = quad<double>([](double t) { return std::pow(t, -0.5) * std::exp(-t); }, 1.0,
                        std::numeric_limits<double>::infinity(), ctx);
  CHECK(upper_gamma_reg(0.5, 1.0, ctx) ==
        doctest::Approx(r.value / std::sqrt(kPi)).epsilon(1e-12));
  CHECK(upper_gamma_reg(0.5, 1.0, ctx) == doctest::Approx(std::erfc(1.0)).epsilon(1e-14));
}

TEST_CASE("incomplete gamma complements") {
  PrecisionContext ctx;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ua(0.05, 30.0), ux(0.0, 40.0);
  for (int i = 0; i < 100; ++i) {
    double a = ua(rng), x = ux(rng);
    double s = upper_gamma_reg(a, x) + lower_gamma_reg(a, x);
    CHECK(std::abs(s - 1.0) <= 10 * ctx.rel_tol);
  }
}

TEST_CASE("regularized incomplete beta") {
  PrecisionContext ctx;
  CHECK(reg_incomplete_beta(1.0, 1.0, 0.3, ctx) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(reg_incomplete_beta(2.5, 1.5, 0.0, ctx) == 0.0);
  // 12 x (1-x)^2 integrated over [0, 1/2] by polynomial antiderivative.
  auto prim = [](double x) { return 12 * (x * x / 2 - 2 * x * x * x / 3 + x * x * x * x / 4); };
  CHECK(reg_incomplete_beta(2.0, 3.0, 0.5, ctx) == doctest::Approx(prim(0.5)).epsilon(1e-15));
  CHECK(prim(0.5) == doctest::Approx(0.6875));
  CHECK_THROWS_AS(reg_incomplete_beta(2.0, 3.0, 1.5, ctx), DomainError);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ua(0.1, 20.0), ux(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    double a = ua(rng), b = ua(rng), x = ux(rng);
    double d = reg_incomplete_beta(a, b, x) - (1.0 - reg_incomplete_beta(b, a, 1.0 - x));
    CHECK(std::abs(d) <= 10 * ctx.rel_tol);
  }
}

TEST_CASE("airy values against an independent Bessel-based implementation") {
  CHECK(airy(0.0).ai ==
        doctest::Approx(std::pow(3.0, -2.0 / 3.0) / std::tgamma(2.0 / 3.0)).epsilon(1e-15));
  CHECK(airy(0.0).ai == doctest::Approx(0.3550280539).epsilon(1e-10));
  for (double x = -14.0; x <= 14.0; x += 0.35) {
    auto v = airy(x);
    CHECK(v.ai == doctest::Approx(boost::math::airy_ai(x)).epsilon(1e-12).scale(1e-13));
    CHECK(v.aip == doctest::Approx(boost::math::airy_ai_prime(x)).epsilon(1e-12).scale(1e-13));
    CHECK(v.bi == doctest::Approx(boost::math::airy_bi(x)).epsilon(1e-12));
    CHECK(v.bip == doctest::Approx(boost::math::airy_bi_prime(x)).epsilon(1e-12));
  }
}

TEST_CASE("airy wronskian") {
  PrecisionContext ctx;
  for (double x = -10.0; x <= 10.0 + 1e-12; x += 0.25) {
    auto v = airy(x, ctx);
    double w = v.ai * v.bip - v.aip * v.bi;
    CHECK(std::abs(w * kPi - 1.0) <= 10 * ctx.rel_tol);
  }
  for (double x : {-2.0, 0.0, 3.0, -25.0, 25.0}) {
    ScopedDigits g(50);
    auto v = airy(mp_real(x));
    mp_real w = v.ai * v.bip - v.aip * v.bi;
    CHECK(abs(w * boost::math::constants::pi<mp_real>() - 1) < mp_real("1e-46"));
  }
}

TEST_CASE("airy asymptotic ratio at x = 5") {
  double x = 5.0;
  double r = airy(x).ai * 2 * std::sqrt(kPi) * std::pow(x, 0.25) *
             std::exp(2.0 / 3.0 * std::pow(x, 1.5));
  CHECK(r == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("airy series and asymptotic branches agree across the switch") {
  // 60-digit series evaluation is the reference for the double asymptotic branch.
  for (double x : {10.5, 12.0, 20.0, -10.5, -12.0, -20.0}) {
    ScopedDigits g(60);
    auto ref = airy(mp_real(x));
    auto v = airy(x);
    CHECK(v.ai == doctest::Approx(static_cast<double>(ref.ai)).epsilon(1e-13));
    CHECK(v.aip == doctest::Approx(static_cast<double>(ref.aip)).epsilon(1e-13));
    CHECK(v.bi == doctest::Approx(static_cast<double>(ref.bi)).epsilon(1e-13));
    CHECK(v.bip == doctest::Approx(static_cast<double>(ref.bip)).epsilon(1e-13));
  }
  // mp asymptotic branch (|x| >= ~20.2 at 50 digits) against a 90-digit series.
  for (double x : {21.0, 26.0, -21.0, -26.0}) {
    mp_real ref_ai, ref_bi;
    {
      ScopedDigits g(90);
      auto ref = airy(mp_real(x));
      ref_ai = ref.ai;
      ref_bi = ref.bi;
    }
    ScopedDigits g(50);
    auto v = airy(mp_real(x));
    CHECK(abs(v.ai / ref_ai - 1) < mp_real("1e-45"));
    CHECK(abs(v.bi / ref_bi - 1) < mp_real("1e-45"));
  }
}

TEST_CASE("airy overflow and scaled Ai") {
  CHECK_THROWS_AS(airy(110.0), OverflowError);
  auto p = airy_ai(110.0);
  CHECK(p.first >= 0.0);
  auto q = airy_ai(30.0);
  CHECK(q.first == doctest::Approx(boost::math::airy_ai(30.0)).epsilon(1e-12));
}

TEST_CASE("quad basic integrals") {
  PrecisionContext ctx;
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(quad<double>([](double x) { return std::exp(-x); }, 0.0, inf, ctx).value ==
        doctest::Approx(1.0).epsilon(1e-13));
  auto g = [](double x) { return std::exp(-x * x / 2); };
  double whole = quad<double>(g, -inf, 0.0, ctx).value + quad<double>(g, 0.0, inf, ctx).value;
  CHECK(whole == doctest::Approx(std::sqrt(2 * kPi)).epsilon(1e-13));
  CHECK(quad<double>(g, -inf, inf, ctx).value == doctest::Approx(std::sqrt(2 * kPi)).epsilon(1e-13));
  auto ai = quad<double>([](double x) { return airy_ai(x).first; }, 0.0, inf, ctx);
  CHECK(ai.value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(ai.err_est <= std::max(ctx.abs_tol, ctx.rel_tol * ai.value));
  // Endpoint singularity.
  CHECK(quad<double>([](double x) { return 1 / std::sqrt(x); }, 0.0, 1.0, ctx).value ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("quad moments of the exponential weight") {
  PrecisionContext ctx;
  const double inf = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 10; ++k) {
    auto r = quad<double>([k](double x) { return std::pow(x, k) * std::exp(-x); }, 0.0, inf, ctx);
    double want = gamma_fn(k + 1.0, ctx);
    CHECK(std::abs(r.value - want) <= std::max(ctx.abs_tol, 10 * ctx.rel_tol * want));
  }
}

TEST_CASE("quad at 50 digits") {
  auto ctx = PrecisionContext::with_digits(50);
  ScopedDigits g(50);
  const mp_real inf = std::numeric_limits<mp_real>::infinity();
  auto r = quad<mp_real>([](const mp_real& x) { return exp(-x * x / 2); }, mp_real(-inf), inf, ctx);
  mp_real want = sqrt(2 * boost::math::constants::pi<mp_real>());
  CHECK(abs(r.value - want) < mp_real("1e-46"));
  auto s = quad<mp_real>([](const mp_real& x) { return pow(x, mp_real(-0.5)) * pow(1 - x, mp_real(-0.5)); },
                         mp_real(0), mp_real(1), ctx);
  CHECK(abs(s.value - boost::math::constants::pi<mp_real>()) < mp_real("1e-45"));
}

TEST_CASE("quad reports non-convergence with a partial value") {
  PrecisionContext ctx;
  QuadOptions opt = QuadOptions::from(ctx);
  opt.max_level = 2;
  opt.max_splits = 0;
  try {
    quad<double>([](double x) { return std::sin(40 * x); }, 0.0, 3.0, opt);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(std::isfinite(e.partial()));
  }
}
