#pragma once

#include <vector>

#include "eecrmt/precision.hpp"

namespace eecrmt {

// Hastings-McLeod solution of q'' = 2q^3 + xq, q ~ Ai at +infinity, on
// [s_min, x0], together with
//   I1(x) = int_x^inf q,   I2(x) = int_x^inf (t - x) q(t)^2 dt.
// Values are mp_real at working_digits(); the object is immutable and safe to
// read from several threads.
class PainleveSolution {
 public:
  struct Point {
    mp_real q;
    mp_real qprime;
    mp_real I1;
    mp_real I2;
  };

  // Step endpoints, decreasing from x0 to s_min, and the values there.
  const std::vector<mp_real>& grid() const { return grid_; }
  const std::vector<mp_real>& q() const { return q_; }
  const std::vector<mp_real>& qprime() const { return qprime_; }
  const std::vector<mp_real>& I1() const { return I1_; }
  const std::vector<mp_real>& I2() const { return I2_; }

  double x0() const { return x0_; }
  double s_min() const { return s_min_; }
  const PrecisionContext& ctx() const { return ctx_; }
  int working_digits() const { return digits_; }

  // Dense output from the stored Taylor coefficients; RangeError outside
  // [s_min, x0].
  Point eval(const mp_real& x) const;
  Point eval(double x) const;

 private:
  friend PainleveSolution solve_hastings_mcleod(double s_min, const PrecisionContext& ctx);

  // Step from grid_[i] to grid_[i + 1]: Taylor coefficients in (x - grid_[i]).
  struct Segment {
    std::vector<mp_real> q;
    std::vector<mp_real> I1;
    std::vector<mp_real> I2;
  };

  std::vector<mp_real> grid_, q_, qprime_, I1_, I2_;
  std::vector<Segment> segments_;
  double x0_ = 10;
  double s_min_ = 0;
  PrecisionContext ctx_;
  int digits_ = 0;
};

inline constexpr double kPainleveAnchor = 10.0;
inline constexpr double kPainleveMinS = -8.0;

// Taylor-series integration from x0 = 10 leftward, started from Ai + q1 and
// its derivative. Works at ctx.digits plus guard digits covering the growth of
// perturbations towards s_min. DomainError for s_min outside [-8, 10),
// BlowupError if |q| exceeds 1e6.
PainleveSolution solve_hastings_mcleod(double s_min, const PrecisionContext& ctx = {});

// Upper tail 1 - F_TW(s) with F2 = exp(-I2) and F1 = exp(-(I1 + I2)/2).
// These Tracy-Widom representations are standard results quoted from the
// literature rather than derived here. RangeError outside the solution grid.
mp_real tw_upper_mp(int symmetry_class, const mp_real& s, const PainleveSolution& sol);
double tw_upper(int symmetry_class, double s, const PainleveSolution& sol);

// W(x, s) = Ai(x) Bi(s) - Bi(x) Ai(s).
template <class Real>
Real wronskian_kernel(const Real& x, const Real& s, const PrecisionContext& ctx = {});

// Term m <= 3 of the exponential expansion q = sum q_m:
//   q_0 = Ai,  q_m(x) = 2 pi int_x^inf W(x, s) f_m(s) ds,
//   f_m = sum over i1 + i2 + i3 = m - 1 of q_i1 q_i2 q_i3,
// for x >= 1. Evaluated from a per-precision table of panel integrals that is
// built once and shared between threads.
template <class Real>
Real q_expansion_term(int m, const Real& x, const PrecisionContext& ctx = {});

// Leading behaviour 2^{-(4m+1)} pi^{-(2m+1)/2} x^{-(6m+1)/4} e^{-(4m+2)x^{3/2}/3}.
double q_term_asymptote(int m, double x);

// q(x) - 2 pi int_x^inf W(x, s) q(s)^3 ds - Ai(x); beyond x0 the solution is
// continued by Ai + q1. RangeError outside the solution grid.
double verify_q_identity(const PainleveSolution& sol, double x, const PrecisionContext& ctx = {});

// |q'' - 2q^3 - xq| with q'' from an eighth-order central difference of q'.
double ode_residual(const PainleveSolution& sol, double x);

// (F_beta(s) - TW tail)/TW tail at max(30, ctx.digits) digits. PrecisionError
// when the solution carries fewer than 30 digits or the difference is not
// resolved by the error of either term.
double measured_delta(int symmetry_class, double s, const PainleveSolution& sol,
                      const PrecisionContext& ctx = {});

}  // namespace eecrmt
