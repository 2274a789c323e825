#pragma once

#include <utility>

#include "eecrmt/precision.hpp"
#include "eecrmt/quadrature.hpp"

namespace eecrmt {

// Functions taking a PrecisionContext evaluate mp_real arguments at
// ctx.digits; the overloads without one use the caller's current precision.

template <class Real>
Real gamma_fn(const Real& x);
template <class Real>
Real gamma_fn(const Real& x, const PrecisionContext& ctx);

template <class Real>
Real log_gamma_fn(const Real& x);

template <class Real>
Real beta_fn(const Real& a, const Real& b);

// Q(a, x) = Gamma(a, x) / Gamma(a).
template <class Real>
Real upper_gamma_reg(const Real& a, const Real& x);
template <class Real>
Real upper_gamma_reg(const Real& a, const Real& x, const PrecisionContext& ctx);

// P(a, x) = 1 - Q(a, x).
template <class Real>
Real lower_gamma_reg(const Real& a, const Real& x);

// Unnormalized Gamma(a, x) and gamma(a, x).
template <class Real>
Real upper_gamma(const Real& a, const Real& x);
template <class Real>
Real lower_gamma(const Real& a, const Real& x);

// I_x(a, b).
template <class Real>
Real reg_incomplete_beta(const Real& a, const Real& b, const Real& x);
template <class Real>
Real reg_incomplete_beta(const Real& a, const Real& b, const Real& x, const PrecisionContext& ctx);

template <class Real>
Real erfc_fn(const Real& x);

template <class Real>
struct AiryValues {
  Real ai;
  Real aip;
  Real bi;
  Real bip;
};

// All four Airy values. Throws OverflowError when Bi(x) is not representable
// in Real (x above roughly 104.8 for double).
template <class Real>
AiryValues<Real> airy(const Real& x);
template <class Real>
AiryValues<Real> airy(const Real& x, const PrecisionContext& ctx);

// Ai(x) and Ai'(x) only; never overflows.
template <class Real>
std::pair<Real, Real> airy_ai(const Real& x);

}  // namespace eecrmt
