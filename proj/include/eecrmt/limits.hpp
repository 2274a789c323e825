#pragma once

#include "eecrmt/precision.hpp"

namespace eecrmt {

// Large-n limits of the edge-scaled EEC:
//   F1(s) = (1/2) int_s^inf Ai,   F2(s) = int_s^inf (Ai'^2 - x Ai^2).
// The mp versions work at ctx.digits.
template <class Real>
Real f_hat_1(const Real& s, const PrecisionContext& ctx = {});

template <class Real>
Real f_hat_2(const Real& s, const PrecisionContext& ctx = {});

// F2 from its antiderivative (2/3)s^2 Ai^2 - (2/3)s Ai'^2 - (1/3)Ai Ai';
// above the crossover the two leading terms cancel and f_hat_2 integrates
// the definition instead.
template <class Real>
Real f_hat_2_antiderivative(const Real& s);

template <class Real>
Real f_hat_2_quadrature(const Real& s, const PrecisionContext& ctx = {});

inline constexpr double kFHat2Crossover = 4.0;

// symmetry_class 1 -> f_hat_1, 2 -> f_hat_2.
double f_hat(int symmetry_class, double s, const PrecisionContext& ctx = {});

// Leading large-s behaviour of the relative error of F_beta against the
// Tracy-Widom tail:
//   class 1: -s^{-9/4} e^{-(2/3)s^{3/2}} / (2^5 pi^{1/2}),
//   class 2:  s^{-9/2} e^{-(4/3)s^{3/2}} / (2^10 pi).
// DomainError for s <= 0, ParamError for other classes.
double delta_asymptote(int symmetry_class, double s);

}  // namespace eecrmt
