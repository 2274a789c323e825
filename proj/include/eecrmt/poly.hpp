#pragma once

#include <Eigen/Core>

#include <string>
#include <variant>
#include <vector>

#include "eecrmt/precision.hpp"

namespace eecrmt {

template <class Real>
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
template <class Real>
using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

// Coefficient-vector helpers; c[i] multiplies x^i.
template <class Real>
Real poly_eval(const Vector<Real>& c, const Real& x) {
  Real acc = 0;
  for (Eigen::Index i = c.size() - 1; i >= 0; --i) acc = acc * x + c[i];
  return acc;
}

template <class Real>
Vector<Real> poly_add(const Vector<Real>& a, const Vector<Real>& b) {
  Vector<Real> r = Vector<Real>::Zero(std::max(a.size(), b.size()));
  r.head(a.size()) += a;
  r.head(b.size()) += b;
  return r;
}

template <class Real>
Vector<Real> poly_mul(const Vector<Real>& a, const Vector<Real>& b) {
  Vector<Real> r = Vector<Real>::Zero(a.size() + b.size() - 1);
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (Eigen::Index j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

template <class Real>
Vector<Real> poly_derivative(const Vector<Real>& c) {
  if (c.size() <= 1) return Vector<Real>::Zero(1);
  Vector<Real> r(c.size() - 1);
  for (Eigen::Index i = 1; i < c.size(); ++i) r[i - 1] = c[i] * Real(static_cast<int>(i));
  return r;
}

// Monic univariate polynomial; the leading coefficient is exactly one.
template <class Real>
class MonicPoly {
 public:
  MonicPoly() : c_(Vector<Real>::Ones(1)) {}

  // Leading coefficients within rounding of one are snapped to one; anything
  // else raises DegreeError.
  explicit MonicPoly(Vector<Real> coeffs);

  static MonicPoly monomial(int degree);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const Vector<Real>& coeffs() const { return c_; }
  Real coeff(int i) const { return i <= degree() ? c_[i] : Real(0); }
  Real operator()(const Real& x) const { return poly_eval<Real>(c_, x); }

  // p + q for deg q < deg p; the result stays monic.
  MonicPoly plus_lower(const Vector<Real>& lower) const;

 private:
  Vector<Real> c_;
};

struct HermiteMonic {};
struct LaguerreMonic {
  double alpha = 0;
};
struct ShiftedJacobiMonic {
  double alpha = 0;
  double beta = 0;
};
using ClassicalFamily = std::variant<HermiteMonic, LaguerreMonic, ShiftedJacobiMonic>;

void validate_family(const ClassicalFamily& f);
std::string family_name(const ClassicalFamily& f);

// phi'_n = scale * (member `index` of `family`).
struct DerivativeRep {
  double scale;
  ClassicalFamily family;
  int index;
};

template <class Real>
struct RecurrenceCoeffs {
  Real a;  // p_{k+1} = (x - a_k) p_k - b_k p_{k-1}
  Real b;
};

template <class Real>
struct SkewConstants {
  Real sigma;  // sigma_k with k = index
  Real gamma;  // gamma_n with n = index
};

template <class Real>
RecurrenceCoeffs<Real> recurrence_coeffs(const ClassicalFamily& f, int k);

template <class Real>
MonicPoly<Real> classical_poly(const ClassicalFamily& f, int n);

// Members 0..n of the family.
template <class Real>
std::vector<MonicPoly<Real>> classical_polys(const ClassicalFamily& f, int n);

// Value by the three-term recurrence.
template <class Real>
Real classical_eval(const ClassicalFamily& f, int n, const Real& x);

// (phi_n(x), phi_n'(x)), the derivative through the shifted family.
template <class Real>
std::pair<Real, Real> classical_eval_with_derivative(const ClassicalFamily& f, int n, const Real& x);

DerivativeRep classical_derivative(const ClassicalFamily& f, int n);

// h_n of the orthogonality relation for the Hermitian weights
// e^{-x^2}, x^a e^{-x}, x^a (1-x)^b.
template <class Real>
Real h_constant(const ClassicalFamily& f, int n);

// Skew constants for the real-symmetric weights e^{-x^2/2},
// x^{(a-1)/2} e^{-x/2}, x^{(a-1)/2} (1-x)^{(b-1)/2}.
template <class Real>
SkewConstants<Real> sigma_gamma_constants(const ClassicalFamily& f, int index);

// Closed-form skew-orthogonal phi_n for the same weights.
template <class Real>
MonicPoly<Real> table_skew_poly(const ClassicalFamily& f, int n);

// Lower-Hessenberg L_n with unit superdiagonal such that
// x Phi_n = L_n Phi_n + e_n phi_n, from polys of degrees 0..n.
template <class Real>
Matrix<Real> companion_matrix(const std::vector<MonicPoly<Real>>& polys);

}  // namespace eecrmt
