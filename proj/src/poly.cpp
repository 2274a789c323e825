#include "eecrmt/poly.hpp"

#include <cmath>
#include <sstream>

#include "eecrmt/specfun.hpp"

namespace eecrmt {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

template <class Real>
MonicPoly<Real>::MonicPoly(Vector<Real> coeffs) : c_(std::move(coeffs)) {
  if (c_.size() == 0) throw DegreeError("MonicPoly: empty coefficient vector");
  using std::abs;
  using std::sqrt;
  const Real tol = sqrt(working_epsilon<Real>());
  Real& lead = c_[c_.size() - 1];
  if (abs(lead - 1) > tol) throw DegreeError("MonicPoly: leading coefficient is not one");
  lead = 1;
}

template <class Real>
MonicPoly<Real> MonicPoly<Real>::monomial(int degree) {
  if (degree < 0) throw DegreeError("MonicPoly: negative degree");
  Vector<Real> c = Vector<Real>::Zero(degree + 1);
  c[degree] = 1;
  return MonicPoly(c);
}

template <class Real>
MonicPoly<Real> MonicPoly<Real>::plus_lower(const Vector<Real>& lower) const {
  if (lower.size() > c_.size() - 1 && lower.size() > 0) {
    for (Eigen::Index i = c_.size() - 1; i < lower.size(); ++i)
      if (lower[i] != 0) throw DegreeError("MonicPoly: added term reaches the leading degree");
  }
  Vector<Real> r = c_;
  const Eigen::Index m = std::min<Eigen::Index>(lower.size(), c_.size() - 1);
  r.head(m) += lower.head(m);
  return MonicPoly(r);
}

void validate_family(const ClassicalFamily& f) {
  std::visit(overloaded{[](const HermiteMonic&) {},
                        [](const LaguerreMonic& l) {
                          if (!(l.alpha > -1)) throw ParamError("Laguerre family needs alpha > -1");
                        },
                        [](const ShiftedJacobiMonic& j) {
                          if (!(j.alpha > -1) || !(j.beta > -1))
                            throw ParamError("shifted Jacobi family needs alpha, beta > -1");
                        }},
             f);
}

std::string family_name(const ClassicalFamily& f) {
  std::ostringstream os;
  std::visit(overloaded{[&](const HermiteMonic&) { os << "hermite"; },
                        [&](const LaguerreMonic& l) { os << "laguerre(" << l.alpha << ")"; },
                        [&](const ShiftedJacobiMonic& j) {
                          os << "jacobi(" << j.alpha << "," << j.beta << ")";
                        }},
             f);
  return os.str();
}

template <class Real>
RecurrenceCoeffs<Real> recurrence_coeffs(const ClassicalFamily& f, int k) {
  validate_family(f);
  const Real kk = k;
  return std::visit(
      overloaded{
          [&](const HermiteMonic&) -> RecurrenceCoeffs<Real> { return {Real(0), kk / 2}; },
          [&](const LaguerreMonic& l) -> RecurrenceCoeffs<Real> {
            const Real al = l.alpha;
            return {2 * kk + al + 1, kk * (kk + al)};
          },
          [&](const ShiftedJacobiMonic& j) -> RecurrenceCoeffs<Real> {
            // Monic Jacobi on [-1, 1] mapped by t = 1 - 2x.
            const Real al = j.alpha, be = j.beta;
            const Real s = 2 * kk + al + be;
            Real aj;
            if (k == 0)
              aj = (be - al) / (al + be + 2);
            else
              aj = (be * be - al * al) / (s * (s + 2));
            Real bj = 0;
            if (k == 1)
              bj = 4 * (1 + al) * (1 + be) / ((2 + al + be) * (2 + al + be) * (3 + al + be));
            else if (k >= 2)
              bj = 4 * kk * (kk + al) * (kk + be) * (kk + al + be) / (s * s * (s + 1) * (s - 1));
            return {(1 - aj) / 2, bj / 4};
          }},
      f);
}

template <class Real>
std::vector<MonicPoly<Real>> classical_polys(const ClassicalFamily& f, int n) {
  if (n < 0) throw DegreeError("classical_polys: negative degree");
  std::vector<MonicPoly<Real>> out;
  out.reserve(n + 1);
  Vector<Real> prev = Vector<Real>::Zero(1);
  Vector<Real> cur = Vector<Real>::Ones(1);
  out.emplace_back(cur);
  for (int k = 0; k < n; ++k) {
    const auto rc = recurrence_coeffs<Real>(f, k);
    Vector<Real> next = Vector<Real>::Zero(k + 2);
    next.tail(k + 1) += cur;
    next.head(k + 1) -= rc.a * cur;
    if (k >= 1) next.head(k) -= rc.b * prev;
    prev = cur;
    cur = next;
    out.emplace_back(cur);
  }
  return out;
}

template <class Real>
MonicPoly<Real> classical_poly(const ClassicalFamily& f, int n) {
  return classical_polys<Real>(f, n).back();
}

template <class Real>
Real classical_eval(const ClassicalFamily& f, int n, const Real& x) {
  if (n < 0) throw DegreeError("classical_eval: negative degree");
  Real p0 = 0, p1 = 1;
  for (int k = 0; k < n; ++k) {
    const auto rc = recurrence_coeffs<Real>(f, k);
    Real p2 = (x - rc.a) * p1 - rc.b * p0;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

DerivativeRep classical_derivative(const ClassicalFamily& f, int n) {
  if (n < 1) throw DegreeError("classical_derivative: n must be >= 1");
  validate_family(f);
  return std::visit(overloaded{[&](const HermiteMonic&) -> DerivativeRep {
                                 return {static_cast<double>(n), HermiteMonic{}, n - 1};
                               },
                               [&](const LaguerreMonic& l) -> DerivativeRep {
                                 return {static_cast<double>(n), LaguerreMonic{l.alpha + 1}, n - 1};
                               },
                               [&](const ShiftedJacobiMonic& j) -> DerivativeRep {
                                 return {static_cast<double>(n),
                                         ShiftedJacobiMonic{j.alpha + 1, j.beta + 1}, n - 1};
                               }},
                    f);
}

template <class Real>
std::pair<Real, Real> classical_eval_with_derivative(const ClassicalFamily& f, int n, const Real& x) {
  const Real v = classical_eval<Real>(f, n, x);
  if (n == 0) return {v, Real(0)};
  const DerivativeRep d = classical_derivative(f, n);
  return {v, Real(d.scale) * classical_eval<Real>(d.family, d.index, x)};
}

template <class Real>
Real h_constant(const ClassicalFamily& f, int n) {
  if (n < 0) throw DegreeError("h_constant: negative index");
  validate_family(f);
  using std::pow;
  using std::sqrt;
  const Real nn = n;
  const Real nfact = gamma_fn<Real>(nn + 1);
  return std::visit(
      overloaded{[&](const HermiteMonic&) -> Real {
                   return pow(Real(2), -n) * sqrt(pi_value<Real>()) * nfact;
                 },
                 [&](const LaguerreMonic& l) -> Real {
                   return nfact * gamma_fn<Real>(nn + Real(l.alpha) + 1);
                 },
                 [&](const ShiftedJacobiMonic& j) -> Real {
                   const Real al = j.alpha, be = j.beta;
                   return nfact * gamma_fn<Real>(nn + al + 1) * gamma_fn<Real>(nn + be + 1) *
                          gamma_fn<Real>(nn + al + be + 1) /
                          (gamma_fn<Real>(2 * nn + al + be + 1) * gamma_fn<Real>(2 * nn + al + be + 2));
                 }},
      f);
}

template <class Real>
SkewConstants<Real> sigma_gamma_constants(const ClassicalFamily& f, int index) {
  if (index < 0) throw DegreeError("sigma_gamma_constants: negative index");
  validate_family(f);
  using std::pow;
  using std::sqrt;
  const Real k = index, n = index;
  const Real pi = pi_value<Real>();
  return std::visit(
      overloaded{
          [&](const HermiteMonic&) -> SkewConstants<Real> {
            return {pow(Real(2), -2 * index + 1) * sqrt(pi) * gamma_fn<Real>(2 * k + 1),
                    sqrt(Real(2)) * gamma_fn<Real>((n + 1) / 2)};
          },
          [&](const LaguerreMonic& l) -> SkewConstants<Real> {
            const Real al = l.alpha;
            return {4 * gamma_fn<Real>(2 * k + 1) * gamma_fn<Real>(2 * k + al + 1),
                    pow(Real(2), n + (al + 1) / 2) / sqrt(pi) * gamma_fn<Real>((n + 1) / 2) *
                        gamma_fn<Real>((n + al + 1) / 2)};
          },
          [&](const ShiftedJacobiMonic& j) -> SkewConstants<Real> {
            const Real al = j.alpha, be = j.beta;
            const Real sigma = 4 * gamma_fn<Real>(2 * k + 1) * gamma_fn<Real>(2 * k + al + 1) *
                               gamma_fn<Real>(2 * k + be + 1) * gamma_fn<Real>(2 * k + al + be + 1) /
                               (gamma_fn<Real>(4 * k + al + be + 1) * gamma_fn<Real>(4 * k + al + be + 3));
            const Real gamma = pow(Real(2), 2 * n + al + be) * gamma_fn<Real>((n + 1) / 2) *
                               gamma_fn<Real>((n + al + 1) / 2) * gamma_fn<Real>((n + be + 1) / 2) *
                               gamma_fn<Real>((n + al + be + 1) / 2) /
                               (pi * gamma_fn<Real>(2 * n + al + be + 1));
            return {sigma, gamma};
          }},
      f);
}

template <class Real>
MonicPoly<Real> table_skew_poly(const ClassicalFamily& f, int n) {
  if (n < 0) throw DegreeError("table_skew_poly: negative degree");
  const auto polys = classical_polys<Real>(f, n);
  if (n % 2 == 0 || n == 1) return polys[n];
  const int k = (n - 1) / 2;
  const Real kk = k;
  const Real c = std::visit(
      overloaded{[&](const HermiteMonic&) -> Real { return kk; },
                 [&](const LaguerreMonic& l) -> Real { return 2 * kk * (2 * kk + Real(l.alpha)); },
                 [&](const ShiftedJacobiMonic& j) -> Real {
                   const Real al = j.alpha, be = j.beta;
                   const Real s = 4 * kk + al + be;
                   return 2 * kk * (2 * kk + al) * (2 * kk + be) * (2 * kk + al + be) /
                          ((s + 2) * (s + 1) * s * (s - 1));
                 }},
      f);
  return polys[n].plus_lower(Vector<Real>(-c * polys[n - 2].coeffs()));
}

template <class Real>
Matrix<Real> companion_matrix(const std::vector<MonicPoly<Real>>& polys) {
  if (polys.empty()) throw DegreeError("companion_matrix: no polynomials");
  for (size_t i = 0; i < polys.size(); ++i)
    if (polys[i].degree() != static_cast<int>(i))
      throw DegreeError("companion_matrix: polynomial degrees must be 0..n");
  const int n = static_cast<int>(polys.size()) - 1;
  Matrix<Real> L = Matrix<Real>::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    // r = x phi_i - phi_{i+1}, degree <= i, expanded in phi_i, ..., phi_0.
    Vector<Real> r = Vector<Real>::Zero(i + 2);
    r.tail(i + 1) += polys[i].coeffs();
    r -= polys[i + 1].coeffs();
    for (int j = i; j >= 0; --j) {
      const Real t = r[j];
      L(i, j) = t;
      r.head(j + 1) -= t * polys[j].coeffs();
    }
    if (i + 1 < n) L(i, i + 1) = 1;
  }
  return L;
}

#define EECRMT_INSTANTIATE(Real)                                                               \
  template class MonicPoly<Real>;                                                              \
  template RecurrenceCoeffs<Real> recurrence_coeffs<Real>(const ClassicalFamily&, int);        \
  template MonicPoly<Real> classical_poly<Real>(const ClassicalFamily&, int);                  \
  template std::vector<MonicPoly<Real>> classical_polys<Real>(const ClassicalFamily&, int);    \
  template Real classical_eval<Real>(const ClassicalFamily&, int, const Real&);                \
  template std::pair<Real, Real> classical_eval_with_derivative<Real>(const ClassicalFamily&,  \
                                                                      int, const Real&);       \
  template Real h_constant<Real>(const ClassicalFamily&, int);                                 \
  template SkewConstants<Real> sigma_gamma_constants<Real>(const ClassicalFamily&, int);       \
  template MonicPoly<Real> table_skew_poly<Real>(const ClassicalFamily&, int);                 \
  template Matrix<Real> companion_matrix<Real>(const std::vector<MonicPoly<Real>>&);

EECRMT_INSTANTIATE(double)
EECRMT_INSTANTIATE(mp_real)

#undef EECRMT_INSTANTIATE

}  // namespace eecrmt
