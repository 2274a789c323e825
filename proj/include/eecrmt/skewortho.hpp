#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "eecrmt/poly.hpp"
#include "eecrmt/precision.hpp"

namespace eecrmt {

// Pointwise weight with its support (either end may be infinite).
template <class Real>
struct WeightFunction {
  std::function<Real(const Real&)> density;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

// Declarative weight
//   w(x) = (x - lower)^power_lower (upper - x)^power_upper exp(-exp_linear x - exp_quadratic x^2)
// on (lower, upper); a power factor is dropped when its endpoint is infinite.
struct WeightSpec {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  double power_lower = 0;
  double power_upper = 0;
  double exp_linear = 0;
  double exp_quadratic = 0;
  std::vector<double> moments;  // optional closed-form mu_0, mu_1, ...

  // ParamError for malformed declarations; MomentError when the weight does
  // not have moments of every order.
  void validate() const;

  template <class Real>
  Real operator()(const Real& x) const;

  template <class Real>
  WeightFunction<Real> function() const;

  static WeightSpec gaussian();                              // e^{-x^2/2}
  static WeightSpec half_gaussian();                         // e^{-x^2/2} on x > 0
  static WeightSpec laguerre_skew(double alpha);             // x^{(a-1)/2} e^{-x/2}
  static WeightSpec jacobi_skew(double alpha, double beta);  // x^{(a-1)/2}(1-x)^{(b-1)/2}
  static WeightSpec hermite_herm();                          // e^{-x^2}
  static WeightSpec laguerre_herm(double alpha);             // x^a e^{-x}
  static WeightSpec jacobi_herm(double alpha, double beta);  // x^a (1-x)^b
};

// Moments mu_i = int x^i w and skew-moments
// s_ij = (int_{x<y} - int_{x>y}) x^i y^j w(x) w(y).
// Values are computed at the provider's context precision.
template <class Real>
class MomentProvider {
 public:
  explicit MomentProvider(const PrecisionContext& ctx) : ctx_(ctx) { ctx_.validate(); }
  virtual ~MomentProvider() = default;

  virtual Real mu(int i) const = 0;
  virtual Real skew(int i, int j) const = 0;

  // mu_0..mu_{count-1} and the leading n x n skew-moment matrix; providers
  // override these when batch evaluation is cheaper.
  virtual Vector<Real> moments(int count) const;
  virtual Matrix<Real> skew_matrix(int n) const;

  const PrecisionContext& context() const { return ctx_; }

 protected:
  PrecisionContext ctx_;
};

// Closed-form recursion for e^{-x^2/2} on the real line.
template <class Real>
std::unique_ptr<MomentProvider<Real>> gaussian_moments(const PrecisionContext& ctx);

// e^{-x^2/2} restricted to x > 0 (positive-definite conditional GOE).
template <class Real>
std::unique_ptr<MomentProvider<Real>> cond_goe_moments(const PrecisionContext& ctx);

// x^{(a-1)/2} e^{-x/2} on x > 0, skew-moments through incomplete beta at 1/2.
template <class Real>
std::unique_ptr<MomentProvider<Real>> laguerre_moments(double alpha, const PrecisionContext& ctx);

// x^{(a-1)/2}(1-x)^{(b-1)/2} on (0, 1): closed-form moments and cumulative
// moments, one outer quadrature for the skew-moments.
template <class Real>
std::unique_ptr<MomentProvider<Real>> jacobi_moments(double alpha, double beta,
                                                     const PrecisionContext& ctx);

// Any weight: moments by quadrature (or overrides), skew-moments as
// s_ij = int x^i w(x) (mu_j - 2 M_j(x)) dx with M_j(x) = int_{lower}^x y^j w(y) dy
// evaluated by nested quadrature.
template <class Real>
std::unique_ptr<MomentProvider<Real>> quadrature_moments(const WeightFunction<Real>& w,
                                                         const PrecisionContext& ctx,
                                                         std::vector<Real> mu_override = {});

template <class Real>
std::unique_ptr<MomentProvider<Real>> weight_spec_moments(const WeightSpec& spec,
                                                          const PrecisionContext& ctx);

template <class Real>
struct SkewOrthoSystem {
  int n = 0;
  Matrix<Real> U;                         // unit upper triangular, columns = coefficients of phi_i
  std::vector<Real> sigma;                // sigma_0 .. sigma_{n/2 - 1}
  std::vector<Real> gamma;                // gamma_0 .. gamma_{n-1}
  std::vector<MonicPoly<Real>> phi;       // phi_0 .. phi_{n-1}
  std::vector<MonicPoly<Real>> phi_hat;   // hat phi_0 .. hat phi_{n-1}
  Matrix<Real> S;                         // skew-moment matrix used
  Vector<Real> mu;                        // moments used
  int digits = 0;
};

// pf(S) by 2x2 block elimination with symmetric pivoting; zero for odd size.
template <class Real>
Real pfaffian(const Matrix<Real>& S);

template <class Real>
SkewOrthoSystem<Real> build_system(const MomentProvider<Real>& m, int n);

template <class Real>
MonicPoly<Real> hat_varphi(const SkewOrthoSystem<Real>& sys, int n);

// hat phi_n - (gamma_n / gamma_{n-2}) hat phi_{n-2} for odd n >= 3.
template <class Real>
MonicPoly<Real> inverse_relation(const SkewOrthoSystem<Real>& sys, int n);

// 1 / c_n^{(1)}: prod sigma_k (n even), prod sigma_k * gamma_{n-1} (n odd).
template <class Real>
Real norm_const_sym(const SkewOrthoSystem<Real>& sys, int n);

template <class Real>
Real norm_const_herm(const std::vector<Real>& h);

// Monic orthogonal polynomials phi_0..phi_n and h_0..h_n of a weight, from
// its moments by Gram-Schmidt on the Hankel matrix.
template <class Real>
struct OrthoSystem {
  std::vector<MonicPoly<Real>> phi;
  std::vector<Real> h;
};

template <class Real>
OrthoSystem<Real> build_orthogonal(const MomentProvider<Real>& m, int n);

struct PfIntResult {
  double lhs;  // ordered-region integral
  double rhs;  // (bordered) Pfaffian
};

// Both sides of the ordered-integral Pfaffian identity for n in {2, 3}.
PfIntResult pf_int_oracle(const WeightFunction<double>& g, const std::vector<MonicPoly<double>>& polys,
                          int n, const PrecisionContext& ctx);

// Least-squares test of whether hat phi_0..hat phi_3 can be orthogonal for
// some weight: the moment ratios nu_1..nu_3 of such a weight would solve the
// four linear equations int hat phi_i hat phi_j w = 0, (i,j) in
// {(0,1),(0,2),(0,3),(1,2)}.
struct OrthogonalityObstruction {
  double residual;          // least-squares residual norm
  std::vector<double> nu;   // least-squares nu_1..nu_3
};

OrthogonalityObstruction orthogonality_obstruction(const SkewOrthoSystem<mp_real>& sys);

}  // namespace eecrmt
