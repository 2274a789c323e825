#pragma once

#include <optional>
#include <string>

#include "eecrmt/precision.hpp"
#include "eecrmt/skewortho.hpp"
#include "eecrmt/tail_estimate.hpp"

namespace eecrmt {

enum class EnsembleKind { GOE, GUE, Wishart, CWishart, Beta, CBeta, CondGOE, CustomSym, CustomHerm };

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::GOE;
  int n = 1;
  double alpha = 0;       // Wishart and Beta families
  double beta_param = 0;  // Beta families
  std::optional<WeightSpec> weight;  // Custom kinds

  // GOE, Wishart, Beta, CondGOE and CustomSym are real symmetric (beta = 1).
  bool real_symmetric() const;
  // ParamError / RangeError for invalid parameters.
  void validate() const;
  // Eigenvalue weight w(x) of the ensemble.
  WeightSpec weight_spec() const;
};

std::string ensemble_name(EnsembleKind k);
// Accepts goe, gue, wishart, cwishart, beta, cbeta, condgoe, customsym, customherm.
EnsembleKind ensemble_from_name(const std::string& name);

struct EdgeScaling {
  double mu_n;
  double sigma_n;
};

enum class EecMethod { closed_form, quadrature };
std::string method_name(EecMethod m);

struct EECResult {
  double x = 0;
  double value = 0;
  EecMethod method = EecMethod::closed_form;
  double err_est = 0;
};

// Expected Euler characteristic E[chi(M_x)] of the excursion set above x
// for a real symmetric ensemble: (1/gamma_{n-1}) int_x^inf hat phi_{n-1} w.
// Not clamped: outside the upper tail the value may leave [0, 1].
EECResult eec_sym(const EnsembleSpec& e, double x, const PrecisionContext& ctx = {});

// Hermitian counterpart: (1/h_{n-1}) int_x^inf (phi_{n-1} phi_n' - phi_n phi_{n-1}') w.
EECResult eec_herm(const EnsembleSpec& e, double x, const PrecisionContext& ctx = {});

// Dispatches on the symmetry class.
EECResult eec(const EnsembleSpec& e, double x, const PrecisionContext& ctx = {});

// Same quantity through moments, the general (skew-)orthogonal constructor and
// numerical integration; the only path for CondGOE and custom weights.
EECResult eec_quadrature(const EnsembleSpec& e, double x, const PrecisionContext& ctx = {});

// Edge centring and scale of the largest eigenvalue at size m; Wishart and
// Beta families plug in alpha/m and beta/m for the limiting ratios.
// ParamError for CondGOE and custom kinds, DegenerateError for Beta families
// with beta = 0 (hard edge at 1, where the soft-edge scale vanishes).
EdgeScaling edge_scaling(const EnsembleSpec& e, int m);

// eec at x = mu_{n-1} + sigma_{n-1} s.
EECResult eec_scaled(const EnsembleSpec& e, double s, const PrecisionContext& ctx = {});

struct RelativeError {
  double value;
  double std_error;
};

// (eec(x) - p_hat) / p_hat with the Monte Carlo standard error propagated.
RelativeError finite_n_relative_error(const EnsembleSpec& e, double x, const TailEstimate& mc,
                                      const PrecisionContext& ctx = {});

}  // namespace eecrmt
