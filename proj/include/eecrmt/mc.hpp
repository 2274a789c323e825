#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "eecrmt/eec.hpp"
#include "eecrmt/poly.hpp"
#include "eecrmt/tail_estimate.hpp"

namespace eecrmt {

// Symmetric eigensolvers: Householder reduction to tridiagonal form followed by
// implicit-shift QL iteration. Eigenvalues are returned in ascending order.
std::vector<double> tridiagonal_eigenvalues(std::vector<double> diag, std::vector<double> offdiag);
std::vector<double> symmetric_eigenvalues(const Matrix<double>& a);

struct SymmetricEigen {
  Vector<double> values;   // ascending
  Matrix<double> vectors;  // columns, orthonormal
};
SymmetricEigen symmetric_eigen(const Matrix<double>& a);

// Diagonal a_i ~ N(0, 1), off-diagonal b_i ~ chi_{i-1}/sqrt 2 (i = 2..n).
std::vector<double> sample_goe_tridiag(int n, std::mt19937_64& rng);

// GUE (weight e^{-x^2}): diagonal N(0, 1/2), off-diagonal chi_{2(i-1)}/2, the
// beta = 2 member of the same tridiagonal family (a standard construction from
// the literature).
std::vector<double> sample_gue_tridiag(int n, std::mt19937_64& rng);

// Real (beta = 1) or complex (beta = 2) Wishart with n + alpha degrees of
// freedom through the lower-bidiagonal Laguerre model; alpha need not be an
// integer. This model is the standard construction from the literature.
std::vector<double> sample_wishart_bidiag(int n, double alpha, int beta, std::mt19937_64& rng);

// Real symmetric matrix whose spectrum gives one draw of the ensemble:
// GOE/Wishart directly, Hermitian kinds as the 2n x 2n embedding
// [[Re, -Im], [Im, Re]] (each eigenvalue doubled), Beta kinds as
// L^{-1} W1 L^{-T} with W1 + W2 = L L^T. ParamError for n > 64, non-integer
// degrees, CondGOE and custom kinds.
Matrix<double> sample_dense_matrix(const EnsembleSpec& e, std::mt19937_64& rng);

inline constexpr int kDenseMaxN = 64;
inline constexpr int kCondGoeMaxN = 6;
inline constexpr long long kRejectionBudget = 1000000;

// Ascending eigenvalues of one dense draw; Hermitian kinds return each value
// once. CondGOE rejection-samples GOE until positive definite and raises
// RejectionBudgetError after kRejectionBudget consecutive rejections.
std::vector<double> sample_dense(const EnsembleSpec& e, std::mt19937_64& rng);

enum class Sampler {
  automatic,    // tridiagonal/bidiagonal models for GOE, GUE, CondGOE, Wishart, CWishart
  dense,        // sample_dense throughout
  tridiagonal,  // ParamError for kinds without such a model
};

struct SampleConfig {
  EnsembleSpec ensemble;
  long long reps = 10000;
  std::uint64_t seed = 0;
  int streams = 8;  // lanes; each has its own generator seeded from (seed, lane)
  Sampler sampler = Sampler::automatic;

  // ParamError for reps < 1, streams < 1, custom kinds or CondGOE with n > 6.
  void validate() const;
};

struct TailTable {
  std::vector<double> xs;
  // p[k - 1][j] estimates Pr(lambda_k >= xs[j]), lambda_1 <= ... <= lambda_n.
  std::vector<std::vector<TailEstimate>> p;
  long long proposals = 0;  // draws including rejected CondGOE proposals
  double acceptance_rate() const;
  const TailEstimate& largest(std::size_t j) const { return p.back()[j]; }
};

struct SignedEstimate {
  double mean = 0;
  double std_error = 0;
  long long reps = 0;
};

// One pass over the samples: order-statistic tails and the Euler
// characteristic sum at every threshold, on common random numbers.
struct McSummary {
  TailTable tails;
  std::vector<SignedEstimate> euler;  // per threshold
};
McSummary run_mc(const SampleConfig& cfg, const std::vector<double>& xs);

// reps >= 100 required (ParamError).
TailTable estimate_tails(const SampleConfig& cfg, const std::vector<double>& xs);

// Mean of chi(M_x) = sum_k (-1)^{n-k} 1(lambda_k >= x) (real symmetric) or
// sum_k 1(lambda_k >= x) (Hermitian) with the standard error of the mean.
SignedEstimate mc_euler_char(const SampleConfig& cfg, double x);

}  // namespace eecrmt
