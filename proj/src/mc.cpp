#include "eecrmt/mc.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace eecrmt {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Implicit QL on a symmetric tridiagonal matrix; offdiag[i] couples i and i+1.
// When z is non-null its columns are rotated along (eigenvectors).
void tql(std::vector<double>& d, std::vector<double>& e, Matrix<double>* z) {
  const int n = static_cast<int>(d.size());
  e.resize(n, 0.0);
  if (n > 0) e[n - 1] = 0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= kEps * dd) break;
      }
      if (m != l) {
        if (++iter > 60) throw ConvergenceError("tridiagonal_eigenvalues: QL iteration did not converge", 0, 0);
        double g = (d[l + 1] - d[l]) / (2 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1, c = 1, p = 0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0) {
            d[i + 1] -= p;
            e[m] = 0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (z) {
            for (Eigen::Index k = 0; k < z->rows(); ++k) {
              f = (*z)(k, i + 1);
              (*z)(k, i + 1) = s * (*z)(k, i) + c * f;
              (*z)(k, i) = c * (*z)(k, i) - s * f;
            }
          }
        }
        if (r == 0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0;
      }
    } while (m != l);
  }
}

// Householder reduction A = Q T Q^T; returns the diagonal and off-diagonal of
// T and, when q is non-null, Q.
void householder(Matrix<double> a, std::vector<double>& d, std::vector<double>& e, Matrix<double>* q) {
  const Eigen::Index n = a.rows();
  if (q) *q = Matrix<double>::Identity(n, n);
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    const Eigen::Index len = n - k - 1;
    Vector<double> v = a.col(k).tail(len);
    const double norm = v.norm();
    if (norm == 0) continue;
    const double alpha = v[0] > 0 ? -norm : norm;
    v[0] -= alpha;
    const double vn = v.norm();
    if (vn == 0) continue;
    v /= vn;
    auto block = a.bottomRightCorner(len, len);
    const Vector<double> w = block * v;
    const Vector<double> u = w - v.dot(w) * v;
    block -= 2 * (v * u.transpose() + u * v.transpose());
    a(k + 1, k) = alpha;
    a(k, k + 1) = alpha;
    a.col(k).tail(len - 1).setZero();
    a.row(k).tail(len - 1).setZero();
    if (q) {
      auto cols = q->rightCols(len);
      const Vector<double> qv = cols * v;
      cols -= 2 * qv * v.transpose();
    }
  }
  d.resize(n);
  e.assign(n, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) d[i] = a(i, i);
  for (Eigen::Index i = 0; i + 1 < n; ++i) e[i] = a(i + 1, i);
}

double normal(std::mt19937_64& rng, double sd) { return std::normal_distribution<double>(0.0, sd)(rng); }

// chi_k as the square root of a Gamma(k/2, 2) draw; k may be fractional.
double chi(std::mt19937_64& rng, double k) {
  if (k <= 0) return 0;
  return std::sqrt(std::gamma_distribution<double>(k / 2, 2.0)(rng));
}

void require_integer_degrees(double degrees, const char* what) {
  if (degrees != std::floor(degrees))
    throw ParamError(std::string("sample_dense: ") + what + " degrees of freedom must be an integer");
}

Matrix<double> embed(const Matrix<double>& re, const Matrix<double>& im) {
  const Eigen::Index n = re.rows();
  Matrix<double> m(2 * n, 2 * n);
  m << re, -im, im, re;
  return m;
}

// Gram matrix of an m x n Gaussian data matrix: real entries N(0, 1), complex
// entries with independent N(0, 1/2) parts.
void wishart_parts(int n, int m, bool complex, std::mt19937_64& rng, Matrix<double>& re, Matrix<double>& im) {
  const double sd = complex ? std::sqrt(0.5) : 1.0;
  Matrix<double> x(m, n), y = Matrix<double>::Zero(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      x(i, j) = normal(rng, sd);
      if (complex) y(i, j) = normal(rng, sd);
    }
  // (X + iY)^* (X + iY) = X^T X + Y^T Y + i (X^T Y - Y^T X)
  re = x.transpose() * x + y.transpose() * y;
  im = x.transpose() * y - y.transpose() * x;
}

std::vector<double> every_other(std::vector<double> v) {
  std::vector<double> r;
  r.reserve(v.size() / 2);
  for (std::size_t i = 0; i < v.size(); i += 2) r.push_back((v[i] + v[i + 1]) / 2);
  return r;
}

bool positive(const std::vector<double>& v) { return !v.empty() && v.front() > 0; }

void goe_tridiag_entries(int n, std::mt19937_64& rng, std::vector<double>& a, std::vector<double>& b) {
  a.resize(n);
  b.resize(n > 1 ? n - 1 : 0);
  std::normal_distribution<double> z;
  for (int i = 0; i < n; ++i) a[i] = z(rng);
  for (int i = 2; i <= n; ++i) b[i - 2] = chi(rng, i - 1) / std::sqrt(2.0);
}

// Positive definiteness of a symmetric tridiagonal matrix from its LDL^T pivots.
bool tridiag_positive_definite(const std::vector<double>& a, const std::vector<double>& b) {
  double d = a[0];
  if (!(d > 0)) return false;
  for (std::size_t i = 1; i < a.size(); ++i) {
    d = a[i] - b[i - 1] * b[i - 1] / d;
    if (!(d > 0)) return false;
  }
  return true;
}

std::vector<double> draw(const SampleConfig& cfg, std::mt19937_64& rng, long long& proposals) {
  const EnsembleSpec& e = cfg.ensemble;
  const bool use_models = cfg.sampler != Sampler::dense;
  switch (e.kind) {
    case EnsembleKind::GOE:
      ++proposals;
      return use_models ? sample_goe_tridiag(e.n, rng) : sample_dense(e, rng);
    case EnsembleKind::GUE:
      ++proposals;
      return use_models ? sample_gue_tridiag(e.n, rng) : sample_dense(e, rng);
    case EnsembleKind::Wishart:
    case EnsembleKind::CWishart:
      ++proposals;
      if (use_models) return sample_wishart_bidiag(e.n, e.alpha, e.kind == EnsembleKind::Wishart ? 1 : 2, rng);
      return sample_dense(e, rng);
    case EnsembleKind::CondGOE: {
      if (!use_models) {
        ++proposals;
        return sample_dense(e, rng);
      }
      for (long long t = 0; t < kRejectionBudget; ++t) {
        ++proposals;
        std::vector<double> a, b;
        goe_tridiag_entries(e.n, rng, a, b);
        if (!tridiag_positive_definite(a, b)) continue;
        auto v = tridiagonal_eigenvalues(std::move(a), std::move(b));
        // Pivots and QL can disagree only at the round-off level.
        if (positive(v)) return v;
      }
      throw RejectionBudgetError("CondGOE: no positive definite draw in 1e6 proposals");
    }
    default:
      if (cfg.sampler == Sampler::tridiagonal) throw ParamError("sampler: no tridiagonal model for this ensemble");
      ++proposals;
      return sample_dense(e, rng);
  }
}

struct LaneResult {
  std::vector<std::vector<long long>> counts;  // [k][j]
  std::vector<long long> chi_sum, chi_sq;
  long long proposals = 0;
};

void run_lane(const SampleConfig& cfg, const std::vector<double>& xs, int lane, long long reps, LaneResult& out) {
  const int n = cfg.ensemble.n;
  const std::size_t nx = xs.size();
  out.counts.assign(n, std::vector<long long>(nx, 0));
  out.chi_sum.assign(nx, 0);
  out.chi_sq.assign(nx, 0);
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(lane)};
  std::mt19937_64 rng(seq);
  const bool sym = cfg.ensemble.real_symmetric();
  for (long long r = 0; r < reps; ++r) {
    const auto lam = draw(cfg, rng, out.proposals);
    for (std::size_t j = 0; j < nx; ++j) {
      long long chi = 0;
      for (int k = 0; k < n; ++k) {
        if (lam[k] >= xs[j]) {
          ++out.counts[k][j];
          chi += (sym && (n - 1 - k) % 2 == 1) ? -1 : 1;
        }
      }
      out.chi_sum[j] += chi;
      out.chi_sq[j] += chi * chi;
    }
  }
}

}  // namespace

std::vector<double> tridiagonal_eigenvalues(std::vector<double> diag, std::vector<double> offdiag) {
  if (offdiag.size() + 1 != diag.size() && !(diag.empty() && offdiag.empty()))
    throw ParamError("tridiagonal_eigenvalues: off-diagonal must have n - 1 entries");
  tql(diag, offdiag, nullptr);
  std::sort(diag.begin(), diag.end());
  return diag;
}

std::vector<double> symmetric_eigenvalues(const Matrix<double>& a) {
  if (a.rows() != a.cols()) throw ParamError("symmetric_eigenvalues: matrix must be square");
  std::vector<double> d, e;
  householder(a, d, e, nullptr);
  tql(d, e, nullptr);
  std::sort(d.begin(), d.end());
  return d;
}

SymmetricEigen symmetric_eigen(const Matrix<double>& a) {
  if (a.rows() != a.cols()) throw ParamError("symmetric_eigen: matrix must be square");
  std::vector<double> d, e;
  Matrix<double> q;
  householder(a, d, e, &q);
  tql(d, e, &q);
  std::vector<Eigen::Index> order(d.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
  std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return d[i] < d[j]; });
  SymmetricEigen r;
  r.values.resize(a.rows());
  r.vectors.resize(a.rows(), a.rows());
  for (Eigen::Index c = 0; c < a.rows(); ++c) {
    r.values[c] = d[order[c]];
    r.vectors.col(c) = q.col(order[c]);
  }
  return r;
}

std::vector<double> sample_goe_tridiag(int n, std::mt19937_64& rng) {
  if (n < 1) throw ParamError("sample_goe_tridiag: n must be >= 1");
  std::vector<double> a, b;
  goe_tridiag_entries(n, rng, a, b);
  return tridiagonal_eigenvalues(std::move(a), std::move(b));
}

std::vector<double> sample_gue_tridiag(int n, std::mt19937_64& rng) {
  if (n < 1) throw ParamError("sample_gue_tridiag: n must be >= 1");
  std::vector<double> a(n), b(n > 1 ? n - 1 : 0);
  std::normal_distribution<double> z(0.0, std::sqrt(0.5));
  for (int i = 0; i < n; ++i) a[i] = z(rng);
  for (int i = 2; i <= n; ++i) b[i - 2] = chi(rng, 2.0 * (i - 1)) / 2;
  return tridiagonal_eigenvalues(std::move(a), std::move(b));
}

std::vector<double> sample_wishart_bidiag(int n, double alpha, int beta, std::mt19937_64& rng) {
  if (n < 1) throw ParamError("sample_wishart_bidiag: n must be >= 1");
  if (!(alpha > -1)) throw ParamError("sample_wishart_bidiag: alpha must exceed -1");
  if (beta != 1 && beta != 2) throw ParamError("sample_wishart_bidiag: beta must be 1 or 2");
  const double m = n + alpha;
  const double scale = beta == 2 ? std::sqrt(0.5) : 1.0;
  // B lower bidiagonal: B_ii = chi_{beta(m-i+1)}, B_{i+1,i} = chi_{beta(n-i)}.
  std::vector<double> diag(n), sub(n > 1 ? n - 1 : 0);
  for (int i = 1; i <= n; ++i) diag[i - 1] = scale * chi(rng, beta * (m - i + 1));
  for (int i = 1; i < n; ++i) sub[i - 1] = scale * chi(rng, beta * (n - i));
  // T = B B^T.
  std::vector<double> td(n), te(n > 1 ? n - 1 : 0);
  for (int i = 0; i < n; ++i) td[i] = diag[i] * diag[i] + (i > 0 ? sub[i - 1] * sub[i - 1] : 0.0);
  for (int i = 0; i + 1 < n; ++i) te[i] = diag[i] * sub[i];
  return tridiagonal_eigenvalues(std::move(td), std::move(te));
}

Matrix<double> sample_dense_matrix(const EnsembleSpec& e, std::mt19937_64& rng) {
  e.validate();
  const int n = e.n;
  if (n > kDenseMaxN) throw ParamError("sample_dense: n exceeds the dense budget of 64");
  switch (e.kind) {
    case EnsembleKind::GOE: {
      Matrix<double> a(n, n);
      for (int i = 0; i < n; ++i) {
        a(i, i) = normal(rng, 1.0);
        for (int j = i + 1; j < n; ++j) a(i, j) = a(j, i) = normal(rng, std::sqrt(0.5));
      }
      return a;
    }
    case EnsembleKind::GUE: {
      Matrix<double> re(n, n), im = Matrix<double>::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        re(i, i) = normal(rng, std::sqrt(0.5));
        for (int j = i + 1; j < n; ++j) {
          re(i, j) = re(j, i) = normal(rng, 0.5);
          im(j, i) = normal(rng, 0.5);
          im(i, j) = -im(j, i);
        }
      }
      return embed(re, im);
    }
    case EnsembleKind::Wishart:
    case EnsembleKind::CWishart: {
      require_integer_degrees(e.alpha, "Wishart");
      const bool complex = e.kind == EnsembleKind::CWishart;
      Matrix<double> re, im;
      wishart_parts(n, n + static_cast<int>(e.alpha), complex, rng, re, im);
      return complex ? embed(re, im) : re;
    }
    case EnsembleKind::Beta:
    case EnsembleKind::CBeta: {
      require_integer_degrees(e.alpha, "first Wishart");
      require_integer_degrees(e.beta_param, "second Wishart");
      const bool complex = e.kind == EnsembleKind::CBeta;
      Matrix<double> re1, im1, re2, im2;
      wishart_parts(n, n + static_cast<int>(e.alpha), complex, rng, re1, im1);
      wishart_parts(n, n + static_cast<int>(e.beta_param), complex, rng, re2, im2);
      // Reduce W1 v = lambda (W1 + W2) v through a Cholesky factor of the sum;
      // the complex problem is reduced in its real embedding, which preserves
      // the block structure.
      const Matrix<double> w1 = complex ? embed(re1, im1) : re1;
      const Matrix<double> s = w1 + (complex ? embed(re2, im2) : re2);
      Eigen::LLT<Matrix<double>> llt(s);
      if (llt.info() != Eigen::Success) throw ParamError("sample_dense: W1 + W2 is not positive definite");
      const auto L = llt.matrixL();
      Matrix<double> c = L.solve(w1);
      c = L.solve(c.transpose()).transpose();
      return (c + c.transpose()) / 2;
    }
    default:
      throw ParamError("sample_dense_matrix: no dense model for this ensemble");
  }
}

std::vector<double> sample_dense(const EnsembleSpec& e, std::mt19937_64& rng) {
  if (e.kind == EnsembleKind::CondGOE) {
    e.validate();
    if (e.n > kCondGoeMaxN) throw ParamError("sample_dense: CondGOE is refused for n > 6");
    EnsembleSpec goe = e;
    goe.kind = EnsembleKind::GOE;
    for (long long t = 0; t < kRejectionBudget; ++t) {
      auto v = symmetric_eigenvalues(sample_dense_matrix(goe, rng));
      if (positive(v)) return v;
    }
    throw RejectionBudgetError("CondGOE: no positive definite draw in 1e6 proposals");
  }
  auto v = symmetric_eigenvalues(sample_dense_matrix(e, rng));
  return e.real_symmetric() ? v : every_other(std::move(v));
}

void SampleConfig::validate() const {
  ensemble.validate();
  if (reps < 1) throw ParamError("SampleConfig: reps must be >= 1");
  if (streams < 1) throw ParamError("SampleConfig: streams must be >= 1");
  if (ensemble.kind == EnsembleKind::CustomSym || ensemble.kind == EnsembleKind::CustomHerm)
    throw ParamError("SampleConfig: custom weights have no sampler");
  if (ensemble.kind == EnsembleKind::CondGOE && ensemble.n > kCondGoeMaxN)
    throw ParamError("SampleConfig: CondGOE is refused for n > 6 (acceptance decays super-exponentially)");
}

double TailTable::acceptance_rate() const {
  if (proposals == 0 || p.empty() || p.front().empty()) return 1.0;
  return static_cast<double>(p.front().front().reps) / static_cast<double>(proposals);
}

McSummary run_mc(const SampleConfig& cfg, const std::vector<double>& xs) {
  cfg.validate();
  const int lanes = cfg.streams;
  std::vector<LaneResult> results(lanes);
  std::vector<long long> share(lanes);
  for (int l = 0; l < lanes; ++l) share[l] = cfg.reps / lanes + (l < cfg.reps % lanes ? 1 : 0);

  const int workers = std::max(1, std::min<int>(lanes, static_cast<int>(std::thread::hardware_concurrency())));
  std::vector<std::exception_ptr> errors(lanes);
  auto work = [&](int first) {
    for (int l = first; l < lanes; l += workers) {
      try {
        run_lane(cfg, xs, l, share[l], results[l]);
      } catch (...) {
        errors[l] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);

  // Integer counts make the lane-ordered reduction exact.
  const int n = cfg.ensemble.n;
  const std::size_t nx = xs.size();
  std::vector<std::vector<long long>> counts(n, std::vector<long long>(nx, 0));
  std::vector<long long> chi_sum(nx, 0), chi_sq(nx, 0);
  McSummary out;
  for (const auto& r : results) {
    for (int k = 0; k < n; ++k)
      for (std::size_t j = 0; j < nx; ++j) counts[k][j] += r.counts[k][j];
    for (std::size_t j = 0; j < nx; ++j) {
      chi_sum[j] += r.chi_sum[j];
      chi_sq[j] += r.chi_sq[j];
    }
    out.tails.proposals += r.proposals;
  }
  const double reps = static_cast<double>(cfg.reps);
  out.tails.xs = xs;
  out.tails.p.assign(n, std::vector<TailEstimate>(nx));
  for (int k = 0; k < n; ++k)
    for (std::size_t j = 0; j < nx; ++j) {
      const double p = counts[k][j] / reps;
      out.tails.p[k][j] = {p, std::sqrt(p * (1 - p) / reps), cfg.reps};
    }
  out.euler.resize(nx);
  for (std::size_t j = 0; j < nx; ++j) {
    const double mean = chi_sum[j] / reps;
    const double var = cfg.reps > 1 ? (chi_sq[j] - reps * mean * mean) / (reps - 1) : 0.0;
    out.euler[j] = {mean, std::sqrt(std::max(var, 0.0) / reps), cfg.reps};
  }
  return out;
}

TailTable estimate_tails(const SampleConfig& cfg, const std::vector<double>& xs) {
  if (cfg.reps < 100) throw ParamError("estimate_tails: reps must be >= 100");
  return run_mc(cfg, xs).tails;
}

SignedEstimate mc_euler_char(const SampleConfig& cfg, double x) {
  if (cfg.reps < 100) throw ParamError("mc_euler_char: reps must be >= 100");
  return run_mc(cfg, {x}).euler.front();
}

}  // namespace eecrmt
