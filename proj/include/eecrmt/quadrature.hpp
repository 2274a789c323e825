#pragma once

// Double-exponential quadrature (tanh-sinh, exp-sinh, sinh-sinh) for scalar
// and vector-valued integrands, templated on the real type.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "eecrmt/errors.hpp"
#include "eecrmt/precision.hpp"

namespace eecrmt {

template <class Real, class Value = Real>
struct QuadResult {
  Value value;
  Real err_est;
  int evaluations = 0;
};

struct QuadOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-13;
  int min_level = 3;
  int max_level = 0;    // 0 selects a level budget from the working precision
  int max_splits = 6;   // bisection depth when a panel fails to converge

  static QuadOptions from(const PrecisionContext& ctx) {
    QuadOptions o;
    o.abs_tol = ctx.abs_tol;
    o.rel_tol = ctx.rel_tol;
    return o;
  }
};

namespace quad_detail {

using std::abs;
using std::cosh;
using std::exp;
using std::isfinite;
using std::sinh;

enum class Kind { finite, upper_infinite, lower_infinite, whole_line };

template <class Real>
struct Node {
  Real x;
  Real w;
  bool valid;
};

template <class Real>
bool finite_value(const Real& v) {
  if constexpr (is_mp_v<Real>)
    return (boost::multiprecision::isfinite)(v);
  else
    return std::isfinite(v);
}

template <class Real>
Node<Real> node(Kind kind, const Real& a, const Real& b, const Real& t) {
  const Real half_pi = pi_value<Real>() / 2;
  const Real u = half_pi * sinh(t);
  switch (kind) {
    case Kind::finite: {
      // Distance to the nearer endpoint is formed directly so that nodes
      // crowding an endpoint keep their relative accuracy.
      const Real e = exp(-2 * abs(u));
      const Real d = (b - a) / 2;
      const Real dist = 2 * d * e / (1 + e);
      Real x = t >= 0 ? b - dist : a + dist;
      if constexpr (is_mp_v<Real>) {
        // Carry enough extra digits in x that the integrand can recover the
        // distance to the endpoint exactly (e.g. when it forms 1 - x).
        const Real& end = t >= 0 ? b : a;
        if (dist > 0 && end != 0 && dist < abs(end) / 1000) {
          const int base = static_cast<int>(mp_real::default_precision());
          const double gap = static_cast<double>(log10(abs(end) / dist));
          const int extra = std::min(static_cast<int>(gap) + 3, 2 * base);
          Real xe(end, static_cast<unsigned>(base + extra));
          if (t >= 0)
            xe -= dist;
          else
            xe += dist;
          x = xe;
        }
      }
      const Real w = d * half_pi * cosh(t) * 4 * e / ((1 + e) * (1 + e));
      return {x, w, dist > 0 && x > a && x < b};
    }
    case Kind::upper_infinite: {
      const Real ex = exp(u);
      const Real x = a + ex;
      return {x, half_pi * cosh(t) * ex, finite_value(ex) && x > a && finite_value(x)};
    }
    case Kind::lower_infinite: {
      const Real ex = exp(u);
      const Real x = b - ex;
      return {x, half_pi * cosh(t) * ex, finite_value(ex) && x < b && finite_value(x)};
    }
    case Kind::whole_line:
    default: {
      const Real x = sinh(u);
      const Real w = half_pi * cosh(t) * cosh(u);
      return {x, w, finite_value(x) && finite_value(w)};
    }
  }
}

template <class Real>
Real norm_of(const Real& v) {
  return abs(v);
}

template <class Real>
Real norm_of(const Eigen::Matrix<Real, Eigen::Dynamic, 1>& v) {
  Real m = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    Real a = abs(v[i]);
    if (a > m) m = a;
  }
  return m;
}

// Componentwise acceptance; the floor absorbs round-off in components whose
// true value is zero.
template <class Real>
bool converged(const Real& diff, const Real& value, const Real& abs_tol, const Real& rel_tol,
               const Real& floor) {
  Real tol = rel_tol * abs(value);
  if (tol < abs_tol) tol = abs_tol;
  if (tol < floor) tol = floor;
  return abs(diff) <= tol;
}

template <class Real>
bool converged(const Eigen::Matrix<Real, Eigen::Dynamic, 1>& diff,
               const Eigen::Matrix<Real, Eigen::Dynamic, 1>& value, const Real& abs_tol,
               const Real& rel_tol, const Real& floor) {
  for (Eigen::Index i = 0; i < diff.size(); ++i)
    if (!converged<Real>(diff[i], value[i], abs_tol, rel_tol, floor)) return false;
  return true;
}

template <class Real>
double head_value(const Real& v) {
  return to_double(v);
}

template <class Real>
double head_value(const Eigen::Matrix<Real, Eigen::Dynamic, 1>& v) {
  return v.size() > 0 ? to_double(v[0]) : 0.0;
}

template <class Real>
int default_max_level() {
  const int d = working_digits<Real>();
  return d <= 20 ? 8 : (d <= 60 ? 10 : 11);
}

template <class Real, class Value, class F>
bool integrate_panel(F& f, Kind kind, const Real& a, const Real& b, const Value& zero,
                     const QuadOptions& opt, QuadResult<Real, Value>& out) {
  const Real eps = working_epsilon<Real>();
  const Real abs_tol = Real(opt.abs_tol);
  const Real rel_tol = Real(opt.rel_tol);
  const Real t_cap = 7;
  const int max_level = opt.max_level > 0 ? opt.max_level : default_max_level<Real>();
  // Terms this far below the running scale are treated as the tail.
  const Real negligible = eps / 100;

  Value sum = zero;
  Real scale = 0;
  int evals = 0;

  auto add = [&](const Real& t) -> bool {
    Node<Real> nd = node<Real>(kind, a, b, t);
    if (!nd.valid) return false;
    Value term = f(nd.x);
    term *= nd.w;
    ++evals;
    const Real mag = norm_of<Real>(term);
    if (!finite_value(mag)) return false;
    if (mag > scale) scale = mag;
    sum += term;
    const Real ref = scale > norm_of<Real>(sum) ? scale : norm_of<Real>(sum);
    return mag > negligible * ref;
  };

  // Walks outward from `first` in steps of `stride` until two consecutive
  // terms are negligible, the node leaves the domain, or t passes the cap.
  auto walk = [&](const Real& first, const Real& stride) {
    int quiet = 0;
    for (Real t = first; abs(t) <= t_cap; t += stride) {
      Node<Real> nd = node<Real>(kind, a, b, t);
      if (!nd.valid) break;
      if (add(t))
        quiet = 0;
      else if (++quiet >= 2)
        break;
    }
  };

  add(Real(0));
  walk(Real(1), Real(1));
  walk(Real(-1), Real(-1));
  Value prev = sum;
  Real h = 1;
  for (int level = 1; level <= max_level; ++level) {
    h /= 2;
    walk(h, 2 * h);
    walk(-h, -2 * h);
    Value est = sum;
    est *= h;
    Value diff = est;
    diff -= prev;
    out.value = est;
    out.err_est = norm_of<Real>(diff);
    out.evaluations += evals;
    evals = 0;
    const Real floor = 64 * eps * scale * h;
    if (level >= opt.min_level && converged<Real>(diff, est, abs_tol, rel_tol, floor)) return true;
    prev = est;
  }
  return false;
}

template <class Real, class Value, class F>
QuadResult<Real, Value> integrate_split(F& f, const Real& a, const Real& b, const Value& zero,
                                        const QuadOptions& opt, int depth) {
  const bool lo_inf = !finite_value(a);
  const bool hi_inf = !finite_value(b);
  Kind kind = Kind::finite;
  if (lo_inf && hi_inf)
    kind = Kind::whole_line;
  else if (hi_inf)
    kind = Kind::upper_infinite;
  else if (lo_inf)
    kind = Kind::lower_infinite;

  QuadResult<Real, Value> r{zero, Real(0), 0};
  if (integrate_panel<Real, Value>(f, kind, a, b, zero, opt, r)) return r;
  if (depth >= opt.max_splits) {
    throw ConvergenceError("quad: tolerance not met within the subdivision budget",
                           head_value<Real>(r.value), to_double(r.err_est));
  }
  Real mid;
  if (kind == Kind::finite)
    mid = (a + b) / 2;
  else if (kind == Kind::whole_line)
    mid = 0;
  else if (kind == Kind::upper_infinite)
    mid = a + 1;
  else
    mid = b - 1;
  QuadOptions half = opt;
  half.abs_tol = opt.abs_tol / 2;
  auto left = integrate_split<Real, Value>(f, a, mid, zero, half, depth + 1);
  auto right = integrate_split<Real, Value>(f, mid, b, zero, half, depth + 1);
  QuadResult<Real, Value> out{left.value, left.err_est + right.err_est,
                              r.evaluations + left.evaluations + right.evaluations};
  out.value += right.value;
  return out;
}

}  // namespace quad_detail

// Integral of f over (a, b); either limit may be infinite. The error estimate
// is the difference between the last two refinement levels.
template <class Real, class F>
QuadResult<Real> quad(F&& f, const Real& a, const Real& b, const QuadOptions& opt) {
  if (a == b) return {Real(0), Real(0), 0};
  if (a > b) {
    auto r = quad<Real>(f, b, a, opt);
    r.value = -r.value;
    return r;
  }
  return quad_detail::integrate_split<Real, Real>(f, a, b, Real(0), opt, 0);
}

template <class Real, class F>
QuadResult<Real> quad(F&& f, const Real& a, const Real& b, const PrecisionContext& ctx) {
  return quad<Real>(std::forward<F>(f), a, b, QuadOptions::from(ctx));
}

// Vector-valued variant: f returns an Eigen column vector of fixed length dim.
template <class Real, class F>
QuadResult<Real, Eigen::Matrix<Real, Eigen::Dynamic, 1>> quad_vector(F&& f, const Real& a,
                                                                     const Real& b, int dim,
                                                                     const QuadOptions& opt) {
  using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
  Vec zero = Vec::Zero(dim);
  if (a == b) return {zero, Real(0), 0};
  if (a > b) {
    auto r = quad_vector<Real>(f, b, a, dim, opt);
    r.value = -r.value;
    return r;
  }
  return quad_detail::integrate_split<Real, Vec>(f, a, b, zero, opt, 0);
}

}  // namespace eecrmt
