#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "krein/errors.hpp"
#include "krein/types.hpp"

namespace krein {

struct QuadOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  int initial_panels = 1;
  int max_panels = 4000;
};

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const Complex& v) { return std::abs(v); }

}  // namespace detail

// Globally adaptive G10K21: always splits the panel with the largest error
// estimate until the summed estimate meets max(abs_tol, rel_tol*|I|).
template <class F>
auto integrate(F&& f, double a, double b, const QuadOptions& o = {}) -> decltype(f(a)) {
  using K = decltype(f(a));
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  struct Panel {
    double lo, hi;
    K val;
    double err;
  };
  using G = boost::math::quadrature::gauss<double, 10>;
  // Kronrod nodes 1, 3, ..., 9 are the Gauss nodes
  auto eval = [&](double lo, double hi) {
    const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
    const auto& x = GK::abscissa();
    const auto& wk = GK::weights();
    const auto& wg = G::weights();
    const K f0 = f(c);
    K kr = wk[0] * f0, ga = K(0);
    for (std::size_t i = 1; i < x.size(); ++i) {
      const K pair = f(c - r * x[i]) + f(c + r * x[i]);
      kr += wk[i] * pair;
      if (i % 2 == 1) ga += wg[i / 2] * pair;
    }
    return Panel{lo, hi, r * kr, std::abs(r) * detail::magnitude(kr - ga)};
  };
  auto by_err = [](const Panel& x, const Panel& y) { return x.err < y.err; };

  std::vector<Panel> heap;
  const int p0 = std::max(1, o.initial_panels);
  for (int i = 0; i < p0; ++i) {
    const double lo = a + (b - a) * i / p0;
    const double hi = (i + 1 == p0) ? b : a + (b - a) * (i + 1) / p0;
    heap.push_back(eval(lo, hi));
  }
  std::make_heap(heap.begin(), heap.end(), by_err);

  auto totals = [&](K& sum, double& err) {
    // sum in position order so the result does not depend on split history
    std::vector<const Panel*> ps;
    ps.reserve(heap.size());
    for (const auto& p : heap) ps.push_back(&p);
    std::sort(ps.begin(), ps.end(), [](const Panel* x, const Panel* y) { return x->lo < y->lo; });
    sum = K(0);
    err = 0.0;
    for (const Panel* p : ps) {
      sum += p->val;
      err += p->err;
    }
  };

  K sum;
  double err;
  totals(sum, err);
  while (err > std::max(o.abs_tol, o.rel_tol * detail::magnitude(sum))) {
    if (static_cast<int>(heap.size()) >= o.max_panels)
    {
      char msg[160];
      std::snprintf(msg, sizeof msg, "adaptive quadrature on [%.6g, %.6g] did not converge: error estimate %.3e for |I| = %.3e",
                    a, b, err, detail::magnitude(sum));
      throw QuadratureError(msg);
    }
    std::pop_heap(heap.begin(), heap.end(), by_err);
    Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      // interval exhausted at double resolution; keep its estimate
      worst.err = 0.0;
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), by_err);
      totals(sum, err);
      continue;
    }
    heap.push_back(eval(worst.lo, mid));
    std::push_heap(heap.begin(), heap.end(), by_err);
    heap.push_back(eval(mid, worst.hi));
    std::push_heap(heap.begin(), heap.end(), by_err);
    totals(sum, err);
  }
  return sum;
}

// Integral over [a, inf) through x = a + t/(1-t).
template <class F>
auto integrate_to_infinity(F&& f, double a, const QuadOptions& o = {}) -> decltype(f(a)) {
  using K = decltype(f(a));
  auto g = [&](double t) -> K {
    const double u = 1.0 - t;
    return f(a + t / u) / (u * u);
  };
  return integrate(g, 0.0, 1.0, o);
}

// Wynn epsilon acceleration of a sequence of partial sums.
template <class K>
class WynnEpsilon {
 public:
  // Returns the current accelerated estimate after appending s.
  K push(K s) {
    std::vector<K> next;
    next.reserve(table_.size() + 1);
    next.push_back(s);
    // table_: last diagonal, table_[j] = eps_j for the previous partial sum
    K prev_upper = K(0);  // eps_{j-1} of the current row (j-1 = -1 implicitly 0)
    for (std::size_t j = 0; j < table_.size(); ++j) {
      const K diff = next[j] - table_[j];
      const K lower = (j == 0) ? K(0) : prev_upper;
      if (detail::magnitude(diff) == 0.0) break;
      const K val = lower + K(1) / diff;
      prev_upper = table_[j];
      next.push_back(val);
    }
    table_ = next;
    // even columns carry estimates
    const std::size_t last_even = (table_.size() - 1) & ~std::size_t(1);
    return table_[last_even];
  }

 private:
  std::vector<K> table_;
};

// Integral of f(k) sin(k d) over [0, inf) for f decaying at least like 1/k.
// Half-period panels, partial sums accelerated by the epsilon algorithm.
template <class F>
auto fourier_sine_integral(F&& f, double d, const QuadOptions& o = {}, int max_periods = 400) -> decltype(f(d)) {
  using K = decltype(f(d));
  if (d <= 0.0) throw DomainError("fourier_sine_integral needs d > 0");
  const double half = pi / d;
  QuadOptions po = o;
  po.abs_tol = o.abs_tol * 1e-2;
  WynnEpsilon<K> wynn;
  K partial = K(0);
  K prev = K(0), prev2 = K(0);
  for (int m = 0; m < max_periods; ++m) {
    const double lo = m * half, hi = (m + 1) * half;
    partial += integrate([&](double k) { return f(k) * std::sin(k * d); }, lo, hi, po);
    const K est = wynn.push(partial);
    if (m >= 6) {
      const double scale = std::max(detail::magnitude(est), 1.0e-300);
      const double change = std::max(detail::magnitude(est - prev), detail::magnitude(prev - prev2));
      if (change <= std::max(o.abs_tol, o.rel_tol * scale)) return est;
    }
    prev2 = prev;
    prev = est;
  }
  throw QuadratureError("oscillatory tail did not converge");
}

}  // namespace krein
