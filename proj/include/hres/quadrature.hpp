#pragma once

// One-dimensional quadrature: globally adaptive Gauss-Kronrod (G10/K21)
// with QUADPACK-style error scaling, tail compactification, and fixed
// Gauss-Legendre rules for tensor-product sphere and chart integration.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <type_traits>
#include <vector>

namespace hres::quad {

/// Default relative tolerance, 1e-9 unless overridden by the HRES_TOL
/// environment variable.
double default_rel_tol();
/// Overrides the default relative tolerance for the whole process.
void set_default_rel_tol(double tol);

struct Options {
  double abs_tol = 0.0;
  double rel_tol = -1.0;  // negative: use default_rel_tol()
  int max_intervals = 4000;

  double effective_rel_tol() const { return rel_tol < 0 ? default_rel_tol() : rel_tol; }
};

template <class T>
struct Result {
  T value{};
  double error = 0.0;
  long evaluations = 0;
  bool converged = true;
};

/// Node/weight pair of a rule on [-1, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
Rule gauss_legendre(int n);

/// Positive half of the 21-point Kronrod rule and the embedded 10-point
/// Gauss weights (index i of the Kronrod abscissae maps to Gauss weight
/// (i-1)/2 for odd i).
struct KronrodTable {
  std::vector<double> xk;
  std::vector<double> wk;
  std::vector<double> wg;
};
const KronrodTable& kronrod21();

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <class T>
struct Panel {
  double a, b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class T, class F>
Panel<T> kronrod_panel(F& f, double a, double b) {
  const auto& tab = kronrod21();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  T fv[21];
  fv[0] = f(c);
  T resk = fv[0] * tab.wk[0];
  T resg{};
  for (std::size_t i = 1; i < tab.xk.size(); ++i) {
    const double x = h * tab.xk[i];
    const T f1 = f(c - x);
    const T f2 = f(c + x);
    fv[2 * i - 1] = f1;
    fv[2 * i] = f2;
    resk += tab.wk[i] * (f1 + f2);
    if (i % 2 == 1) resg += tab.wg[(i - 1) / 2] * (f1 + f2);
  }
  const T mean = resk * 0.5;
  double resasc = tab.wk[0] * magnitude(fv[0] - mean);
  for (std::size_t i = 1; i < tab.xk.size(); ++i)
    resasc += tab.wk[i] * (magnitude(fv[2 * i - 1] - mean) + magnitude(fv[2 * i] - mean));
  resasc *= std::abs(h);
  double err = magnitude((resk - resg) * h);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  return {a, b, resk * h, err};
}

}  // namespace detail

/// Globally adaptive G10/K21 integration over [a, b] with optional interior
/// breakpoints (which need not be sorted and may fall outside (a, b)).
template <class F>
auto integrate(F&& f, double a, double b, const Options& opt = {},
               std::span<const double> breakpoints = {}) {
  using T = std::decay_t<decltype(f(a))>;
  Result<T> out;
  if (a == b) return out;
  const bool flip = b < a;
  if (flip) std::swap(a, b);

  std::vector<double> cuts{a};
  for (double p : breakpoints)
    if (p > a && p < b) cuts.push_back(p);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<detail::Panel<T>> heap;
  T total{};
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto p = detail::kronrod_panel<T>(f, cuts[i], cuts[i + 1]);
    out.evaluations += 21;
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }

  const double rel = opt.effective_rel_tol();
  int intervals = static_cast<int>(heap.size());
  while (total_err > std::max(opt.abs_tol, rel * detail::magnitude(total))) {
    if (intervals >= opt.max_intervals) {
      out.converged = false;
      break;
    }
    auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) < 64 * std::numeric_limits<double>::epsilon() *
                                  std::max({std::abs(worst.a), std::abs(worst.b), std::numeric_limits<double>::min()})) {
      out.converged = false;
      break;
    }
    heap.pop();
    auto left = detail::kronrod_panel<T>(f, worst.a, mid);
    auto right = detail::kronrod_panel<T>(f, mid, worst.b);
    out.evaluations += 42;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }

  // Re-sum from the panels to shed accumulated rounding in the running totals.
  T sum{};
  double err = 0.0;
  std::vector<detail::Panel<T>> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
  for (const auto& p : panels) {
    sum += p.value;
    err += p.error;
  }
  out.value = flip ? T(-sum) : sum;
  out.error = err;
  return out;
}

/// Integral over [a, inf) for a > 0 via the substitution r = 1/s.
template <class F>
auto integrate_to_infinity(F&& f, double a, const Options& opt = {}) {
  auto g = [&](double s) {
    using T = std::decay_t<decltype(f(a))>;
    if (s <= 0.0) return T{};
    return T(f(1.0 / s) / (s * s));
  };
  return integrate(g, 0.0, 1.0 / a, opt);
}

}  // namespace hres::quad
