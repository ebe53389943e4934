#include "hres/quadrature.hpp"

#include <atomic>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hres::quad {

namespace {

double env_rel_tol() {
  if (const char* env = std::getenv("HRES_TOL")) {
    try {
      double v = std::stod(env);
      if (v > 0 && v < 1) return v;
    } catch (const std::exception&) {
    }
  }
  return 1e-9;
}

std::atomic<double>& rel_tol_slot() {
  static std::atomic<double> tol{env_rel_tol()};
  return tol;
}

}  // namespace

double default_rel_tol() { return rel_tol_slot().load(std::memory_order_relaxed); }

void set_default_rel_tol(double tol) {
  if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("tolerance must lie in (0, 1)");
  rel_tol_slot().store(tol, std::memory_order_relaxed);
}

const KronrodTable& kronrod21() {
  static const KronrodTable table = [] {
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    KronrodTable t;
    const auto& xk = gauss_kronrod<double, 21>::abscissa();
    const auto& wk = gauss_kronrod<double, 21>::weights();
    const auto& xg = gauss<double, 10>::abscissa();
    const auto& wg = gauss<double, 10>::weights();
    t.xk.assign(xk.begin(), xk.end());
    t.wk.assign(wk.begin(), wk.end());
    t.wg.assign(wg.begin(), wg.end());
    // The Gauss nodes interleave the Kronrod ones at odd positions.
    for (std::size_t i = 0; i < t.wg.size(); ++i)
      if (std::abs(xg[i] - t.xk[2 * i + 1]) > 1e-15)
        throw std::logic_error("unexpected Gauss-Kronrod node layout");
    return t;
  }();
  return table;
}

Rule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

}  // namespace hres::quad
