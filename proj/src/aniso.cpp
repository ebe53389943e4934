#include "hres/aniso.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

namespace hres {

GradedSpace::GradedSpace(int d) : d_(d) {
  if (d < 1) throw DomainError("GradedSpace: d must be >= 1, got " + std::to_string(d));
}

std::vector<int> GradedSpace::weights() const {
  std::vector<int> w(dim(), 1);
  w[0] = 2;
  return w;
}

WeightedMultiIndex::WeightedMultiIndex(const GradedSpace& space, std::vector<int> alpha)
    : alpha_(std::move(alpha)), bracket_(0) {
  if (static_cast<int>(alpha_.size()) != space.dim())
    throw PreconditionError("WeightedMultiIndex: expected " + std::to_string(space.dim()) + " entries");
  for (std::size_t i = 0; i < alpha_.size(); ++i) {
    if (alpha_[i] < 0) throw PreconditionError("WeightedMultiIndex: negative entry");
    bracket_ += space.weight(static_cast<int>(i)) * alpha_[i];
  }
}

int WeightedMultiIndex::order() const {
  int s = 0;
  for (int a : alpha_) s += a;
  return s;
}

double WeightedMultiIndex::factorial() const {
  double f = 1.0;
  for (int a : alpha_)
    for (int k = 2; k <= a; ++k) f *= k;
  return f;
}

double WeightedMultiIndex::monomial(std::span<const double> xi) const {
  double v = 1.0;
  for (std::size_t i = 0; i < alpha_.size(); ++i)
    for (int k = 0; k < alpha_[i]; ++k) v *= xi[i];
  return v;
}

std::vector<WeightedMultiIndex> WeightedMultiIndex::with_bracket(const GradedSpace& space, int b) {
  std::vector<WeightedMultiIndex> out;
  if (b < 0) return out;
  std::vector<int> alpha(space.dim(), 0);
  // Enumerate alpha_0 first, then distribute the remainder over the unit-weight axes.
  std::function<void(int, int)> fill = [&](int axis, int remaining) {
    if (axis == space.dim() - 1) {
      alpha[axis] = remaining;
      out.emplace_back(space, alpha);
      return;
    }
    for (int k = 0; k <= remaining; ++k) {
      alpha[axis] = k;
      fill(axis + 1, remaining - k);
    }
  };
  for (int a0 = 0; 2 * a0 <= b; ++a0) {
    alpha.assign(space.dim(), 0);
    alpha[0] = a0;
    const int rest = b - 2 * a0;
    if (space.dim() == 1) {
      if (rest == 0) out.emplace_back(space, alpha);
      continue;
    }
    fill(1, rest);
  }
  return out;
}

std::vector<WeightedMultiIndex> WeightedMultiIndex::up_to(const GradedSpace& space, int k) {
  std::vector<WeightedMultiIndex> out;
  for (int b = 0; b <= k; ++b) {
    auto level = with_bracket(space, b);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

double pseudo_norm(const GradedSpace& space, std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != space.dim()) throw PreconditionError("pseudo_norm: dimension mismatch");
  double s = xi[0] * xi[0];
  for (std::size_t j = 1; j < xi.size(); ++j) {
    const double q = xi[j] * xi[j];
    s += q * q;
  }
  return std::sqrt(std::sqrt(s));
}

void dilate_into(double t, std::span<const double> xi, std::span<double> out) {
  out[0] = t * t * xi[0];
  for (std::size_t j = 1; j < xi.size(); ++j) out[j] = t * xi[j];
}

Vec dilate(const GradedSpace& space, double t, std::span<const double> xi) {
  if (!(t > 0.0)) throw DomainError("dilate: t must be positive");
  if (static_cast<int>(xi.size()) != space.dim()) throw PreconditionError("dilate: dimension mismatch");
  Vec out(xi.size());
  dilate_into(t, xi, out);
  return out;
}

SpherePoint::SpherePoint(const GradedSpace& space, Vec xi) : xi_(std::move(xi)) {
  const double n = pseudo_norm(space, xi_);
  if (std::abs(n - 1.0) > 1e-12) throw DomainError("SpherePoint: point is not on the unit pseudo-sphere");
}

SpherePoint SpherePoint::project(const GradedSpace& space, std::span<const double> xi) {
  const double n = pseudo_norm(space, xi);
  if (n == 0.0) throw DomainError("SpherePoint::project: zero vector");
  Vec p(xi.size());
  dilate_into(1.0 / n, xi, p);
  return SpherePoint(space, std::move(p));
}

SphereRule::SphereRule(const GradedSpace& space, int resolution) : space_(space), resolution_(resolution) {
  if (resolution < 2) throw PreconditionError("SphereRule: resolution must be >= 2");
  const int n = space.dim();
  const int Q = space.homogeneous_dimension();
  const int polar = n - 2;  // number of theta angles
  const int n_phi = 2 * resolution;
  const auto gl = quad::gauss_legendre(resolution);

  std::size_t count = n_phi;
  for (int i = 0; i < polar; ++i) count *= resolution;
  points_.reserve(count * n);
  weights_.reserve(count);

  // N^{-Q} i_E dxi is closed and dilation invariant, so the pseudo-sphere
  // integral equals the Euclidean-sphere integral of g(omega(u)) against
  // (2 u_0^2 + sum u_j^2) N(u)^{-Q} dsigma(u).
  std::vector<int> idx(polar, 0);
  Vec u(n);
  for (std::size_t c = 0; c < count / n_phi; ++c) {
    double w_theta = 1.0;
    double prod = 1.0;
    for (int i = 0; i < polar; ++i) {
      const double th = 0.5 * std::numbers::pi * (gl.nodes[idx[i]] + 1.0);
      w_theta *= 0.5 * std::numbers::pi * gl.weights[idx[i]] * std::pow(std::sin(th), n - 2 - i);
      u[i] = prod * std::cos(th);
      prod *= std::sin(th);
    }
    for (int k = 0; k < n_phi; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / n_phi;
      u[n - 2] = prod * std::cos(phi);
      u[n - 1] = prod * std::sin(phi);
      const double r = pseudo_norm(space, u);
      double flux = 2.0 * u[0] * u[0];
      for (int j = 1; j < n; ++j) flux += u[j] * u[j];
      points_.push_back(u[0] / (r * r));
      for (int j = 1; j < n; ++j) points_.push_back(u[j] / r);
      weights_.push_back(w_theta * 2.0 * std::numbers::pi / n_phi * flux * std::pow(r, -Q));
    }
    for (int i = polar - 1; i >= 0; --i) {
      if (++idx[i] < resolution) break;
      idx[i] = 0;
    }
  }
}

int SphereRule::default_resolution(const GradedSpace& space) {
  switch (space.d()) {
    case 1:
      return 64;
    case 2:
      return 48;
    case 3:
      return 28;
    case 4:
      return 24;
    default:
      return 12;
  }
}

std::shared_ptr<const SphereRule> SphereRule::cached(const GradedSpace& space, int resolution) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const SphereRule>> cache;
  if (resolution <= 0) resolution = default_resolution(space);
  std::lock_guard lock(mutex);
  auto& slot = cache[{space.d(), resolution}];
  if (!slot) slot = std::make_shared<const SphereRule>(space, resolution);
  return slot;
}

namespace {

template <class T, class G>
Estimate<T> sphere_integral_impl(const GradedSpace& space, const G& g, const SphereOptions& opt) {
  int res = opt.resolution > 0 ? opt.resolution : SphereRule::default_resolution(space);
  for (int attempt = 0; attempt < 4; ++attempt) {
    const int fine = res + res / 2;
    const T coarse_v = SphereRule::cached(space, res)->apply(g);
    const T fine_v = SphereRule::cached(space, fine)->apply(g);
    const double err = std::abs(fine_v - coarse_v);
    if (err <= opt.tolerance * std::max(1.0, std::abs(fine_v))) return {fine_v, err};
    res = fine;
  }
  throw NumericalError("sphere_integral: no convergence up to resolution " + std::to_string(res));
}

}  // namespace

Estimate<double> sphere_integral(const GradedSpace& space, const SphereFn& g, const SphereOptions& opt) {
  return sphere_integral_impl<double>(space, g, opt);
}

Estimate<Complex> sphere_integral(const GradedSpace& space, const SphereFnC& g, const SphereOptions& opt) {
  return sphere_integral_impl<Complex>(space, g, opt);
}

namespace {

struct ShellIntegrator {
  const GradedSpace& space;
  const SphereFn& g;
  quad::Options opt;
  double outer4;  // e^4
  int Q;

  double integrand(Vec& xi) const {
    thread_local Vec omega;
    omega.resize(xi.size());
    const double r = pseudo_norm(space, xi);
    dilate_into(1.0 / r, xi, omega);
    double rq = 1.0;
    for (int i = 0; i < Q; ++i) rq *= r;
    return g(omega) / rq;
  }

  // Integrates over axes 1..axis (axis >= 1) with axes > axis fixed in xi;
  // s is the sum of xi_j^4 over the fixed horizontal axes.
  double horizontal(Vec& xi, int axis, double s, double& err) const {
    if (axis == 0) return vertical(xi, s, err);
    const double hi = std::pow(outer4 - s, 0.25);
    std::vector<double> cuts{0.0};
    if (s < 1.0) {
      const double b = std::pow(1.0 - s, 0.25);
      cuts.push_back(b);
      cuts.push_back(-b);
    }
    auto f = [&](double x) {
      xi[axis] = x;
      double e = 0.0;
      return horizontal(xi, axis - 1, s + x * x * x * x, e);
    };
    auto res = quad::integrate(f, -hi, hi, opt, cuts);
    xi[axis] = 0.0;
    if (!res.converged) throw NumericalError("sphere_integral_shell: horizontal axis did not converge");
    err += res.error;
    return res.value;
  }

  double vertical(Vec& xi, double s, double& err) const {
    const double lo = std::sqrt(std::max(0.0, 1.0 - s));
    const double hi = std::sqrt(std::max(0.0, outer4 - s));
    auto f = [&](double x) {
      xi[0] = x;
      return integrand(xi);
    };
    auto pos = quad::integrate(f, lo, hi, opt);
    auto neg = quad::integrate(f, -hi, -lo, opt);
    xi[0] = 0.0;
    if (!pos.converged || !neg.converged) throw NumericalError("sphere_integral_shell: vertical axis did not converge");
    err += pos.error + neg.error;
    return pos.value + neg.value;
  }
};

}  // namespace

Estimate<double> sphere_integral_shell(const GradedSpace& space, const SphereFn& g, double rel_tol) {
  quad::Options opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = 1e-15;
  opt.max_intervals = 2000;
  ShellIntegrator integ{space, g, opt, std::exp(4.0), space.homogeneous_dimension()};
  Vec xi(space.dim(), 0.0);
  double err = 0.0;
  const double v = integ.horizontal(xi, space.d(), 0.0, err);
  return {v, err};
}

namespace {

template <class T, class F>
Estimate<T> polar_integral_impl(const GradedSpace& space, const F& f, double r_min, double r_max,
                                const quad::Options& radial, int resolution) {
  if (!(r_min >= 0.0) || !(r_max > r_min)) throw DomainError("polar_integral: need 0 <= r_min < r_max");
  const int Q = space.homogeneous_dimension();
  const int n = space.dim();
  const int res = resolution > 0 ? resolution : SphereRule::default_resolution(space);

  auto shell_value = [&](const SphereRule& rule, double r) {
    return rule.apply([&](std::span<const double> omega) {
      thread_local Vec buf;
      buf.resize(n);
      dilate_into(r, omega, buf);
      return T(f(std::span<const double>(buf)));
    });
  };

  auto run = [&](const SphereRule& rule) -> Estimate<T> {
    auto radial_fn = [&](double r) { return T(std::pow(r, Q - 1) * shell_value(rule, r)); };
    if (std::isinf(r_max)) {
      const double split = std::max(1.0, 2.0 * r_min);
      const double t1 = std::pow(1e3 * split, Q) * std::abs(shell_value(rule, 1e3 * split));
      const double t2 = std::pow(1e6 * split, Q) * std::abs(shell_value(rule, 1e6 * split));
      if (t1 > 0.0 && t2 > 0.5 * t1) throw DomainError("polar_integral: integrand does not decay faster than ||xi||^{-Q}");
      auto a = quad::integrate(radial_fn, r_min, split, radial);
      auto b = quad::integrate_to_infinity(radial_fn, split, radial);
      if (!a.converged || !b.converged) throw NumericalError("polar_integral: radial quadrature did not converge");
      return {T(a.value + b.value), a.error + b.error};
    }
    auto a = quad::integrate(radial_fn, r_min, r_max, radial);
    if (!a.converged) throw NumericalError("polar_integral: radial quadrature did not converge");
    return {a.value, a.error};
  };

  auto coarse = run(*SphereRule::cached(space, res));
  auto fine = run(*SphereRule::cached(space, res + res / 2));
  return {fine.value, fine.error + std::abs(fine.value - coarse.value)};
}

}  // namespace

Estimate<double> polar_integral(const GradedSpace& space, const SphereFn& f, double r_min, double r_max,
                                const quad::Options& radial, int resolution) {
  return polar_integral_impl<double>(space, f, r_min, r_max, radial, resolution);
}

Estimate<Complex> polar_integral(const GradedSpace& space, const SphereFnC& f, double r_min, double r_max,
                                 const quad::Options& radial, int resolution) {
  return polar_integral_impl<Complex>(space, f, r_min, r_max, radial, resolution);
}

}  // namespace hres
