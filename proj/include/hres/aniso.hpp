#pragma once

// Anisotropic (Heisenberg) geometry of R^{d+1}: the dilations
// t.xi = (t^2 xi_0, t xi_1, ..., t xi_d), the Koranyi pseudo-norm
// ||xi|| = (xi_0^2 + xi_1^4 + ... + xi_d^4)^{1/4}, weighted multi-indices,
// and integration over the unit pseudo-sphere against i_E dxi, where
// E = 2 xi_0 d_0 + xi_1 d_1 + ... + xi_d d_d.

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <type_traits>
#include <vector>

#include "hres/errors.hpp"
#include "hres/parallel.hpp"
#include "hres/quadrature.hpp"

namespace hres {

using Complex = std::complex<double>;
using Vec = std::vector<double>;

class GradedSpace {
 public:
  /// Throws DomainError for d < 1.
  explicit GradedSpace(int d);

  int d() const { return d_; }
  /// Ambient dimension d + 1.
  int dim() const { return d_ + 1; }
  /// Homogeneous dimension Q = d + 2 (sum of the weights).
  int homogeneous_dimension() const { return d_ + 2; }
  int weight(int axis) const { return axis == 0 ? 2 : 1; }
  std::vector<int> weights() const;

  bool operator==(const GradedSpace&) const = default;

 private:
  int d_;
};

/// alpha in N_0^{d+1} with weighted length <alpha> = 2 alpha_0 + alpha_1 + ... + alpha_d.
class WeightedMultiIndex {
 public:
  WeightedMultiIndex(const GradedSpace& space, std::vector<int> alpha);

  const std::vector<int>& alpha() const { return alpha_; }
  int bracket() const { return bracket_; }
  /// Plain length |alpha|.
  int order() const;
  /// alpha! as a double.
  double factorial() const;
  double monomial(std::span<const double> xi) const;

  /// All multi-indices of the space with <alpha> == b, in lexicographic order.
  static std::vector<WeightedMultiIndex> with_bracket(const GradedSpace& space, int b);
  /// All multi-indices with <alpha> <= k.
  static std::vector<WeightedMultiIndex> up_to(const GradedSpace& space, int k);

  bool operator==(const WeightedMultiIndex& o) const { return alpha_ == o.alpha_; }

 private:
  std::vector<int> alpha_;
  int bracket_;
};

double pseudo_norm(const GradedSpace& space, std::span<const double> xi);

/// Throws DomainError for t <= 0 and PreconditionError on a length mismatch.
Vec dilate(const GradedSpace& space, double t, std::span<const double> xi);
void dilate_into(double t, std::span<const double> xi, std::span<double> out);

/// A point of the unit pseudo-sphere {||xi|| = 1}.
class SpherePoint {
 public:
  /// Throws DomainError when | ||xi|| - 1 | > 1e-12.
  SpherePoint(const GradedSpace& space, Vec xi);
  /// Radial projection ||xi||^{-1}.xi of a nonzero vector.
  static SpherePoint project(const GradedSpace& space, std::span<const double> xi);

  const Vec& xi() const { return xi_; }

 private:
  Vec xi_;
};

/// Tensor-product rule on the pseudo-sphere: nodes omega_i and weights w_i with
/// sum_i w_i g(omega_i) ~ int_{||xi||=1} g i_E dxi.
///
/// Built from hyperspherical angles on the Euclidean sphere S^d mapped by
/// u -> ||u||^{-1}.u. The form ||xi||^{-Q} i_E dxi is closed and dilation
/// invariant, so each weight is the Euclidean surface element times
/// (2 u_0^2 + u_1^2 + ... + u_d^2) ||u||^{-Q}. Polar angles use Gauss-Legendre with `resolution` nodes, the azimuth the
/// periodic trapezoid rule with 2 * resolution nodes.
class SphereRule {
 public:
  SphereRule(const GradedSpace& space, int resolution);

  /// Shared, lazily built rule (thread safe).
  static std::shared_ptr<const SphereRule> cached(const GradedSpace& space, int resolution);
  /// Default resolution for the space (48 for d = 2, smaller for larger d).
  static int default_resolution(const GradedSpace& space);

  const GradedSpace& space() const { return space_; }
  int resolution() const { return resolution_; }
  std::size_t size() const { return weights_.size(); }
  std::span<const double> point(std::size_t i) const {
    return {points_.data() + i * space_.dim(), static_cast<std::size_t>(space_.dim())};
  }
  double weight(std::size_t i) const { return weights_[i]; }

  /// sum_i w_i g(omega_i). Chunked with a fixed partition so the result does
  /// not depend on the thread count.
  template <class G>
  auto apply(G&& g) const {
    using T = std::decay_t<decltype(g(point(0)))>;
    constexpr std::size_t chunk = 512;
    const std::size_t n = size();
    const std::size_t chunks = (n + chunk - 1) / chunk;
    std::vector<T> partial(chunks);
    parallel_for(chunks, [&](std::size_t c) {
      T acc{};
      const std::size_t end = std::min(n, (c + 1) * chunk);
      for (std::size_t i = c * chunk; i < end; ++i) acc += weights_[i] * g(point(i));
      partial[c] = acc;
    });
    T total{};
    for (const auto& p : partial) total += p;
    return total;
  }

 private:
  GradedSpace space_;
  int resolution_;
  Vec points_;
  Vec weights_;
};

struct SphereOptions {
  /// Resolution of the coarse rule; 0 selects SphereRule::default_resolution.
  int resolution = 0;
  /// Accepted |fine - coarse| relative to max(1, |value|).
  double tolerance = 1e-9;
};

template <class T>
struct Estimate {
  T value{};
  double error = 0.0;
};

using SphereFn = std::function<double(std::span<const double>)>;
using SphereFnC = std::function<Complex(std::span<const double>)>;

/// int_{||xi||=1} g i_E dxi by the chart rule, evaluated at two resolutions;
/// the difference is the error estimate. Throws NumericalError when the
/// estimate exceeds the tolerance.
Estimate<double> sphere_integral(const GradedSpace& space, const SphereFn& g, const SphereOptions& opt = {});
Estimate<Complex> sphere_integral(const GradedSpace& space, const SphereFnC& g, const SphereOptions& opt = {});

/// Reference evaluator for the same surface integral through the shell identity
///   int_{||xi||=1} g i_E dxi = int_{1<=||xi||<=e} g(||xi||^{-1}.xi) ||xi||^{-Q} dxi,
/// computed by nested adaptive Gauss-Kronrod over Cartesian coordinates with
/// exact bounds on the innermost (xi_0) axis.
Estimate<double> sphere_integral_shell(const GradedSpace& space, const SphereFn& g, double rel_tol = 1e-9);

/// int_{r_min <= ||xi|| <= r_max} f dxi = int r^{Q-1} (int_sphere f(r.omega)) dr.
/// r_max may be +infinity; r_min may be 0. Throws DomainError for a
/// non-decaying integrand on an infinite shell.
Estimate<double> polar_integral(const GradedSpace& space, const SphereFn& f, double r_min, double r_max,
                                const quad::Options& radial = {}, int resolution = 0);
Estimate<Complex> polar_integral(const GradedSpace& space, const SphereFnC& f, double r_min, double r_max,
                                 const quad::Options& radial = {}, int resolution = 0);

namespace detail {
template <class G>
constexpr bool is_sphere_fn = std::is_same_v<std::decay_t<G>, SphereFn> || std::is_same_v<std::decay_t<G>, SphereFnC>;
template <class G>
constexpr bool returns_complex =
    std::is_same_v<std::decay_t<std::invoke_result_t<G&, std::span<const double>>>, Complex>;
}  // namespace detail

template <class G>
  requires(std::is_invocable_v<G&, std::span<const double>> && !detail::is_sphere_fn<G>)
auto sphere_integral(const GradedSpace& space, G&& g, const SphereOptions& opt = {}) {
  if constexpr (detail::returns_complex<G>)
    return sphere_integral(space, SphereFnC(std::forward<G>(g)), opt);
  else
    return sphere_integral(space, SphereFn(std::forward<G>(g)), opt);
}

template <class G>
  requires(std::is_invocable_v<G&, std::span<const double>> && !detail::is_sphere_fn<G>)
auto polar_integral(const GradedSpace& space, G&& f, double r_min, double r_max, const quad::Options& radial = {},
                    int resolution = 0) {
  if constexpr (detail::returns_complex<G>)
    return polar_integral(space, SphereFnC(std::forward<G>(f)), r_min, r_max, radial, resolution);
  else
    return polar_integral(space, SphereFn(std::forward<G>(f)), r_min, r_max, radial, resolution);
}

}  // namespace hres
