#pragma once

// Homogeneous symbols on R^{d+1} \ 0 and their extension to tempered
// distributions. For Re m <= -Q the extension is
//
//   <tau, u> = int [u(xi) - psi(||xi||) sum_{<alpha> <= k} xi^alpha/alpha! u^(alpha)(0)] p(xi) dxi,
//
// with psi(mu) = int_{log mu}^inf h'(t) dt and
// h' = prod_a (a^{-1} d/dt + 1) g over a = m+Q, ..., m+Q+k (a != 0).
// For non-integer m this tau is homogeneous of degree m; for integer m <= -Q
// it obeys tau_lambda = lambda^m tau + lambda^m log(lambda) sum c_alpha(p) delta^(alpha).

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hres/aniso.hpp"

namespace hres {

/// A function on R^{d+1} \ 0 with p(t.xi) = t^m p(xi), stored through its
/// values on the unit pseudo-sphere.
class HomogeneousSymbol {
 public:
  using BoundaryFn = std::function<Complex(std::span<const double>)>;

  HomogeneousSymbol(GradedSpace space, Complex degree, BoundaryFn boundary, std::string label = {});

  const GradedSpace& space() const { return space_; }
  Complex degree() const { return degree_; }
  const std::string& label() const { return label_; }

  /// Value at a point of the unit pseudo-sphere.
  Complex on_sphere(std::span<const double> omega) const { return boundary_(omega); }
  /// p(xi) = ||xi||^m p(||xi||^{-1}.xi). Throws DomainError at xi = 0.
  Complex operator()(std::span<const double> xi) const;

  /// ||xi||^z p: same boundary values, degree m + z.
  HomogeneousSymbol gauged(Complex z) const;
  /// xi -> p(-xi).
  HomogeneousSymbol reflected() const;
  HomogeneousSymbol scaled(Complex c) const;
  /// Pointwise sum; both symbols must share space and degree.
  HomogeneousSymbol plus(const HomogeneousSymbol& other) const;

  /// ||xi||^m.
  static HomogeneousSymbol koranyi_power(const GradedSpace& space, Complex m);
  /// xi_axis ||xi||^{m-1}, odd under xi_axis -> -xi_axis.
  static HomogeneousSymbol odd(const GradedSpace& space, int axis, Complex m);
  /// ||xi||^m exp(-|omega|^2) with omega the radial projection (even, non-constant on the sphere).
  static HomogeneousSymbol gauss_tapered(const GradedSpace& space, Complex m);
  /// Parses `koranyi-power:<m>`, `odd1:<m>` and `gauss-tapered:<m>`.
  static HomogeneousSymbol builtin(const GradedSpace& space, const std::string& id);

 private:
  GradedSpace space_;
  Complex degree_;
  BoundaryFn boundary_;
  std::string label_;
};

/// A Schwartz test function with its Taylor data at the origin and,
/// optionally, a closed-form inverse Fourier transform
/// u^vee(x) = (2 pi)^{-(d+1)} int e^{i x.xi} u(xi) dxi.
class TestFunction {
 public:
  using ValueFn = std::function<Complex(std::span<const double>)>;
  using DerivativeFn = std::function<Complex(const WeightedMultiIndex&)>;
  using RadialFn = std::function<Complex(double)>;
  using TransformFn = std::function<TestFunction()>;

  /// Validates the supplied derivatives against finite differences for
  /// <alpha> <= 4 (mixed tolerance 1e-6 (1 + |u^(alpha)(0)|)); throws
  /// PreconditionError on mismatch.
  TestFunction(GradedSpace space, ValueFn value, DerivativeFn derivatives,
               std::optional<TransformFn> inverse_fourier = std::nullopt, std::string label = {});

  /// A radial function u(xi) = f(||xi||) with f constant on [0, flat_radius]
  /// (so u(0) = f(0) and every other derivative vanishes there).
  static TestFunction radial_cutoff(const GradedSpace& space, RadialFn profile, double flat_radius,
                                    std::string label = {});

  const GradedSpace& space() const { return space_; }
  const std::string& label() const { return label_; }
  Complex operator()(std::span<const double> xi) const { return value_(xi); }
  Complex derivative(const WeightedMultiIndex& alpha) const { return derivatives_(alpha); }
  /// Set for radial functions: u(r.omega) = profile(r).
  const std::optional<RadialFn>& radial_profile() const { return radial_; }
  /// For radial cutoffs: the radius below which the profile is constant.
  double flat_radius() const { return flat_radius_; }

  bool has_inverse_fourier() const { return inverse_fourier_.has_value(); }
  /// Throws PreconditionError when no closed form was supplied.
  TestFunction inverse_fourier() const;

  /// xi -> u(s.xi); Taylor data and transform are carried along.
  TestFunction dilated(double s) const;
  TestFunction operator+(const TestFunction& o) const;
  TestFunction operator*(Complex c) const;

  /// Finite-difference estimate of u^(alpha)(0) (Richardson-extrapolated
  /// tensor central differences).
  Complex finite_difference(const WeightedMultiIndex& alpha) const;

 private:
  struct Unchecked {};
  TestFunction(Unchecked, GradedSpace space, ValueFn value, DerivativeFn derivatives,
               std::optional<TransformFn> inverse_fourier, std::optional<RadialFn> radial, double flat_radius,
               std::string label);

  GradedSpace space_;
  ValueFn value_;
  DerivativeFn derivatives_;
  std::optional<TransformFn> inverse_fourier_;
  std::optional<RadialFn> radial_;
  double flat_radius_ = 0.0;
  std::string label_;
};

/// Finite sums of anisotropic Gaussians
///   coeff * prod_j exp(-a_j (xi_j - c_j)^2),   a_j > 0, c_j complex,
/// closed under dilation and inverse Fourier transform.
class GaussianMixture {
 public:
  struct Term {
    Complex coeff;
    Vec a;
    std::vector<Complex> c;
  };

  explicit GaussianMixture(GradedSpace space) : space_(space) {}
  GaussianMixture& add(Complex coeff, Vec a, std::vector<Complex> c = {});

  const GradedSpace& space() const { return space_; }
  const std::vector<Term>& terms() const { return terms_; }

  Complex value(std::span<const double> xi) const;
  Complex derivative(const WeightedMultiIndex& alpha) const;
  GaussianMixture inverse_fourier() const;
  GaussianMixture dilated(double s) const;

  TestFunction to_test_function(std::string label = {}) const;

  /// exp(-|xi|^2).
  static GaussianMixture isotropic(const GradedSpace& space, double a = 1.0);

 private:
  GradedSpace space_;
  std::vector<Term> terms_;
};

/// Panel of test functions used by the property suites: centred and shifted
/// anisotropic Gaussians plus one vanishing at the origin.
std::vector<TestFunction> standard_test_panel(const GradedSpace& space);

/// Smooth compactly supported bump
///   g(t) = C exp(-sharpness / (1 - x^2)),  x = (t - center) / half_width,
/// normalized so that int g = 1.
class Bump {
 public:
  explicit Bump(double center = 0.0, double half_width = 1.0, double sharpness = 1.0);

  double center() const { return center_; }
  double half_width() const { return half_width_; }
  double sharpness() const { return sharpness_; }
  double lower() const { return center_ - half_width_; }
  double upper() const { return center_ + half_width_; }

  double operator()(double t) const;
  /// g(t), g'(t), ..., g^(order)(t) by truncated Taylor arithmetic.
  Vec derivatives(double t, int order) const;
  /// int_t^inf g.
  double tail(double t) const;

 private:
  double center_, half_width_, sharpness_;
  double norm_;
};

/// The cutoff data (h', psi) of an extension.
class CutoffProfile {
 public:
  /// `a_values` are the nonzero a of the product prod (a^{-1} d/dt + 1) g.
  CutoffProfile(Bump g, std::vector<Complex> a_values);

  const Bump& bump() const { return g_; }
  const std::vector<Complex>& a_values() const { return a_; }

  Complex h_prime(double t) const;
  /// psi(mu) = int_{log mu}^inf h'(t) dt; equals 1 for mu <= e^{lower} and 0 for mu >= e^{upper}.
  Complex psi(double mu) const;
  /// int e^{a t} h'(t) dt by quadrature.
  Complex moment(Complex a) const;
  double mu_lower() const;
  double mu_upper() const;

 private:
  Bump g_;
  std::vector<Complex> a_;
  std::vector<Complex> sigma_;  // elementary symmetric sums of 1/a
};

enum class Regime { Integrable, Homogeneous, LogHomogeneous };

std::string to_string(Regime r);
Regime classify_regime(Complex m, int Q);

struct PairOptions {
  int resolution = 0;        // sphere rule resolution; 0 = default
  double rel_tol = 1e-11;    // radial Gauss-Kronrod tolerance
  double abs_tol = 1e-14;
};

/// A homogeneous symbol together with the data of its extension.
class ExtendedDistribution {
 public:
  const HomogeneousSymbol& symbol() const { return symbol_; }
  int taylor_order() const { return k_; }
  Regime regime() const { return regime_; }
  /// Absent in the Integrable regime.
  const std::optional<CutoffProfile>& cutoff() const { return cutoff_; }
  const PairOptions& options() const { return options_; }

 private:
  friend ExtendedDistribution build_extension(const HomogeneousSymbol&, std::optional<int>, const Bump&,
                                              const PairOptions&);
  friend Estimate<Complex> pair(const ExtendedDistribution&, const TestFunction&);

  // Sphere-rule data at one resolution: w_i p(omega_i) and the moments
  // sum_i w_i p(omega_i) omega_i^alpha / alpha! for <alpha> <= k.
  struct SphereData {
    std::shared_ptr<const SphereRule> rule;
    std::vector<Complex> weighted;
    std::vector<Complex> moments;
  };

  ExtendedDistribution(HomogeneousSymbol p, int k, Regime regime, std::optional<CutoffProfile> cutoff,
                       PairOptions options);

  HomogeneousSymbol symbol_;
  int k_;
  Regime regime_;
  std::optional<CutoffProfile> cutoff_;
  PairOptions options_;
  std::vector<WeightedMultiIndex> taylor_;  // <alpha> <= k
  SphereData coarse_, fine_;

 public:
  /// sum_{<alpha> = b} (1/alpha!) int omega^alpha p i_E = sum c_alpha (-1)^{|alpha|}, from the fine rule, for b <= k.
  Complex moment(const WeightedMultiIndex& alpha) const;
};

/// c_alpha(p) = (-1)^{|alpha|} / alpha! int_{||xi||=1} xi^alpha p(xi) i_E dxi.
Complex c_alpha(const HomogeneousSymbol& p, const WeightedMultiIndex& alpha, const SphereOptions& opt = {});

/// Default Taylor order: none (Integrable), ceil(-(Re m + Q)) + 1
/// (Homogeneous), -(m + Q) (LogHomogeneous).
int default_taylor_order(Complex m, int Q);

/// Throws DomainError when k is below -(Re m + Q), or differs from -(m + Q)
/// in the LogHomogeneous regime.
ExtendedDistribution build_extension(const HomogeneousSymbol& p, std::optional<int> k = std::nullopt,
                                     const Bump& g = Bump{}, const PairOptions& options = {});

/// <tau, u>.
Estimate<Complex> pair(const ExtendedDistribution& tau, const TestFunction& u);
/// <tau_lambda, u> = lambda^{-Q} <tau, u(lambda^{-1}.)>.
Estimate<Complex> pair_scaled(const ExtendedDistribution& tau, const TestFunction& u, double lambda);

struct ScalingDefect {
  Complex measured;
  Complex predicted;
  double residual;  // |measured - predicted|
  double error;     // quadrature error estimate of `measured`
};

/// Measured <tau_lambda, u> - lambda^m <tau, u> against
/// lambda^m log(lambda) sum_{<alpha> = -(m+Q)} c_alpha(p) (-1)^{|alpha|} u^(alpha)(0).
/// Requires the LogHomogeneous regime.
ScalingDefect scaling_defect(const ExtendedDistribution& tau, const TestFunction& u, double lambda);

/// The predicted coefficient of lambda^m log(lambda) in scaling_defect.
Complex log_law_slope(const ExtendedDistribution& tau, const TestFunction& u);

struct KernelScaling {
  Complex measured;
  Complex predicted;
  double residual;  // |measured - predicted| / (1 + |predicted|)
};

/// Fourier-side law for tau^vee with m_hat = -(m + Q), all pairings routed
/// through <tau^vee, u> = <tau, u^vee>:
///   <(tau^vee)_lambda, u> = lambda^{m_hat} <tau^vee, u>
///       - lambda^{m_hat} log(lambda) sum_{<alpha> = m_hat} (2 pi)^{-(d+1)} c_alpha(p) int (-i y)^alpha u(y) dy.
KernelScaling kernel_scaling_check(const ExtendedDistribution& tau, const TestFunction& u, double lambda);

}  // namespace hres
