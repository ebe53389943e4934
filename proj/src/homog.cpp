#include "hres/homog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hres {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_integer(Complex m) {
  return m.imag() == 0.0 && std::abs(m.real() - std::round(m.real())) < 1e-12;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

// ---------------------------------------------------------------- symbols

HomogeneousSymbol::HomogeneousSymbol(GradedSpace space, Complex degree, BoundaryFn boundary, std::string label)
    : space_(space), degree_(degree), boundary_(std::move(boundary)), label_(std::move(label)) {
  if (!boundary_) throw PreconditionError("HomogeneousSymbol: empty boundary function");
}

Complex HomogeneousSymbol::operator()(std::span<const double> xi) const {
  if (static_cast<int>(xi.size()) != space_.dim()) throw PreconditionError("HomogeneousSymbol: length mismatch");
  const double r = pseudo_norm(space_, xi);
  if (r == 0.0) throw DomainError("HomogeneousSymbol: evaluation at xi = 0");
  thread_local Vec omega;
  omega.resize(xi.size());
  dilate_into(1.0 / r, xi, omega);
  return std::pow(r, degree_) * boundary_(omega);
}

HomogeneousSymbol HomogeneousSymbol::gauged(Complex z) const {
  return HomogeneousSymbol(space_, degree_ + z, boundary_, label_);
}

HomogeneousSymbol HomogeneousSymbol::reflected() const {
  auto b = boundary_;
  return HomogeneousSymbol(
      space_, degree_,
      [b](std::span<const double> w) {
        Vec neg(w.begin(), w.end());
        for (auto& x : neg) x = -x;
        return b(neg);
      },
      label_);
}

HomogeneousSymbol HomogeneousSymbol::scaled(Complex c) const {
  auto b = boundary_;
  return HomogeneousSymbol(space_, degree_, [b, c](std::span<const double> w) { return c * b(w); }, label_);
}

HomogeneousSymbol HomogeneousSymbol::plus(const HomogeneousSymbol& other) const {
  if (!(other.space_ == space_) || std::abs(other.degree_ - degree_) > 1e-14)
    throw PreconditionError("HomogeneousSymbol::plus: space or degree mismatch");
  auto a = boundary_;
  auto b = other.boundary_;
  return HomogeneousSymbol(space_, degree_, [a, b](std::span<const double> w) { return a(w) + b(w); }, label_);
}

HomogeneousSymbol HomogeneousSymbol::koranyi_power(const GradedSpace& space, Complex m) {
  return HomogeneousSymbol(space, m, [](std::span<const double>) { return Complex(1.0); }, "koranyi-power");
}

HomogeneousSymbol HomogeneousSymbol::odd(const GradedSpace& space, int axis, Complex m) {
  if (axis < 0 || axis >= space.dim()) throw PreconditionError("HomogeneousSymbol::odd: axis out of range");
  return HomogeneousSymbol(space, m, [axis](std::span<const double> w) { return Complex(w[axis]); }, "odd");
}

HomogeneousSymbol HomogeneousSymbol::gauss_tapered(const GradedSpace& space, Complex m) {
  return HomogeneousSymbol(
      space, m,
      [](std::span<const double> w) {
        double s = 0.0;
        for (double x : w) s += x * x;
        return Complex(std::exp(-s));
      },
      "gauss-tapered");
}

HomogeneousSymbol HomogeneousSymbol::builtin(const GradedSpace& space, const std::string& id) {
  const auto colon = id.find(':');
  if (colon == std::string::npos) throw PreconditionError("unknown symbol '" + id + "' (expected name:<m>)");
  const std::string name = id.substr(0, colon);
  double m = 0.0;
  std::istringstream in(id.substr(colon + 1));
  if (!(in >> m) || !in.eof()) throw PreconditionError("bad degree in symbol '" + id + "'");
  HomogeneousSymbol out = [&] {
    if (name == "koranyi-power") return koranyi_power(space, m);
    if (name == "odd1") return odd(space, 1, m);
    if (name == "gauss-tapered") return gauss_tapered(space, m);
    throw PreconditionError("unknown symbol '" + name + "'");
  }();
  out.label_ = id;
  return out;
}

// ---------------------------------------------------------------- test functions

TestFunction::TestFunction(Unchecked, GradedSpace space, ValueFn value, DerivativeFn derivatives,
                           std::optional<TransformFn> inverse_fourier, std::optional<RadialFn> radial,
                           double flat_radius, std::string label)
    : space_(space),
      value_(std::move(value)),
      derivatives_(std::move(derivatives)),
      inverse_fourier_(std::move(inverse_fourier)),
      radial_(std::move(radial)),
      flat_radius_(flat_radius),
      label_(std::move(label)) {}

TestFunction::TestFunction(GradedSpace space, ValueFn value, DerivativeFn derivatives,
                           std::optional<TransformFn> inverse_fourier, std::string label)
    : TestFunction(Unchecked{}, space, std::move(value), std::move(derivatives), std::move(inverse_fourier),
                   std::nullopt, 0.0, std::move(label)) {
  for (const auto& alpha : WeightedMultiIndex::up_to(space_, 4)) {
    const Complex given = derivative(alpha);
    const Complex fd = finite_difference(alpha);
    if (std::abs(given - fd) > 1e-6 * (1.0 + std::abs(given))) {
      std::ostringstream msg;
      msg.precision(10);
      msg << "TestFunction '" << label_ << "': derivative for alpha = (";
      for (std::size_t i = 0; i < alpha.alpha().size(); ++i) msg << (i ? "," : "") << alpha.alpha()[i];
      msg << ") is " << given << " but finite differences give " << fd;
      throw PreconditionError(msg.str());
    }
  }
}

TestFunction TestFunction::radial_cutoff(const GradedSpace& space, RadialFn profile, double flat_radius,
                                         std::string label) {
  if (!(flat_radius > 0.0)) throw PreconditionError("radial_cutoff: flat radius must be positive");
  const Complex at_zero = profile(0.0);
  auto value = [space, profile](std::span<const double> xi) { return profile(pseudo_norm(space, xi)); };
  auto deriv = [at_zero](const WeightedMultiIndex& a) { return a.bracket() == 0 ? at_zero : Complex(0.0); };
  return TestFunction(Unchecked{}, space, value, deriv, std::nullopt, profile, flat_radius, std::move(label));
}

TestFunction TestFunction::inverse_fourier() const {
  if (!inverse_fourier_) throw PreconditionError("TestFunction '" + label_ + "' has no closed-form inverse Fourier transform");
  return (*inverse_fourier_)();
}

TestFunction TestFunction::dilated(double s) const {
  if (!(s > 0.0)) throw DomainError("TestFunction::dilated: factor must be positive");
  auto value = [v = value_, s](std::span<const double> xi) {
    thread_local Vec buf;
    buf.resize(xi.size());
    dilate_into(s, xi, buf);
    return v(buf);
  };
  auto deriv = [d = derivatives_, s](const WeightedMultiIndex& a) { return std::pow(s, a.bracket()) * d(a); };
  std::optional<TransformFn> ft;
  if (inverse_fourier_) {
    // (u(s.))^vee = s^{-Q} u^vee(s^{-1}.)
    const double scale = std::pow(s, -space_.homogeneous_dimension());
    ft = [f = *inverse_fourier_, s, scale] { return f().dilated(1.0 / s) * scale; };
  }
  std::optional<RadialFn> radial;
  if (radial_) radial = [f = *radial_, s](double r) { return f(s * r); };
  return TestFunction(Unchecked{}, space_, value, deriv, ft, radial, flat_radius_ / s, label_);
}

TestFunction TestFunction::operator+(const TestFunction& o) const {
  if (!(o.space_ == space_)) throw PreconditionError("TestFunction::operator+: space mismatch");
  auto value = [a = value_, b = o.value_](std::span<const double> xi) { return a(xi) + b(xi); };
  auto deriv = [a = derivatives_, b = o.derivatives_](const WeightedMultiIndex& al) { return a(al) + b(al); };
  std::optional<TransformFn> ft;
  if (inverse_fourier_ && o.inverse_fourier_)
    ft = [a = *inverse_fourier_, b = *o.inverse_fourier_] { return a() + b(); };
  std::optional<RadialFn> radial;
  double flat = 0.0;
  if (radial_ && o.radial_) {
    radial = [a = *radial_, b = *o.radial_](double r) { return a(r) + b(r); };
    flat = std::min(flat_radius_, o.flat_radius_);
  }
  return TestFunction(Unchecked{}, space_, value, deriv, ft, radial, flat, label_ + "+" + o.label_);
}

TestFunction TestFunction::operator*(Complex c) const {
  auto value = [a = value_, c](std::span<const double> xi) { return c * a(xi); };
  auto deriv = [a = derivatives_, c](const WeightedMultiIndex& al) { return c * a(al); };
  std::optional<TransformFn> ft;
  if (inverse_fourier_) ft = [a = *inverse_fourier_, c] { return a() * c; };
  std::optional<RadialFn> radial;
  if (radial_) radial = [a = *radial_, c](double r) { return c * a(r); };
  return TestFunction(Unchecked{}, space_, value, deriv, ft, radial, flat_radius_, label_);
}

Complex TestFunction::finite_difference(const WeightedMultiIndex& alpha) const {
  const int n = space_.dim();
  const auto& a = alpha.alpha();
  auto central = [&](double h) {
    // Tensor product of the central differences delta_h^{a_j}, whose error
    // expansions contain only even powers of h.
    std::vector<int> k(n, 0);
    Vec xi(n);
    Complex sum = 0.0;
    while (true) {
      double coef = 1.0;
      for (int j = 0; j < n; ++j) {
        xi[j] = (0.5 * a[j] - k[j]) * h;
        coef *= ((k[j] % 2) ? -1.0 : 1.0) * binomial(a[j], k[j]);
      }
      sum += coef * value_(xi);
      int j = 0;
      for (; j < n; ++j) {
        if (++k[j] <= a[j]) break;
        k[j] = 0;
      }
      if (j == n) break;
    }
    return sum / std::pow(h, alpha.order());
  };
  const double h = 0.05;
  const Complex d1 = central(h), d2 = central(h / 2), d4 = central(h / 4);
  const Complex r1 = (4.0 * d2 - d1) / 3.0, r2 = (4.0 * d4 - d2) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

// ---------------------------------------------------------------- Gaussian mixtures

GaussianMixture& GaussianMixture::add(Complex coeff, Vec a, std::vector<Complex> c) {
  const auto n = static_cast<std::size_t>(space_.dim());
  if (a.size() != n) throw PreconditionError("GaussianMixture::add: widths must have length d+1");
  if (c.empty()) c.assign(n, Complex(0.0));
  if (c.size() != n) throw PreconditionError("GaussianMixture::add: centres must have length d+1");
  for (double x : a)
    if (!(x > 0.0)) throw PreconditionError("GaussianMixture::add: widths must be positive");
  terms_.push_back({coeff, std::move(a), std::move(c)});
  return *this;
}

Complex GaussianMixture::value(std::span<const double> xi) const {
  Complex total = 0.0;
  for (const auto& t : terms_) {
    Complex e = 0.0;
    for (std::size_t j = 0; j < xi.size(); ++j) {
      const Complex y = xi[j] - t.c[j];
      e -= t.a[j] * y * y;
    }
    total += t.coeff * std::exp(e);
  }
  return total;
}

Complex GaussianMixture::derivative(const WeightedMultiIndex& alpha) const {
  Complex total = 0.0;
  for (const auto& t : terms_) {
    Complex prod = t.coeff;
    for (std::size_t j = 0; j < t.a.size(); ++j) {
      // d^n/dx^n exp(-a (x-c)^2) at 0 = (-sqrt a)^n H_n(-sqrt(a) c) exp(-a c^2)
      const int n = alpha.alpha()[j];
      const double sa = std::sqrt(t.a[j]);
      const Complex y = -sa * t.c[j];
      Complex h0 = 1.0, h1 = 2.0 * y;
      Complex hn = n == 0 ? h0 : h1;
      for (int k = 1; k < n; ++k) {
        hn = 2.0 * y * h1 - 2.0 * double(k) * h0;
        h0 = h1;
        h1 = hn;
      }
      prod *= std::pow(-sa, n) * hn * std::exp(-t.a[j] * t.c[j] * t.c[j]);
    }
    total += prod;
  }
  return total;
}

GaussianMixture GaussianMixture::inverse_fourier() const {
  // (2 pi)^{-1} int e^{i x xi} e^{-a (xi - c)^2} dxi
  //   = (2 pi)^{-1} sqrt(pi / a) e^{-a c^2} e^{-(x - 2 i a c)^2 / (4 a)}
  GaussianMixture out(space_);
  for (const auto& t : terms_) {
    Complex coeff = t.coeff;
    Vec a(t.a.size());
    std::vector<Complex> c(t.a.size());
    for (std::size_t j = 0; j < t.a.size(); ++j) {
      coeff *= std::sqrt(kPi / t.a[j]) / (2.0 * kPi) * std::exp(-t.a[j] * t.c[j] * t.c[j]);
      a[j] = 1.0 / (4.0 * t.a[j]);
      c[j] = Complex(0.0, 2.0) * t.a[j] * t.c[j];
    }
    out.terms_.push_back({coeff, std::move(a), std::move(c)});
  }
  return out;
}

GaussianMixture GaussianMixture::dilated(double s) const {
  if (!(s > 0.0)) throw DomainError("GaussianMixture::dilated: factor must be positive");
  GaussianMixture out(space_);
  for (const auto& t : terms_) {
    Term u = t;
    for (std::size_t j = 0; j < u.a.size(); ++j) {
      const double w = j == 0 ? s * s : s;
      u.a[j] *= w * w;
      u.c[j] /= w;
    }
    out.terms_.push_back(std::move(u));
  }
  return out;
}

TestFunction GaussianMixture::to_test_function(std::string label) const {
  auto self = std::make_shared<const GaussianMixture>(*this);
  return TestFunction(
      space_, [self](std::span<const double> xi) { return self->value(xi); },
      [self](const WeightedMultiIndex& a) { return self->derivative(a); },
      TestFunction::TransformFn([self, label] { return self->inverse_fourier().to_test_function(label + "^vee"); }),
      label);
}

GaussianMixture GaussianMixture::isotropic(const GradedSpace& space, double a) {
  GaussianMixture g(space);
  g.add(1.0, Vec(space.dim(), a));
  return g;
}

std::vector<TestFunction> standard_test_panel(const GradedSpace& space) {
  const int n = space.dim();
  std::vector<TestFunction> panel;
  panel.push_back(GaussianMixture::isotropic(space).to_test_function("gauss"));

  Vec a(n);
  for (int j = 0; j < n; ++j) a[j] = 0.7 + 0.3 * j;
  panel.push_back(GaussianMixture(space).add(1.0, a).to_test_function("gauss-aniso"));

  std::vector<Complex> c(n);
  for (int j = 0; j < n; ++j) c[j] = (j % 2 ? -0.2 : 0.3) + 0.1 * j;
  panel.push_back(GaussianMixture(space).add(1.0, Vec(n, 1.0), c).to_test_function("gauss-shifted"));

  panel.push_back(GaussianMixture(space)
                      .add(1.0, Vec(n, 1.0))
                      .add(-1.0, Vec(n, 2.0))
                      .to_test_function("gauss-zero-at-origin"));

  std::vector<Complex> ci(n, Complex(0.0));
  ci[0] = Complex(0.0, 0.2);
  if (n > 1) ci[1] = 0.1;
  panel.push_back(GaussianMixture(space).add(Complex(0.5, 0.5), Vec(n, 1.5), ci).to_test_function("gauss-complex"));
  return panel;
}

// ---------------------------------------------------------------- bump and cutoff

Bump::Bump(double center, double half_width, double sharpness)
    : center_(center), half_width_(half_width), sharpness_(sharpness), norm_(1.0) {
  if (!(half_width > 0.0) || !(sharpness > 0.0)) throw PreconditionError("Bump: half width and sharpness must be positive");
  quad::Options opt;
  opt.rel_tol = 1e-14;
  auto shape = [s = sharpness](double x) { return std::abs(x) >= 1.0 ? 0.0 : std::exp(-s / (1.0 - x * x)); };
  const double mass = quad::integrate(shape, -1.0, 1.0, opt, std::array{0.0}).value;
  norm_ = 1.0 / (half_width * mass);
}

double Bump::operator()(double t) const {
  const double x = (t - center_) / half_width_;
  if (std::abs(x) >= 1.0) return 0.0;
  return norm_ * std::exp(-sharpness_ / (1.0 - x * x));
}

Vec Bump::derivatives(double t, int order) const {
  Vec out(order + 1, 0.0);
  const double x = (t - center_) / half_width_;
  if (std::abs(x) >= 1.0) return out;
  const int n = order + 1;
  // Taylor coefficients in dx of q = 1 - (x + dx)^2, then 1/q, then exp(-s/q).
  Vec q(n, 0.0), inv(n, 0.0), f(n, 0.0), e(n, 0.0);
  q[0] = 1.0 - x * x;
  if (n > 1) q[1] = -2.0 * x;
  if (n > 2) q[2] = -1.0;
  inv[0] = 1.0 / q[0];
  for (int k = 1; k < n; ++k) {
    double s = 0.0;
    for (int j = 1; j <= std::min(k, 2); ++j) s += q[j] * inv[k - j];
    inv[k] = -s / q[0];
  }
  for (int k = 0; k < n; ++k) f[k] = -sharpness_ * inv[k];
  e[0] = std::exp(f[0]);
  for (int k = 1; k < n; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * f[j] * e[k - j];
    e[k] = s / k;
  }
  double fact = 1.0, scale = 1.0;
  for (int k = 0; k < n; ++k) {
    if (k > 0) {
      fact *= k;
      scale /= half_width_;
    }
    out[k] = norm_ * e[k] * fact * scale;
  }
  return out;
}

double Bump::tail(double t) const {
  if (t <= lower()) return 1.0;
  if (t >= upper()) return 0.0;
  quad::Options opt;
  opt.rel_tol = 1e-14;
  opt.abs_tol = 1e-17;
  auto g = [this](double s) { return (*this)(s); };
  if (t < center_) return 1.0 - quad::integrate(g, lower(), t, opt).value;
  return quad::integrate(g, t, upper(), opt).value;
}

CutoffProfile::CutoffProfile(Bump g, std::vector<Complex> a_values) : g_(g), a_(std::move(a_values)) {
  sigma_.assign(a_.size() + 1, Complex(0.0));
  sigma_[0] = 1.0;
  for (const auto& a : a_) {
    if (std::abs(a) < 1e-12) throw Error("CutoffProfile: a = 0 in the product (internal error)");
    for (std::size_t j = sigma_.size() - 1; j >= 1; --j) sigma_[j] += sigma_[j - 1] / a;
  }
}

Complex CutoffProfile::h_prime(double t) const {
  const Vec d = g_.derivatives(t, static_cast<int>(a_.size()));
  Complex s = 0.0;
  for (std::size_t j = 0; j < sigma_.size(); ++j) s += sigma_[j] * d[j];
  return s;
}

Complex CutoffProfile::psi(double mu) const {
  if (mu <= 0.0) return 1.0;
  const double x = std::log(mu);
  if (x <= g_.lower()) return 1.0;
  if (x >= g_.upper()) return 0.0;
  Complex s = g_.tail(x);
  if (sigma_.size() > 1) {
    const Vec d = g_.derivatives(x, static_cast<int>(sigma_.size()) - 2);
    for (std::size_t j = 1; j < sigma_.size(); ++j) s -= sigma_[j] * d[j - 1];
  }
  return s;
}

Complex CutoffProfile::moment(Complex a) const {
  quad::Options opt;
  opt.rel_tol = 1e-13;
  opt.abs_tol = 1e-15;
  auto f = [&](double t) { return std::exp(a * t) * h_prime(t); };
  return quad::integrate(f, g_.lower(), g_.upper(), opt, std::array{g_.center()}).value;
}

double CutoffProfile::mu_lower() const { return std::exp(g_.lower()); }
double CutoffProfile::mu_upper() const { return std::exp(g_.upper()); }

// ---------------------------------------------------------------- extensions

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Integrable:
      return "integrable";
    case Regime::Homogeneous:
      return "homogeneous";
    case Regime::LogHomogeneous:
      return "log-homogeneous";
  }
  return "?";
}

Regime classify_regime(Complex m, int Q) {
  if (m.real() > -Q + 1e-12) return Regime::Integrable;
  return is_integer(m) ? Regime::LogHomogeneous : Regime::Homogeneous;
}

int default_taylor_order(Complex m, int Q) {
  switch (classify_regime(m, Q)) {
    case Regime::Integrable:
      return -1;
    case Regime::Homogeneous:
      return static_cast<int>(std::ceil(-(m.real() + Q) - 1e-12)) + 1;
    case Regime::LogHomogeneous:
      return static_cast<int>(std::lround(-(m.real() + Q)));
  }
  return -1;
}

ExtendedDistribution::ExtendedDistribution(HomogeneousSymbol p, int k, Regime regime,
                                           std::optional<CutoffProfile> cutoff, PairOptions options)
    : symbol_(std::move(p)), k_(k), regime_(regime), cutoff_(std::move(cutoff)), options_(options) {
  const auto& space = symbol_.space();
  if (k_ >= 0) taylor_ = WeightedMultiIndex::up_to(space, k_);
  const int res = options_.resolution > 0 ? options_.resolution : SphereRule::default_resolution(space);
  auto fill = [&](SphereData& sd, int resolution) {
    sd.rule = SphereRule::cached(space, resolution);
    const auto& rule = *sd.rule;
    sd.weighted.resize(rule.size());
    parallel_for(rule.size(), [&](std::size_t i) { sd.weighted[i] = rule.weight(i) * symbol_.on_sphere(rule.point(i)); });
    sd.moments.assign(taylor_.size(), Complex(0.0));
    for (std::size_t a = 0; a < taylor_.size(); ++a) {
      Complex s = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i) s += sd.weighted[i] * taylor_[a].monomial(rule.point(i));
      sd.moments[a] = s / taylor_[a].factorial();
    }
  };
  fill(coarse_, res);
  fill(fine_, res + res / 2);
}

Complex ExtendedDistribution::moment(const WeightedMultiIndex& alpha) const {
  for (std::size_t a = 0; a < taylor_.size(); ++a)
    if (taylor_[a] == alpha) return fine_.moments[a];
  throw PreconditionError("ExtendedDistribution::moment: <alpha> exceeds the Taylor order");
}

Complex c_alpha(const HomogeneousSymbol& p, const WeightedMultiIndex& alpha, const SphereOptions& opt) {
  auto g = [&](std::span<const double> w) { return alpha.monomial(w) * p.on_sphere(w); };
  const double sign = alpha.order() % 2 ? -1.0 : 1.0;
  return sign / alpha.factorial() * sphere_integral(p.space(), SphereFnC(g), opt).value;
}

ExtendedDistribution build_extension(const HomogeneousSymbol& p, std::optional<int> k, const Bump& g,
                                     const PairOptions& options) {
  const int Q = p.space().homogeneous_dimension();
  const Complex m = p.degree();
  const Regime regime = classify_regime(m, Q);
  if (regime == Regime::Integrable) return ExtendedDistribution(p, -1, regime, std::nullopt, options);

  const int kk = k.value_or(default_taylor_order(m, Q));
  if (kk < -(m.real() + Q) - 1e-12)
    throw DomainError("build_extension: Taylor order k = " + std::to_string(kk) + " is below -(Re m + Q)");
  if (regime == Regime::LogHomogeneous && kk != default_taylor_order(m, Q))
    throw DomainError("build_extension: integer degree requires k = -(m + Q) = " +
                      std::to_string(default_taylor_order(m, Q)));
  std::vector<Complex> a_values;
  for (int j = 0; j <= kk; ++j) {
    const Complex a = m + double(Q + j);
    if (std::abs(a) < 1e-12) {
      if (regime != Regime::LogHomogeneous) throw Error("build_extension: a = 0 outside the integer regime");
      continue;
    }
    a_values.push_back(a);
  }
  return ExtendedDistribution(p, kk, regime, CutoffProfile(g, std::move(a_values)), options);
}

namespace {

struct PairKernel {
  const ExtendedDistribution& tau;
  const TestFunction& u;
  std::vector<WeightedMultiIndex> series;  // k < <alpha> <= K with u^(alpha)(0) != 0
  std::vector<Complex> series_deriv;
  std::vector<Complex> taylor_deriv;       // u^(alpha)(0) for <alpha> <= k
  std::vector<int> taylor_bracket;

  // Sum over the rule of w_i p_i [u(r.omega_i) - psi(r) sum r^<alpha> omega^alpha/alpha! u^(alpha)(0)].
  Complex shell(const std::vector<Complex>& weighted, const std::vector<Complex>& moments, const SphereRule& rule,
                double r) const {
    Complex s = 0.0;
    if (u.radial_profile()) {
      Complex total = 0.0;
      for (const auto& w : weighted) total += w;
      s = total * (*u.radial_profile())(r);
    } else {
      const int n = rule.space().dim();
      const std::size_t N = rule.size();
      constexpr std::size_t chunk = 512;
      const std::size_t chunks = (N + chunk - 1) / chunk;
      std::vector<Complex> partial(chunks);
      parallel_for(chunks, [&](std::size_t c) {
        Vec buf(n);
        Complex acc = 0.0;
        const std::size_t end = std::min(N, (c + 1) * chunk);
        for (std::size_t i = c * chunk; i < end; ++i) {
          dilate_into(r, rule.point(i), buf);
          acc += weighted[i] * u(buf);
        }
        partial[c] = acc;
      });
      for (const auto& p : partial) s += p;
    }
    if (!moments.empty()) {
      const Complex psi = tau.cutoff()->psi(r);
      if (psi != 0.0) {
        Complex t = 0.0;
        for (std::size_t a = 0; a < moments.size(); ++a)
          t += std::pow(r, taylor_bracket[a]) * moments[a] * taylor_deriv[a];
        s -= psi * t;
      }
    }
    return s;
  }
};

}  // namespace

Estimate<Complex> pair(const ExtendedDistribution& tau, const TestFunction& u) {
  const auto& p = tau.symbol();
  const auto& space = p.space();
  if (!(u.space() == space)) throw PreconditionError("pair: test function lives on a different space");
  const int Q = space.homogeneous_dimension();
  const int k = tau.taylor_order();
  const Complex expo = p.degree() + double(Q);  // radial integrand r^{m+Q-1}

  PairKernel K{tau, u, {}, {}, {}, {}};
  for (const auto& a : tau.taylor_) {
    K.taylor_deriv.push_back(u.derivative(a));
    K.taylor_bracket.push_back(a.bracket());
  }

  const double lo = tau.cutoff() ? tau.cutoff()->mu_lower() : 1.0;
  const double hi = tau.cutoff() ? tau.cutoff()->mu_upper() : 1.0;
  double r0 = std::min(0.05, 0.5 * lo);
  if (u.radial_profile()) r0 = std::min(r0, u.flat_radius());

  // Brackets above k on [0, r0] are integrated term by term from the Taylor
  // series, which avoids the cancellation between u and its Taylor polynomial.
  const int extra = space.d() <= 2 ? 16 : 8;
  for (int b = k + 1; b <= k + extra; ++b)
    for (const auto& a : WeightedMultiIndex::with_bracket(space, b)) {
      const Complex dv = u.derivative(a);
      if (dv != 0.0) {
        K.series.push_back(a);
        K.series_deriv.push_back(dv);
      }
    }

  auto series_part = [&](const ExtendedDistribution::SphereData& sd, double radius, double& tail) {
    const auto& rule = *sd.rule;
    std::vector<Complex> per_bracket(extra + 1, Complex(0.0));
    for (std::size_t s = 0; s < K.series.size(); ++s) {
      const auto& a = K.series[s];
      Complex mom = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i) mom += sd.weighted[i] * a.monomial(rule.point(i));
      const Complex e = expo + double(a.bracket());
      per_bracket[a.bracket() - k] += mom / a.factorial() * K.series_deriv[s] * std::exp(e * std::log(radius)) / e;
    }
    Complex total = 0.0;
    for (const auto& v : per_bracket) total += v;
    tail = std::abs(per_bracket[extra]) + std::abs(per_bracket[extra - 1]);
    return total;
  };

  quad::Options opt;
  opt.rel_tol = tau.options().rel_tol;
  opt.abs_tol = tau.options().abs_tol;

  auto run = [&](const ExtendedDistribution::SphereData& sd) -> Estimate<Complex> {
    double radius = r0, tail = 0.0;
    Complex near = series_part(sd, radius, tail);
    for (int tries = 0; tail > 1e-15 * std::max(1.0, std::abs(near)) && tries < 8; ++tries) {
      radius *= 0.5;
      near = series_part(sd, radius, tail);
    }
    if (tail > 1e-13 * std::max(1.0, std::abs(near)))
      throw NumericalError("pair: Taylor series near the origin does not converge");
    auto f = [&](double r) { return std::exp((expo - 1.0) * std::log(r)) * K.shell(sd.weighted, sd.moments, *sd.rule, r); };
    std::vector<double> cuts{lo, hi, 2.0 * hi};
    Estimate<Complex> out{near, tail};
    auto body = quad::integrate(f, radius, 2.0 * hi, opt, cuts);
    auto far = quad::integrate_to_infinity(f, 2.0 * hi, opt);
    if (!body.converged || !far.converged) throw NumericalError("pair: radial quadrature did not converge");
    out.value += body.value + far.value;
    out.error += body.error + far.error;
    return out;
  };

  const auto coarse = run(tau.coarse_);
  const auto fine = run(tau.fine_);
  return {fine.value, fine.error + std::abs(fine.value - coarse.value)};
}

Estimate<Complex> pair_scaled(const ExtendedDistribution& tau, const TestFunction& u, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("pair_scaled: lambda must be positive");
  if (lambda == 1.0) return pair(tau, u);
  const int Q = tau.symbol().space().homogeneous_dimension();
  auto e = pair(tau, u.dilated(1.0 / lambda));
  const double s = std::pow(lambda, -Q);
  return {s * e.value, s * e.error};
}

Complex log_law_slope(const ExtendedDistribution& tau, const TestFunction& u) {
  if (tau.regime() != Regime::LogHomogeneous) throw PreconditionError("log_law_slope: requires the log-homogeneous regime");
  Complex s = 0.0;
  for (const auto& a : WeightedMultiIndex::with_bracket(tau.symbol().space(), tau.taylor_order()))
    s += tau.moment(a) * u.derivative(a);
  return s;
}

ScalingDefect scaling_defect(const ExtendedDistribution& tau, const TestFunction& u, double lambda) {
  if (tau.regime() != Regime::LogHomogeneous)
    throw PreconditionError("scaling_defect: requires the log-homogeneous regime");
  if (!(lambda > 0.0)) throw DomainError("scaling_defect: lambda must be positive");
  const Complex lm = std::pow(lambda, tau.symbol().degree());
  if (lambda == 1.0) return {0.0, 0.0, 0.0, 0.0};
  const auto base = pair(tau, u);
  const auto scaled = pair_scaled(tau, u, lambda);
  const Complex measured = scaled.value - lm * base.value;
  const Complex predicted = lm * std::log(lambda) * log_law_slope(tau, u);
  return {measured, predicted, std::abs(measured - predicted), scaled.error + std::abs(lm) * base.error};
}

KernelScaling kernel_scaling_check(const ExtendedDistribution& tau, const TestFunction& u, double lambda) {
  if (!u.has_inverse_fourier()) throw PreconditionError("kernel_scaling_check: test function has no inverse Fourier transform");
  if (!(lambda > 0.0)) throw DomainError("kernel_scaling_check: lambda must be positive");
  const auto& space = tau.symbol().space();
  const Complex m_hat = -(tau.symbol().degree() + double(space.homogeneous_dimension()));
  const TestFunction v = u.inverse_fourier();
  const Complex base = pair(tau, v).value;
  if (lambda == 1.0) return {base, base, 0.0};
  const Complex measured = pair(tau, v.dilated(lambda)).value;
  const Complex lm = std::pow(lambda, m_hat);
  Complex predicted = lm * base;
  if (tau.regime() == Regime::LogHomogeneous) {
    // (2 pi)^{-(d+1)} c_alpha int (-i y)^alpha u(y) dy = moment_alpha * (u^vee)^(alpha)(0)
    Complex s = 0.0;
    for (const auto& a : WeightedMultiIndex::with_bracket(space, tau.taylor_order())) s += tau.moment(a) * v.derivative(a);
    predicted -= lm * std::log(lambda) * s;
  }
  return {measured, predicted, std::abs(measured - predicted) / (1.0 + std::abs(predicted))};
}

}  // namespace hres
