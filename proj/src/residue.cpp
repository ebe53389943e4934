#include "hres/residue.hpp"

#include <cmath>
#include <numbers>

namespace hres {

namespace {

double smooth_unit_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

bool is_integer(Complex m) { return m.imag() == 0.0 && std::abs(m.real() - std::round(m.real())) < 1e-12; }

}  // namespace

RadialStep::RadialStep(double inner, double outer) : inner_(inner), outer_(outer) {
  if (!(inner > 0.0) || !(outer > inner)) throw PreconditionError("RadialStep: need 0 < inner < outer");
}

double RadialStep::operator()(double r) const { return 1.0 - smooth_unit_step((r - inner_) / (outer_ - inner_)); }

const RadialStep& realization_cutoff() {
  static const RadialStep chi(0.5, 1.0);
  return chi;
}

const RadialStep& finite_part_cutoff() {
  static const RadialStep phi(1.0, 2.0);
  return phi;
}

SymbolExpansion::SymbolExpansion(std::vector<HomogeneousSymbol> components, double frame_jacobian)
    : components_(std::move(components)), jacobian_(frame_jacobian) {
  if (components_.empty()) throw PreconditionError("SymbolExpansion: no components");
  if (!(frame_jacobian > 0.0)) throw PreconditionError("SymbolExpansion: frame Jacobian must be positive");
  for (std::size_t j = 1; j < components_.size(); ++j) {
    if (!(components_[j].space() == components_[0].space()))
      throw PreconditionError("SymbolExpansion: components live on different spaces");
    if (std::abs(components_[j].degree() - (components_[0].degree() - double(j))) > 1e-12)
      throw PreconditionError("SymbolExpansion: component degrees must decrease by one");
  }
}

std::optional<HomogeneousSymbol> SymbolExpansion::component_of_degree(Complex degree) const {
  for (const auto& c : components_)
    if (std::abs(c.degree() - degree) < 1e-12) return c;
  return std::nullopt;
}

SymbolExpansion SymbolExpansion::gauged(Complex z) const {
  std::vector<HomogeneousSymbol> out;
  for (const auto& c : components_) out.push_back(c.gauged(z));
  return SymbolExpansion(std::move(out), jacobian_);
}

SymbolExpansion SymbolExpansion::reflected() const {
  std::vector<HomogeneousSymbol> out;
  for (const auto& c : components_) out.push_back(c.reflected());
  return SymbolExpansion(std::move(out), jacobian_);
}

SymbolExpansion SymbolExpansion::plus_component(const HomogeneousSymbol& q) const {
  auto out = components_;
  for (auto& c : out)
    if (std::abs(c.degree() - q.degree()) < 1e-12) {
      c = c.plus(q);
      return SymbolExpansion(std::move(out), jacobian_);
    }
  throw PreconditionError("SymbolExpansion::plus_component: no component of that degree");
}

Complex SymbolExpansion::full_symbol(std::span<const double> xi) const {
  const double w = 1.0 - realization_cutoff()(pseudo_norm(space(), xi));
  if (w == 0.0) return 0.0;
  Complex s = 0.0;
  for (const auto& c : components_) s += c(xi);
  return w * s;
}

int minimal_N(const SymbolExpansion& p) {
  const double v = p.order().real() + p.space().homogeneous_dimension();
  return std::max(-1, static_cast<int>(std::ceil(v - 1e-12)));
}

Estimate<Complex> tilde_L(const SymbolExpansion& p, const TildeLOptions& opt) {
  if (is_integer(p.order())) throw PreconditionError("tilde_L: integer order; use gauged_laurent instead");
  const int N = opt.N.value_or(minimal_N(p));
  if (N < minimal_N(p)) throw PreconditionError("tilde_L: N must be at least Re m + Q");
  const auto& space = p.space();
  const int Q = space.homogeneous_dimension();
  const auto& chi = realization_cutoff();
  const auto& phi = finite_part_cutoff();
  const auto phi_fn =
      TestFunction::radial_cutoff(space, [&phi](double r) { return Complex(phi(r)); }, phi.inner(), "phi");

  quad::Options q;
  q.rel_tol = 1e-12;
  q.abs_tol = 1e-15;

  Estimate<Complex> out;
  const auto& comps = p.components();
  for (std::size_t j = 0; j < comps.size(); ++j) {
    const auto& c = comps[j];
    const Complex e = c.degree() + double(Q);  // radial integrand r^{e-1}
    const auto B = sphere_integral(space, [&](std::span<const double> w) { return c.on_sphere(w); });
    auto radial = [&](auto weight, double a, double b) {
      auto f = [&](double r) { return std::exp((e - 1.0) * std::log(r)) * weight(r); };
      return quad::integrate(f, a, b, q, std::array{chi.outer(), phi.inner()});
    };
    if (static_cast<int>(j) <= N) {
      auto I = radial([&](double r) { return phi(r) - chi(r); }, chi.inner(), phi.outer());
      auto tau = build_extension(c, std::nullopt, Bump{}, opt.pair);
      auto t = pair(tau, phi_fn);
      out.value += B.value * I.value - t.value;
      out.error += std::abs(B.value) * I.error + B.error * std::abs(I.value) + t.error;
    } else {
      auto I = radial([&](double r) { return 1.0 - chi(r); }, chi.inner(), chi.outer());
      const Complex tail = -std::exp(e * std::log(chi.outer())) / e;
      const Complex v = I.value + tail;
      out.value += B.value * v;
      out.error += std::abs(B.value) * I.error + B.error * std::abs(v);
    }
  }
  return out;
}

Estimate<Complex> local_trace_density(const SymbolExpansion& p, Complex remainder, const TildeLOptions& opt) {
  const auto L = tilde_L(p, opt);
  const double norm = p.frame_jacobian() * std::pow(2.0 * std::numbers::pi, -p.space().dim());
  return {norm * L.value + remainder, norm * L.error};
}

LaurentFit gauged_laurent(const GaugedFamily& fam, double radius, int samples, const TildeLOptions& opt) {
  if (!(radius > 0.0 && radius < 1.0)) throw PreconditionError("gauged_laurent: radius must lie in (0, 1)");
  if (samples < 8 || samples % 2) throw PreconditionError("gauged_laurent: need an even number of samples >= 8");
  LaurentFit fit{};
  const int M = samples;
  for (int k = 0; k < M; ++k) fit.samples.push_back(std::polar(radius, std::numbers::pi * (2 * k + 1) / M));
  fit.values.resize(M);
  for (int k = 0; k < M; ++k) fit.values[k] = tilde_L(fam.at(fit.samples[k]), opt).value;

  Complex a = 0.0, b = 0.0, c = 0.0, a_half = 0.0;
  for (int k = 0; k < M; ++k) {
    const Complex z = fit.samples[k], v = fit.values[k];
    a += z * v;
    b += v;
    c += v / z;
    if (k % 2 == 0) a_half += z * v;
  }
  fit.residue = a / double(M);
  fit.regular_value = b / double(M);
  fit.slope = c / double(M);
  fit.residue_error = std::abs(fit.residue - a_half / double(M / 2));
  fit.condition = 1.0;
  for (int k = 0; k < M; ++k) {
    const Complex z = fit.samples[k];
    const Complex model = fit.residue / z + fit.regular_value + fit.slope * z;
    fit.fit_residual = std::max(fit.fit_residual, std::abs(model - fit.values[k]));
  }
  if (!std::isfinite(fit.residue_error)) throw NumericalError("gauged_laurent: non-finite samples");
  return fit;
}

ResidueDensity residue_density(const SymbolExpansion& p, const SphereOptions& opt) {
  const auto& space = p.space();
  const auto c = p.component_of_degree(-double(space.homogeneous_dimension()));
  if (!c) return {0.0, 0.0, true};
  const auto B = sphere_integral(space, [&](std::span<const double> w) { return c->on_sphere(w); }, opt);
  const double norm = p.frame_jacobian() * std::pow(2.0 * std::numbers::pi, -space.dim());
  return {norm * B.value, norm * B.error, true};
}

Complex global_res(const std::vector<std::pair<double, ResidueDensity>>& densities) {
  Complex s = 0.0;
  for (const auto& [w, c] : densities) {
    if (w < 0.0) throw PreconditionError("global_res: negative quadrature weight");
    s += w * c.value;
  }
  return s;
}

Complex dixmier_value(Complex res, const GradedSpace& space) { return res / double(space.homogeneous_dimension()); }

}  // namespace hres
