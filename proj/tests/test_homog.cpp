#include <cmath>
#include <random>

#include "doctest.h"
#include "hres/homog.hpp"
#include "oracle_values.hpp"

using namespace hres;

namespace {

const GradedSpace S2(2);

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

}  // namespace

TEST_CASE("homogeneous symbols") {
  auto p = HomogeneousSymbol::gauss_tapered(S2, -2.5);
  Vec xi{0.4, -1.1, 0.3};
  for (double t : {0.3, 2.0, 5.0})
    CHECK(rel(p(dilate(S2, t, xi)), std::pow(t, -2.5) * p(xi)) < 1e-13);
  CHECK_THROWS_AS(p(Vec{0, 0, 0}), DomainError);
  auto q = HomogeneousSymbol::builtin(S2, "odd1:-4");
  CHECK(q.degree() == Complex(-4.0));
  CHECK(q(Vec{0, 1, 0}) == Complex(1.0));
  CHECK(q.reflected()(Vec{0, 1, 0}) == Complex(-1.0));
  CHECK(p.gauged(0.25).degree() == Complex(-2.25));
  CHECK_THROWS_AS(HomogeneousSymbol::builtin(S2, "nope:1"), PreconditionError);
  CHECK_THROWS_AS(HomogeneousSymbol::builtin(S2, "odd1:x"), PreconditionError);
}

TEST_CASE("c_alpha obstruction coefficients") {
  auto zero = WeightedMultiIndex(S2, {0, 0, 0});
  CHECK(std::abs(c_alpha(HomogeneousSymbol::odd(S2, 1, -4.0), zero)) < 1e-10);
  CHECK(c_alpha(HomogeneousSymbol::koranyi_power(S2, -4.0), zero).real() ==
        doctest::Approx(oracle::kSphereMeasureD2).epsilon(1e-10));
  CHECK(std::abs(c_alpha(HomogeneousSymbol::koranyi_power(S2, -5.0), WeightedMultiIndex(S2, {0, 1, 0}))) < 1e-10);
}

TEST_CASE("Gaussian mixtures: derivatives and transforms") {
  GaussianMixture g(S2);
  g.add(Complex(1.0, -0.5), Vec{0.8, 1.2, 2.0}, {Complex(0.1, 0.2), -0.3, 0.0});
  auto u = g.to_test_function("g");  // validates derivatives against finite differences
  for (const auto& a : WeightedMultiIndex::up_to(S2, 3))
    CHECK(std::abs(u.derivative(a) - u.finite_difference(a)) < 1e-7 * (1 + std::abs(u.derivative(a))));
  // Inverse transform at x = 0 is (2 pi)^{-3} int u.
  const double pi = oracle::kPi;
  auto iso = GaussianMixture::isotropic(S2).inverse_fourier();
  CHECK(rel(iso.value(Vec{0, 0, 0}), std::pow(pi, 1.5) / std::pow(2 * pi, 3)) < 1e-14);
  // Dilation: u(s.xi).
  auto d = g.dilated(1.7);
  Vec xi{0.2, 0.5, -0.4};
  CHECK(rel(d.value(xi), g.value(dilate(S2, 1.7, xi))) < 1e-14);
  // Wrong derivatives are rejected.
  auto bad = [](const WeightedMultiIndex& a) { return a.bracket() == 1 ? Complex(3.0) : Complex(0.0); };
  CHECK_THROWS_AS(TestFunction(S2, [&](std::span<const double> x) { return g.value(x); }, bad), PreconditionError);
}

TEST_CASE("bump and cutoff profile") {
  Bump g;
  quad::Options opt;
  opt.rel_tol = 1e-13;
  CHECK(quad::integrate([&](double t) { return g(t); }, -1, 1, opt).value == doctest::Approx(1.0).epsilon(1e-12));
  auto d = g.derivatives(0.3, 3);
  const double h = 1e-4;
  CHECK(d[1] == doctest::Approx((g(0.3 + h) - g(0.3 - h)) / (2 * h)).epsilon(1e-7));
  CHECK(d[2] == doctest::Approx((g(0.3 + h) - 2 * g(0.3) + g(0.3 - h)) / (h * h)).epsilon(1e-5));

  // m = -4.5, Q = 4, k = 1: a in {-0.5, 0.5}.
  auto tau = build_extension(HomogeneousSymbol::koranyi_power(S2, -4.5), 1);
  CHECK(tau.regime() == Regime::Homogeneous);
  REQUIRE(tau.cutoff().has_value());
  const auto& cp = *tau.cutoff();
  REQUIRE(cp.a_values().size() == 2);
  CHECK(cp.a_values()[0] == Complex(-0.5));
  CHECK(cp.a_values()[1] == Complex(0.5));
  CHECK(std::abs(cp.moment(0.0) - 1.0) < 1e-12);
  for (const auto& a : cp.a_values()) CHECK(std::abs(cp.moment(a)) < 1e-9);
  CHECK(cp.psi(0.1) == Complex(1.0));
  CHECK(cp.psi(5.0) == Complex(0.0));
  // psi' (mu) = -h'(log mu) / mu
  const double mu = 1.3;
  const Complex dpsi = (cp.psi(mu + 1e-5) - cp.psi(mu - 1e-5)) / 2e-5;
  CHECK(std::abs(dpsi + cp.h_prime(std::log(mu)) / mu) < 1e-6);
}

TEST_CASE("regimes and Taylor orders") {
  CHECK(build_extension(HomogeneousSymbol::koranyi_power(S2, -1.0)).regime() == Regime::Integrable);
  auto log = build_extension(HomogeneousSymbol::koranyi_power(S2, -4.0));
  CHECK(log.regime() == Regime::LogHomogeneous);
  CHECK(log.taylor_order() == 0);
  CHECK(log.cutoff()->a_values().empty());  // h' = g
  CHECK(log.cutoff()->h_prime(0.2) == Complex(Bump{}(0.2)));
  CHECK(default_taylor_order(-4.5, 4) == 2);
  CHECK(build_extension(HomogeneousSymbol::koranyi_power(S2, -6.0)).taylor_order() == 2);
  CHECK_THROWS_AS(build_extension(HomogeneousSymbol::koranyi_power(S2, -5.5), 0), DomainError);
  CHECK_THROWS_AS(build_extension(HomogeneousSymbol::koranyi_power(S2, -4.0), 1), DomainError);
}

TEST_CASE("pairing basics") {
  auto u = GaussianMixture::isotropic(S2).to_test_function("gauss");
  SUBCASE("integrable regime equals the plain integral") {
    auto tau = build_extension(HomogeneousSymbol::koranyi_power(S2, -1.0));
    auto a = pair(tau, u);
    auto b = polar_integral(S2, [&](std::span<const double> x) { return u(x) / pseudo_norm(S2, x); }, 0.0, INFINITY);
    CHECK(std::abs(a.value - b.value) < 1e-8);
  }
  auto tau = build_extension(HomogeneousSymbol::koranyi_power(S2, -4.5));
  SUBCASE("zero test function") {
    auto z = u * 0.0;
    CHECK(std::abs(pair(tau, z).value) == 0.0);
  }
  SUBCASE("linearity") {
    auto v = standard_test_panel(S2)[2];
    CHECK(std::abs(pair(tau, u + v).value - pair(tau, u).value - pair(tau, v).value) < 1e-10);
  }
  SUBCASE("identity scaling") { CHECK(pair_scaled(tau, u, 1.0).value == pair(tau, u).value); }
}

TEST_CASE("homogeneity for non-integer degree") {
  auto p = HomogeneousSymbol::gauss_tapered(S2, -4.5);
  auto tau = build_extension(p);
  auto panel = standard_test_panel(S2);
  std::mt19937 rng(20260101);
  std::uniform_real_distribution<double> lam(0.25, 4.0);
  for (int i = 0; i < 10; ++i) {
    const double l = lam(rng);
    const auto& u = panel[i % panel.size()];
    const Complex base = pair(tau, u).value;
    CHECK(std::abs(pair_scaled(tau, u, l).value - std::pow(l, -4.5) * base) <= 1e-6 * (1 + std::abs(base)));
  }
}

TEST_CASE("bump and Taylor-order independence") {
  auto p = HomogeneousSymbol::gauss_tapered(S2, -4.5);
  auto tau = build_extension(p);
  auto panel = standard_test_panel(S2);
  {
    auto tau2 = build_extension(p, std::nullopt, Bump(0.3, 0.7, 0.6));
    auto tau3 = build_extension(p, 4);
    for (const auto& u : panel) {
      const Complex a = pair(tau, u).value;
      CHECK(std::abs(pair(tau2, u).value - a) <= 1e-7 * std::abs(a));
      CHECK(std::abs(pair(tau3, u).value - a) <= 1e-7 * std::abs(a));
    }
  }
}

TEST_CASE("kernel-side law has no log term off the integers") {
  auto tau = build_extension(HomogeneousSymbol::gauss_tapered(S2, -4.5));
  auto panel = standard_test_panel(S2);
  {
    CHECK(kernel_scaling_check(tau, panel[1], 2.0).residual <= 1e-6);
    CHECK(kernel_scaling_check(tau, panel[1], 1.0).residual == 0.0);
  }
}

TEST_CASE("log-homogeneity for m = -Q") {
  auto tau = build_extension(HomogeneousSymbol::koranyi_power(S2, -4.0));
  auto u = GaussianMixture::isotropic(S2).to_test_function("gauss");
  auto d = scaling_defect(tau, u, 2.0);
  const Complex expected = std::pow(2.0, -4.0) * std::log(2.0) * oracle::kSphereMeasureD2 * u.derivative(WeightedMultiIndex(S2, {0, 0, 0}));
  CHECK(rel(d.predicted, expected) < 1e-9);
  CHECK(d.residual <= 1e-6 * std::abs(d.predicted));
  CHECK(std::abs(scaling_defect(tau, u, 1.0).measured) == 0.0);
  auto z = standard_test_panel(S2)[3];  // vanishes at the origin
  CHECK(std::abs(scaling_defect(tau, z, 2.0).measured) < 1e-9);
  CHECK(kernel_scaling_check(tau, u, 2.0).residual <= 1e-5);
  CHECK(kernel_scaling_check(tau, u, 1.0).residual == 0.0);
  CHECK_THROWS_AS(scaling_defect(build_extension(HomogeneousSymbol::koranyi_power(S2, -4.5)), u, 2.0), PreconditionError);
  CHECK_THROWS_AS(kernel_scaling_check(tau, TestFunction::radial_cutoff(S2, [](double) { return Complex(1.0); }, 1.0), 2.0),
                  PreconditionError);
}

TEST_CASE("vanishing obstruction: odd symbol in the log regime") {
  auto tau = build_extension(HomogeneousSymbol::odd(S2, 1, -4.0));
  auto u = standard_test_panel(S2)[2];
  const Complex base = pair(tau, u).value;
  CHECK(std::abs(pair_scaled(tau, u, 2.0).value - std::pow(2.0, -4.0) * base) < 1e-9 * (1 + std::abs(base)));
}
