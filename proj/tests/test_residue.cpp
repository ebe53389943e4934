#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hres/residue.hpp"
#include "oracle_values.hpp"

using namespace hres;

namespace {

const GradedSpace S2(2);
const double kTwoPiCubed = std::pow(2.0 * oracle::kPi, 3);

SymbolExpansion tapered(double m, int count) {
  std::vector<HomogeneousSymbol> cs;
  for (int j = 0; j < count; ++j) cs.push_back(HomogeneousSymbol::gauss_tapered(S2, m - j));
  return SymbolExpansion(cs);
}

}  // namespace

TEST_CASE("symbol expansions") {
  CHECK_THROWS_AS(SymbolExpansion({HomogeneousSymbol::koranyi_power(S2, -2.0), HomogeneousSymbol::koranyi_power(S2, -2.5)}),
                  PreconditionError);
  auto p = tapered(-2.5, 3);
  CHECK(p.order() == Complex(-2.5));
  CHECK(p.component_of_degree(-3.5).has_value());
  CHECK_FALSE(p.component_of_degree(-4.0).has_value());
  CHECK(p.gauged(0.2).order() == Complex(-2.3));
  CHECK(p.full_symbol(Vec{0.1, 0.1, 0.0}) == Complex(0.0));
  CHECK(minimal_N(p) == 2);
  CHECK(minimal_N(tapered(-5.5, 1)) == -1);
}

TEST_CASE("finite part: integrable case equals the plain integral") {
  SymbolExpansion p({HomogeneousSymbol::koranyi_power(S2, -5.5)});
  const auto& chi = realization_cutoff();
  auto direct = polar_integral(
      S2, [&](std::span<const double> x) { return (1.0 - chi(pseudo_norm(S2, x))) * std::pow(pseudo_norm(S2, x), -5.5); },
      chi.inner(), INFINITY);
  CHECK(std::abs(tilde_L(p).value - direct.value) < 1e-8);
  TildeLOptions n0;
  n0.N = 0;
  CHECK(std::abs(tilde_L(p, n0).value - direct.value) < 1e-8);
}

TEST_CASE("finite part: N independence, odd components, preconditions") {
  auto p = tapered(-2.5, 4);
  const Complex base = tilde_L(p).value;
  TildeLOptions n3;
  n3.N = 3;
  CHECK(std::abs(tilde_L(p, n3).value - base) <= 1e-6);
  auto with_odd = p.plus_component(HomogeneousSymbol::odd(S2, 1, -3.5));
  CHECK(std::abs(tilde_L(with_odd).value - base) <= 1e-8);
  TildeLOptions n1;
  n1.N = 1;
  CHECK_THROWS_AS(tilde_L(p, n1), PreconditionError);
  CHECK_THROWS_AS(tilde_L(tapered(-3.0, 3)), PreconditionError);
}

TEST_CASE("finite part is linear") {
  auto p = tapered(-2.5, 3);
  SymbolExpansion q({HomogeneousSymbol::odd(S2, 2, -2.5).plus(HomogeneousSymbol::koranyi_power(S2, -2.5)),
                     HomogeneousSymbol::koranyi_power(S2, -3.5), HomogeneousSymbol::gauss_tapered(S2, -4.5)});
  std::vector<HomogeneousSymbol> sum;
  for (std::size_t j = 0; j < 3; ++j) sum.push_back(p.components()[j].plus(q.components()[j].scaled(2.0)));
  const Complex lhs = tilde_L(SymbolExpansion(sum)).value;
  CHECK(std::abs(lhs - tilde_L(p).value - 2.0 * tilde_L(q).value) < 1e-9);
}

TEST_CASE("gauged Koranyi family: pole equals minus the sphere measure") {
  GaugedFamily fam(SymbolExpansion({HomogeneousSymbol::koranyi_power(S2, -4.0)}));
  auto fit = gauged_laurent(fam);
  CHECK(fit.residue.real() == doctest::Approx(-oracle::kSphereMeasureD2).epsilon(1e-4));
  CHECK(std::abs(fit.residue.imag()) < 1e-8);
  auto fit2 = gauged_laurent(fam, 0.2);
  CHECK(std::abs(fit2.residue - fit.residue) <= 1e-5 * std::abs(fit.residue));
  // Pole/density consistency.
  auto c = residue_density(fam.base());
  CHECK(std::abs(std::abs(fit.residue) - kTwoPiCubed * std::abs(c.value)) <= 1e-4 * std::abs(fit.residue));
  CHECK_THROWS_AS(gauged_laurent(fam, 1.5), PreconditionError);
  CHECK_THROWS_AS(gauged_laurent(fam, 0.4, 7), PreconditionError);
}

TEST_CASE("gauged family without a degree -Q component is regular") {
  GaugedFamily fam(SymbolExpansion({HomogeneousSymbol::gauss_tapered(S2, -3.0), HomogeneousSymbol::odd(S2, 1, -4.0),
                                    HomogeneousSymbol::gauss_tapered(S2, -5.0)}));
  auto fit = gauged_laurent(fam);
  CHECK(std::abs(fit.residue) <= 1e-6);
  const Complex near = 0.5 * (tilde_L(fam.at(0.01)).value + tilde_L(fam.at(-0.01)).value);
  CHECK(std::abs(fit.regular_value - near) <= 1e-4 * std::abs(near));
}

TEST_CASE("pole/density consistency for a tapered symbol with a frame Jacobian") {
  std::vector<HomogeneousSymbol> cs{HomogeneousSymbol::gauss_tapered(S2, -3.0), HomogeneousSymbol::gauss_tapered(S2, -4.0)};
  SymbolExpansion p(cs, 2.5);
  auto fit = gauged_laurent(GaugedFamily(p));
  auto c = residue_density(p);
  CHECK(std::abs(std::abs(fit.residue) - kTwoPiCubed * std::abs(c.value) / 2.5) <= 1e-4 * std::abs(fit.residue));
}

TEST_CASE("residue density") {
  SymbolExpansion p({HomogeneousSymbol::koranyi_power(S2, -4.0)});
  CHECK(residue_density(p).value.real() == doctest::Approx(oracle::kSphereMeasureD2 / kTwoPiCubed).epsilon(1e-10));
  CHECK(residue_density(tapered(-3.0, 1)).value == Complex(0.0));
  CHECK(std::abs(residue_density(SymbolExpansion({HomogeneousSymbol::odd(S2, 1, -4.0)})).value) < 1e-10);
  auto t = tapered(-3.0, 2);
  CHECK(std::abs(residue_density(t).value - residue_density(t.reflected()).value) < 1e-14);
  auto q = SymbolExpansion({HomogeneousSymbol::gauss_tapered(S2, -4.0).plus(HomogeneousSymbol::koranyi_power(S2, -4.0))});
  CHECK(std::abs(residue_density(q).value - residue_density(p).value - residue_density(tapered(-4.0, 1)).value) < 1e-14);
}

TEST_CASE("global residue and Dixmier value") {
  CHECK(global_res({}) == Complex(0.0));
  ResidueDensity c{Complex(0.3), 0.0, true};
  CHECK(global_res({{2.0, c}}) == Complex(0.6));
  CHECK_THROWS_AS(global_res({{-1.0, c}}), PreconditionError);
  CHECK(dixmier_value(0.0, S2) == Complex(0.0));
  CHECK(dixmier_value(4.0, S2) == Complex(1.0));
  const double pi2 = oracle::kPi * oracle::kPi;
  CHECK(std::abs(dixmier_value(pi2 / 8.0, S2) - pi2 / 32.0) < 1e-15);
}

TEST_CASE("local trace density") {
  auto p = tapered(-2.5, 4);
  auto t = local_trace_density(p, 0.125);
  CHECK(std::abs(t.value - (tilde_L(p).value / kTwoPiCubed + 0.125)) < 1e-13);
}
