#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "hres/errors.hpp"
#include "hres/heat.hpp"

using namespace hres;

namespace {
const double kC = std::numbers::pi * std::numbers::pi / 16.0;
}

TEST_CASE("S3 model trace: coefficients and vanishing pattern") {
  auto fit = extract_heat(builtin_trace("s3-sublaplacian"), 2, 4, 6);
  const auto& a = fit.expansion.a;
  CHECK(std::abs(a.at(0) / kC - 1) < 1e-5);
  CHECK(std::abs(a.at(2) / kC - 1) < 1e-5);
  CHECK(std::abs(a.at(4) / (kC / 2) - 1) < 1e-5);
  CHECK(std::abs(a.at(1)) <= 1e-6 * a.at(0));
  CHECK(std::abs(a.at(3)) <= 1e-6 * a.at(0));
  CHECK(fit.refinement_change < 1e-4);
  CHECK(fit.max_relative_residual < 1e-10);
  CHECK(fit.rank == fit.columns);
}

TEST_CASE("differential flag drops odd columns and forces zeros") {
  ExtractOptions opt;
  opt.differential = true;
  auto fit = extract_heat(builtin_trace("s3-sublaplacian"), 2, 4, 6, opt);
  CHECK(fit.expansion.a.count(1) == 0);
  CHECK(fit.expansion.a_coeff(1) == 0.0);
  CHECK(fit.expansion.b_coeff(2) == 0.0);
  CHECK(std::abs(fit.expansion.a.at(4) / (kC / 2) - 1) < 1e-5);
  HeatExpansion bad;
  bad.differential = true;
  bad.a = {{0, 1.0}, {1, 0.5}};
  CHECK_THROWS_AS(bad.validate(), PreconditionError);
}

TEST_CASE("single power and two-power synthetic traces") {
  auto one = extract_heat([](double t) { return 1.0 / (t * t); }, 2, 4, 2);
  CHECK(one.expansion.a.at(0) == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& [j, v] : one.expansion.a)
    if (j) CHECK(std::abs(v) < 1e-8);
  HeatExpansion h;
  h.a = {{0, 1.5}, {3, -0.25}};
  auto two = extract_heat(synthesize_trace(h), 2, 4, 2);
  CHECK(std::abs(two.expansion.a.at(0) - 1.5) < 1e-8);
  CHECK(std::abs(two.expansion.a.at(3) + 0.25) < 1e-8);
}

TEST_CASE("dictionary round trip") {
  for (int depth = 1; depth <= 3; ++depth) {
    HeatExpansion h;
    for (int j = 0; j <= 2 * depth; ++j) h.a[j] = std::cos(1.0 + j);
    auto fit = extract_heat(synthesize_trace(h), 2, 4, depth);
    for (const auto& [j, v] : h.a) CHECK(std::abs(fit.expansion.a.at(j) - v) <= 1e-8 * std::abs(v));
  }
  HeatExpansion odd;
  odd.m = 1;
  odd.Q = 3;
  odd.a = {{0, 2.0}, {1, -1.0}, {2, 0.5}, {3, 0.125}};
  auto fit = extract_heat(synthesize_trace(odd), 1, 3, 3);
  for (const auto& [j, v] : odd.a) CHECK(std::abs(fit.expansion.a.at(j) - v) <= 1e-8 * std::abs(v));
}

TEST_CASE("log terms") {
  HeatExpansion h;
  h.a = {{0, 1.0}, {2, 0.5}, {4, 0.25}, {6, 0.1}};
  h.b = {{1, 0.3}};
  ExtractOptions opt;
  opt.log_terms = true;
  auto fit = extract_heat(synthesize_trace(h), 2, 4, 3, opt);
  CHECK(std::abs(fit.expansion.b.at(1) - 0.3) < 1e-6);
  CHECK(std::abs(fit.expansion.a.at(4) - 0.25) < 1e-6);
}

TEST_CASE("extract_heat preconditions") {
  auto f = builtin_trace("s3-sublaplacian");
  CHECK_THROWS_AS(extract_heat(f, 2, 4, 7), PreconditionError);
  CHECK_THROWS_AS(extract_heat(f, 2, 4, 0), PreconditionError);
  CHECK_THROWS_AS(extract_heat([](double) { return NAN; }, 2, 4, 2), PreconditionError);
  CHECK_THROWS_AS(builtin_trace("nope"), PreconditionError);
  std::vector<std::pair<double, double>> dup(40, {0.01, 1.0});
  CHECK_THROWS_AS(extract_heat(dup, 2, 4, 2), NumericalError);
}

TEST_CASE("heat to zeta") {
  HeatExpansion h;
  h.a = {{0, kC}, {1, 0.0}, {2, kC}, {3, 0.0}, {4, kC / 2}, {6, kC / 6}};
  h.differential = true;
  h.dim_ker = 1;
  auto z = heat_to_zeta(h, -1.0);
  REQUIRE(z.size() == 4);
  CHECK(z[0].location == 2.0);
  CHECK(z[0].kind == ZetaSingularity::Kind::SimplePole);
  CHECK(*z[0].value == doctest::Approx(kC));
  CHECK(z[1].location == 1.0);
  CHECK(*z[1].value == doctest::Approx(kC));
  CHECK(z[2].location == 0.0);
  CHECK(z[2].kind == ZetaSingularity::Kind::RegularValue);
  CHECK(*z[2].value == doctest::Approx(kC / 2 - 1));
  CHECK(z[3].location == -1.0);
  CHECK(z[3].kind == ZetaSingularity::Kind::RegularValue);
  CHECK(*z[3].value == doctest::Approx(-kC / 6));

  HeatExpansion g;
  g.m = 2;
  g.Q = 3;
  g.a = {{0, 1.0}, {5, 2.0}};
  g.b = {{1, 0.5}};
  auto zz = heat_to_zeta(g, -1.0);
  CHECK(*zz[0].value == doctest::Approx(1.0 / std::tgamma(1.5)));
  CHECK_FALSE(zz[1].value.has_value());  // a_1 unknown
  bool saw_b = false;
  for (const auto& s : zz)
    if (s.location == -1.0 && s.kind == ZetaSingularity::Kind::SimplePole) {
      saw_b = true;
      CHECK(*s.value == doctest::Approx(0.5));
    } else if (s.location == -1.0) {
      CHECK(*s.value == doctest::Approx(-2.0));
    }
  CHECK(saw_b);
}

TEST_CASE("zeta residue to noncommutative residue") {
  CHECK(zeta_res_to_ncres(kC, 2) == doctest::Approx(kC / 2));
  CHECK(zeta_res_to_ncres(0.0, 2) == 0.0);
  CHECK(zeta_res_to_ncres(1.25, 1) == 1.25);
  CHECK_THROWS_AS(zeta_res_to_ncres(1.0, 0), PreconditionError);
}

TEST_CASE("Mellin cross-check on the S3 model") {
  auto trace = builtin_trace("s3-sublaplacian");
  auto fit = extract_heat(trace, 2, 4, 6);
  auto z = heat_to_zeta(fit.expansion);
  auto m2 = mellin_residue(trace, fit.expansion, 0);
  CHECK(m2.sigma == 2.0);
  CHECK(std::abs(m2.residue - *z[0].value) <= 1e-4 * std::abs(*z[0].value));
  auto m1 = mellin_residue(trace, fit.expansion, 2);
  CHECK(std::abs(m1.residue - kC) <= 1e-4 * kC);
}

TEST_CASE("Weyl asymptotics") {
  CHECK(weyl_nu0(2 * kC, 4) == doctest::Approx(std::numbers::pi * std::numbers::pi / 32));
  SpectrumSample s;
  s.m = 2;
  s.Q = 4;
  for (int k = 1; k <= 10000; ++k) s.eigenvalues.push_back(std::sqrt(k / 3.0));
  auto w = weyl_fit(s);
  CHECK(std::abs(w.nu0 / 3 - 1) < 0.01);
  CHECK(std::abs(w.exponent / 0.5 - 1) < 0.005);
  for (double c : {0.5, 4.0}) {
    auto t = s;
    for (auto& v : t.eigenvalues) v *= c;
    CHECK(weyl_fit(t).nu0 == doctest::Approx(w.nu0 * std::pow(c, -2.0)).epsilon(1e-10));
  }
  const double nu0 = weyl_nu0(zeta_res_to_ncres(kC, 2), 4);
  auto jittered = weyl_fit(synthetic_weyl_spectrum(nu0, 2, 4, 20000, 1e-3, 7));
  CHECK(std::abs(jittered.nu0 / nu0 - 1) < 0.01);
  CHECK(synthetic_weyl_spectrum(1.0, 2, 4, 500, 0.01, 3).eigenvalues ==
        synthetic_weyl_spectrum(1.0, 2, 4, 500, 0.01, 3).eigenvalues);
  s.eigenvalues.resize(99);
  CHECK_THROWS_AS(weyl_fit(s), PreconditionError);
  s.eigenvalues = std::vector<double>(200, 1.0);
  s.eigenvalues[5] = -1.0;
  CHECK_THROWS_AS(weyl_fit(s), PreconditionError);
}

TEST_CASE("index from a kernel-shifted pair of heat expansions") {
  CHECK(index_value(2.5, 2.5) == 0.0);
  CHECK(index_value(5, 3) == 2.0);
  HeatExpansion plus, minus;
  plus.a = minus.a = {{0, kC}, {2, kC}, {4, kC / 2}, {6, kC / 6}};
  plus.a[4] += 1.0;
  const double ap = extract_heat(synthesize_trace(plus), 2, 4, 3).expansion.a.at(4);
  const double am = extract_heat(synthesize_trace(minus), 2, 4, 3).expansion.a.at(4);
  CHECK(index_value(ap, am) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("spectrum and trace readers") {
  std::istringstream ok("# eigenvalues\n0.5\n1.0 # inline\n\n2\n");
  CHECK(read_spectrum(ok) == std::vector<double>{0.5, 1.0, 2.0});
  std::istringstream neg("1\n-2\n");
  CHECK_THROWS_AS(read_spectrum(neg), PreconditionError);
  std::istringstream desc("2\n1\n");
  CHECK_THROWS_AS(read_spectrum(desc), PreconditionError);
  std::istringstream junk("1\nabc\n");
  CHECK_THROWS_AS(read_spectrum(junk), PreconditionError);
  std::istringstream csv("t,value\n0.01,10000\n0.02, 2500\n");
  auto rows = read_trace_csv(csv);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].second == 2500.0);
  std::istringstream bad("0.01,1\nx,y\n");
  CHECK_THROWS_AS(read_trace_csv(bad), PreconditionError);
  CHECK_THROWS_AS(read_spectrum_file("/nonexistent/file"), PreconditionError);
}
