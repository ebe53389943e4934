#include <cmath>

#include "doctest.h"
#include "hres/aniso.hpp"
#include "oracle_values.hpp"

using namespace hres;

TEST_CASE("dilation examples and group law") {
  GradedSpace s(2);
  Vec xi{0.3, -1.2, 0.7};
  CHECK(dilate(s, 1.0, xi) == xi);
  CHECK(dilate(s, 2.0, Vec{1, 1, 1}) == Vec{4, 2, 2});
  for (double a : {0.25, 1.7, 9.0})
    for (double b : {0.5, 3.0}) {
      auto l = dilate(s, a, dilate(s, b, xi));
      auto r = dilate(s, a * b, xi);
      for (int i = 0; i < 3; ++i) CHECK(l[i] == doctest::Approx(r[i]).epsilon(1e-15));
    }
  CHECK_THROWS_AS(dilate(s, 0.0, xi), DomainError);
  CHECK_THROWS_AS(dilate(s, -1.0, xi), DomainError);
}

TEST_CASE("pseudo-norm") {
  GradedSpace s(2);
  CHECK(pseudo_norm(s, Vec{1, 0, 0}) == 1.0);
  CHECK(pseudo_norm(s, Vec{0, 1, 1}) == doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-15));
  CHECK(pseudo_norm(s, Vec{4, 0, 2}) == doctest::Approx(std::pow(32.0, 0.25)).epsilon(1e-15));
  CHECK(pseudo_norm(s, Vec{0, 0, 0}) == 0.0);
  Vec xi{1, 0, 1};
  CHECK(std::abs(pseudo_norm(s, dilate(s, 3.0, xi)) - 3.0 * pseudo_norm(s, xi)) < 1e-14);
  for (double t : {1e-3, 0.4, 7.0, 1e3})
    CHECK(pseudo_norm(s, dilate(s, t, Vec{-0.2, 0.9, 2.5})) ==
          doctest::Approx(t * pseudo_norm(s, Vec{-0.2, 0.9, 2.5})).epsilon(1e-13));
}

TEST_CASE("graded space and multi-indices") {
  CHECK_THROWS_AS(GradedSpace(0), DomainError);
  GradedSpace s(2);
  CHECK(s.homogeneous_dimension() == 4);
  CHECK(s.weights() == std::vector<int>{2, 1, 1});
  WeightedMultiIndex a(s, {1, 2, 0});
  CHECK(a.bracket() == 4);
  CHECK(a.order() == 3);
  CHECK(a.factorial() == 2.0);
  for (int b = 0; b <= 5; ++b)
    for (const auto& m : WeightedMultiIndex::with_bracket(s, b)) CHECK(m.bracket() == b);
  CHECK(WeightedMultiIndex::with_bracket(s, 2).size() == 4);  // (1,0,0),(0,2,0),(0,1,1),(0,0,2)
  CHECK(WeightedMultiIndex::up_to(s, 2).size() == 7);
}

TEST_CASE("sphere points") {
  GradedSpace s(2);
  CHECK_NOTHROW(SpherePoint(s, Vec{1, 0, 0}));
  CHECK_THROWS_AS(SpherePoint(s, Vec{1.1, 0, 0}), DomainError);
  auto p = SpherePoint::project(s, Vec{3, 2, -1});
  CHECK(pseudo_norm(s, p.xi()) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("odd integrands vanish on the sphere") {
  GradedSpace s(2);
  for (int j = 0; j < 3; ++j) {
    auto g = [j](std::span<const double> w) { return w[j] * (1.0 + w[0] * w[0] + 0.3 * w[1] * w[1]); };
    CHECK(std::abs(sphere_integral(s, g).value) < 1e-10);
  }
}

TEST_CASE("sphere measure: chart rule against closed form") {
  GradedSpace s2(2), s4(4);
  auto one = [](std::span<const double>) { return 1.0; };
  CHECK(sphere_integral(s2, one).value == doctest::Approx(oracle::kSphereMeasureD2).epsilon(1e-10));
  auto v4 = sphere_integral(s4, one, SphereOptions{0, 1e-6});
  CHECK(v4.value == doctest::Approx(oracle::kSphereMeasureD4).epsilon(1e-7));
}

TEST_CASE("sphere measure: shell oracle against chart rule" * doctest::timeout(60)) {
  GradedSpace s(2);
  auto g = [](std::span<const double> w) { return 1.0 + w[1] * w[1] * w[2] * w[2]; };
  auto chart = sphere_integral(s, g);
  auto shell = sphere_integral_shell(s, g, 1e-8);
  CHECK(std::abs(chart.value - shell.value) <= 1e-6 * std::abs(shell.value));
}

TEST_CASE("polar integrals") {
  GradedSpace s(2);
  auto inv_q = [&](std::span<const double> x) { return std::pow(pseudo_norm(s, x), -4.0); };
  CHECK(polar_integral(s, inv_q, 1.0, std::exp(1.0)).value ==
        doctest::Approx(oracle::kSphereMeasureD2).epsilon(1e-9));
  for (double L : {2.0, 10.0})
    CHECK(polar_integral(s, inv_q, 1.0, L).value ==
          doctest::Approx(std::log(L) * oracle::kSphereMeasureD2).epsilon(1e-9));
  auto one = [](std::span<const double>) { return 1.0; };
  CHECK(polar_integral(s, one, 1.0, 2.0).value ==
        doctest::Approx(oracle::kSphereMeasureD2 * (16.0 - 1.0) / 4.0).epsilon(1e-9));
  auto gauss = [](std::span<const double> x) { return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])); };
  auto g = polar_integral(s, gauss, 0.0, INFINITY);
  CHECK(std::abs(g.value - std::pow(oracle::kPi, 1.5)) < 1e-8);
  CHECK_THROWS_AS(polar_integral(s, one, 1.0, INFINITY), DomainError);
  CHECK_THROWS_AS(polar_integral(s, one, 2.0, 1.0), DomainError);
}

TEST_CASE("results do not depend on the thread count") {
  GradedSpace s(2);
  auto g = [](std::span<const double> w) { return std::exp(w[0]) * (1 + w[1] * w[2]); };
  set_thread_count(1);
  const double a = sphere_integral(s, g).value;
  set_thread_count(4);
  const double b = sphere_integral(s, g).value;
  set_thread_count(1);
  CHECK(a == b);
}
