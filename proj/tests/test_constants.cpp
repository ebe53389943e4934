#include <cmath>
#include <thread>

#include "doctest.h"
#include "hres/constants.hpp"
#include "hres/errors.hpp"
#include "oracle_values.hpp"

using namespace hres;

TEST_CASE("rho against the oracle") {
  CHECK(std::abs(rho(1, 0.0) - 0.25) < 1e-12);
  CHECK(std::abs(rho(2, 0.0) - oracle::kRho2At0) < 1e-12);
  CHECK(std::abs(rho(2, 0.7) - rho(2, -0.7)) < 1e-12);
  auto e = rho_estimate(3, 2.7);
  CHECK(e.error < 1e-10);
  for (const auto& c : verify_rho_fixtures()) {
    INFO("n = " << c.n << ", mu = " << c.mu);
    CHECK(c.ok);
  }
}

TEST_CASE("rho domain") {
  CHECK_THROWS_AS(rho(1, 1.0), DomainError);
  CHECK_THROWS_AS(rho(2, -2.5), DomainError);
  CHECK_THROWS_AS(rho(0, 0.0), DomainError);
}

TEST_CASE("rho is even, positive and increasing in |mu|") {
  for (int n = 1; n <= 3; ++n) {
    double prev = 0.0;
    for (int i = 0; i < 10; ++i) {
      const double mu = 0.095 * n * i;
      const double v = rho(n, mu);
      CHECK(v > 0.0);
      CHECK(v > prev);
      CHECK(std::abs(v - rho(n, -mu)) <= 1e-12 * v);
      prev = v;
    }
  }
}

TEST_CASE("rho table is safe under concurrent use") {
  RhoTable t(2);
  std::vector<double> out(8);
  std::vector<std::thread> th;
  for (int i = 0; i < 8; ++i) th.emplace_back([&, i] { out[i] = t(0.25 * (i % 4)); });
  for (auto& x : th) x.join();
  for (int i = 0; i < 8; ++i) CHECK(out[i] == rho(2, 0.25 * (i % 4)));
  CHECK(t.cached() == 4);
}

TEST_CASE("gamma_nk") {
  CHECK(gamma_nk(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(gamma_nk(1, 2) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(gamma_nk(1, 1), PreconditionError);
  CHECK_THROWS_AS(gamma_nk(2, 5), PreconditionError);
  for (int n = 1; n <= 3; ++n)
    for (int k = 0; k <= 2 * n; ++k) {
      if (k == n) continue;
      auto s = gamma_terms(n, k);
      CHECK(s.value > 0.0);
      CHECK(s.value == gamma_nk(n, 2 * n - k));
      int count = 0;
      for (int p = 0; p <= n; ++p)
        if (k - p >= 0 && k - p <= n) ++count;
      CHECK(s.terms.size() == std::size_t(count));
    }
}

TEST_CASE("alpha_nkpq") {
  auto s = alpha_terms(2, 0, 0, 1);
  REQUIRE(s.terms.size() == 1);
  CHECK(s.terms[0].indices == std::vector<int>{1});
  CHECK(s.value == doctest::Approx(oracle::kRho2At0).epsilon(1e-12));
  CHECK_THROWS_AS(alpha_nkpq(2, 0, 0, 0), PreconditionError);
  CHECK_THROWS_AS(alpha_nkpq(2, 0, 0, 2), PreconditionError);
  for (int p = 0; p <= 3; ++p)
    CHECK(alpha_nkpq(3, 1, p, 0) / binomial(3, p) == doctest::Approx(alpha_nkpq(3, 1, 0, 0)).epsilon(1e-14));
  CHECK(alpha_nkpq(3, 1, 2, 0) > 0.0);
}

TEST_CASE("beta_nkpq") {
  CHECK(beta_nkpq(1, 0, 0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(beta_n(1) == doctest::Approx(2 * rho(1, 0.0)).epsilon(1e-14));
  auto s = beta_terms(1, 0, 1, 1);
  REQUIRE(s.terms.size() == 1);
  CHECK(s.terms[0].indices == std::vector<int>{1, 1});
  CHECK(s.value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(beta_nkpq(1, 0, 0, 1), PreconditionError);
  CHECK_THROWS_AS(beta_nkpq(2, 1, 1, 1), PreconditionError);
  CHECK(beta_nkpq(3, 1, 0, 1) == doctest::Approx(beta_nkpq(3, 1, 1, 0)).epsilon(1e-14));
  CHECK_THROWS_AS(beta_nkpq(2, 0, 0, 1), DomainError);
}

TEST_CASE("length element constant") {
  CHECK(length_element_constant(1) == doctest::Approx(std::pow(8.0, 0.25)).epsilon(1e-12));
  for (int n = 1; n <= 3; ++n) {
    const double c = length_element_constant(n);
    CHECK(std::pow(c, 2 * n + 2) * beta_n(n) == doctest::Approx(2.0 * n + 2).epsilon(1e-12));
  }
  CHECK(length_element_ratio(1, 1.0 / 16) == doctest::Approx(1.0 / 16).epsilon(1e-12));
}

TEST_CASE("fixtures file errors") {
  CHECK_THROWS_AS(verify_rho_fixtures("/nonexistent.json"), ConfigError);
}
