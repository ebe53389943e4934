#pragma once

// Universal constants of the Heisenberg-type model operators:
//   rho_n(mu) = pi^{-(n+1)} / (2^n n!) int_R e^{-mu x} (x / sinh x)^n dx,  |mu| < n,
// and the finite sums gamma_{nk}, alpha_{n kappa p q}, beta_{n kappa p q}
// built from it, together with the length-element constant c_n.

#include <cstddef>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

namespace hres {

struct RhoValue {
  double value = 0.0;
  double error = 0.0;  // absolute quadrature error estimate
};

/// Quadrature of the even-folded integrand 2 cosh(mu x) (x / sinh x)^n on
/// [0, 1] and on a finite tail [1, X] in the overflow-free form
/// x^n 2^n (e^{(mu-n)x} + e^{-(mu+n)x}) / (1 - e^{-2x})^n. Absolute error
/// <= 1e-10. Throws DomainError for n < 1 or |mu| >= n.
RhoValue rho_estimate(int n, double mu);
double rho(int n, double mu);

/// Memoized rho_n. Safe for concurrent use: lookups take a shared lock and
/// insertions an exclusive one; a value is computed at most a few times
/// under contention and every computation yields the same bits.
class RhoTable {
 public:
  explicit RhoTable(int n);
  double operator()(double mu) const;
  int n() const { return n_; }
  std::size_t cached() const;

  /// Process-wide table for n.
  static const RhoTable& shared(int n);

 private:
  int n_;
  mutable std::shared_mutex mutex_;
  mutable std::map<double, double> cache_;
};

/// One summand coefficient * rho_n(mu) of a constant.
struct ConstantTerm {
  std::vector<int> indices;  // (p, q) for gamma, k for alpha, (l, k) for beta
  double coefficient = 0.0;
  double mu = 0.0;
  double rho = 0.0;
};

struct ConstantSum {
  double value = 0.0;
  std::vector<ConstantTerm> terms;
};

/// gamma_{nk} = sum_{p+q=k} 2^n C(n,p) C(n,q) rho(p-q), 0 <= k <= 2n, k != n.
/// Throws PreconditionError for k == n or k out of range and DomainError
/// for an out-of-domain rho argument.
ConstantSum gamma_terms(int n, int k);
double gamma_nk(int n, int k);

/// alpha_{n kappa p q} = sum_k 1/2 C(n,p) C(n-kappa,k) C(kappa,q-k) rho(n - 2(kappa - q + 2k))
/// over max(0, q-kappa) <= k <= min(q, n-kappa). Needs 0 <= kappa, p, q <= n,
/// q != kappa and q != n - kappa.
ConstantSum alpha_terms(int n, int kappa, int p, int q);
double alpha_nkpq(int n, int kappa, int p, int q);

/// beta_{n kappa p q} = sum_{k,l} 2^n C(n-kappa,l) C(kappa,p-l) C(n-kappa,k) C(kappa,q-k)
/// rho(2(q-p) + 4(l-k)). Needs (p, q) not in {(kappa, n-kappa), (n-kappa, kappa)}.
ConstantSum beta_terms(int n, int kappa, int p, int q);
double beta_nkpq(int n, int kappa, int p, int q);

/// beta_n = beta_{n000} = 2^n rho_n(0).
double beta_n(int n);

/// c_n = ((2n+2) / beta_n)^{1/(2n+2)}.
double length_element_constant(int n);

/// r_n = c_n^{2n+2} gamma_{n0} / (4(n+1)) for a heat-side gamma_{n0}. Reported only.
double length_element_ratio(int n, double gamma_n0);

double binomial(int n, int k);

struct FixtureCheck {
  int n = 0;
  double mu = 0.0;
  double expected = 0.0;
  double bound = 0.0;
  double computed = 0.0;
  double deviation = 0.0;
  bool ok = false;
};

/// Default fixtures path: $HRES_DATA_DIR/rho_fixtures.json, falling back to
/// the data directory of the source tree.
std::string default_fixtures_path();

/// Recomputes every entry of a fixtures file; ok iff
/// |computed - expected| <= bound + 1e-10. Throws ConfigError for an
/// unreadable or malformed file.
std::vector<FixtureCheck> verify_rho_fixtures(const std::string& path = default_fixtures_path());

}  // namespace hres
