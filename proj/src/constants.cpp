#include "hres/constants.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <memory>
#include <numbers>
#include <sstream>

#include "hres/errors.hpp"
#include "hres/quadrature.hpp"

namespace hres {

namespace {

void check_rho_domain(int n, double mu, const std::string& where) {
  if (n < 1) throw DomainError(where + ": n must be >= 1");
  if (!(std::abs(mu) < n)) {
    std::ostringstream s;
    s << where << ": rho_" << n << "(" << mu << ") requires |mu| < " << n << " (the integral diverges)";
    throw DomainError(s.str());
  }
}

double log_factorial(int n) { return std::lgamma(n + 1.0); }

}  // namespace

double binomial(int n, int k) {
  if (k < 0 || k > n || n < 0) return 0.0;
  return std::round(std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k)));
}

RhoValue rho_estimate(int n, double mu) {
  check_rho_domain(n, mu, "rho");
  const double a = std::abs(mu);
  auto near = [&](double x) {
    const double r = std::abs(x) < 1e-4 ? 1.0 - x * x / 6.0 : x / std::sinh(x);
    return 2.0 * std::cosh(mu * x) * std::pow(r, n);
  };
  auto tail = [&](double x) {
    const double denom = std::pow(-std::expm1(-2.0 * x), n);
    return std::pow(2.0 * x, n) * (std::exp((a - n) * x) + std::exp(-(a + n) * x)) / denom;
  };
  // Beyond X the tail is below e^{-40} relative to x^n e^{-(n-|mu|)x} at its peak.
  const double decay = n - a;
  double X = 1.0;
  while (n * std::log(2.0 * X) - decay * X > -45.0 || X < n / decay) X *= 2.0;
  std::vector<double> cuts;
  for (double c = 2.0; c < X; c *= 2.0) cuts.push_back(c);
  quad::Options opt;
  opt.rel_tol = 1e-14;
  opt.abs_tol = 1e-13;
  opt.max_intervals = 20000;
  const auto r0 = quad::integrate(near, 0.0, 1.0, opt);
  const auto r1 = quad::integrate(tail, 1.0, X, opt, cuts);
  if (!r0.converged || !r1.converged) throw NumericalError("rho: quadrature did not converge");
  const double pref =
      std::exp(-(n + 1) * std::log(std::numbers::pi) - n * std::log(2.0) - log_factorial(n));
  return {pref * (r0.value + r1.value), pref * (r0.error + r1.error) + 1e-15};
}

double rho(int n, double mu) { return rho_estimate(n, mu).value; }

RhoTable::RhoTable(int n) : n_(n) {
  if (n < 1) throw DomainError("RhoTable: n must be >= 1");
}

double RhoTable::operator()(double mu) const {
  const double key = mu == 0.0 ? 0.0 : mu;  // fold -0.0
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  const double v = rho(n_, std::abs(key));
  std::unique_lock lock(mutex_);
  cache_.emplace(key, v);
  return v;
}

std::size_t RhoTable::cached() const {
  std::shared_lock lock(mutex_);
  return cache_.size();
}

const RhoTable& RhoTable::shared(int n) {
  if (n < 1) throw DomainError("RhoTable: n must be >= 1");
  static std::mutex m;
  static std::map<int, std::unique_ptr<RhoTable>> tables;
  std::lock_guard lock(m);
  auto& t = tables[n];
  if (!t) t = std::make_unique<RhoTable>(n);
  return *t;
}

namespace {

void add_term(ConstantSum& sum, int n, std::vector<int> idx, double coef, int mu, const std::string& name) {
  if (coef == 0.0) return;
  std::ostringstream where;
  where << name << " term (";
  for (std::size_t i = 0; i < idx.size(); ++i) where << (i ? "," : "") << idx[i];
  where << ")";
  check_rho_domain(n, mu, where.str());
  const double r = RhoTable::shared(n)(mu);
  sum.terms.push_back({std::move(idx), coef, double(mu), r});
  sum.value += coef * r;
}

void check_index(int v, int lo, int hi, const char* what, const char* name) {
  if (v < lo || v > hi)
    throw PreconditionError(std::string(name) + ": " + what + " = " + std::to_string(v) + " outside [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

}  // namespace

ConstantSum gamma_terms(int n, int k) {
  if (n < 1) throw PreconditionError("gamma_nk: n must be >= 1");
  check_index(k, 0, 2 * n, "k", "gamma_nk");
  if (k == n) throw PreconditionError("gamma_nk: k = n excluded (principal symbol not invertible)");
  ConstantSum s;
  const double two_n = std::ldexp(1.0, n);
  for (int p = std::max(0, k - n); p <= std::min(n, k); ++p) {
    const int q = k - p;
    add_term(s, n, {p, q}, two_n * binomial(n, p) * binomial(n, q), p - q, "gamma_nk");
  }
  return s;
}

double gamma_nk(int n, int k) { return gamma_terms(n, k).value; }

ConstantSum alpha_terms(int n, int kappa, int p, int q) {
  if (n < 1) throw PreconditionError("alpha_nkpq: n must be >= 1");
  check_index(kappa, 0, n, "kappa", "alpha_nkpq");
  check_index(p, 0, n, "p", "alpha_nkpq");
  check_index(q, 0, n, "q", "alpha_nkpq");
  if (q == kappa || q == n - kappa) throw PreconditionError("alpha_nkpq: q = kappa and q = n - kappa are excluded");
  ConstantSum s;
  for (int k = std::max(0, q - kappa); k <= std::min(q, n - kappa); ++k)
    add_term(s, n, {k}, 0.5 * binomial(n, p) * binomial(n - kappa, k) * binomial(kappa, q - k),
             n - 2 * (kappa - q + 2 * k), "alpha_nkpq");
  return s;
}

double alpha_nkpq(int n, int kappa, int p, int q) { return alpha_terms(n, kappa, p, q).value; }

ConstantSum beta_terms(int n, int kappa, int p, int q) {
  if (n < 1) throw PreconditionError("beta_nkpq: n must be >= 1");
  check_index(kappa, 0, n, "kappa", "beta_nkpq");
  check_index(p, 0, n, "p", "beta_nkpq");
  check_index(q, 0, n, "q", "beta_nkpq");
  if ((p == kappa && q == n - kappa) || (p == n - kappa && q == kappa))
    throw PreconditionError("beta_nkpq: (p, q) = (kappa, n - kappa) and (n - kappa, kappa) are excluded");
  ConstantSum s;
  const double two_n = std::ldexp(1.0, n);
  for (int l = 0; l <= n - kappa; ++l)
    for (int k = 0; k <= n - kappa; ++k)
      add_term(s, n, {l, k},
               two_n * binomial(n - kappa, l) * binomial(kappa, p - l) * binomial(n - kappa, k) *
                   binomial(kappa, q - k),
               2 * (q - p) + 4 * (l - k), "beta_nkpq");
  return s;
}

double beta_nkpq(int n, int kappa, int p, int q) { return beta_terms(n, kappa, p, q).value; }

double beta_n(int n) { return beta_nkpq(n, 0, 0, 0); }

double length_element_constant(int n) {
  if (n < 1) throw PreconditionError("length_element_constant: n must be >= 1");
  return std::pow((2.0 * n + 2.0) / beta_n(n), 1.0 / (2.0 * n + 2.0));
}

double length_element_ratio(int n, double gamma_n0) {
  return std::pow(length_element_constant(n), 2 * n + 2) * gamma_n0 / (4.0 * (n + 1));
}

std::string default_fixtures_path() {
  if (const char* env = std::getenv("HRES_DATA_DIR"); env && *env) return std::string(env) + "/rho_fixtures.json";
  return std::string(HRES_DATA_DIR) + "/rho_fixtures.json";
}

std::vector<FixtureCheck> verify_rho_fixtures(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open fixtures file '" + path + "'");
  nlohmann::json doc;
  try {
    f >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed fixtures file '" + path + "': " + e.what());
  }
  if (!doc.contains("entries") || !doc["entries"].is_array())
    throw ConfigError("fixtures file '" + path + "' has no 'entries' array");
  std::vector<FixtureCheck> out;
  for (const auto& e : doc["entries"]) {
    FixtureCheck c;
    try {
      c.n = e.at("n").get<int>();
      c.mu = e.at("mu").get<double>();
      c.expected = e.at("value").get<double>();
      c.bound = e.at("error_bound").get<double>();
    } catch (const nlohmann::json::exception& ex) {
      throw ConfigError("fixtures entry malformed: " + std::string(ex.what()));
    }
    c.computed = rho(c.n, c.mu);
    c.deviation = std::abs(c.computed - c.expected);
    c.ok = c.deviation <= c.bound + 1e-10;
    out.push_back(c);
  }
  return out;
}

}  // namespace hres
