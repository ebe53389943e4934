#include "hres/heat.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "hres/errors.hpp"
#include "hres/quadrature.hpp"

namespace hres {

void HeatExpansion::validate() const {
  if (m < 1) throw PreconditionError("HeatExpansion: order m must be >= 1");
  if (dim_ker < 0) throw PreconditionError("HeatExpansion: dim_ker must be non-negative");
  for (const auto& [k, v] : b)
    if (k < 1) throw PreconditionError("HeatExpansion: log coefficients b_k need k >= 1");
  if (differential) {
    for (const auto& [j, v] : a)
      if (j % 2 == 1 && v != 0.0) throw PreconditionError("HeatExpansion: differential operator with a_" + std::to_string(j) + " != 0");
    for (const auto& [k, v] : b)
      if (v != 0.0) throw PreconditionError("HeatExpansion: differential operator with b_" + std::to_string(k) + " != 0");
  }
}

std::optional<double> HeatExpansion::a_coeff(int j) const {
  if (differential && j % 2 == 1) return 0.0;
  auto it = a.find(j);
  if (it == a.end()) return std::nullopt;
  return it->second;
}

std::optional<double> HeatExpansion::b_coeff(int k) const {
  if (differential) return 0.0;
  auto it = b.find(k);
  if (it == b.end()) return std::nullopt;
  return it->second;
}

std::string to_string(ZetaSingularity::Kind k) {
  return k == ZetaSingularity::Kind::SimplePole ? "simple-pole" : "regular-value";
}

std::vector<ZetaSingularity> heat_to_zeta(const HeatExpansion& h, double floor) {
  h.validate();
  std::vector<ZetaSingularity> out;
  using Kind = ZetaSingularity::Kind;
  for (int j = 0; h.sigma(j) >= floor - 1e-12; ++j) {
    const double s = h.sigma(j);
    const bool non_positive_integer = (h.Q - j) % h.m == 0 && s <= 0.0;
    if (!non_positive_integer) {
      auto a = h.a_coeff(j);
      if (a && *a == 0.0) continue;
      ZetaSingularity z{s, Kind::SimplePole, std::nullopt, "a_" + std::to_string(j)};
      if (a) z.value = *a / std::tgamma(s);
      out.push_back(z);
      continue;
    }
    const int k = static_cast<int>(std::lround(-s));
    if (k == 0) {
      ZetaSingularity z{0.0, Kind::RegularValue, std::nullopt, "a_" + std::to_string(j) + " - dim_ker"};
      if (auto a = h.a_coeff(j)) z.value = *a - h.dim_ker;
      out.push_back(z);
      continue;
    }
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    const double sign = k % 2 ? -1.0 : 1.0;
    auto b = h.b_coeff(k);
    if (!b || *b != 0.0) {
      ZetaSingularity z{s, Kind::SimplePole, std::nullopt, "b_" + std::to_string(k)};
      if (b) z.value = -sign * fact * *b;
      out.push_back(z);
    }
    ZetaSingularity z{s, Kind::RegularValue, std::nullopt, "a_" + std::to_string(j)};
    if (auto a = h.a_coeff(j)) z.value = sign * fact * *a;
    out.push_back(z);
  }
  return out;
}

double zeta_res_to_ncres(double residue_at_sigma, int m) {
  if (m < 1) throw PreconditionError("zeta_res_to_ncres: m must be >= 1");
  return residue_at_sigma / m;
}

namespace {

struct Design {
  std::vector<int> a_index;  // column -> j
  std::vector<int> b_index;  // column -> k
};

Design make_design(int m, int depth, const ExtractOptions& opt) {
  Design d;
  for (int j = 0; j <= m * depth; ++j)
    if (!opt.differential || j % 2 == 0) d.a_index.push_back(j);
  if (opt.log_terms && !opt.differential)
    for (int k = 1; k <= depth; ++k) d.b_index.push_back(k);
  return d;
}

HeatFit solve(const std::vector<std::pair<double, double>>& samples, int m, int Q, int depth, const ExtractOptions& opt) {
  if (m < 1) throw PreconditionError("extract_heat: m must be >= 1");
  if (depth < 1 || depth > 6) throw PreconditionError("extract_heat: depth must lie in [1, 6]");
  const Design d = make_design(m, depth, opt);
  const int cols = static_cast<int>(d.a_index.size() + d.b_index.size());
  const int rows = static_cast<int>(samples.size());
  if (rows < 2 * cols) throw PreconditionError("extract_heat: need at least twice as many samples as coefficients");

  Eigen::MatrixXd A(rows, cols);
  Eigen::VectorXd y(rows);
  for (int i = 0; i < rows; ++i) {
    const auto [t, v] = samples[i];
    if (!(t > 0.0) || !std::isfinite(v)) throw PreconditionError("extract_heat: samples need t > 0 and finite values");
    const double w = v != 0.0 ? 1.0 / std::abs(v) : 1.0;
    int c = 0;
    for (int j : d.a_index) A(i, c++) = w * std::pow(t, double(j - Q) / m);
    for (int k : d.b_index) A(i, c++) = w * std::pow(t, k) * std::log(t);
    y(i) = w * v;
  }
  Eigen::VectorXd scale = A.colwise().norm().transpose();
  for (int c = 0; c < cols; ++c) A.col(c) /= scale(c);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-15);
  HeatFit fit;
  fit.rank = static_cast<int>(qr.rank());
  fit.columns = cols;
  if (fit.rank < cols)
    throw NumericalError("extract_heat: rank-deficient design (rank " + std::to_string(fit.rank) + " of " +
                         std::to_string(cols) + ")");
  const Eigen::VectorXd x = qr.solve(y);
  fit.max_relative_residual = (A * x - y).cwiseAbs().maxCoeff();
  fit.expansion.m = m;
  fit.expansion.Q = Q;
  fit.expansion.differential = opt.differential;
  int c = 0;
  for (int j : d.a_index) {
    fit.expansion.a[j] = x(c) / scale(c);
    ++c;
  }
  for (int k : d.b_index) {
    fit.expansion.b[k] = x(c) / scale(c);
    ++c;
  }
  return fit;
}

std::vector<std::pair<double, double>> sample_grid(const TraceFn& trace, const ExtractOptions& opt, int per_decade) {
  if (!(opt.t_min > 0.0) || !(opt.t_max > opt.t_min)) throw PreconditionError("extract_heat: need 0 < t_min < t_max");
  const double decades = std::log10(opt.t_max / opt.t_min);
  const int n = static_cast<int>(std::lround(decades * per_decade)) + 1;
  std::vector<std::pair<double, double>> s(n);
  for (int i = 0; i < n; ++i) {
    const double t = opt.t_min * std::pow(opt.t_max / opt.t_min, double(i) / (n - 1));
    s[i] = {t, trace(t)};
  }
  return s;
}

}  // namespace

HeatFit extract_heat(const TraceFn& trace, int m, int Q, int depth, const ExtractOptions& opt) {
  HeatFit fit = solve(sample_grid(trace, opt, opt.points_per_decade), m, Q, depth, opt);
  const HeatFit fine = solve(sample_grid(trace, opt, 2 * opt.points_per_decade), m, Q, depth, opt);
  double biggest = 0.0;
  for (const auto& [j, v] : fit.expansion.a) biggest = std::max(biggest, std::abs(v));
  for (const auto& [j, v] : fit.expansion.a)
    if (j <= Q)
      fit.refinement_change = std::max(fit.refinement_change, std::abs(fine.expansion.a.at(j) - v) / biggest);
  return fit;
}

HeatFit extract_heat(const std::vector<std::pair<double, double>>& samples, int m, int Q, int depth,
                     const ExtractOptions& opt) {
  return solve(samples, m, Q, depth, opt);
}

TraceFn synthesize_trace(const HeatExpansion& h) {
  h.validate();
  return [h](double t) {
    double s = 0.0;
    for (const auto& [j, v] : h.a) s += v * std::pow(t, double(j - h.Q) / h.m);
    for (const auto& [k, v] : h.b) s += v * std::pow(t, k) * std::log(t);
    return s;
  };
}

TraceFn builtin_trace(const std::string& name) {
  if (name == "s3-sublaplacian") {
    const double c = std::numbers::pi * std::numbers::pi / 16.0;
    return [c](double t) { return std::exp(t) * c / (t * t); };
  }
  throw PreconditionError("unknown built-in trace '" + name + "'");
}

MellinCheck mellin_residue(const TraceFn& trace, const HeatExpansion& known, int j) {
  known.validate();
  const int m = known.m, Q = known.Q;
  const double sigma = known.sigma(j);
  if (!(sigma > 0.0)) throw PreconditionError("mellin_residue: sigma_j must be positive");
  std::vector<double> sub;
  for (int i = 0; i < j; ++i) {
    auto a = known.a_coeff(i);
    if (!a) throw PreconditionError("mellin_residue: a_" + std::to_string(i) + " is required");
    sub.push_back(*a);
  }
  // Below this log t the subtraction loses too many digits (or t^sigma
  // underflows); F is frozen at its value there.
  const double log_floor = j == 0 ? -200.0 : std::log(1e-6);
  auto F = [&](double log_t) {
    log_t = std::max(log_t, log_floor);
    const double t = std::exp(log_t);
    double v = trace(t);
    for (int i = 0; i < j; ++i) v -= sub[i] * std::exp(double(i - Q) / m * log_t);
    return std::exp(sigma * log_t) * v;
  };
  quad::Options opt;
  opt.rel_tol = 1e-12;
  opt.abs_tol = 1e-14;
  std::vector<double> eps, G;
  for (int i = 1; i <= 8; ++i) {
    const double e = 0.0125 * i;
    auto g = [&](double u) { return u <= 0.0 ? F(log_floor) : F(std::log(u) / e); };
    auto r = quad::integrate(g, 0.0, 1.0, opt);
    if (!r.converged && r.error > 1e-9 * std::abs(r.value))
      throw NumericalError("mellin_residue: quadrature did not converge");
    eps.push_back(e);
    G.push_back(r.value);
  }
  auto extrapolate = [&](int degree) {
    const int n = static_cast<int>(eps.size());
    Eigen::MatrixXd A(n, degree + 1);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      for (int p = 0; p <= degree; ++p) A(i, p) = std::pow(eps[i] / 0.1, p);
      y(i) = G[i];
    }
    return A.colPivHouseholderQr().solve(y)(0);
  };
  const double g4 = extrapolate(4), g3 = extrapolate(3);
  const double gam = std::tgamma(sigma);
  return {sigma, g4 / gam, std::abs(g4 - g3) / gam};
}

void SpectrumSample::validate() const {
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    if (!(eigenvalues[i] > 0.0)) throw PreconditionError("spectrum: eigenvalues must be positive");
    if (i && eigenvalues[i] < eigenvalues[i - 1]) throw PreconditionError("spectrum: eigenvalues must be non-decreasing");
  }
  if (m < 1 || Q < 1) throw PreconditionError("spectrum: m and Q must be positive");
}

double weyl_nu0(double res_critical, int Q) {
  if (Q < 1) throw PreconditionError("weyl_nu0: Q must be positive");
  return res_critical / Q;
}

namespace {

std::pair<double, double> log_regression(const std::vector<double>& ev, std::size_t start) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double cnt = double(ev.size() - start);
  for (std::size_t i = start; i < ev.size(); ++i) {
    const double x = std::log(double(i + 1)), y = std::log(ev[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / cnt;
  return {std::exp(-intercept / slope), slope};
}

}  // namespace

WeylFit weyl_fit(const SpectrumSample& s) {
  s.validate();
  const std::size_t n = s.eigenvalues.size();
  if (n < 100) throw PreconditionError("weyl_fit: need at least 100 eigenvalues, got " + std::to_string(n));
  const auto [nu0, exponent] = log_regression(s.eigenvalues, n / 2);
  const auto [nu0q, exponentq] = log_regression(s.eigenvalues, n - n / 4);
  return {nu0, exponent, n - n / 2, std::abs(nu0q - nu0), std::abs(exponentq - exponent)};
}

SpectrumSample synthetic_weyl_spectrum(double nu0, int m, int Q, std::size_t count, double jitter,
                                       unsigned long long seed) {
  if (!(nu0 > 0.0)) throw PreconditionError("synthetic_weyl_spectrum: nu0 must be positive");
  SpectrumSample s;
  s.m = m;
  s.Q = Q;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (std::size_t k = 1; k <= count; ++k) {
    double v = std::pow(double(k) / nu0, double(m) / Q);
    if (jitter > 0.0) v *= 1.0 + jitter * U(rng);
    s.eigenvalues.push_back(v);
  }
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
  return s;
}

double index_value(double plus_density_integral, double minus_density_integral) {
  return plus_density_integral - minus_density_integral;
}

namespace {

std::optional<double> parse_double(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw PreconditionError("cannot open '" + path + "'");
  return f;
}

}  // namespace

std::vector<double> read_spectrum(std::istream& in) {
  std::vector<double> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto v = parse_double(line);
    if (!v) throw PreconditionError("spectrum line " + std::to_string(lineno) + ": not a number");
    if (!(*v > 0.0)) throw PreconditionError("spectrum line " + std::to_string(lineno) + ": eigenvalues must be positive");
    if (!out.empty() && *v < out.back())
      throw PreconditionError("spectrum line " + std::to_string(lineno) + ": eigenvalues must be ascending");
    out.push_back(*v);
  }
  return out;
}

std::vector<double> read_spectrum_file(const std::string& path) {
  auto f = open_input(path);
  return read_spectrum(f);
}

std::vector<std::pair<double, double>> read_trace_csv(std::istream& in) {
  std::vector<std::pair<double, double>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto comma = line.find(',');
    std::optional<double> t, v;
    if (comma != std::string::npos) {
      t = parse_double(std::string_view(line).substr(0, comma));
      v = parse_double(std::string_view(line).substr(comma + 1));
    }
    if (!t || !v) {
      if (out.empty() && lineno == 1) continue;  // header
      throw PreconditionError("trace CSV line " + std::to_string(lineno) + ": expected t,value");
    }
    out.emplace_back(*t, *v);
  }
  return out;
}

std::vector<std::pair<double, double>> read_trace_csv_file(const std::string& path) {
  auto f = open_input(path);
  return read_trace_csv(f);
}

}  // namespace hres
