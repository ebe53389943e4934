#include "hres/pseudohermitian.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <random>
#include <sstream>

#include "hres/errors.hpp"
#include "hres/parallel.hpp"
#include "hres/quadrature.hpp"

namespace hres {

using Cx = std::complex<double>;

namespace {

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

// Weight of the south-pole chart: 1 where the last coordinate exceeds 1/2.
double south_weight(double last) { return smooth_step(last + 0.5); }

}  // namespace

Chart stereographic_chart(int n, bool from_north, bool partition) {
  if (n < 1) throw PreconditionError("stereographic_chart: n must be >= 1");
  const int D = 2 * n + 1;
  Chart c;
  c.name = from_north ? "stereo-north" : "stereo-south";
  const double R = std::sqrt(3.0);
  c.box.push_back({0.0, R});
  c.breaks.push_back({1.0 / std::sqrt(3.0), 1.0});
  c.nodes.push_back(24);
  for (int i = 0; i + 2 < D; ++i) {
    c.box.push_back({0.0, std::numbers::pi});
    c.breaks.push_back({});
    c.nodes.push_back(20);
  }
  c.box.push_back({0.0, 2.0 * std::numbers::pi});
  c.breaks.push_back({std::numbers::pi});
  c.nodes.push_back(12);
  c.embed = [D, from_north](std::span<const Cx> p, std::span<Cx> X) {
    Cx u[16];
    Cx prod = p[0];
    for (int i = 0; i + 1 < D; ++i) {
      const Cx ang = p[i + 1];
      if (i + 2 < D) {
        u[i] = prod * std::cos(ang);
        prod *= std::sin(ang);
      } else {
        u[i] = prod * std::cos(ang);
        u[i + 1] = prod * std::sin(ang);
      }
    }
    if (D == 1) u[0] = prod;
    Cx r2 = 0.0;
    for (int i = 0; i < D; ++i) r2 += u[i] * u[i];
    const Cx den = r2 + 1.0;
    for (int i = 0; i < D; ++i) X[i] = 2.0 * u[i] / den;
    X[D] = (from_north ? (r2 - 1.0) : (1.0 - r2)) / den;
  };
  if (partition)
    c.weight = [D, from_north](std::span<const double> X) {
      const double s = south_weight(X[D]);
      return from_north ? 1.0 - s : s;
    };
  else
    c.weight = [](std::span<const double>) { return 1.0; };
  return c;
}

Chart hopf_chart() {
  Chart c;
  c.name = "hopf";
  const double pi = std::numbers::pi;
  c.box = {{0.0, pi / 2}, {0.0, 2 * pi}, {0.0, 2 * pi}};
  c.breaks = {{}, {}, {}};
  c.nodes = {24, 8, 8};
  c.embed = [](std::span<const Cx> p, std::span<Cx> X) {
    const Cx ce = std::cos(p[0]), se = std::sin(p[0]);
    X[0] = ce * std::cos(p[1]);
    X[1] = ce * std::sin(p[1]);
    X[2] = se * std::cos(p[2]);
    X[3] = se * std::sin(p[2]);
  };
  c.weight = [](std::span<const double>) { return 1.0; };
  return c;
}

ContactModel standard_sphere(int n, const std::string& atlas, double theta_scale, std::optional<double> curvature) {
  if (n < 1 || n > 7) throw PreconditionError("standard_sphere: n must lie in [1, 7]");
  ContactModel m;
  m.n = n;
  m.theta_scale = theta_scale;
  if (atlas == "stereographic") {
    m.atlas = {stereographic_chart(n, true), stereographic_chart(n, false)};
  } else if (atlas == "hopf") {
    if (n != 1) throw PreconditionError("standard_sphere: the Hopf atlas exists only for n = 1");
    m.atlas = {hopf_chart()};
  } else {
    throw PreconditionError("standard_sphere: unknown atlas '" + atlas + "'");
  }
  m.name = "s" + std::to_string(2 * n + 1) + "-" + atlas;
  if (!curvature && n == 1) curvature = 4.0;
  if (curvature) {
    const double R = *curvature;
    m.curvature = [R](std::span<const double>) { return R; };
  }
  if (n == 1) m.known_volume = theta_scale * theta_scale * std::numbers::pi * std::numbers::pi;
  return m;
}

ContactModel builtin_model(const std::string& name) {
  if (name == "s3-standard") {
    auto m = standard_sphere(1, "stereographic");
    m.name = name;
    return m;
  }
  if (name == "s3-hopf") {
    auto m = standard_sphere(1, "hopf");
    m.name = name;
    return m;
  }
  throw PreconditionError("unknown model '" + name + "'");
}

std::vector<std::string> builtin_model_names() { return {"s3-standard", "s3-hopf"}; }

ContactModel load_model_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model JSON: ") + e.what());
  }
  try {
    ContactModel m;
    m.name = j.value("name", std::string("custom"));
    m.n = j.value("n", 1);
    if (m.n < 1 || m.n > 7) throw ConfigError("model JSON: n must lie in [1, 7]");
    m.theta_scale = j.value("theta_scale", 1.0);
    const bool partition = j.value("partition", true);
    if (!j.contains("charts") || !j["charts"].is_array() || j["charts"].empty())
      throw ConfigError("model JSON: 'charts' must be a non-empty array of chart names");
    for (const auto& c : j["charts"]) {
      const auto name = c.get<std::string>();
      if (name == "stereo-north")
        m.atlas.push_back(stereographic_chart(m.n, true, partition));
      else if (name == "stereo-south")
        m.atlas.push_back(stereographic_chart(m.n, false, partition));
      else if (name == "hopf") {
        if (m.n != 1) throw ConfigError("model JSON: chart 'hopf' needs n = 1");
        m.atlas.push_back(hopf_chart());
      } else {
        throw ConfigError("model JSON: unknown chart '" + name + "'");
      }
    }
    if (j.contains("curvature")) {
      const double R = j["curvature"].get<double>();
      m.curvature = [R](std::span<const double>) { return R; };
    }
    if (j.contains("known_volume")) m.known_volume = j["known_volume"].get<double>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model JSON: ") + e.what());
  }
}

ContactModel load_model_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return load_model_json(ss.str());
}

void check_partition(const ContactModel& mdl) {
  const int N = 2 * mdl.n + 2;
  std::vector<std::vector<double>> pts;
  for (double s : {1.0, -1.0}) {
    std::vector<double> p(N, 0.0);
    p[N - 1] = s;
    pts.push_back(p);
  }
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> g;
  for (int i = 0; i < 256; ++i) {
    std::vector<double> p(N);
    double norm = 0.0;
    for (auto& v : p) {
      v = g(rng);
      norm += v * v;
    }
    for (auto& v : p) v /= std::sqrt(norm);
    pts.push_back(p);
  }
  for (const auto& p : pts) {
    double sum = 0.0;
    for (const auto& c : mdl.atlas) sum += c.weight(p);
    if (std::abs(sum - 1.0) > 1e-12) {
      std::ostringstream s;
      s << "model '" << mdl.name << "': partition weights sum to " << sum << " at a sample point"
        << (sum > 1.0 ? " (charts double-count an overlap)" : " (atlas does not cover the sphere)");
      throw ConfigError(s.str());
    }
  }
}

double pfaffian(std::span<const double> a, int size) {
  if (size == 0) return 1.0;
  if (size % 2) return 0.0;
  if (size == 2) return a[1];
  double total = 0.0;
  std::vector<double> sub((size - 2) * (size - 2));
  for (int j = 1; j < size; ++j) {
    if (a[j] == 0.0) continue;
    int r = 0;
    for (int i = 1; i < size; ++i) {
      if (i == j) continue;
      int c = 0;
      for (int k = 1; k < size; ++k) {
        if (k == j) continue;
        sub[r * (size - 2) + c] = a[i * size + k];
        ++c;
      }
      ++r;
    }
    total += ((j - 1) % 2 ? -1.0 : 1.0) * a[j] * pfaffian(sub, size - 2);
  }
  return total;
}

double contact_density(std::span<const double> theta, std::span<const double> dtheta, int n) {
  const int D = 2 * n + 1;
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  std::vector<double> sub((D - 1) * (D - 1));
  double total = 0.0;
  for (int i = 0; i < D; ++i) {
    if (theta[i] == 0.0) continue;
    int r = 0;
    for (int a = 0; a < D; ++a) {
      if (a == i) continue;
      int c = 0;
      for (int b = 0; b < D; ++b) {
        if (b == i) continue;
        sub[r * (D - 1) + c] = dtheta[a * D + b];
        ++c;
      }
      ++r;
    }
    total += (i % 2 ? -1.0 : 1.0) * theta[i] * pfaffian(sub, D - 1);
  }
  return fact * total;
}

namespace {

struct ChartPoint {
  std::vector<double> X;
  double density = 0.0;  // dtheta^n ^ theta coefficient in parameter coordinates
};

ChartPoint evaluate(const ContactModel& mdl, const Chart& c, std::span<const double> p) {
  const int D = mdl.dim(), N = D + 1;
  const double h = 1e-20;
  std::vector<Cx> pc(p.begin(), p.end()), X(N);
  std::vector<double> J(N * D);
  ChartPoint out;
  c.embed(pc, X);
  out.X.resize(N);
  for (int i = 0; i < N; ++i) out.X[i] = X[i].real();
  for (int a = 0; a < D; ++a) {
    pc[a] += Cx(0.0, h);
    c.embed(pc, X);
    for (int i = 0; i < N; ++i) J[i * D + a] = X[i].imag() / h;
    pc[a] = p[a];
  }
  const double s = mdl.theta_scale;
  std::vector<double> th(D, 0.0), F(D * D, 0.0);
  for (int j = 0; j <= mdl.n; ++j) {
    const double x = out.X[2 * j], y = out.X[2 * j + 1];
    for (int a = 0; a < D; ++a) th[a] += 0.5 * s * (x * J[(2 * j + 1) * D + a] - y * J[2 * j * D + a]);
    for (int a = 0; a < D; ++a)
      for (int b = 0; b < D; ++b)
        F[a * D + b] += s * (J[2 * j * D + a] * J[(2 * j + 1) * D + b] - J[2 * j * D + b] * J[(2 * j + 1) * D + a]);
  }
  out.density = contact_density(th, F, mdl.n);
  return out;
}

struct AxisRule {
  std::vector<double> x, w;
};

AxisRule axis_rule(double a, double b, const std::vector<double>& breaks, int nodes) {
  std::vector<double> cuts{a};
  for (double v : breaks)
    if (v > a && v < b) cuts.push_back(v);
  cuts.push_back(b);
  const auto gl = quad::gauss_legendre(nodes);
  AxisRule r;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double c = 0.5 * (cuts[i] + cuts[i + 1]), h = 0.5 * (cuts[i + 1] - cuts[i]);
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      r.x.push_back(c + h * gl.nodes[k]);
      r.w.push_back(h * gl.weights[k]);
    }
  }
  return r;
}

double integrate_chart(const ContactModel& mdl, const Chart& c, const std::function<double(std::span<const double>)>& f,
                       double resolution) {
  const int D = mdl.dim();
  if (static_cast<int>(c.box.size()) != D) throw ConfigError("chart '" + c.name + "' has the wrong dimension");
  std::vector<double> centre(D);
  for (int a = 0; a < D; ++a) centre[a] = 0.5 * (c.box[a].first + c.box[a].second) * (a == 0 ? 1.0 : 0.9);
  const double ref = evaluate(mdl, c, centre).density;
  if (ref == 0.0) throw ConfigError("chart '" + c.name + "': contact form degenerate at the chart centre");
  const double orient = ref > 0 ? 1.0 : -1.0;

  std::vector<AxisRule> rules;
  std::size_t total = 1;
  for (int a = 0; a < D; ++a) {
    const int nodes = std::max(2, static_cast<int>(std::lround(c.nodes[a] * resolution)));
    rules.push_back(axis_rule(c.box[a].first, c.box[a].second, c.breaks[a], nodes));
    total *= rules.back().x.size();
  }
  const std::size_t n0 = rules[0].x.size();
  const std::size_t inner = total / n0;
  std::vector<double> partial(n0, 0.0);
  std::vector<int> bad(n0, 0);
  parallel_for(n0, [&](std::size_t i0) {
    std::vector<double> p(D);
    std::vector<std::size_t> idx(D, 0);
    double sum = 0.0;
    for (std::size_t flat = 0; flat < inner; ++flat) {
      std::size_t rem = flat;
      double w = rules[0].w[i0];
      p[0] = rules[0].x[i0];
      for (int a = D - 1; a >= 1; --a) {
        const std::size_t m = rules[a].x.size();
        const std::size_t k = rem % m;
        rem /= m;
        p[a] = rules[a].x[k];
        w *= rules[a].w[k];
      }
      const auto pt = evaluate(mdl, c, p);
      const double wt = c.weight(pt.X);
      if (wt == 0.0) continue;
      const double dens = orient * pt.density;
      if (dens < -1e-12) bad[i0] = 1;
      sum += w * wt * dens * f(pt.X);
    }
    partial[i0] = sum;
  });
  if (std::any_of(bad.begin(), bad.end(), [](int b) { return b != 0; }))
    throw ConfigError("chart '" + c.name + "': dtheta^n ^ theta changes sign (contact form degenerates)");
  double s = 0.0;
  for (double v : partial) s += v;
  return s;
}

}  // namespace

VolumeEstimate integrate_contact(const ContactModel& mdl, const std::function<double(std::span<const double>)>& f,
                                 double resolution) {
  check_partition(mdl);
  auto at = [&](double res) {
    double s = 0.0;
    for (const auto& c : mdl.atlas) s += integrate_chart(mdl, c, f, res);
    return s;
  };
  const double a = at(resolution);
  const double b = at(1.5 * resolution);
  return {b, std::abs(b - a)};
}

VolumeEstimate contact_volume(const ContactModel& mdl) {
  return integrate_contact(mdl, [](std::span<const double>) { return 1.0; });
}

VolumeEstimate curvature_integral(const ContactModel& mdl) {
  if (!mdl.curvature) throw PreconditionError("model '" + mdl.name + "' has no scalar curvature");
  return integrate_contact(mdl, mdl.curvature);
}

HeatGammaRegistry HeatGammaRegistry::s3_reference() { return {1, 1.0 / 16.0, 1.0 / 64.0}; }

HeatGammaRegistry gamma_from_heat(double A0, double A2, const ContactModel& mdl) {
  const double vol = contact_volume(mdl).value;
  const double rint = curvature_integral(mdl).value;
  if (vol == 0.0) throw DomainError("gamma_from_heat: vanishing contact volume");
  if (rint == 0.0) throw DomainError("gamma_from_heat: vanishing curvature integral");
  return {mdl.n, A0 / vol, A2 / rint};
}

double heat_length_constant_power(const HeatGammaRegistry& reg) {
  if (!(reg.gamma0 > 0.0)) throw DomainError("heat_length_constant_power: gamma0 must be positive");
  return 4.0 * (reg.n + 1) / reg.gamma0;
}

double area_constant(const HeatGammaRegistry& reg) {
  if (reg.n != 1) throw PreconditionError("area_constant: needs n = 1");
  if (!reg.gamma1_prime) throw PreconditionError("area_constant: gamma_1' unknown");
  if (!(reg.gamma0 > 0.0)) throw DomainError("area_constant: gamma0 must be positive");
  return *reg.gamma1_prime / std::sqrt(8.0 * reg.gamma0);
}

bool lower_volume_vanishes(int k) { return k % 2 != 0; }

VolumeEstimate lower_volume(const HeatGammaRegistry& reg, const ContactModel& mdl, int k) {
  const int n = mdl.n;
  if (reg.n != n) throw PreconditionError("lower_volume: registry and model dimensions differ");
  if (k < 1 || k > 2 * n + 2)
    throw PreconditionError("lower_volume: k must lie in [1, " + std::to_string(2 * n + 2) + "]");
  if (lower_volume_vanishes(k)) return {0.0, 0.0};
  const double cpow = std::pow(heat_length_constant_power(reg), double(k) / (2 * n + 2));
  const double pref = cpow / (4.0 * (n + 1)) / std::tgamma(k / 2.0);
  if (k == 2 * n + 2) {
    auto v = contact_volume(mdl);
    return {pref * reg.gamma0 * v.value, pref * reg.gamma0 * v.error};
  }
  if (k == 2 * n) {
    if (!reg.gamma1_prime) throw PreconditionError("lower_volume: unknown universal constant gamma_1'");
    auto v = curvature_integral(mdl);
    return {pref * *reg.gamma1_prime * v.value, pref * *reg.gamma1_prime * v.error};
  }
  throw PreconditionError("lower_volume: unknown universal constant gamma~_{" + std::to_string(n) + "," +
                          std::to_string(k) + "}");
}

VolumeEstimate area_dim3(const ContactModel& mdl) {
  if (mdl.dim() != 3) throw PreconditionError("area_dim3: needs a three-dimensional model");
  auto v = curvature_integral(mdl);
  const double c = 1.0 / (32.0 * std::sqrt(2.0));
  return {c * v.value, c * v.error};
}

}  // namespace hres
