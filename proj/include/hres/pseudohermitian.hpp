#pragma once

// Contact-volume integration on the standard pseudohermitian spheres
// S^{2n+1} in C^{n+1}, the heat-coefficient registry, the lower-dimensional
// volumes Vol^{(k)} and the three-dimensional area functional.

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hres {

/// A chart given by an embedding of a parameter box into R^{2n+2}. The
/// embedding is evaluated on complex arguments so that its Jacobian is
/// obtained by complex-step differentiation (exact to rounding for the
/// analytic maps used here).
struct Chart {
  using Embed = std::function<void(std::span<const std::complex<double>>, std::span<std::complex<double>>)>;

  std::string name;
  std::vector<std::pair<double, double>> box;
  /// Interior breakpoints per parameter; each panel gets its own Gauss rule.
  std::vector<std::vector<double>> breaks;
  /// Gauss-Legendre nodes per panel and parameter at resolution 1.
  std::vector<int> nodes;
  Embed embed;
  /// Partition-of-unity weight at an embedded point.
  std::function<double(std::span<const double>)> weight;
};

struct ContactModel {
  std::string name;
  int n = 1;  // dim = 2n + 1
  std::vector<Chart> atlas;
  /// theta = theta_scale * (1/2) sum_j (x_j dy_j - y_j dx_j).
  double theta_scale = 1.0;
  /// Scalar curvature at an embedded point.
  std::function<double(std::span<const double>)> curvature;
  std::optional<double> known_volume;

  int dim() const { return 2 * n + 1; }
};

/// Stereographic charts from the north and south poles of S^{2n+1}, in
/// hyperspherical coordinates on a ball, with a smooth partition in the last
/// ambient coordinate (or weight 1 everywhere when `partition` is false).
Chart stereographic_chart(int n, bool from_north, bool partition = true);
/// (eta, phi_1, phi_2) -> (cos eta e^{i phi_1}, sin eta e^{i phi_2}) on S^3; weight 1.
Chart hopf_chart();

/// Standard S^{2n+1} with R = 4 (n = 1) or the supplied constant curvature,
/// covered by the two stereographic charts or (n = 1) by the Hopf chart.
ContactModel standard_sphere(int n, const std::string& atlas = "stereographic", double theta_scale = 1.0,
                             std::optional<double> curvature = std::nullopt);

/// Named models: "s3-standard" and "s3-hopf".
ContactModel builtin_model(const std::string& name);
std::vector<std::string> builtin_model_names();

/// JSON model: {"name", "n", "charts": [...names...], "partition": bool,
/// "theta_scale", "curvature": number, "known_volume"}. Chart names are
/// "stereo-north", "stereo-south" and "hopf". Throws ConfigError.
ContactModel load_model_json(const std::string& text);
ContactModel load_model_file(const std::string& path);

/// Throws ConfigError unless the partition weights sum to 1 at a fixed set
/// of sample points of the sphere.
void check_partition(const ContactModel& mdl);

struct VolumeEstimate {
  double value = 0.0;
  double error = 0.0;  // difference between resolutions 1 and 1.5
};

/// Coefficient of dtheta^n ^ theta in du_1 ^ ... ^ du_{2n+1} from the pulled
/// back theta (length 2n+1) and dtheta (antisymmetric, row-major):
///   n! sum_i (-1)^{i+1} theta_i Pf(F with row and column i removed).
double contact_density(std::span<const double> theta, std::span<const double> dtheta, int n);
double pfaffian(std::span<const double> a, int size);

/// int_M f dtheta^n ^ theta over the atlas, oriented to be positive.
/// Throws ConfigError for a bad partition or a degenerate contact form.
VolumeEstimate integrate_contact(const ContactModel& mdl, const std::function<double(std::span<const double>)>& f,
                                 double resolution = 1.0);
VolumeEstimate contact_volume(const ContactModel& mdl);
VolumeEstimate curvature_integral(const ContactModel& mdl);

struct HeatGammaRegistry {
  int n = 1;
  double gamma0 = 0.0;
  /// Coefficient of R in the next heat invariant (gamma_{11}' for n = 1).
  std::optional<double> gamma1_prime;

  /// gamma_{10} = 1/16, gamma_{11}' = 1/64.
  static HeatGammaRegistry s3_reference();
};

/// (gamma0, gamma1') from A_0 = gamma0 int dtheta^n ^ theta and
/// A_2 = gamma1' int R dtheta^n ^ theta. Throws DomainError for a
/// vanishing denominator.
HeatGammaRegistry gamma_from_heat(double A0, double A2, const ContactModel& mdl);

/// c_n^{2n+2} = 4(n+1) / gamma0 on the heat side.
double heat_length_constant_power(const HeatGammaRegistry& reg);
/// gamma_1'' = c_1^2 / 8 * gamma_1' = gamma_1' / sqrt(8 gamma_0) for n = 1.
double area_constant(const HeatGammaRegistry& reg);

/// Vol^{(k)} vanishes for odd k.
bool lower_volume_vanishes(int k);
/// Vol^{(k)} = c_n^k / (4(n+1)) Gamma(k/2)^{-1} int gamma~_{nk} dtheta^n ^ theta,
/// with gamma~ = gamma0 for k = 2n+2 and gamma1' R for k = 2n. Odd k gives 0.
/// Throws PreconditionError for k outside [1, 2n+2], a model/registry
/// dimension mismatch, or an intermediate k whose constant is unknown.
VolumeEstimate lower_volume(const HeatGammaRegistry& reg, const ContactModel& mdl, int k);

/// Area = int R dtheta ^ theta / (32 sqrt 2). Throws PreconditionError unless dim = 3.
VolumeEstimate area_dim3(const ContactModel& mdl);

}  // namespace hres
