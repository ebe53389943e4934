#pragma once

// Heat-trace coefficients and the zeta-function dictionary. For an operator
// of order m on a manifold of homogeneous dimension Q,
//   Tr e^{-tP} ~ sum_j a_j t^{(j-Q)/m} + sum_{k>=1} b_k t^k log t   (t -> 0+),
// and zeta(s) = Tr P^{-s} has simple poles at sigma_j = (Q-j)/m with residue
// a_j / Gamma(sigma_j), poles at s = -k with residue (-1)^{k+1} k! b_k,
// finite part (-1)^k k! a_{Q+mk} at s = -k and zeta(0) = a_Q - dim ker P.

#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hres {

struct HeatExpansion {
  int m = 2;
  int Q = 4;
  std::map<int, double> a;  // j -> a_j
  std::map<int, double> b;  // k -> b_k, k >= 1
  int dim_ker = 0;
  /// Differential operators have a_{2j-1} = b_j = 0.
  bool differential = false;

  /// Throws PreconditionError for m < 1, negative dim_ker, b_k with k < 1,
  /// or nonzero entries forbidden by the differential flag.
  void validate() const;
  /// a_j if known (forced to 0 for odd j when `differential`).
  std::optional<double> a_coeff(int j) const;
  std::optional<double> b_coeff(int k) const;
  /// sigma_j = (Q - j) / m.
  double sigma(int j) const { return double(Q - j) / m; }
};

struct ZetaSingularity {
  enum class Kind { SimplePole, RegularValue };
  double location = 0.0;
  Kind kind = Kind::SimplePole;
  /// Residue (SimplePole) or finite part (RegularValue); empty when the
  /// required coefficient is unknown.
  std::optional<double> value;
  std::string source;  // e.g. "a_2", "b_1", "a_4 - dim_ker"
};

std::string to_string(ZetaSingularity::Kind k);

/// Every singularity of zeta with location >= floor, in decreasing order of
/// location. Poles whose residue is known to vanish are omitted; the value
/// at 0 and the finite parts at negative integers are always listed.
std::vector<ZetaSingularity> heat_to_zeta(const HeatExpansion& h, double floor = -2.0);

/// Res P^{-sigma} = Res_{s=sigma} zeta / m. Throws PreconditionError for m < 1.
double zeta_res_to_ncres(double residue_at_sigma, int m);

using TraceFn = std::function<double(double)>;

struct ExtractOptions {
  double t_min = 1e-3;
  double t_max = 1e-1;
  int points_per_decade = 40;
  bool log_terms = false;    // fit b_k t^k log t for 1 <= k <= depth
  bool differential = false; // drop odd j and log terms
};

struct HeatFit {
  HeatExpansion expansion;
  double max_relative_residual = 0.0;
  /// Largest change of a_j, j <= Q, under doubling of the grid density,
  /// relative to max|a|.
  double refinement_change = 0.0;
  int rank = 0;
  int columns = 0;
};

/// Least-squares fit of a_j t^{(j-Q)/m}, 0 <= j <= m * depth, on a geometric
/// grid. Rows are weighted by 1/|trace|, columns scaled to unit norm, and the
/// system is solved by column-pivoted QR. Throws PreconditionError for
/// depth outside [1, 6] or non-finite samples, and NumericalError for a
/// rank-deficient design.
HeatFit extract_heat(const TraceFn& trace, int m, int Q, int depth, const ExtractOptions& opt = {});
/// Same fit on tabulated samples (t, value); the refinement check is skipped.
HeatFit extract_heat(const std::vector<std::pair<double, double>>& samples, int m, int Q, int depth,
                     const ExtractOptions& opt = {});

/// t -> sum a_j t^{(j-Q)/m} + sum b_k t^k log t.
TraceFn synthesize_trace(const HeatExpansion& h);

/// The built-in model traces: "s3-sublaplacian" is e^t pi^2 / (16 t^2).
TraceFn builtin_trace(const std::string& name);

struct MellinCheck {
  double sigma = 0.0;
  double residue = 0.0;
  double error = 0.0;
};

/// Residue of Gamma(s)^{-1} int_0^1 t^{s-1} (trace - sum_{i<j} a_i t^{(i-Q)/m}) dt
/// at s = sigma_j, the subtracted a_i taken from `known`. With
/// F(t) = t^{sigma_j} (trace - ...) and s = sigma_j + eps,
///   eps Gamma(s) zeta(s) ~ G(eps) = int_0^1 F(u^{1/eps}) du,
/// evaluated at several eps in (0, 0.1] and extrapolated to eps = 0.
MellinCheck mellin_residue(const TraceFn& trace, const HeatExpansion& known, int j);

struct SpectrumSample {
  std::vector<double> eigenvalues;  // ascending, positive
  int m = 2;
  int Q = 4;

  /// Throws PreconditionError for non-positive or decreasing entries.
  void validate() const;
};

/// nu_0 = Res P^{-Q/m} / Q.
double weyl_nu0(double res_critical, int Q);

struct WeylFit {
  double nu0 = 0.0;
  double exponent = 0.0;  // estimate of m / Q
  std::size_t used = 0;
  /// Changes of nu0 and exponent when only the top quarter is fitted.
  double nu0_error = 0.0;
  double exponent_error = 0.0;
};

/// Regression of log lambda_k on log k over the top half of the sample:
/// lambda_k ~ (k / nu_0)^{m/Q}. Needs at least 100 eigenvalues.
WeylFit weyl_fit(const SpectrumSample& s);

/// lambda_k = (k / nu0)^{m/Q} for k = 1..count, each multiplied by
/// (1 + jitter * U(-1, 1)) with a seeded generator and then sorted.
SpectrumSample synthetic_weyl_spectrum(double nu0, int m, int Q, std::size_t count, double jitter = 0.0,
                                       unsigned long long seed = 0);

/// ind D = plus - minus.
double index_value(double plus_density_integral, double minus_density_integral);

/// One ascending positive decimal per line; '#' starts a comment.
std::vector<double> read_spectrum(std::istream& in);
std::vector<double> read_spectrum_file(const std::string& path);
/// Lines "t,value"; a non-numeric first line is treated as a header.
std::vector<std::pair<double, double>> read_trace_csv(std::istream& in);
std::vector<std::pair<double, double>> read_trace_csv_file(const std::string& path);

}  // namespace hres
