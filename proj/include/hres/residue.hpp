#pragma once

// Finite-part integral of non-integer order symbols, the pole of gauged
// families at z = 0, and the residue density.
//
// A SymbolExpansion p_m, p_{m-1}, ..., p_{m-J} is realized as the full symbol
//   p = (1 - chi(||xi||)) sum_j p_{m-j},
// chi a fixed radial cutoff (1 on [0, 1/2], 0 on [1, inf)). With a second
// radial cutoff phi (1 on [0, 1], 0 on [2, inf)) and N >= Re m + Q,
//   L~(p) = int [p - (1 - phi) sum_{j<=N} p_{m-j}] dxi - sum_{j<=N} <tau_{m-j}, phi>.

#include <complex>
#include <optional>
#include <vector>

#include "hres/homog.hpp"

namespace hres {

/// Smooth radial step: 1 on [0, inner], 0 on [outer, inf).
class RadialStep {
 public:
  RadialStep(double inner, double outer);
  double operator()(double r) const;
  double inner() const { return inner_; }
  double outer() const { return outer_; }

 private:
  double inner_, outer_;
};

/// chi in the realization of a full symbol.
const RadialStep& realization_cutoff();
/// phi in the finite-part formula.
const RadialStep& finite_part_cutoff();

class SymbolExpansion {
 public:
  /// Components must have degrees m, m-1, ..., m-J on a common space.
  SymbolExpansion(std::vector<HomogeneousSymbol> components, double frame_jacobian = 1.0);

  const GradedSpace& space() const { return components_.front().space(); }
  Complex order() const { return components_.front().degree(); }
  const std::vector<HomogeneousSymbol>& components() const { return components_; }
  double frame_jacobian() const { return jacobian_; }

  /// The component of the given degree, if present.
  std::optional<HomogeneousSymbol> component_of_degree(Complex degree) const;
  /// Componentwise ||xi||^z p.
  SymbolExpansion gauged(Complex z) const;
  /// xi -> p(-xi) componentwise.
  SymbolExpansion reflected() const;
  /// Adds q to the component of equal degree (which must exist).
  SymbolExpansion plus_component(const HomogeneousSymbol& q) const;

  /// Value of the realized full symbol (1 - chi) sum p_{m-j} at xi.
  Complex full_symbol(std::span<const double> xi) const;

 private:
  std::vector<HomogeneousSymbol> components_;
  double jacobian_;
};

struct TildeLOptions {
  std::optional<int> N;  // default: max(-1, ceil(Re m + Q))
  PairOptions pair;
};

/// L~(p) for m not an integer, evaluated on the realized full symbol (a finite
/// sum, so no lower bound on the last degree is needed). Throws
/// PreconditionError for integer m and for N below Re m + Q.
Estimate<Complex> tilde_L(const SymbolExpansion& p, const TildeLOptions& opt = {});

/// Smallest admissible N.
int minimal_N(const SymbolExpansion& p);

/// Local trace density |psi'| (2 pi)^{-(d+1)} L~(p) + k_R, with the smoothing
/// remainder k_R supplied by the caller.
Estimate<Complex> local_trace_density(const SymbolExpansion& p, Complex remainder = 0.0, const TildeLOptions& opt = {});

/// z -> gauge(z) = ||xi||^z p.
class GaugedFamily {
 public:
  explicit GaugedFamily(SymbolExpansion base) : base_(std::move(base)) {}
  const SymbolExpansion& base() const { return base_; }
  SymbolExpansion at(Complex z) const { return z == Complex(0.0) ? base_ : base_.gauged(z); }

 private:
  SymbolExpansion base_;
};

struct LaurentFit {
  Complex residue;        // a in a/z + b + c z + ...
  Complex regular_value;  // b
  Complex slope;          // c
  double residue_error;   // |a - a'| with a' from every second sample
  double fit_residual;    // max |L~(z_i) - (a/z_i + b + c z_i)|
  double condition;       // condition number of the column-scaled design
  std::vector<Complex> samples;
  std::vector<Complex> values;
};

/// Laurent data of z -> L~(gauge(z)) at z = 0, from samples on the circle
/// z_k = radius exp(i pi (2k + 1) / M), k < M (never an integer order).
/// On these nodes the least-squares fit of a/z + sum_{n<M-1} b_n z^n is the
/// discrete Fourier transform, so a = mean(z_k L~_k) and b = mean(L~_k).
/// Throws PreconditionError for radius outside (0, 1) or M < 8 and not a
/// multiple of 2.
LaurentFit gauged_laurent(const GaugedFamily& fam, double radius = 0.4, int samples = 32,
                          const TildeLOptions& opt = {});

struct ResidueDensity {
  Complex value;
  double error = 0.0;
  bool jacobian_included = true;
};

/// c_P = |psi'| (2 pi)^{-(d+1)} int_{||xi||=1} p_{-Q} i_E dxi; zero without a degree -Q component.
ResidueDensity residue_density(const SymbolExpansion& p, const SphereOptions& opt = {});

/// Res P = sum w_i c_P(x_i). Throws PreconditionError for negative weights.
Complex global_res(const std::vector<std::pair<double, ResidueDensity>>& densities);

/// Res / (d + 2).
Complex dixmier_value(Complex res, const GradedSpace& space);

}  // namespace hres
