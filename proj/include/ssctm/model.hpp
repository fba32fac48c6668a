#pragma once

#include <string>
#include <vector>

namespace ssctm {

// Geometry and fundamental-diagram parameters, shared by all cells.
// Units: l [mi], v [mi/hr], w [mi/hr], n_max [veh/mi].
struct CellParams {
  double l = 1.0;
  double v = 60.0;
  double w = 20.0;
  double n_max = 400.0;
};

// A freeway of K cells whose capacities switch between m modes according to
// a continuous-time Markov chain.
//
// Cell 1 (index 0) has an unbounded upstream buffer that absorbs the
// mainline queue; cells 2..K have densities in [0, n_max].  beta[k] is the
// mainline ratio of cell k: the fraction of its outflow continuing to cell
// k+1, the remainder leaving via the off-ramp.
struct FreewayModel {
  CellParams cell;
  std::vector<double> beta;                 // size K, each in (0, 1]
  std::vector<std::vector<double>> modes;   // modes[i][k]: capacity, veh/hr
  std::vector<std::vector<double>> lambda;  // lambda[i][j]: transition rates, 1/hr

  int cell_count() const { return static_cast<int>(beta.size()); }
  int mode_count() const { return static_cast<int>(modes.size()); }

  // Largest / smallest capacity of cell k across modes.
  double cap_max(int k) const;
  double cap_min(int k) const;

  // Density at which cell k's sending flow saturates in the best mode.
  double critical_density(int k) const { return cap_max(k) / cell.v; }

  // Largest sending flow the fundamental diagram can pass through a cell
  // boundary: the apex v*w/(v+w) * n_max of the triangular diagram.
  double sbarmax() const { return cell.v * cell.w / (cell.v + cell.w) * cell.n_max; }
};

struct ValidationReport {
  std::vector<std::string> errors;    // model unusable
  std::vector<std::string> warnings;  // usable but suspicious
  bool ok() const { return errors.empty(); }
};

// Checks dimensions, signs, rate-matrix structure (nonnegative off-diagonal,
// zero row sums, irreducibility) and fundamental-diagram consistency.
// Capacities above the Sbarmax bound are warnings, not errors: such a cell
// simply can never discharge at its nominal capacity.
ValidationReport validate(const FreewayModel& model);

// Cumulative mainline ratios and nominal per-cell flows for an inflow
// vector r: phi[k] = sum_{h<=k} (prod of beta over [h, k)) * r[h].
struct NominalFlows {
  std::vector<double> phi;  // veh/hr, size K

  // Product of beta over cells [h, k); equals 1 when h == k.
  double beta_prod(int h, int k) const;

  std::vector<double> beta_;  // copy used by beta_prod
};

NominalFlows nominal_flows(const FreewayModel& model, const std::vector<double>& r);

}  // namespace ssctm
