#include "ssctm/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "ssctm/markov.hpp"

namespace ssctm {

double FreewayModel::cap_max(int k) const {
  double m = modes[0][k];
  for (const auto& row : modes) m = std::max(m, row[k]);
  return m;
}

double FreewayModel::cap_min(int k) const {
  double m = modes[0][k];
  for (const auto& row : modes) m = std::min(m, row[k]);
  return m;
}

ValidationReport validate(const FreewayModel& model) {
  ValidationReport rep;
  auto err = [&rep](const std::ostringstream& s) { rep.errors.push_back(s.str()); };
  auto warn = [&rep](const std::ostringstream& s) { rep.warnings.push_back(s.str()); };
  auto msg = [](auto&&... parts) {
    std::ostringstream s;
    (s << ... << parts);
    return s;
  };

  const int K = model.cell_count();
  const int m = model.mode_count();

  if (K < 1) err(msg("model must have at least one cell"));
  if (m < 1) err(msg("model must have at least one mode"));

  if (model.cell.l <= 0) err(msg("cell length l must be positive"));
  if (model.cell.v <= 0) err(msg("free-flow speed v must be positive"));
  if (model.cell.w <= 0) err(msg("congestion-wave speed w must be positive"));
  if (model.cell.n_max <= 0) err(msg("jam density n_max must be positive"));
  if (!rep.errors.empty()) return rep;

  for (int k = 0; k < K; ++k) {
    if (!(model.beta[k] > 0.0) || model.beta[k] > 1.0)
      err(msg("beta[", k + 1, "] = ", model.beta[k], " outside (0, 1]"));
  }

  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(model.modes[i].size()) != K) {
      err(msg("mode ", i + 1, " has ", model.modes[i].size(),
              " capacities, expected ", K));
      return rep;  // shape is broken; later checks would index out of range
    }
    for (int k = 0; k < K; ++k) {
      if (model.modes[i][k] < 0)
        err(msg("capacity of cell ", k + 1, " in mode ", i + 1, " is negative"));
    }
  }
  if (static_cast<int>(model.lambda.size()) != m) {
    err(msg("lambda must have one row per mode"));
    return rep;
  }
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(model.lambda[i].size()) != m) {
      err(msg("lambda must be square (one column per mode)"));
      return rep;
    }
  }
  if (!rep.errors.empty()) return rep;

  for (int k = 0; k < K; ++k) {
    if (model.cap_max(k) <= 0)
      err(msg("cell ", k + 1, " has no mode with positive capacity"));
  }

  double scale = 1.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) scale = std::max(scale, std::abs(model.lambda[i][j]));
  for (int i = 0; i < m; ++i) {
    double row_sum = 0;
    for (int j = 0; j < m; ++j) {
      if (i != j && model.lambda[i][j] < 0)
        err(msg("lambda[", i + 1, "][", j + 1, "] is negative"));
      row_sum += model.lambda[i][j];
    }
    if (std::abs(row_sum) > 1e-9 * scale)
      err(msg("lambda row ", i + 1, " sums to ", row_sum, ", expected 0"));
  }
  if (rep.errors.empty() && !is_ergodic(model.lambda))
    rep.errors.push_back("lambda is not irreducible: some mode cannot reach some other mode");

  // Capacities beyond the fundamental-diagram apex break the usual
  // sending-vs-receiving balance at critical density; the model stays
  // usable, but the certificates become more conservative.
  const double bound = model.sbarmax();
  for (int k = 0; k < K; ++k) {
    if (model.cap_max(k) > bound + 1e-9)
      warn(msg("cell ", k + 1, ": capacity ", model.cap_max(k),
               " veh/hr exceeds the Sbarmax bound v*w/(v+w)*n_max = ", bound,
               " veh/hr; receiving flow cannot absorb a full-capacity sending"
               " flow at critical density"));
  }

  return rep;
}

double NominalFlows::beta_prod(int h, int k) const {
  double p = 1.0;
  for (int j = h; j < k; ++j) p *= beta_[j];
  return p;
}

NominalFlows nominal_flows(const FreewayModel& model, const std::vector<double>& r) {
  const int K = model.cell_count();
  NominalFlows nf;
  nf.beta_ = model.beta;
  nf.phi.assign(K, 0.0);
  // phi[k] = beta[k-1] * phi[k-1] + r[k]: inflow surviving all upstream ramps.
  double carried = 0.0;
  for (int k = 0; k < K; ++k) {
    carried = (k == 0 ? 0.0 : model.beta[k - 1] * carried) + r[k];
    nf.phi[k] = carried;
  }
  return nf;
}

}  // namespace ssctm
