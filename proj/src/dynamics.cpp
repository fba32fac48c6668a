#include "ssctm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>

#include "ssctm/errors.hpp"

namespace ssctm {

double sending(const FreewayModel& model, int mode, double n_k, int k) {
  return std::min(model.cell.v * n_k, model.modes[mode][k]);
}

double receiving(const FreewayModel& model, double n_k) {
  return model.cell.w * (model.cell.n_max - n_k);
}

std::vector<double> boundary_flows(const FreewayModel& model, int mode,
                                   const std::vector<double>& n,
                                   const std::vector<double>& r) {
  const int K = model.cell_count();
  std::vector<double> flows(K);
  for (int k = 0; k < K; ++k) {
    double demand = model.beta[k] * sending(model, mode, n[k], k);
    if (k + 1 < K) {
      double space = receiving(model, n[k + 1]) - r[k + 1];
      flows[k] = std::min(demand, std::max(space, 0.0));
    } else {
      flows[k] = demand;  // the last cell discharges freely
    }
  }
  return flows;
}

FlowVector flows(const FreewayModel& model, int mode,
                 const std::vector<double>& n, const std::vector<double>& r) {
  FlowVector fv;
  fv.f = boundary_flows(model, mode, n, r);
  fv.s.resize(fv.f.size());
  for (std::size_t k = 0; k < fv.f.size(); ++k)
    fv.s[k] = (1.0 / model.beta[k] - 1.0) * fv.f[k];
  return fv;
}

std::vector<double> vector_field(const FreewayModel& model, int mode,
                                 const std::vector<double>& n,
                                 const std::vector<double>& r) {
  const int K = model.cell_count();
  std::vector<double> flows = boundary_flows(model, mode, n, r);
  std::vector<double> g(K);
  for (int k = 0; k < K; ++k) {
    double in = (k == 0 ? 0.0 : flows[k - 1]) + r[k];
    g[k] = in - flows[k] / model.beta[k];
  }
  return g;
}

void clamp_state(const FreewayModel& model, std::vector<double>& n) {
  n[0] = std::max(n[0], 0.0);
  for (int k = 1; k < model.cell_count(); ++k)
    n[k] = std::clamp(n[k], 0.0, model.cell.n_max);
}

void advance(const FreewayModel& model, int mode, const std::vector<double>& r,
             double h, const StepConfig& cfg, std::vector<double>& n) {
  const int K = model.cell_count();
  auto eval = [&](const std::vector<double>& state) {
    std::vector<double> s = state;
    clamp_state(model, s);
    return vector_field(model, mode, s, r);
  };
  auto shifted = [&](const std::vector<double>& k, double scale) {
    std::vector<double> s(K);
    for (int j = 0; j < K; ++j) s[j] = n[j] + scale * k[j];
    return s;
  };

  if (cfg.method == StepMethod::kEuler) {
    std::vector<double> k1 = eval(n);
    for (int j = 0; j < K; ++j) n[j] += h * k1[j];
  } else {
    std::vector<double> k1 = eval(n);
    std::vector<double> k2 = eval(shifted(k1, h / 2));
    std::vector<double> k3 = eval(shifted(k2, h / 2));
    std::vector<double> k4 = eval(shifted(k3, h));
    for (int j = 0; j < K; ++j)
      n[j] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
  }

  double overshoot = std::max(0.0, -n[0]);
  for (int k = 1; k < K; ++k) {
    overshoot = std::max(overshoot, -n[k]);
    overshoot = std::max(overshoot, n[k] - model.cell.n_max);
  }
  if (overshoot > cfg.exit_tol) {
    std::ostringstream s;
    s << "integration step of " << h << " hr left the state space by "
      << overshoot << " veh (tolerance " << cfg.exit_tol
      << "); reduce dt or check the inflow vector";
    throw StepTooLargeError(s.str());
  }
  clamp_state(model, n);
}

std::vector<double> integrate_fixed_mode(const FreewayModel& model, int mode,
                                         const std::vector<double>& n0,
                                         const std::vector<double>& r, double T,
                                         const StepConfig& cfg) {
  std::vector<double> n = n0;
  clamp_state(model, n);
  double t = 0.0;
  while (t < T) {
    double h = std::min(cfg.dt, T - t);
    advance(model, mode, r, h, cfg, n);
    t += h;
  }
  return n;
}

}  // namespace ssctm
