#include "ssctm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssctm/errors.hpp"
#include "ssctm/parallel.hpp"

namespace ssctm {

namespace {

int axis_count(double lo, double hi, double step) {
  if (step <= 0 || hi < lo) return 0;
  return static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

}  // namespace

int GridSpec::count1() const { return axis_count(r1_min, r1_max, r1_step); }
int GridSpec::count2() const { return axis_count(r2_min, r2_max, r2_step); }

const char* point_class_name(PointClass c) {
  switch (c) {
    case PointClass::kStable:
      return "stable";
    case PointClass::kUnstable:
      return "unstable";
    case PointClass::kAmbiguous:
      return "ambiguous";
    case PointClass::kOutOfDomain:
      return "out_of_domain";
  }
  return "out_of_domain";
}

RegionMap classify_region(const FreewayModel& model, const GridSpec& grid,
                          double onramp_cap, const BmiConfig& cfg, int jobs) {
  if (model.cell_count() != 2)
    throw Error("region classification expects a two-cell model");

  RegionMap map;
  map.grid = grid;
  const int n1 = grid.count1();
  const int n2 = grid.count2();
  map.points.resize(static_cast<std::size_t>(n1) * n2);

  parallel_for(n1 * n2, jobs, [&](int idx) {
    RegionPoint& pt = map.points[idx];
    pt.r1 = grid.r1(idx / n2);
    pt.r2 = grid.r2(idx % n2);
    if (pt.r2 > onramp_cap + 1e-9) {
      pt.cls = PointClass::kOutOfDomain;
      pt.margin_min = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    DecisionReport rep = decide(model, {pt.r1, pt.r2}, cfg);
    pt.margin_min = *std::min_element(rep.margins.begin(), rep.margins.end());
    switch (rep.verdict) {
      case Verdict::kStableCertified:
        pt.cls = PointClass::kStable;
        break;
      case Verdict::kUnstableCertified:
        pt.cls = PointClass::kUnstable;
        break;
      case Verdict::kAmbiguous:
        pt.cls = PointClass::kAmbiguous;
        break;
    }
  });

  for (const RegionPoint& pt : map.points) {
    switch (pt.cls) {
      case PointClass::kStable:
        ++map.stable;
        break;
      case PointClass::kUnstable:
        ++map.unstable;
        break;
      case PointClass::kAmbiguous:
        ++map.ambiguous;
        break;
      case PointClass::kOutOfDomain:
        ++map.out_of_domain;
        break;
    }
  }
  return map;
}

double throughput(const FreewayModel& model, const std::vector<double>& r) {
  const int K = model.cell_count();
  double j = 0.0;
  for (int k = 0; k < K; ++k) j += r[k] * model.cell.l * (K - k);
  return j;
}

namespace {

// One half-step refinement pass: probes the 3x3 half-step neighbourhood
// (clamped to the grid's domain and the on-ramp cap) of every accepted grid
// point close enough to the incumbent that a half-step move could beat it,
// and keeps the best probe satisfying `accept`.  Candidates are processed
// in grid order and reduced deterministically, so the result does not
// depend on the worker count.
template <class Accept>
void refine_frontier(const FreewayModel& model, const GridSpec& grid,
                     double onramp_cap, const BmiConfig& cfg, int jobs,
                     const std::vector<const RegionPoint*>& candidates,
                     Accept accept, double& best_j,
                     std::vector<double>& best_r) {
  if (best_r.empty() || candidates.empty()) return;
  const double h1 = grid.r1_step / 2;
  const double h2 = grid.r2_step / 2;
  const double base_j = best_j;

  struct Probe {
    double j = -std::numeric_limits<double>::infinity();
    double r1 = 0.0, r2 = 0.0;
  };
  std::vector<Probe> hits(candidates.size());
  parallel_for(static_cast<int>(candidates.size()), jobs, [&](int c) {
    const RegionPoint& pt = *candidates[c];
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        if (di == 0 && dj == 0) continue;
        const double r1 = pt.r1 + di * h1;
        const double r2 = pt.r2 + dj * h2;
        if (r1 < grid.r1_min || r1 > grid.r1_max) continue;
        if (r2 < grid.r2_min || r2 > grid.r2_max || r2 > onramp_cap + 1e-9)
          continue;
        const double j = throughput(model, {r1, r2});
        if (j <= base_j || j <= hits[c].j) continue;
        if (accept(decide(model, {r1, r2}, cfg))) hits[c] = {j, r1, r2};
      }
    }
  });
  for (const Probe& hit : hits) {
    if (hit.j > best_j) {
      best_j = hit.j;
      best_r = {hit.r1, hit.r2};
    }
  }
}

}  // namespace

ThroughputBounds throughput_bounds(const FreewayModel& model,
                                   const GridSpec& grid, double onramp_cap,
                                   const BmiConfig& cfg, int jobs) {
  RegionMap map = classify_region(model, grid, onramp_cap, cfg, jobs);

  ThroughputBounds bounds;
  bounds.j_upper = -std::numeric_limits<double>::infinity();
  bounds.j_lower = -std::numeric_limits<double>::infinity();
  for (const RegionPoint& pt : map.points) {
    if (pt.cls == PointClass::kOutOfDomain) continue;
    bool necessary_ok = pt.margin_min >= 0.0;
    double j = throughput(model, {pt.r1, pt.r2});
    if (necessary_ok && j > bounds.j_upper) {
      bounds.j_upper = j;
      bounds.arg_upper = {pt.r1, pt.r2};
    }
    if (pt.cls == PointClass::kStable && j > bounds.j_lower) {
      bounds.j_lower = j;
      bounds.arg_lower = {pt.r1, pt.r2};
    }
  }

  // A half-step move changes J by at most this much, so only grid points
  // within that margin of the incumbent can produce an improvement.
  const int K = model.cell_count();
  const double max_gain =
      model.cell.l * (K * grid.r1_step / 2 + (K - 1) * grid.r2_step / 2);
  std::vector<const RegionPoint*> upper_candidates, lower_candidates;
  for (const RegionPoint& pt : map.points) {
    if (pt.cls == PointClass::kOutOfDomain) continue;
    const double j = throughput(model, {pt.r1, pt.r2});
    if (pt.margin_min >= 0.0 && j + max_gain > bounds.j_upper)
      upper_candidates.push_back(&pt);
    if (pt.cls == PointClass::kStable && j + max_gain > bounds.j_lower)
      lower_candidates.push_back(&pt);
  }

  refine_frontier(
      model, grid, onramp_cap, cfg, jobs, upper_candidates,
      [](const DecisionReport& rep) {
        return *std::min_element(rep.margins.begin(), rep.margins.end()) >= 0.0;
      },
      bounds.j_upper, bounds.arg_upper);
  refine_frontier(
      model, grid, onramp_cap, cfg, jobs, lower_candidates,
      [](const DecisionReport& rep) {
        return rep.verdict == Verdict::kStableCertified;
      },
      bounds.j_lower, bounds.arg_lower);
  return bounds;
}

FreewayModel four_mode_family(double lam, double d_cap) {
  FreewayModel model;
  model.beta = {1.0, 1.0};
  const double full = 6000.0;
  model.modes = {{full, full},
                 {full - d_cap, full},
                 {full, full - d_cap},
                 {full - d_cap, full - d_cap}};
  model.lambda = {{-2 * lam, lam, lam, 0},
                  {1, -(1 + lam), 0, lam},
                  {1, 0, -(1 + lam), lam},
                  {0, 1, 1, -2}};
  return model;
}

std::vector<SweepRow> sweep_family(const std::vector<double>& lams,
                                   const std::vector<double>& d_caps,
                                   const GridSpec& grid, double onramp_cap,
                                   const BmiConfig& cfg, int jobs) {
  std::vector<SweepRow> rows;
  rows.reserve(lams.size() * d_caps.size());
  for (double lam : lams) {
    for (double d_cap : d_caps) {
      FreewayModel model = four_mode_family(lam, d_cap);
      ThroughputBounds b = throughput_bounds(model, grid, onramp_cap, cfg, jobs);
      rows.push_back({lam, d_cap, b.j_upper, b.j_lower});
    }
  }
  return rows;
}

}  // namespace ssctm
