#pragma once

#include <string>
#include <vector>

#include "ssctm/model.hpp"
#include "ssctm/stability.hpp"

namespace ssctm {

// Rectangular inflow grid for two-cell studies (veh/hr).
struct GridSpec {
  double r1_min = 0.0, r1_max = 6000.0, r1_step = 30.0;
  double r2_min = 0.0, r2_max = 3000.0, r2_step = 30.0;

  int count1() const;
  int count2() const;
  double r1(int i) const { return r1_min + i * r1_step; }
  double r2(int j) const { return r2_min + j * r2_step; }
};

enum class PointClass { kStable, kUnstable, kAmbiguous, kOutOfDomain };

const char* point_class_name(PointClass c);  // csv labels

struct RegionPoint {
  double r1 = 0.0, r2 = 0.0;
  PointClass cls = PointClass::kOutOfDomain;
  double margin_min = 0.0;  // min necessary margin; NaN when out of domain
};

struct RegionMap {
  GridSpec grid;
  std::vector<RegionPoint> points;  // row-major: r1 outer, r2 inner
  int stable = 0, unstable = 0, ambiguous = 0, out_of_domain = 0;
};

// Classifies every grid point with decide(); points whose on-ramp inflow
// exceeds onramp_cap are marked out-of-domain and not decided.  Only
// two-cell models are supported (the grid is two-dimensional).
RegionMap classify_region(const FreewayModel& model, const GridSpec& grid,
                          double onramp_cap, const BmiConfig& cfg = {},
                          int jobs = 1);

// Throughput J(r) = sum_k r_k * (distance from cell k to the exit); for a
// two-cell freeway this is 2*l*r1 + l*r2.
double throughput(const FreewayModel& model, const std::vector<double>& r);

struct ThroughputBounds {
  double j_upper = 0.0;  // max J over points satisfying the necessary cond.
  double j_lower = 0.0;  // max J over certified-stable points
  std::vector<double> arg_upper;
  std::vector<double> arg_lower;
};

// Grid maxima of J over the necessary-satisfying and certified-stable
// sets, then one refinement pass probing the half-step 3x3 neighbourhood
// of every accepted grid point close enough to beat the incumbent.
ThroughputBounds throughput_bounds(const FreewayModel& model,
                                   const GridSpec& grid, double onramp_cap,
                                   const BmiConfig& cfg = {}, int jobs = 1);

// Four-mode incident family: each cell independently loses d_cap of
// capacity in its incident modes; lam scales the incident arrival rates.
FreewayModel four_mode_family(double lam, double d_cap);

struct SweepRow {
  double lam = 0.0;
  double d_cap = 0.0;
  double j_upper = 0.0;
  double j_lower = 0.0;
};

// Throughput bounds across the family grid; rows ordered lam-major.
std::vector<SweepRow> sweep_family(const std::vector<double>& lams,
                                   const std::vector<double>& d_caps,
                                   const GridSpec& grid, double onramp_cap,
                                   const BmiConfig& cfg = {}, int jobs = 1);

}  // namespace ssctm
