#pragma once

#include <cstdint>
#include <vector>

namespace capsim {

struct StaticAnalysisInput {
  int n_subch = 4;      // sub-channels per sub-frame
  int rri_ms = 50;      // resource reservation interval
  double t_fix_ms = 0;  // period over which relative slot locations stay fixed (= T_upd)

  int c() const { return n_subch * rri_ms; }
};

struct DynamicAnalysisInput {
  StaticAnalysisInput base;
  double x = 0;  // arrival proportion per second
  double y = 0;  // departure proportion per second
  int v0 = 0;    // initial vehicle count
};

/// Closed-form average AoI after convergence, static traffic flow.
double aoi_static(const StaticAnalysisInput& in);

/// Average AoI when every transmission is received: (rri - 1) / 2.
double aoi_ideal(int rri_ms);

struct OptimalRri {
  double theoretical_ms = 0; // positive root of the stationarity equation
  int practical_ms = 0;      // best feasible multiple of t_ost
};

/// Optimal RRI for fixed t_upd: theoretical value plus the discrete optimum
/// over multiples of t_ost not exceeding t_upd.
OptimalRri optimal_rri(double t_upd_ms, int n_subch, int t_ost_ms);

/// Closed-form average AoI under dynamic traffic flow (x = y).
double aoi_dynamic(const DynamicAnalysisInput& in);

/// Expected number of collision packets per RRI window under dynamic flow.
double collision_count_per_rri(const DynamicAnalysisInput& in);

/// Exact occupancy distribution when v vehicles choose uniformly among c
/// sub-channels: p1[i] is the probability of exactly i singly-occupied
/// sub-channels, p0[i] of exactly i empty sub-channels; b1/b0 are the
/// corresponding expectations. Computed with exact rational arithmetic.
struct OccupancyDistribution {
  int c = 0;
  int v = 0;
  std::vector<double> p1;
  std::vector<double> p0;
  double b1 = 0;
  double b0 = 0;
};

OccupancyDistribution occupancy_distribution(int c, int v);

/// Expected number of vehicles entering re-selection in one pass, given the
/// histogram n_j of sub-channels occupied by exactly j packets (index j).
/// At most 3 collision sub-channels are assisted and each colliding vehicle
/// re-selects with probability 0.5.
double reselect_count(const std::vector<std::int64_t>& multiplicity_histogram);

struct ConvergenceMargin {
  double min_value = 0;
  int argmin_free_subch = 0;   // n0 at the minimum
  int argmin_reselectors = 0;  // n_rs at the minimum
  bool all_positive = false;
};

/// Minimum of E[Z] = b1(n0, n_rs) over the admissible lattice
/// n0 in [2, c-1], n_rs in [1, ceil(v/2)]. Positive everywhere means the
/// expected collision count decreases at every re-selection step.
ConvergenceMargin convergence_margin(int c, int v);

/// Expected sizes of the six transmitter/receiver partition sets used by the
/// static AoI derivation, for v vehicles on the (n_subch, rri) grid.
struct SetExpectations {
  double same_subframe = 0;        // peers sharing the receiver's sub-frame
  double other_subframe = 0;       // peers in other sub-frames
  double transmitting_now = 0;     // vehicles transmitting in a given sub-frame
  double idle_now = 0;             // vehicles not transmitting in it
  double other_subframe_tx = 0;    // other-sub-frame peers transmitting now
  double other_subframe_idle = 0;  // other-sub-frame peers not transmitting now
};

SetExpectations set_expectations(int n_subch, int rri_ms, int v);

} // namespace capsim
