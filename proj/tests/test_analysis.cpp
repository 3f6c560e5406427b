#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "capsim/analysis.hpp"

using namespace capsim;
using doctest::Approx;

TEST_CASE("static AoI closed form at hand-checked points") {
  // (N - 1)(T + a) / (2(c - 1)) + (c - N)(a - 1) / (2(c - 1))
  CHECK(aoi_static({4, 10, 200}) == Approx(954.0 / 78.0).epsilon(1e-12));
  CHECK(aoi_static({4, 50, 1000}) == Approx(12754.0 / 398.0).epsilon(1e-12));
  CHECK(aoi_static({4, 50, 50}) == Approx((3 * 100 + 196 * 49) / 398.0).epsilon(1e-12));
  CHECK(aoi_ideal(10) == Approx(4.5));
  CHECK(aoi_ideal(50) == Approx(24.5));
  CHECK_THROWS_AS(aoi_static({1, 1, 100}), std::invalid_argument);
  CHECK_THROWS_AS(aoi_ideal(0), std::invalid_argument);
}

TEST_CASE("optimal RRI: stationary point and discrete optimum") {
  const OptimalRri r = optimal_rri(400, 4, 5);
  CHECK(r.theoretical_ms == Approx((1.0 + std::sqrt(4.0 * 3.0 * 401.0)) / 4.0).epsilon(1e-12));
  CHECK(r.theoretical_ms == Approx(17.5921).epsilon(1e-4));
  CHECK(r.practical_ms == 20);

  // The discrete optimum really is the argmin over the feasible grid.
  const double at_opt = aoi_static({4, r.practical_ms, 400});
  for (int a = 5; a <= 400; a += 5)
    if (StaticAnalysisInput{4, a, 400}.c() > 1)
      CHECK(at_opt <= aoi_static({4, a, 400}) + 1e-12);

  CHECK_THROWS_AS(optimal_rri(3, 4, 5), std::invalid_argument);
}

namespace {

// Exhaustive enumeration of all c^v uniform assignments.
void brute_force(int c, int v, std::vector<double>& p1, std::vector<double>& p0) {
  p1.assign(c + 1, 0.0);
  p0.assign(c + 1, 0.0);
  const double total = std::pow(static_cast<double>(c), v);
  std::vector<int> pick(v, 0);
  std::vector<int> load(c, 0);
  for (;;) {
    load.assign(c, 0);
    for (int i = 0; i < v; ++i) ++load[pick[i]];
    int singles = 0, empties = 0;
    for (int ch = 0; ch < c; ++ch) {
      if (load[ch] == 1) ++singles;
      if (load[ch] == 0) ++empties;
    }
    p1[singles] += 1.0 / total;
    p0[empties] += 1.0 / total;
    int i = 0;
    while (i < v && ++pick[i] == c) pick[i++] = 0;
    if (i == v) break;
  }
}

} // namespace

TEST_CASE("occupancy distribution matches exhaustive enumeration") {
  for (int c = 1; c <= 8; ++c) {
    for (int v = 1; v <= 8; ++v) {
      const OccupancyDistribution d = occupancy_distribution(c, v);
      std::vector<double> p1, p0;
      brute_force(c, v, p1, p0);
      double sum1 = 0, sum0 = 0, b1 = 0, b0 = 0;
      for (int i = 0; i <= c; ++i) {
        REQUIRE(std::abs(d.p1[i] - p1[i]) < 1e-9);
        REQUIRE(std::abs(d.p0[i] - p0[i]) < 1e-9);
        sum1 += d.p1[i];
        sum0 += d.p0[i];
        b1 += i * p1[i];
        b0 += i * p0[i];
      }
      REQUIRE(sum1 == Approx(1.0).epsilon(1e-12));
      REQUIRE(sum0 == Approx(1.0).epsilon(1e-12));
      REQUIRE(std::abs(d.b1 - b1) < 1e-9);
      REQUIRE(std::abs(d.b0 - b0) < 1e-9);
    }
  }
  CHECK_THROWS_AS(occupancy_distribution(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(occupancy_distribution(500, 1), std::invalid_argument);
}

TEST_CASE("expected singleton and empty counts match the closed forms") {
  // E[singles] = v (1 - 1/c)^(v-1), E[empties] = c (1 - 1/c)^v.
  const OccupancyDistribution d = occupancy_distribution(50, 40);
  CHECK(d.b1 == Approx(40.0 * std::pow(49.0 / 50.0, 39)).epsilon(1e-10));
  CHECK(d.b0 == Approx(50.0 * std::pow(49.0 / 50.0, 40)).epsilon(1e-10));
}

TEST_CASE("re-selection expectation with the 3-entry assistance cap") {
  CHECK(reselect_count({}) == Approx(0.0));
  CHECK(reselect_count({0, 5}) == Approx(0.0)); // singles never re-select
  CHECK(reselect_count({0, 0, 2}) == Approx(2.0)); // 0.5 * 4 packets
  CHECK(reselect_count({0, 1, 1, 1}) == Approx(2.5)); // 0.5 * (2 + 3)
  CHECK(reselect_count({0, 0, 4}) == Approx(3.0)); // 3 * 8 / (2 * 4)
  CHECK(reselect_count({0, 0, 2, 2}) == Approx(3.75)); // 3 * 10 / (2 * 4)
}

TEST_CASE("convergence margin for the 50-channel 40-vehicle grid") {
  const ConvergenceMargin m = convergence_margin(50, 40);
  CHECK(m.all_positive);
  // Worst case: 20 re-selectors on 2 free channels, 20 * 2^-19.
  CHECK(m.min_value == Approx(20.0 / 524288.0).epsilon(1e-12));
  CHECK(m.argmin_free_subch == 2);
  CHECK(m.argmin_reselectors == 20);
  CHECK_THROWS_AS(convergence_margin(10, 10), std::invalid_argument);
  CHECK_THROWS_AS(convergence_margin(10, 1), std::invalid_argument);
}

TEST_CASE("dynamic-flow collision count, single-arrival regime") {
  // One arrival per RRI window: n_col = 2 (v0 - L_e) / c * L_a.
  DynamicAnalysisInput in;
  in.base = {4, 50, 200};
  in.x = in.y = 0.7;
  in.v0 = 20;
  const double la = 0.7 * 20 * 50 / 1000.0; // = L_e = 0.7, so A_r = 1
  const double expected = 2.0 * (20.0 - la) / 200.0 * la;
  CHECK(collision_count_per_rri(in) == Approx(expected).epsilon(1e-12));
  in.x = in.y = 0;
  CHECK(collision_count_per_rri(in) == Approx(0.0));
  in.x = -1;
  CHECK_THROWS_AS(collision_count_per_rri(in), std::invalid_argument);
}

TEST_CASE("dynamic AoI reduces to the static form and adds the collision term") {
  DynamicAnalysisInput in;
  in.base = {4, 50, 200};
  in.v0 = 20;
  in.x = in.y = 0;
  CHECK(aoi_dynamic(in) == Approx(aoi_static(in.base)).epsilon(1e-12));

  in.x = in.y = 0.7;
  const double ncol = collision_count_per_rri(in);
  const double penalty = (200.0 - 4.0) * 50.0 / (19.0 * 199.0) * ncol;
  CHECK(aoi_dynamic(in) == Approx(aoi_static(in.base) + penalty).epsilon(1e-12));
  CHECK(aoi_dynamic(in) > aoi_static(in.base));

  in.v0 = 1;
  CHECK_THROWS_AS(aoi_dynamic(in), std::invalid_argument);
  in.v0 = 300;
  CHECK_THROWS_AS(aoi_dynamic(in), std::invalid_argument);
}

TEST_CASE("partition set expectations") {
  const SetExpectations e = set_expectations(4, 10, 20);
  CHECK(e.same_subframe == Approx(3.0 * 19 / 39).epsilon(1e-12));
  CHECK(e.other_subframe == Approx(36.0 * 19 / 39).epsilon(1e-12));
  CHECK(e.transmitting_now == Approx(2.0));
  CHECK(e.idle_now == Approx(18.0));
  CHECK(e.other_subframe_tx == Approx(36.0 * 19 / (39.0 * 10)).epsilon(1e-12));
  CHECK(e.other_subframe_idle == Approx(36.0 * 19 * 8 / (39.0 * 9)).epsilon(1e-12));
  // The two sub-frame partitions cover all v - 1 peers.
  CHECK(e.same_subframe + e.other_subframe == Approx(19.0).epsilon(1e-12));
  CHECK_THROWS_AS(set_expectations(4, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(set_expectations(4, 10, 100), std::invalid_argument);
}
