#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "capsim/metrics.hpp"

using namespace capsim;
using doctest::Approx;

TEST_CASE("ledger averages the sawtooth age over pair-alive time") {
  AoiLedger l;
  l.reset(4, 0);
  l.open_pair(0, 1, 0);
  l.record_reception(0, 1, 10); // ages 1..9 then reset: 45 over 10 ms
  l.record_reception(0, 1, 20); // another 45 over 10 ms
  const double avg = l.finalize(25); // tail ages 1..5: 15 over 5 ms
  CHECK(l.pair_milliseconds() == 25);
  CHECK(avg == Approx((45.0 + 45.0 + 15.0) / 25.0));
  CHECK(avg == Approx(4.2));
}

TEST_CASE("instantaneous age tracks the last reception") {
  AoiLedger l;
  l.reset(4, 0);
  l.open_pair(2, 3, 5);
  CHECK(l.age_at(2, 3, 5) == 0);
  CHECK(l.age_at(2, 3, 12) == 7);
  l.record_reception(2, 3, 12);
  CHECK(l.age_at(2, 3, 15) == 3);
  CHECK(l.age_at(3, 2, 15) == 0); // never opened: reads closed
}

TEST_CASE("closing a pair folds its final gap, closed pairs stay inert") {
  AoiLedger l;
  l.reset(4, 0);
  l.open_pair(0, 1, 0);
  l.close_pair(0, 1, 10); // ages 1..10: 55 over 10 ms
  l.record_reception(0, 1, 15); // ignored, pair is closed
  CHECK(l.finalize(100) == Approx(5.5));
  CHECK(l.pair_milliseconds() == 10);
}

TEST_CASE("vehicle open and close touch both pair directions") {
  AoiLedger l;
  l.reset(4, 0);
  const std::vector<int> alive{0, 1, 2};
  l.open_vehicle(2, alive, 0);
  CHECK(l.age_at(2, 0, 7) == 7);
  CHECK(l.age_at(0, 2, 7) == 7);
  CHECK(l.age_at(0, 1, 7) == 0); // untouched pair
  l.close_vehicle(2, alive, 10);
  // Four pairs, each folding ages 1..10.
  CHECK(l.finalize(10) == Approx(5.5));
  CHECK(l.pair_milliseconds() == 40);
}

TEST_CASE("empty ledger reports zero") {
  AoiLedger l;
  l.reset(4, 0);
  CHECK(l.finalize(1000) == Approx(0.0));
  CHECK(l.pair_milliseconds() == 0);
}

TEST_CASE("CBR meter is a trailing-window busy fraction") {
  CbrMeter m;
  m.configure(4, 2); // 4 ms window, 2 sub-channels: 8 observations
  CHECK(m.value() == Approx(0.0));
  m.push(2);
  CHECK(m.value() == Approx(1.0));
  m.push(0);
  m.push(0);
  m.push(0);
  CHECK(m.value() == Approx(0.25));
  // Window full: the oldest (busy) sub-frame falls out.
  m.push(0);
  CHECK(m.value() == Approx(0.0));
  m.push(1);
  CHECK(m.value() == Approx(0.125));
  CHECK_THROWS_AS(m.configure(0, 2), std::invalid_argument);
}

TEST_CASE("error classification precedence: hd, then collision, then phy") {
  CHECK(classify_error(false, 1, true) == ErrorKind::none);
  CHECK(classify_error(true, 3, true) == ErrorKind::none);
  CHECK(classify_error(true, 1, false) == ErrorKind::hd);
  CHECK(classify_error(true, 2, false) == ErrorKind::hd);
  CHECK(classify_error(false, 2, false) == ErrorKind::collision);
  CHECK(classify_error(false, 5, false) == ErrorKind::collision);
  CHECK(classify_error(false, 1, false) == ErrorKind::phy);
}

TEST_CASE("report rates and serialization") {
  MetricsReport r;
  r.scheme = "caps";
  r.vehicles = 20;
  r.rri_ms = 50;
  r.t_upd_ms = 200;
  r.opportunities = 1000;
  r.successes = 900;
  r.collision_errors = 60;
  r.hd_errors = 30;
  r.phy_errors = 10;
  r.n_col = 4;
  r.n_ht = 1;
  r.n_cd = 8;
  r.n_fd = 2;
  r.seed = 7;
  r.finalize_rates();
  CHECK(r.collision_error_rate == Approx(0.06));
  CHECK(r.hd_error_rate == Approx(0.03));
  CHECK(r.phy_error_rate == Approx(0.01));
  CHECK(r.packet_loss_ratio == Approx(0.10));
  CHECK(r.r_ht == Approx(0.25));
  CHECK(r.r_fd == Approx(0.25));

  CHECK(MetricsReport::csv_header() ==
        "scheme,v,rri,t_upd,cbr,avg_aoi,collision_rate,hd_rate,plr,r_ht,r_fd,d_farther,seed");
  const std::string row = r.csv_row();
  CHECK(row.substr(0, 18) == "caps,20,50,200,0,0");
  CHECK(row.find(",0.06,0.03,0.1,") != std::string::npos);
  CHECK(row.back() == '7');

  const std::string j = r.to_json();
  CHECK(j.find("\"scheme\": \"caps\"") != std::string::npos);
  CHECK(j.find("\"plr\": 0.1") != std::string::npos);

  MetricsReport empty;
  empty.finalize_rates(); // zero counters must not divide by zero
  CHECK(empty.packet_loss_ratio == Approx(0.0));
  CHECK(empty.r_fd == Approx(0.0));
}
