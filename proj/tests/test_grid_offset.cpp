#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <stdexcept>

#include "capsim/grid.hpp"
#include "capsim/offset.hpp"

using namespace capsim;

namespace {

GridConfig make_grid(int n_subch, int rri, int t_ost, int t_upd) {
  GridConfig g;
  g.n_subch_per_subframe = n_subch;
  g.rri_ms = rri;
  g.t_ost_ms = t_ost;
  g.t_upd_ms = t_upd;
  g.bandwidth_subchannels = n_subch;
  g.validate();
  return g;
}

} // namespace

TEST_CASE("grid validation rejects inconsistent parameters") {
  CHECK_THROWS_AS(make_grid(0, 10, 10, 100), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(4, 15, 10, 100), std::invalid_argument); // rri % t_ost
  CHECK_THROWS_AS(make_grid(4, 10, 10, 105), std::invalid_argument); // t_upd % t_ost
  CHECK_THROWS_AS(make_grid(4, 200, 10, 100), std::invalid_argument); // t_upd < rri
  CHECK_NOTHROW(make_grid(4, 50, 10, 200));
}

TEST_CASE("period index starts at one and advances with t_upd") {
  const GridConfig g = make_grid(4, 10, 10, 200);
  CHECK(period_index_of(0, g) == 1);
  CHECK(period_index_of(199, g) == 1);
  CHECK(period_index_of(200, g) == 2);
  CHECK(period_index_of(1999, g) == 10);
  CHECK_THROWS_AS(period_index_of(-1, g), std::invalid_argument);
  CHECK(subchannels_per_rri(g) == 40);
}

TEST_CASE("worked offset example: subframe 2, subchannel 2, period 9") {
  // Shift = 2 * (9 - 1) = 16, within a 10 ms block: (2 + 16) mod 10 = 8.
  const GridConfig g = make_grid(4, 10, 10, 200);
  const ResourceLocation real = virtual_to_real({2, 2}, 9, g);
  CHECK(real.subframe == 8);
  CHECK(real.subchannel == 2);
  CHECK(real_to_virtual(real, 9, g) == ResourceLocation{2, 2});
}

TEST_CASE("first period is the identity mapping") {
  const GridConfig g = make_grid(4, 50, 10, 200);
  for (int sf = 0; sf < 50; sf += 7)
    for (int ch = 0; ch < 4; ++ch)
      CHECK(virtual_to_real({sf, ch}, 1, g) == ResourceLocation{sf, ch});
}

TEST_CASE("mapping preserves the t_ost block and the sub-channel") {
  const GridConfig g = make_grid(4, 50, 10, 200);
  for (std::int64_t period = 1; period <= 25; ++period)
    for (int sf = 0; sf < 50; ++sf)
      for (int ch = 0; ch < 4; ++ch) {
        const ResourceLocation r = virtual_to_real({sf, ch}, period, g);
        CHECK(r.subframe / 10 == sf / 10);
        CHECK(r.subchannel == ch);
      }
}

TEST_CASE("offset mapping is a bijection for every window size up to 100") {
  for (int t_ost : {1, 2, 4, 5, 10, 20, 25, 50, 100}) {
    for (int rri = t_ost; rri <= 100; rri += t_ost) {
      if (rri % t_ost != 0) continue;
      for (int n_subch : {1, 2, 3, 7, 10}) {
        GridConfig g;
        g.n_subch_per_subframe = n_subch;
        g.rri_ms = rri;
        g.t_ost_ms = t_ost;
        g.t_upd_ms = rri;
        g.bandwidth_subchannels = n_subch;
        g.validate();
        // Periods beyond one full shift cycle add nothing new.
        for (std::int64_t period = 1; period <= t_ost + 1; ++period) {
          std::set<std::pair<int, int>> image;
          for (int sf = 0; sf < rri; ++sf)
            for (int ch = 0; ch < n_subch; ++ch) {
              const ResourceLocation r = virtual_to_real({sf, ch}, period, g);
              REQUIRE(r.subframe >= 0);
              REQUIRE(r.subframe < rri);
              image.insert({r.subframe, r.subchannel});
              REQUIRE(real_to_virtual(r, period, g) == ResourceLocation{sf, ch});
            }
          REQUIRE(image.size() == static_cast<std::size_t>(rri) * n_subch);
        }
      }
    }
  }
}

TEST_CASE("effective area covers the latest whole shift periods") {
  const GridConfig g = make_grid(4, 50, 10, 200);
  SUBCASE("aligned time") {
    const EffectiveArea a = effective_area_at(100, 50, g);
    CHECK(a.start_ms == 50);
    CHECK(a.end_ms == 100);
  }
  SUBCASE("mid shift period truncates forward") {
    const EffectiveArea a = effective_area_at(107, 50, g);
    CHECK(a.start_ms == 50);
    CHECK(a.end_ms == 100);
  }
  SUBCASE("straddling an update boundary clamps back") {
    // Unclamped candidate [160, 210) crosses t = 200.
    const EffectiveArea a = effective_area_at(212, 50, g);
    CHECK(a.end_ms == 200);
    CHECK(a.start_ms == 150);
  }
  SUBCASE("too little history throws") {
    CHECK_THROWS_AS(effective_area_at(30, 50, g), std::invalid_argument);
  }
}

TEST_CASE("effective area invariants hold for arbitrary times") {
  const GridConfig g = make_grid(4, 50, 10, 200);
  for (std::int64_t t = 60; t < 3000; ++t) {
    const EffectiveArea a = effective_area_at(t, 50, g);
    CHECK(a.end_ms - a.start_ms == 50);
    CHECK(a.start_ms % 10 == 0);
    CHECK(a.end_ms <= t);
    CHECK(a.start_ms >= 0);
    // Entirely inside one update period.
    CHECK(a.start_ms / 200 == (a.end_ms - 1) / 200);
  }
}
