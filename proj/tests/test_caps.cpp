#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "capsim/protocol_caps.hpp"

using namespace capsim;

namespace {

GridConfig small_grid(int n_subch = 4, int rri = 10, int t_ost = 10, int t_upd = 200) {
  GridConfig g;
  g.n_subch_per_subframe = n_subch;
  g.rri_ms = rri;
  g.t_ost_ms = t_ost;
  g.t_upd_ms = t_upd;
  g.bandwidth_subchannels = n_subch;
  return g;
}

SlotView busy(std::int64_t t, int ch, SlotStatus st, double energy = -60.0) {
  return SlotView{t, ch, st, energy};
}

} // namespace

TEST_CASE("collaboration entry width") {
  CHECK(collab_entry_bits(50, 4) == 8); // 6 + 2
  CHECK(collab_entry_bits(10, 4) == 6); // 4 + 2
  CHECK(collab_entry_bits(100, 2) == 8);
  CHECK(collab_entry_bits(1, 1) == 0);
}

TEST_CASE("transmission slots follow the per-period mapping") {
  CapsVehicleState v(0, small_grid());
  CHECK_FALSE(v.transmits_at(2)); // nothing selected yet
  v.force_resource({2, 2});
  // Period 1 is the identity: sub-frame 2 of every window.
  CHECK(v.transmits_at(2));
  CHECK(v.transmits_at(192));
  CHECK_FALSE(v.transmits_at(3));
  // Period 9 shifts sub-channel 2 by 16 within its block: sub-frame 8.
  CHECK(*v.tx_subframe(9) == 8);
  CHECK(v.transmits_at(1608));
  CHECK_FALSE(v.transmits_at(1602));
}

TEST_CASE("suspected slots are cached oldest-first with a cap of three") {
  CapsVehicleState v(0, small_grid());
  v.sense(busy(11, 0, SlotStatus::decoded), 11);
  CHECK(v.pending_assist_count() == 0); // decoded slots need no help
  v.sense(busy(12, 1, SlotStatus::suspected_collision), 12);
  v.sense(busy(13, 2, SlotStatus::suspected_collision), 13);
  v.sense(busy(15, 3, SlotStatus::suspected_collision), 15);
  CHECK(v.pending_assist_count() == 3);
  v.sense(busy(16, 0, SlotStatus::suspected_collision), 16);
  CHECK(v.pending_assist_count() == 3); // cap keeps the oldest three
  v.sense(busy(17, 0, SlotStatus::hd_deaf), 17);
  CHECK(v.pending_assist_count() == 3);
}

TEST_CASE("collaboration message encodes offsets into the preceding window") {
  CapsVehicleState v(0, small_grid());
  v.sense(busy(12, 1, SlotStatus::suspected_collision), 12);
  v.sense(busy(15, 3, SlotStatus::suspected_collision), 15);
  const CollabMessage msg = v.build_collab(20);
  REQUIRE(msg.entries.size() == 2);
  CHECK(msg.entries[0].subframe_offset == 2); // 12 relative to window start 10
  CHECK(msg.entries[0].subchannel == 1);
  CHECK(msg.entries[1].subframe_offset == 5);
  CHECK(msg.entries[1].subchannel == 3);
  CHECK(msg.encoded_bits == 2 * collab_entry_bits(10, 4));
  CHECK(v.pending_assist_count() == 0);
  CHECK(v.build_collab(20).empty());
}

TEST_CASE("suspects older than one window are dropped, not emitted") {
  CapsVehicleState v(0, small_grid());
  v.sense(busy(5, 1, SlotStatus::suspected_collision), 5);
  const CollabMessage msg = v.build_collab(20); // assistance range is [10, 20)
  CHECK(msg.empty());
}

TEST_CASE("an emitted suspect is not re-cached while suppression holds") {
  CapsVehicleState v(0, small_grid());
  v.sense(busy(12, 1, SlotStatus::suspected_collision), 12);
  CHECK_FALSE(v.build_collab(20).empty());
  // Same slot observed again (duplicate delivery path): suppressed.
  v.sense(busy(12, 1, SlotStatus::suspected_collision), 20);
  CHECK(v.pending_assist_count() == 0);
  // A different resource is still cached.
  v.sense(busy(13, 1, SlotStatus::suspected_collision), 20);
  CHECK(v.pending_assist_count() == 1);
}

TEST_CASE("collaboration handling resolves own slots and fires once") {
  CapsVehicleState v(1, small_grid());
  v.force_resource({2, 1});
  v.record_own_tx(12, 1);

  CollabMessage msg;
  msg.entries.push_back({2, 1}); // sender at 20 points back to slot 12

  SUBCASE("foreign entries are ignored") {
    std::mt19937_64 rng(1);
    CollabMessage other;
    other.entries.push_back({5, 0});
    CHECK(v.handle_collab(other, 20, rng).decision == CollabDecision::not_mine);
  }

  SUBCASE("the coin is fair and each slot is decided once") {
    int reselects = 0;
    for (int seed = 0; seed < 1000; ++seed) {
      CapsVehicleState w(1, small_grid());
      w.record_own_tx(12, 1);
      std::mt19937_64 rng(seed);
      const CollabResult r = w.handle_collab(msg, 20, rng);
      REQUIRE(r.decision != CollabDecision::not_mine);
      if (r.decision == CollabDecision::reselect) {
        CHECK(r.slot_ms == 12);
        CHECK(r.subchannel == 1);
        ++reselects;
      }
      // A second helper reporting the same slot must not trigger again.
      const CollabResult again = w.handle_collab(msg, 20, rng);
      CHECK(again.decision == CollabDecision::keep);
    }
    CHECK(reselects > 430);
    CHECK(reselects < 570);
  }
}

TEST_CASE("selection avoids occupied slots") {
  CapsVehicleState v(0, small_grid(2, 10, 10, 200));
  std::mt19937_64 rng(7);
  // Fill the whole first window except sub-frame 5, sub-channel 1.
  for (std::int64_t t = 0; t < 10; ++t)
    for (int ch = 0; ch < 2; ++ch)
      if (!(t == 5 && ch == 1)) v.sense(busy(t, ch, SlotStatus::decoded), t);
  for (int trial = 0; trial < 20; ++trial) {
    const ResourceLocation loc = v.select(10, rng);
    CHECK(loc == ResourceLocation{5, 1});
  }
}

TEST_CASE("selection excludes own transmission sub-frames") {
  CapsVehicleState v(0, small_grid(2, 10, 10, 200));
  std::mt19937_64 rng(7);
  for (std::int64_t t = 0; t < 10; ++t)
    for (int ch = 0; ch < 2; ++ch)
      if (!(t == 3) && !(t == 5 && ch == 1)) v.sense(busy(t, ch, SlotStatus::decoded), t);
  v.record_own_tx(3, 0); // sub-frame 3 is unobservable, both sub-channels
  for (int trial = 0; trial < 20; ++trial)
    CHECK(v.select(10, rng) == ResourceLocation{5, 1});
}

TEST_CASE("selection escalates the threshold when everything is busy") {
  CapsVehicleState v(0, small_grid(2, 10, 10, 200));
  std::mt19937_64 rng(7);
  // One slot is quieter than the rest; escalation should find it.
  for (std::int64_t t = 0; t < 10; ++t)
    for (int ch = 0; ch < 2; ++ch)
      v.sense(busy(t, ch, SlotStatus::decoded, t == 7 && ch == 0 ? -94.0 : -60.0), t);
  for (int trial = 0; trial < 20; ++trial)
    CHECK(v.select(10, rng) == ResourceLocation{7, 0});
}

TEST_CASE("changing the interval clears protocol state") {
  CapsVehicleState v(0, small_grid(4, 10, 10, 200));
  v.force_resource({2, 2});
  v.sense(busy(12, 1, SlotStatus::suspected_collision), 12);
  v.set_rri(20);
  CHECK(v.rri_ms() == 20);
  CHECK_FALSE(v.resource().has_value());
  CHECK(v.pending_assist_count() == 0);
}
