#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <unordered_set>
#include <vector>

#include "capsim/grid.hpp"
#include "capsim/offset.hpp"
#include "capsim/scenario.hpp"

namespace capsim {

/// Bit length of one collaboration location field.
int collab_entry_bits(int n_subf, int n_subch);

/// One suspected-collision location carried in a collaboration message.
/// The sub-frame is given relative to the start of the sender's assistance
/// range (the RRI preceding the transmission).
struct CollabEntry {
  int subframe_offset = 0;
  int subchannel = 0;
};

struct CollabMessage {
  std::vector<CollabEntry> entries; // at most 3
  int encoded_bits = 0;

  bool empty() const { return entries.empty(); }
};

enum class CollabDecision { not_mine, keep, reselect };

struct CollabResult {
  CollabDecision decision = CollabDecision::not_mine;
  std::int64_t slot_ms = -1; // slot that triggered a reselect decision
  int subchannel = -1;
};

/// Per-vehicle CAPS protocol state. Owned and mutated by the engine within a
/// run; all randomness comes from the per-vehicle stream passed in.
class CapsVehicleState {
 public:
  CapsVehicleState() = default;
  CapsVehicleState(int id, const GridConfig& grid);

  int id() const { return id_; }
  int rri_ms() const { return grid_.rri_ms; }
  const GridConfig& grid() const { return grid_; }
  const std::optional<ResourceLocation>& resource() const { return resource_; }
  void force_resource(ResourceLocation loc) { resource_ = loc; }

  /// Changes the RRI (adaptive mode); takes effect with a fresh selection.
  void set_rri(int rri_ms);

  /// Real-window sub-frame this vehicle transmits in during the given update
  /// period, or nothing before the first selection.
  std::optional<int> tx_subframe(std::int64_t period_index) const;
  bool transmits_at(std::int64_t t_ms) const;

  /// Records one sensed busy slot; quiet slots need not be reported.
  /// Suspected slots inside the assistance range are cached (at most 3,
  /// oldest kept) unless suppressed by a recent own collaboration emission
  /// for the same virtual resource.
  void sense(const SlotView& slot, std::int64_t now_ms);

  /// Builds the outgoing collaboration message at transmission time and
  /// clears the emitted suspects from the cache.
  CollabMessage build_collab(std::int64_t now_ms);

  /// Handles a decoded collaboration message sent at `sender_tx_ms`. Returns
  /// reselect/keep when an entry resolves to one of this vehicle's own recent
  /// transmissions; repeated entries for the same slot are ignored.
  CollabResult handle_collab(const CollabMessage& msg, std::int64_t sender_tx_ms,
                             std::mt19937_64& rng);

  /// Random selection over the effective area mapped into the virtual
  /// window. Occupied and HD-unobservable slots are excluded; the energy
  /// threshold escalates until at least one candidate remains.
  ResourceLocation select(std::int64_t t_ms, std::mt19937_64& rng);

  void record_own_tx(std::int64_t t_ms, int subchannel);
  std::size_t pending_assist_count() const { return pending_.size(); }

  double base_threshold_dbm = -95.0;
  double threshold_step_db = 3.0;
  // Selection occupancy memory in windows. Two windows cover the sub-frames
  // the vehicle was deaf to in the newest window while transmitting itself;
  // longer memories drag in stale marks from vehicles that have moved on.
  static constexpr int memory_windows = 2;

 private:
  struct Suspect {
    std::int64_t t_ms = 0;
    int subchannel = 0;
  };
  struct OwnTx {
    std::int64_t t_ms = 0;
    int subchannel = 0;
  };
  struct Suppressed {
    ResourceLocation loc;
    std::int64_t until_ms = 0;
  };

  void prune(std::int64_t now_ms);
  std::size_t ring_index(std::int64_t t_ms, int subchannel) const;

  int id_ = -1;
  GridConfig grid_;
  std::optional<ResourceLocation> resource_; // virtual window location

  // Sensing window ring: memory_windows * rri sub-frames x N sub-channels.
  // Cells are
  // stamped with the sub-frame they were written at; anything else in the
  // ring is stale and reads as a quiet slot, so only busy slots get pushed.
  struct SenseCell {
    std::int64_t t_ms = -1;
    double energy_dbm = -1e9;
  };
  std::vector<SenseCell> cells_;
  std::int64_t sensed_through_ = -1;

  std::deque<Suspect> pending_;               // oldest first, capped at 3
  std::unordered_set<std::int64_t> handled_;  // (slot, ch) keys already acted on
  std::deque<OwnTx> own_tx_;
  std::vector<Suppressed> suppressed_;
};

} // namespace capsim
