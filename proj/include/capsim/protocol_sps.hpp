#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "capsim/grid.hpp"
#include "capsim/scenario.hpp"

namespace capsim {

/// Sensing-based semi-persistent scheduling baseline. A vehicle keeps one
/// single-slot resource that repeats every RRI, re-selects when its counter
/// expires, and picks new resources from a selection window after excluding
/// reserved and unobservable candidates.
class SpsVehicleState {
 public:
  SpsVehicleState() = default;
  SpsVehicleState(int id, const GridConfig& grid);

  int id() const { return id_; }
  int rri_ms() const { return grid_.rri_ms; }
  const GridConfig& grid() const { return grid_; }

  void set_rri(int rri_ms);

  bool has_resource() const { return next_tx_ms_ >= 0; }
  std::int64_t next_tx_ms() const { return next_tx_ms_; }
  int subchannel() const { return subchannel_; }
  int counter() const { return counter_; }

  bool transmits_at(std::int64_t t_ms) const {
    return next_tx_ms_ >= 0 && t_ms == next_tx_ms_;
  }

  /// Records one sensed slot. Decoded slots count as reservations of the same
  /// relative position in future windows; HD-deaf slots poison the candidates
  /// they project onto.
  void sense(const SlotView& slot, bool decoded);

  /// Peers announce the resource they will switch to (look-ahead variant);
  /// it is excluded from this vehicle's selection until valid_until_ms.
  void note_announcement(std::int64_t slot_ms, int subchannel, std::int64_t valid_until_ms);

  /// Selects a new resource inside [t + sel_min_ms, t + sel_max_ms].
  void select(std::int64_t t_ms, std::mt19937_64& rng);

  /// Adopts a resource without sensing (random initialization phase).
  void force_schedule(std::int64_t next_tx_ms, int subchannel, std::mt19937_64& rng);

  /// Advances state after the transmission at t_ms. Returns true when the
  /// counter expired and the keep-probability draw asks for a re-selection.
  bool on_transmit(std::int64_t t_ms, std::mt19937_64& rng);

  /// Look-ahead announcement: when the transmission at t_ms is the last one
  /// before a pending re-selection, the next resource is chosen now and
  /// returned so peers can avoid it. Returns the absolute slot chosen.
  std::optional<std::pair<std::int64_t, int>> spsla_announce(std::int64_t t_ms,
                                                            std::mt19937_64& rng);

  /// Commits a previously announced resource (look-ahead variant).
  void adopt_announced();

  // Tunables, defaults follow the common sidelink mode-4 parameterization.
  int sensing_window_ms = 1000;
  int sel_min_ms = 4;
  int sel_max_ms = 100;
  int counter_min = 5;
  int counter_max = 15;
  double keep_probability = 0.0;
  double rsrp_threshold_dbm = -110.0;
  double rsrp_step_db = 3.0;
  double candidate_fraction = 0.2;
  double quiet_rssi_dbm = -110.0; // RSSI credited to slots sensed idle

 private:
  struct Sensed {
    std::int64_t t_ms = -1; // stamp; stale cells read as quiet slots
    double rssi_dbm = -1e9;
    std::int8_t decoded = 0;
    std::int8_t hd = 0;
  };
  struct Announcement {
    std::int64_t slot_ms = 0;
    int subchannel = 0;
    std::int64_t valid_until_ms = 0;
  };

  std::size_t ring_index(std::int64_t t_ms, int subchannel) const;
  void draw_counter(std::mt19937_64& rng);
  std::pair<std::int64_t, int> pick_candidate(std::int64_t t_ms, std::mt19937_64& rng);

  int id_ = -1;
  GridConfig grid_;
  std::int64_t next_tx_ms_ = -1;
  int subchannel_ = 0;
  int counter_ = 0;
  bool reselect_pending_ = false;
  std::optional<std::pair<std::int64_t, int>> announced_;

  std::vector<Sensed> ring_;
  std::int64_t sensed_through_ = -1;
  std::vector<Announcement> peer_announcements_;
};

} // namespace capsim
