#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace capsim {

/// Per-(receiver, transmitter) age ledger with reset-on-reception semantics.
/// Ages advance 1 per ms and reset to 0 on reception; sums are accumulated
/// event-driven so idle pairs cost nothing per tick.
class AoiLedger {
 public:
  /// Starts measuring at t_start with every pair at age 0.
  void reset(int max_vehicles, std::int64_t t_start);

  /// Opens the (rx, tx) pair at time t with age 0 (vehicle arrival).
  void open_pair(int rx, int tx, std::int64_t t);
  /// Closes the pair at time t, folding its final gap into the averages.
  void close_pair(int rx, int tx, std::int64_t t);
  /// Opens/closes all pairs between `id` and the current alive set.
  void open_vehicle(int id, const std::vector<int>& alive, std::int64_t t);
  void close_vehicle(int id, const std::vector<int>& alive, std::int64_t t);

  void record_reception(int rx, int tx, std::int64_t t);

  /// Instantaneous age of the pair at time t (0 if the pair is closed).
  std::int64_t age_at(int rx, int tx, std::int64_t t) const;

  /// Finalizes all open pairs at t_end and returns the time-averaged AoI in
  /// ms over all pair-alive milliseconds.
  double finalize(std::int64_t t_end);

  double average_aoi() const;
  std::int64_t pair_milliseconds() const { return total_pair_ms_; }

 private:
  struct Pair {
    std::int64_t last_reset = -1; // last reception (or open) time; -1 = closed
  };
  std::size_t index(int rx, int tx) const {
    return static_cast<std::size_t>(rx) * max_ + static_cast<std::size_t>(tx);
  }
  void fold_gap(std::int64_t from, std::int64_t to);

  int max_ = 0;
  std::vector<Pair> pairs_;
  double age_sum_ = 0;
  std::int64_t total_pair_ms_ = 0;
};

/// Channel busy ratio over a trailing window: busy slot observations divided
/// by total slot observations.
class CbrMeter {
 public:
  void configure(int window_ms, int n_subch);
  /// Record one sub-frame worth of observations: how many of the n_subch
  /// slots were sensed busy.
  void push(int busy_subchannels);
  double value() const; // 0 when the window is empty

 private:
  int window_ms_ = 0;
  int n_subch_ = 1;
  std::vector<int> ring_;
  std::size_t head_ = 0;
  std::size_t filled_ = 0;
  std::int64_t busy_sum_ = 0;
};

enum class ErrorKind { none, hd, collision, phy };

/// Classifies one missed (receiver, packet) opportunity.
ErrorKind classify_error(bool receiver_transmitting, int transmitters_on_slot, bool decoded);

/// Aggregated results of one run. Rates are fractions in [0, 1]; counters
/// that were never exercised report as 0 (ratios as NaN-free zeros).
struct MetricsReport {
  std::string scheme;
  int vehicles = 0;
  int rri_ms = 0;
  int t_upd_ms = 0;
  double cbr = 0;
  double avg_aoi_ms = 0;
  double collision_error_rate = 0;
  double hd_error_rate = 0;
  double phy_error_rate = 0;
  double packet_loss_ratio = 0;
  std::int64_t opportunities = 0;
  std::int64_t successes = 0;
  std::int64_t collision_errors = 0;
  std::int64_t hd_errors = 0;
  std::int64_t phy_errors = 0;

  // Collision-resolution bookkeeping (freeway analysis).
  std::int64_t n_ht = 0;       // solved hidden-terminal collisions
  std::int64_t n_col = 0;      // solved collisions
  std::int64_t n_fd = 0;       // false collision detections
  std::int64_t n_cd = 0;       // collision detections
  double r_ht = 0;
  double r_fd = 0;
  double d_farther_m = 0;      // mean distance of the farther vehicle on missed detections
  std::int64_t last_collision_ms = -1;

  // Per-distance-bin results (freeway mode), bin width 50 m.
  std::vector<double> plr_by_bin;
  std::vector<double> aoi_by_bin;

  // Adaptive-RRI bookkeeping.
  std::int64_t cbr_windows = 0;
  std::int64_t cbr_windows_in_band = 0;

  std::uint64_t seed = 0;
  double wall_time_s = 0;

  void finalize_rates();
  std::string csv_row() const;
  static std::string csv_header();
  std::string to_json() const;
};

} // namespace capsim
