#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace capsim {

enum class TrafficKind { static_flow, dynamic_flow, freeway };

struct FreewayGeometry {
  double length_m = 2000.0;
  int lanes = 6;            // dual direction, lanes/2 each way
  double lane_width_m = 4.0;
  double speed_kmh = 70.0;
};

struct TrafficModel {
  TrafficKind kind = TrafficKind::static_flow;
  int v0 = 0;
  double arrival_rate = 0;   // x: fraction of v0 per second
  double departure_rate = 0; // y: fraction of v0 per second
  bool poisson_batches = false; // Poisson arrivals instead of deterministic credit
  FreewayGeometry freeway;

  void validate() const;
};

enum class ChannelMode { ideal_mac, freeway_phy };

struct ChannelModel {
  ChannelMode mode = ChannelMode::ideal_mac;
  double tx_power_dbm = 23.0;
  double carrier_ghz = 5.9;
  double shadow_sigma_db = 3.0;
  double collision_detect_threshold_dbm = -95.0; // suspected-of-collision energy gate
  double sinr_capture_db = 0.5;                  // decode threshold
  double sensitivity_dbm = -103.0;
  double noise_dbm = -101.7;                     // thermal noise + NF over one sub-channel
  double cbr_threshold_dbm = -106.0;             // occupancy gate for CBR measurement
  // Path loss: pl = a * log10(d) + b + c * log10(f_ghz / 5.0), d clamped to >= 1 m.
  double pathloss_a = 40.0;
  double pathloss_b = 20.08;
  double pathloss_c = 2.7;
  // MAC-only abstraction: occupied slots at a fixed level, idle at the floor.
  double mac_busy_dbm = -60.0;
  double mac_idle_dbm = -120.0;

  double path_loss_db(double distance_m) const;
};

/// Transmit power minus path loss plus a log-normal shadowing draw.
double received_power_dbm(double distance_m, const ChannelModel& ch, std::mt19937_64& rng);

/// Vehicle kinematics on the wrap-around freeway strip.
struct FreewayState {
  std::vector<double> pos_m;   // longitudinal position
  std::vector<int> lane;       // 0 .. lanes-1; lower half drives +, upper half -
  FreewayGeometry geom;

  void init(int vehicles, std::mt19937_64& rng);
  void advance(double dt_s);
  /// Ring longitudinal distance plus lateral lane offset.
  double distance(int a, int b) const;
};

/// Deterministic per-RRI arrival/departure batching: fractional credits are
/// accumulated each RRI window and realized as whole vehicles, so the batch
/// sizes match the per-RRI accounting while the population stays at v0 in
/// expectation.
struct DynamicFlow {
  double arrival_credit = 0;
  double departure_credit = 0;

  struct Step {
    int arrivals = 0;
    int departures = 0;
  };
  Step step(const TrafficModel& m, int rri_ms, std::mt19937_64& rng);
};

/// Decode result of one (sub-frame, sub-channel) at one receiver.
enum class SlotStatus { idle, decoded, suspected_collision, hd_deaf };

/// What one vehicle sensed on one (sub-frame, sub-channel).
struct SlotView {
  std::int64_t t_ms = 0;
  int subchannel = 0;
  SlotStatus status = SlotStatus::idle;
  double energy_dbm = -1e9;
};

struct SlotOutcome {
  SlotStatus status = SlotStatus::idle;
  double energy_dbm = -1e9;
  int decoded_tx = -1;        // transmitter id when status == decoded
  bool missed_collision = false; // capture hid a >=2-transmitter collision
};

/// Resolves one sub-channel at one receiver. `powers_dbm[i]` is the received
/// power of `tx_ids[i]` at this receiver (ignored in ideal MAC mode).
SlotOutcome resolve_slot(const std::vector<int>& tx_ids, const std::vector<double>& powers_dbm,
                         bool receiver_transmitting, const ChannelModel& ch);

} // namespace capsim
