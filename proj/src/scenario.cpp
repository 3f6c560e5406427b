#include "capsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace capsim {

void TrafficModel::validate() const {
  switch (kind) {
    case TrafficKind::static_flow:
      if (arrival_rate != 0 || departure_rate != 0)
        throw std::invalid_argument("TrafficModel: static flow requires x = y = 0");
      break;
    case TrafficKind::dynamic_flow:
      if (arrival_rate != departure_rate)
        throw std::invalid_argument("TrafficModel: dynamic flow requires x = y");
      break;
    case TrafficKind::freeway:
      if (freeway.lanes < 2 || freeway.lanes % 2 != 0)
        throw std::invalid_argument("TrafficModel: freeway needs an even lane count");
      break;
  }
  if (v0 < 0) throw std::invalid_argument("TrafficModel: v0 must be >= 0");
}

double ChannelModel::path_loss_db(double distance_m) const {
  const double d = std::max(distance_m, 1.0);
  return pathloss_a * std::log10(d) + pathloss_b + pathloss_c * std::log10(carrier_ghz / 5.0);
}

double received_power_dbm(double distance_m, const ChannelModel& ch, std::mt19937_64& rng) {
  double shadow = 0;
  if (ch.shadow_sigma_db > 0) {
    std::normal_distribution<double> dist(0.0, ch.shadow_sigma_db);
    shadow = dist(rng);
  }
  return ch.tx_power_dbm - ch.path_loss_db(distance_m) + shadow;
}

void FreewayState::init(int vehicles, std::mt19937_64& rng) {
  pos_m.resize(vehicles);
  lane.resize(vehicles);
  std::uniform_real_distribution<double> pos(0.0, geom.length_m);
  std::uniform_int_distribution<int> ln(0, geom.lanes - 1);
  for (int i = 0; i < vehicles; ++i) {
    pos_m[i] = pos(rng);
    lane[i] = ln(rng);
  }
}

void FreewayState::advance(double dt_s) {
  const double v = geom.speed_kmh / 3.6;
  for (std::size_t i = 0; i < pos_m.size(); ++i) {
    const double dir = lane[i] < geom.lanes / 2 ? 1.0 : -1.0;
    pos_m[i] += dir * v * dt_s;
    if (pos_m[i] >= geom.length_m) pos_m[i] -= geom.length_m;
    if (pos_m[i] < 0) pos_m[i] += geom.length_m;
  }
}

double FreewayState::distance(int a, int b) const {
  double dx = std::fabs(pos_m[a] - pos_m[b]);
  dx = std::min(dx, geom.length_m - dx); // wrap-around strip
  const double dy = (lane[a] - lane[b]) * geom.lane_width_m;
  return std::sqrt(dx * dx + dy * dy);
}

DynamicFlow::Step DynamicFlow::step(const TrafficModel& m, int rri_ms, std::mt19937_64& rng) {
  Step out;
  if (m.kind != TrafficKind::dynamic_flow) return out;
  const double per_rri = m.v0 * m.arrival_rate * rri_ms / 1000.0;
  const int batch = std::max(1, static_cast<int>(std::ceil(per_rri)));

  if (m.poisson_batches) {
    std::poisson_distribution<int> arr(per_rri);
    std::poisson_distribution<int> dep(m.v0 * m.departure_rate * rri_ms / 1000.0);
    out.arrivals = arr(rng);
    out.departures = dep(rng);
    return out;
  }

  arrival_credit += per_rri;
  if (arrival_credit >= batch) {
    out.arrivals = batch;
    arrival_credit -= batch;
  }
  departure_credit += m.v0 * m.departure_rate * rri_ms / 1000.0;
  out.departures = static_cast<int>(departure_credit);
  departure_credit -= out.departures;
  return out;
}

SlotOutcome resolve_slot(const std::vector<int>& tx_ids, const std::vector<double>& powers_dbm,
                         bool receiver_transmitting, const ChannelModel& ch) {
  SlotOutcome out;
  if (receiver_transmitting) {
    out.status = SlotStatus::hd_deaf;
    return out;
  }
  if (tx_ids.empty()) {
    out.status = SlotStatus::idle;
    out.energy_dbm = ch.mode == ChannelMode::ideal_mac ? ch.mac_idle_dbm : ch.noise_dbm;
    return out;
  }

  if (ch.mode == ChannelMode::ideal_mac) {
    out.energy_dbm = ch.mac_busy_dbm;
    if (tx_ids.size() == 1) {
      out.status = SlotStatus::decoded;
      out.decoded_tx = tx_ids.front();
    } else {
      out.status = SlotStatus::suspected_collision;
    }
    return out;
  }

  // Freeway PHY: strongest-signal capture over linear powers.
  double total_mw = 0;
  std::size_t best = 0;
  for (std::size_t i = 0; i < powers_dbm.size(); ++i) {
    total_mw += std::pow(10.0, powers_dbm[i] / 10.0);
    if (powers_dbm[i] > powers_dbm[best]) best = i;
  }
  const double noise_mw = std::pow(10.0, ch.noise_dbm / 10.0);
  out.energy_dbm = 10.0 * std::log10(total_mw + noise_mw);

  const double best_mw = std::pow(10.0, powers_dbm[best] / 10.0);
  const double sinr_db = 10.0 * std::log10(best_mw / (total_mw - best_mw + noise_mw));
  const bool decodable =
      sinr_db >= ch.sinr_capture_db && powers_dbm[best] >= ch.sensitivity_dbm;

  if (decodable) {
    out.status = SlotStatus::decoded;
    out.decoded_tx = tx_ids[best];
    out.missed_collision = tx_ids.size() >= 2;
  } else if (out.energy_dbm >= ch.collision_detect_threshold_dbm) {
    out.status = SlotStatus::suspected_collision;
  } else {
    out.status = SlotStatus::idle;
  }
  return out;
}

} // namespace capsim
