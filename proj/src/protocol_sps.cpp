#include "capsim/protocol_sps.hpp"

#include <algorithm>
#include <cmath>

namespace capsim {

SpsVehicleState::SpsVehicleState(int id, const GridConfig& grid) : id_(id), grid_(grid) {
  grid_.validate();
  ring_.assign(static_cast<std::size_t>(sensing_window_ms) * grid_.n_subch_per_subframe,
               Sensed{});
}

void SpsVehicleState::set_rri(int rri_ms) {
  grid_.rri_ms = rri_ms;
  grid_.validate();
  next_tx_ms_ = -1;
  reselect_pending_ = false;
  announced_.reset();
}

std::size_t SpsVehicleState::ring_index(std::int64_t t_ms, int subchannel) const {
  const std::int64_t row = t_ms % sensing_window_ms;
  return static_cast<std::size_t>(row) * grid_.n_subch_per_subframe +
         static_cast<std::size_t>(subchannel);
}

void SpsVehicleState::sense(const SlotView& slot, bool decoded) {
  Sensed& s = ring_[ring_index(slot.t_ms, slot.subchannel)];
  s.t_ms = slot.t_ms;
  s.rssi_dbm = slot.energy_dbm;
  s.decoded = decoded ? 1 : 0;
  s.hd = slot.status == SlotStatus::hd_deaf ? 1 : 0;
  sensed_through_ = std::max(sensed_through_, slot.t_ms);
}

void SpsVehicleState::note_announcement(std::int64_t slot_ms, int subchannel,
                                        std::int64_t valid_until_ms) {
  peer_announcements_.push_back({slot_ms, subchannel, valid_until_ms});
}

void SpsVehicleState::draw_counter(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dist(counter_min, counter_max);
  counter_ = dist(rng);
}

std::pair<std::int64_t, int> SpsVehicleState::pick_candidate(std::int64_t t_ms,
                                                             std::mt19937_64& rng) {
  const int n_subch = grid_.n_subch_per_subframe;
  const int rri = grid_.rri_ms;
  const int span = std::min(sel_max_ms, rri) - sel_min_ms + 1;

  std::erase_if(peer_announcements_,
                [&](const Announcement& a) { return a.valid_until_ms <= t_ms; });

  struct Cand {
    std::int64_t slot_ms;
    int subchannel;
    double avg_rssi;
    double block_rsrp; // strongest decoded reservation projecting here
    bool hd;
  };
  std::vector<Cand> all;
  all.reserve(static_cast<std::size_t>(span) * n_subch);

  const std::int64_t history_start = std::max<std::int64_t>(0, t_ms - sensing_window_ms);
  const std::size_t want = static_cast<std::size_t>(
      std::ceil(candidate_fraction * static_cast<double>(span) * n_subch));

  for (int d = 0; d < span; ++d) {
    const std::int64_t slot = t_ms + sel_min_ms + d;
    for (int ch = 0; ch < n_subch; ++ch) {
      Cand c{slot, ch, -1e9, -1e9, false};
      double rssi_sum = 0;
      int rssi_n = 0;
      // Project the candidate back through the sensing window at RRI steps.
      for (std::int64_t past = slot - rri; past >= history_start; past -= rri) {
        if (past > sensed_through_) continue;
        const Sensed& obs = ring_[ring_index(past, ch)];
        if (obs.t_ms != past) {
          // Never sensed or stale: a quiet slot at the noise floor.
          rssi_sum += std::pow(10.0, quiet_rssi_dbm / 10.0);
          ++rssi_n;
          continue;
        }
        if (obs.hd) {
          c.hd = true; // unobservable due to own transmission
          break;
        }
        if (obs.decoded) c.block_rsrp = std::max(c.block_rsrp, obs.rssi_dbm);
        rssi_sum += std::pow(10.0, obs.rssi_dbm / 10.0);
        ++rssi_n;
      }
      for (const Announcement& a : peer_announcements_) {
        if (a.subchannel == ch && (a.slot_ms - slot) % rri == 0) {
          c.hd = true; // announced by a peer: excluded outright
          break;
        }
      }
      if (c.hd) continue;
      c.avg_rssi = rssi_n > 0 ? 10.0 * std::log10(rssi_sum / rssi_n) : -1e9;
      all.push_back(c);
    }
  }

  // Escalate the RSRP gate in fixed steps until enough candidates remain.
  std::vector<Cand> pool;
  double rsrp_gate = rsrp_threshold_dbm;
  double max_block = -1e9;
  for (const Cand& c : all) max_block = std::max(max_block, c.block_rsrp);
  for (;;) {
    pool.clear();
    for (const Cand& c : all)
      if (c.block_rsrp < rsrp_gate) pool.push_back(c);
    if (pool.size() >= want || rsrp_gate > max_block) break;
    rsrp_gate += rsrp_step_db;
  }

  if (pool.empty()) {
    // Everything excluded even after escalation; fall back to a uniform draw.
    std::uniform_int_distribution<int> ds(0, span - 1);
    std::uniform_int_distribution<int> dc(0, n_subch - 1);
    return {t_ms + sel_min_ms + ds(rng), dc(rng)};
  }

  // Keep the fraction with the lowest average RSSI, then draw uniformly.
  const std::size_t keep = std::min(pool.size(), std::max<std::size_t>(1, want));
  std::nth_element(pool.begin(), pool.begin() + (keep - 1), pool.end(),
                   [](const Cand& a, const Cand& b) {
                     if (a.avg_rssi != b.avg_rssi) return a.avg_rssi < b.avg_rssi;
                     if (a.slot_ms != b.slot_ms) return a.slot_ms < b.slot_ms;
                     return a.subchannel < b.subchannel;
                   });
  std::uniform_int_distribution<std::size_t> pick(0, keep - 1);
  const Cand& chosen = pool[pick(rng)];
  return {chosen.slot_ms, chosen.subchannel};
}

void SpsVehicleState::select(std::int64_t t_ms, std::mt19937_64& rng) {
  const auto [slot, ch] = pick_candidate(t_ms, rng);
  next_tx_ms_ = slot;
  subchannel_ = ch;
  draw_counter(rng);
  reselect_pending_ = false;
  announced_.reset();
}

void SpsVehicleState::force_schedule(std::int64_t next_tx_ms, int subchannel,
                                     std::mt19937_64& rng) {
  next_tx_ms_ = next_tx_ms;
  subchannel_ = subchannel;
  draw_counter(rng);
  reselect_pending_ = false;
  announced_.reset();
}

bool SpsVehicleState::on_transmit(std::int64_t t_ms, std::mt19937_64& rng) {
  if (announced_) {
    // Look-ahead hand-over: the announced resource becomes active now.
    next_tx_ms_ = announced_->first;
    subchannel_ = announced_->second;
    announced_.reset();
    draw_counter(rng);
    reselect_pending_ = false;
    return false;
  }
  next_tx_ms_ = t_ms + grid_.rri_ms;
  if (counter_ > 0) --counter_;
  if (counter_ == 0) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < keep_probability) {
      draw_counter(rng);
      return false;
    }
    reselect_pending_ = true;
    return true;
  }
  return false;
}

std::optional<std::pair<std::int64_t, int>> SpsVehicleState::spsla_announce(
    std::int64_t t_ms, std::mt19937_64& rng) {
  // Announce only on the transmission whose counter is about to expire.
  if (counter_ != 1) return std::nullopt;
  announced_ = pick_candidate(t_ms, rng);
  return announced_;
}

void SpsVehicleState::adopt_announced() {
  if (!announced_) return;
  next_tx_ms_ = announced_->first;
  subchannel_ = announced_->second;
  announced_.reset();
}

} // namespace capsim
