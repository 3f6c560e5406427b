#include "capsim/protocol_caps.hpp"

#include <algorithm>
#include <cmath>

namespace capsim {

namespace {

int ceil_log2(int n) {
  int bits = 0;
  while ((1 << bits) < n) ++bits;
  return bits;
}

std::int64_t slot_key(std::int64_t t_ms, int subchannel) {
  return t_ms * 256 + subchannel;
}

} // namespace

int collab_entry_bits(int n_subf, int n_subch) {
  return ceil_log2(n_subf) + ceil_log2(n_subch);
}

CapsVehicleState::CapsVehicleState(int id, const GridConfig& grid) : id_(id), grid_(grid) {
  grid_.validate();
  cells_.assign(static_cast<std::size_t>(memory_windows) * grid_.rri_ms * grid_.n_subch_per_subframe,
                SenseCell{});
}

void CapsVehicleState::set_rri(int rri_ms) {
  grid_.rri_ms = rri_ms;
  grid_.validate();
  cells_.assign(static_cast<std::size_t>(memory_windows) * grid_.rri_ms * grid_.n_subch_per_subframe,
                SenseCell{});
  sensed_through_ = -1;
  resource_.reset();
  pending_.clear();
  suppressed_.clear();
}

std::size_t CapsVehicleState::ring_index(std::int64_t t_ms, int subchannel) const {
  const std::int64_t row = t_ms % (static_cast<std::int64_t>(memory_windows) * grid_.rri_ms);
  return static_cast<std::size_t>(row) * grid_.n_subch_per_subframe +
         static_cast<std::size_t>(subchannel);
}

std::optional<int> CapsVehicleState::tx_subframe(std::int64_t period_index) const {
  if (!resource_) return std::nullopt;
  return virtual_to_real(*resource_, period_index, grid_).subframe;
}

bool CapsVehicleState::transmits_at(std::int64_t t_ms) const {
  const auto sf = tx_subframe(period_index_of(t_ms, grid_));
  return sf && *sf == static_cast<int>(t_ms % grid_.rri_ms);
}

void CapsVehicleState::prune(std::int64_t now_ms) {
  const std::int64_t horizon = now_ms - 2 * grid_.rri_ms;
  while (!own_tx_.empty() && own_tx_.front().t_ms < horizon) own_tx_.pop_front();
  while (!pending_.empty() && pending_.front().t_ms < now_ms - grid_.rri_ms)
    pending_.pop_front();
  std::erase_if(suppressed_, [&](const Suppressed& s) { return s.until_ms <= now_ms; });
}

void CapsVehicleState::sense(const SlotView& slot, std::int64_t now_ms) {
  if (slot.status == SlotStatus::hd_deaf) return; // own sub-frame, nothing heard
  SenseCell& cell = cells_[ring_index(slot.t_ms, slot.subchannel)];
  cell.t_ms = slot.t_ms;
  cell.energy_dbm = slot.energy_dbm;
  sensed_through_ = std::max(sensed_through_, slot.t_ms);

  if (slot.status != SlotStatus::suspected_collision) return;
  if (pending_.size() >= 3) return; // keep the oldest three

  if (!suppressed_.empty()) {
    const ResourceLocation virt =
        real_to_virtual({static_cast<int>(slot.t_ms % grid_.rri_ms), slot.subchannel},
                        period_index_of(slot.t_ms, grid_), grid_);
    for (const Suppressed& s : suppressed_)
      if (s.loc == virt && s.until_ms > now_ms) return;
  }
  pending_.push_back({slot.t_ms, slot.subchannel});
}

CollabMessage CapsVehicleState::build_collab(std::int64_t now_ms) {
  prune(now_ms);
  CollabMessage msg;
  const std::int64_t range_start = now_ms - grid_.rri_ms;
  const int bits = collab_entry_bits(grid_.rri_ms, grid_.n_subch_per_subframe);
  while (!pending_.empty() && msg.entries.size() < 3) {
    const Suspect s = pending_.front();
    pending_.pop_front();
    if (s.t_ms < range_start) continue; // aged out of the assistance range
    msg.entries.push_back({static_cast<int>(s.t_ms - range_start), s.subchannel});
    msg.encoded_bits += bits;
    // The message for one sub-channel is handled only once per epoch; do not
    // re-cache the same resource before the colliders had their chance.
    const ResourceLocation virt =
        real_to_virtual({static_cast<int>(s.t_ms % grid_.rri_ms), s.subchannel},
                        period_index_of(s.t_ms, grid_), grid_);
    suppressed_.push_back({virt, s.t_ms + grid_.rri_ms});
  }
  return msg;
}

CollabResult CapsVehicleState::handle_collab(const CollabMessage& msg,
                                             std::int64_t sender_tx_ms,
                                             std::mt19937_64& rng) {
  CollabResult result;
  for (const CollabEntry& e : msg.entries) {
    const std::int64_t slot_ms = sender_tx_ms - grid_.rri_ms + e.subframe_offset;
    bool mine = false;
    for (const OwnTx& tx : own_tx_) {
      if (tx.t_ms == slot_ms && tx.subchannel == e.subchannel) {
        mine = true;
        break;
      }
    }
    if (!mine) continue;
    const std::int64_t key = slot_key(slot_ms, e.subchannel);
    if (handled_.contains(key)) {
      if (result.decision == CollabDecision::not_mine) result.decision = CollabDecision::keep;
      continue;
    }
    handled_.insert(key);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < 0.5) {
      result.decision = CollabDecision::reselect;
      result.slot_ms = slot_ms;
      result.subchannel = e.subchannel;
      return result;
    }
    result.decision = CollabDecision::keep;
  }
  return result;
}

ResourceLocation CapsVehicleState::select(std::int64_t t_ms, std::mt19937_64& rng) {
  const EffectiveArea area = effective_area_at(t_ms, grid_.rri_ms, grid_);
  const int n_subch = grid_.n_subch_per_subframe;
  const int t_ost = grid_.t_ost_ms;
  const int rri = grid_.rri_ms;

  // A sensed occupancy marks its *virtual* resource as persistently occupied,
  // so fold every stamped observation in the memory horizon back through the
  // mapping of its own period and keep the strongest reading per resource.
  // One window alone would miss occupants that skip windows, e.g. the
  // spill-over half of long messages.
  std::vector<double> energy(static_cast<std::size_t>(rri) * n_subch, -1e9);
  const std::int64_t horizon =
      std::max<std::int64_t>(0, area.end_ms - static_cast<std::int64_t>(memory_windows) * rri);
  for (std::int64_t s = horizon; s < area.end_ms; ++s) {
    const std::int64_t period = period_index_of(s, grid_);
    for (int ch = 0; ch < n_subch; ++ch) {
      const SenseCell& cell = cells_[ring_index(s, ch)];
      if (cell.t_ms != s) continue;
      const ResourceLocation virt =
          real_to_virtual({static_cast<int>(s % rri), ch}, period, grid_);
      double& e = energy[static_cast<std::size_t>(virt.subframe) * n_subch + virt.subchannel];
      e = std::max(e, cell.energy_dbm);
    }
  }

  struct Candidate {
    ResourceLocation loc;
    double energy;
    bool hd;
  };
  std::vector<Candidate> slots;
  slots.reserve(static_cast<std::size_t>(rri) * n_subch);

  for (std::int64_t s = area.start_ms; s < area.end_ms; ++s) {
    const std::int64_t period = period_index_of(s, grid_);
    bool own = false;
    for (const OwnTx& tx : own_tx_)
      if (tx.t_ms == s) { own = true; break; }
    const int window_pos = static_cast<int>(s % rri);
    const int block = window_pos / t_ost;
    const int in_block = window_pos % t_ost;
    for (int ch = 0; ch < n_subch; ++ch) {
      const std::int64_t shift = (static_cast<std::int64_t>(ch) * (period - 1)) % t_ost;
      const int virt_subframe =
          static_cast<int>((in_block - shift + t_ost) % t_ost) + block * t_ost;
      slots.push_back(
          {{virt_subframe, ch},
           energy[static_cast<std::size_t>(virt_subframe) * n_subch + ch], own});
    }
  }

  std::vector<ResourceLocation> candidates;
  double threshold = base_threshold_dbm;
  for (int round = 0; candidates.empty(); ++round) {
    for (const Candidate& c : slots)
      if (!c.hd && c.energy < threshold) candidates.push_back(c.loc);
    if (!candidates.empty()) break;
    threshold += threshold_step_db;
    if (round > 200) {
      // Every slot is HD-unobservable; fall back to the full window.
      for (const Candidate& c : slots) candidates.push_back(c.loc);
      break;
    }
  }

  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  resource_ = candidates[pick(rng)];
  return *resource_;
}

void CapsVehicleState::record_own_tx(std::int64_t t_ms, int subchannel) {
  own_tx_.push_back({t_ms, subchannel});
  prune(t_ms);
}

} // namespace capsim
