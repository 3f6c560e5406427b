#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>

namespace capsim {

/// Resource lattice parameters and timing constants shared by all modules.
/// One sub-frame is 1 ms, so all times are integer millisecond counters.
struct GridConfig {
  int n_subch_per_subframe = 4;  // sub-channels per sub-frame
  int rri_ms = 50;               // resource reservation interval
  int t_ost_ms = 10;             // resource cyclic shift period
  int t_upd_ms = 1000;           // resource offset update period
  int bandwidth_subchannels = 4; // total sub-channels across the band

  void validate() const {
    if (n_subch_per_subframe < 1)
      throw std::invalid_argument("GridConfig: n_subch_per_subframe must be >= 1");
    if (rri_ms < 1)
      throw std::invalid_argument("GridConfig: rri_ms must be >= 1");
    if (t_ost_ms < 1)
      throw std::invalid_argument("GridConfig: t_ost_ms must be >= 1");
    if (rri_ms % t_ost_ms != 0)
      throw std::invalid_argument("GridConfig: rri_ms must be a multiple of t_ost_ms");
    if (t_upd_ms % t_ost_ms != 0)
      throw std::invalid_argument("GridConfig: t_upd_ms must be a multiple of t_ost_ms");
    if (t_upd_ms < rri_ms)
      throw std::invalid_argument("GridConfig: t_upd_ms must be >= rri_ms");
    if (bandwidth_subchannels < n_subch_per_subframe)
      throw std::invalid_argument("GridConfig: bandwidth_subchannels < n_subch_per_subframe");
  }
};

/// A (sub-frame, sub-channel) slot inside one mapping window.
struct ResourceLocation {
  int subframe = 0;   // in [0, N_subf)
  int subchannel = 0; // in [0, N_subCH)

  auto operator<=>(const ResourceLocation&) const = default;
};

/// Sub-channels available during one RRI.
inline int subchannels_per_rri(const GridConfig& cfg) {
  return cfg.rri_ms * cfg.n_subch_per_subframe;
}

/// Index of the resource offset update period containing t_ms; starts at 1.
inline std::int64_t period_index_of(std::int64_t t_ms, const GridConfig& cfg) {
  if (t_ms < 0) throw std::invalid_argument("period_index_of: t_ms must be >= 0");
  return t_ms / cfg.t_upd_ms + 1;
}

/// Simulation clock; now_ms counts sub-frames from 0.
struct SimClock {
  std::int64_t now_ms = 0;

  std::int64_t upd_period_index(const GridConfig& cfg) const {
    return period_index_of(now_ms, cfg);
  }
  void tick() { ++now_ms; }
};

} // namespace capsim
