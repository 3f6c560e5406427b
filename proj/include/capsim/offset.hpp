#pragma once

#include <cstdint>
#include <vector>

#include "capsim/grid.hpp"

namespace capsim {

/// Whole resource cyclic shift periods that are inverse-mapped to the virtual
/// window before a (re-)selection. Covers [start_ms, end_ms), length = RRI.
struct EffectiveArea {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  std::vector<std::int64_t> periods; // cyclic shift period start times covered
};

/// Maps a virtual-window slot to its real-window slot for the given update
/// period. The shift is cyclic within each T_ost block of the window and the
/// sub-channel index is unchanged.
ResourceLocation virtual_to_real(ResourceLocation loc, std::int64_t period_index,
                                 const GridConfig& cfg);

/// Exact inverse of virtual_to_real for the same period index.
ResourceLocation real_to_virtual(ResourceLocation loc, std::int64_t period_index,
                                 const GridConfig& cfg);

/// Effective area for a selection at sub-frame t_ms by a vehicle with the
/// given RRI: the latest whole cyclic shift periods ending at or before t_ms,
/// clamped to the tail of the previous update period when the candidate area
/// would straddle an update boundary.
/// Throws std::invalid_argument when t_ms < rri_ms (not enough history).
EffectiveArea effective_area_at(std::int64_t t_ms, int rri_ms, const GridConfig& cfg);

} // namespace capsim
