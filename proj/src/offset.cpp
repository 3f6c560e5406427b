#include "capsim/offset.hpp"

#include <stdexcept>

namespace capsim {

namespace {

void check_args(ResourceLocation loc, std::int64_t period_index, const GridConfig& cfg) {
  if (period_index < 1)
    throw std::invalid_argument("offset mapping: period_index must be >= 1");
  if (loc.subframe < 0 || loc.subframe >= cfg.rri_ms)
    throw std::invalid_argument("offset mapping: subframe out of window");
  if (loc.subchannel < 0 || loc.subchannel >= cfg.n_subch_per_subframe)
    throw std::invalid_argument("offset mapping: subchannel out of range");
}

} // namespace

ResourceLocation virtual_to_real(ResourceLocation loc, std::int64_t period_index,
                                 const GridConfig& cfg) {
  check_args(loc, period_index, cfg);
  const int t_ost = cfg.t_ost_ms;
  const std::int64_t shift = (static_cast<std::int64_t>(loc.subchannel) * (period_index - 1)) % t_ost;
  const int block = loc.subframe / t_ost;
  const int in_block = loc.subframe % t_ost;
  const int real_subframe = static_cast<int>((in_block + shift) % t_ost) + block * t_ost;
  return {real_subframe, loc.subchannel};
}

ResourceLocation real_to_virtual(ResourceLocation loc, std::int64_t period_index,
                                 const GridConfig& cfg) {
  check_args(loc, period_index, cfg);
  const int t_ost = cfg.t_ost_ms;
  const std::int64_t shift = (static_cast<std::int64_t>(loc.subchannel) * (period_index - 1)) % t_ost;
  const int block = loc.subframe / t_ost;
  const int in_block = loc.subframe % t_ost;
  const int virt_subframe = static_cast<int>((in_block - shift % t_ost + t_ost) % t_ost) + block * t_ost;
  return {virt_subframe, loc.subchannel};
}

EffectiveArea effective_area_at(std::int64_t t_ms, int rri_ms, const GridConfig& cfg) {
  if (rri_ms < cfg.t_ost_ms || rri_ms % cfg.t_ost_ms != 0)
    throw std::invalid_argument("effective_area_at: rri must be a positive multiple of t_ost");
  if (t_ms < rri_ms)
    throw std::invalid_argument("effective_area_at: insufficient sensing history");

  const int t_ost = cfg.t_ost_ms;
  std::int64_t end = (t_ms / t_ost) * t_ost; // latest whole period boundary <= t
  std::int64_t start = end - rri_ms;

  // Clamp to the tail of the previous update period when straddling.
  if (start / cfg.t_upd_ms != (end - 1) / cfg.t_upd_ms) {
    end = ((end - 1) / cfg.t_upd_ms) * cfg.t_upd_ms;
    start = end - rri_ms;
  }
  EffectiveArea area{start, end, {}};
  for (std::int64_t p = start; p < end; p += t_ost) area.periods.push_back(p);
  return area;
}

} // namespace capsim
