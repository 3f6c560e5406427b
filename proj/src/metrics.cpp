#include "capsim/metrics.hpp"

#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace capsim {

void AoiLedger::reset(int max_vehicles, std::int64_t t_start) {
  max_ = max_vehicles;
  pairs_.assign(static_cast<std::size_t>(max_) * max_, Pair{});
  age_sum_ = 0;
  total_pair_ms_ = 0;
  (void)t_start;
}

void AoiLedger::open_pair(int rx, int tx, std::int64_t t) {
  if (rx == tx) return;
  pairs_[index(rx, tx)].last_reset = t;
}

void AoiLedger::fold_gap(std::int64_t from, std::int64_t to) {
  // Ages over (from, to]: 1, 2, ..., g where g = to - from.
  const double g = static_cast<double>(to - from);
  if (g <= 0) return;
  age_sum_ += g * (g + 1) / 2.0;
  total_pair_ms_ += static_cast<std::int64_t>(g);
}

void AoiLedger::close_pair(int rx, int tx, std::int64_t t) {
  if (rx == tx) return;
  Pair& p = pairs_[index(rx, tx)];
  if (p.last_reset < 0) return;
  fold_gap(p.last_reset, t);
  p.last_reset = -1;
}

void AoiLedger::open_vehicle(int id, const std::vector<int>& alive, std::int64_t t) {
  for (int other : alive) {
    if (other == id) continue;
    open_pair(id, other, t);
    open_pair(other, id, t);
  }
}

void AoiLedger::close_vehicle(int id, const std::vector<int>& alive, std::int64_t t) {
  for (int other : alive) {
    if (other == id) continue;
    close_pair(id, other, t);
    close_pair(other, id, t);
  }
}

void AoiLedger::record_reception(int rx, int tx, std::int64_t t) {
  Pair& p = pairs_[index(rx, tx)];
  if (p.last_reset < 0) return;
  // Ages over (last, t): 1 .. g-1, then 0 at t itself.
  const double g = static_cast<double>(t - p.last_reset);
  if (g > 0) {
    age_sum_ += g * (g - 1) / 2.0;
    total_pair_ms_ += static_cast<std::int64_t>(g);
  }
  p.last_reset = t;
}

std::int64_t AoiLedger::age_at(int rx, int tx, std::int64_t t) const {
  const Pair& p = pairs_[index(rx, tx)];
  if (p.last_reset < 0) return 0;
  return t - p.last_reset;
}

double AoiLedger::finalize(std::int64_t t_end) {
  for (Pair& p : pairs_) {
    if (p.last_reset < 0) continue;
    fold_gap(p.last_reset, t_end);
    p.last_reset = -1;
  }
  return average_aoi();
}

double AoiLedger::average_aoi() const {
  if (total_pair_ms_ == 0) return 0;
  return age_sum_ / static_cast<double>(total_pair_ms_);
}

void CbrMeter::configure(int window_ms, int n_subch) {
  if (window_ms < 1 || n_subch < 1)
    throw std::invalid_argument("CbrMeter: window and sub-channel count must be >= 1");
  window_ms_ = window_ms;
  n_subch_ = n_subch;
  ring_.assign(static_cast<std::size_t>(window_ms), 0);
  head_ = 0;
  filled_ = 0;
  busy_sum_ = 0;
}

void CbrMeter::push(int busy_subchannels) {
  if (filled_ == ring_.size()) {
    busy_sum_ -= ring_[head_];
  } else {
    ++filled_;
  }
  ring_[head_] = busy_subchannels;
  busy_sum_ += busy_subchannels;
  head_ = (head_ + 1) % ring_.size();
}

double CbrMeter::value() const {
  if (filled_ == 0) return 0;
  return static_cast<double>(busy_sum_) /
         (static_cast<double>(filled_) * static_cast<double>(n_subch_));
}

ErrorKind classify_error(bool receiver_transmitting, int transmitters_on_slot, bool decoded) {
  if (decoded) return ErrorKind::none;
  if (receiver_transmitting) return ErrorKind::hd;
  if (transmitters_on_slot >= 2) return ErrorKind::collision;
  return ErrorKind::phy;
}

void MetricsReport::finalize_rates() {
  const auto total = static_cast<double>(opportunities);
  if (total > 0) {
    collision_error_rate = static_cast<double>(collision_errors) / total;
    hd_error_rate = static_cast<double>(hd_errors) / total;
    phy_error_rate = static_cast<double>(phy_errors) / total;
    packet_loss_ratio =
        static_cast<double>(collision_errors + hd_errors + phy_errors) / total;
  }
  r_ht = n_col > 0 ? static_cast<double>(n_ht) / static_cast<double>(n_col) : 0;
  r_fd = n_cd > 0 ? static_cast<double>(n_fd) / static_cast<double>(n_cd) : 0;
}

std::string MetricsReport::csv_header() {
  return "scheme,v,rri,t_upd,cbr,avg_aoi,collision_rate,hd_rate,plr,r_ht,r_fd,d_farther,seed";
}

std::string MetricsReport::csv_row() const {
  std::ostringstream os;
  os.precision(10);
  os << scheme << ',' << vehicles << ',' << rri_ms << ',' << t_upd_ms << ',' << cbr << ','
     << avg_aoi_ms << ',' << collision_error_rate << ',' << hd_error_rate << ','
     << packet_loss_ratio << ',' << r_ht << ',' << r_fd << ',' << d_farther_m << ',' << seed;
  return os.str();
}

std::string MetricsReport::to_json() const {
  nlohmann::json j{{"scheme", scheme},
                   {"v", vehicles},
                   {"rri", rri_ms},
                   {"t_upd", t_upd_ms},
                   {"cbr", cbr},
                   {"avg_aoi", avg_aoi_ms},
                   {"collision_rate", collision_error_rate},
                   {"hd_rate", hd_error_rate},
                   {"phy_rate", phy_error_rate},
                   {"plr", packet_loss_ratio},
                   {"opportunities", opportunities},
                   {"successes", successes},
                   {"n_ht", n_ht},
                   {"n_col", n_col},
                   {"n_fd", n_fd},
                   {"n_cd", n_cd},
                   {"r_ht", r_ht},
                   {"r_fd", r_fd},
                   {"d_farther", d_farther_m},
                   {"last_collision_ms", last_collision_ms},
                   {"plr_by_bin", plr_by_bin},
                   {"aoi_by_bin", aoi_by_bin},
                   {"cbr_windows", cbr_windows},
                   {"cbr_windows_in_band", cbr_windows_in_band},
                   {"seed", seed},
                   {"wall_time_s", wall_time_s}};
  return j.dump(2);
}

} // namespace capsim
