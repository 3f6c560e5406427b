#include "capsim/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "capsim/grid.hpp"
#include "capsim/metrics.hpp"
#include "capsim/offset.hpp"
#include "capsim/protocol_caps.hpp"
#include "capsim/protocol_sps.hpp"
#include "capsim/scenario.hpp"

namespace capsim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Order-independent standard normal draw keyed by (stream, t, a, b).
double hashed_normal(std::uint64_t stream, std::int64_t t, int a, int b) {
  std::uint64_t h = stream;
  h = splitmix64(h ^ static_cast<std::uint64_t>(t));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(a) << 32) ^ static_cast<std::uint64_t>(b));
  const double u1 = (static_cast<double>(h >> 32) + 0.5) / 4294967296.0;
  const double u2 = (static_cast<double>(h & 0xffffffffULL) + 0.5) / 4294967296.0;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

constexpr int kHistRows = 2048; // > 2 * max RRI (1000 ms)

struct Vehicle {
  bool alive = false;
  std::int64_t join_ms = 0;
  int real_sf = -1; // cached real-window sub-frame for the current period
  int tx_count = 0;
  CapsVehicleState caps;
  SpsVehicleState sps;
  std::mt19937_64 rng;
};

class Simulation {
 public:
  explicit Simulation(const ExperimentConfig& cfg) : cfg_(cfg), grid_(cfg.grid) {
    cfg_.validate();
    if (cfg_.adaptive.enabled) {
      // Start from the shortest candidate and let load push the RRI up.
      grid_.rri_ms = cfg_.adaptive.candidates_ms.front();
    }
    n_subch_ = grid_.n_subch_per_subframe;
    freeway_ = cfg_.traffic.kind == TrafficKind::freeway;
    dynamic_ = cfg_.traffic.kind == TrafficKind::dynamic_flow;
    caps_mode_ = cfg_.scheme == Scheme::caps;
    duration_ms_ = static_cast<std::int64_t>(cfg_.duration_s) * 1000;
    measure_start_ = cfg_.include_warmup ? 0 : static_cast<std::int64_t>(cfg_.warmup_s) * 1000;

    traffic_rng_.seed(splitmix64(cfg_.seed ^ 0x7261666669635f74ULL));
    init_rng_.seed(splitmix64(cfg_.seed ^ 0x696e69745f726e67ULL));
    channel_stream_ = splitmix64(cfg_.seed ^ 0x6368616e5f726e67ULL);

    max_slots_ = cfg_.traffic.v0 * 2 + 16;
    vehicles_.resize(max_slots_);
    incarnation_.assign(max_slots_, 0);
    deaf_stamp_.assign(max_slots_, -1);

    hist_.assign(static_cast<std::size_t>(kHistRows) * n_subch_, HistCell{});
    tx_by_ch_.resize(n_subch_);
    cbr_.configure(cfg_.cbr_window_ms, n_subch_);

    if (freeway_) {
      fw_.geom = cfg_.traffic.freeway;
      fw_.init(cfg_.traffic.v0, init_rng_);
      const double lat = (fw_.geom.lanes - 1) * fw_.geom.lane_width_m;
      const double maxd = std::hypot(fw_.geom.length_m / 2.0, lat);
      n_bins_ = static_cast<int>(maxd / kBinWidth) + 1;
      opp_by_bin_.assign(n_bins_, 0);
      loss_by_bin_.assign(n_bins_, 0);
      aoi_sum_by_bin_.assign(n_bins_, 0.0);
      aoi_n_by_bin_.assign(n_bins_, 0);
    }
  }

  MetricsReport run() {
    const auto wall_start = std::chrono::steady_clock::now();
    for (int i = 0; i < cfg_.traffic.v0; ++i) spawn(0);
    if (measure_start_ == 0) begin_measurement(0);

    for (std::int64_t t = 0; t < duration_ms_; ++t) {
      if (t == measure_start_ && t > 0) begin_measurement(t);
      if (t > 0 && t % grid_.t_upd_ms == 0) on_period_boundary(t);
      if (dynamic_ && t > 0 && t % grid_.rri_ms == 0) step_traffic(t);
      if (freeway_ && t > 0) fw_.advance(0.001);

      gather_transmitters(t);
      resolve_subframe(t);
      post_transmit(t);
      sample_metrics(t);
    }
    return finalize(wall_start);
  }

 private:
  struct HistCell {
    std::int64_t t = -1;
    std::vector<int> txs;
  };

  static constexpr double kBinWidth = 50.0;

  std::mt19937_64 make_vehicle_rng(int id) {
    const std::uint64_t s = splitmix64(cfg_.seed ^ splitmix64(
        (static_cast<std::uint64_t>(id) << 20) + incarnation_[id] + 1));
    return std::mt19937_64(s);
  }

  int spawn(std::int64_t t) {
    int id;
    if (!free_ids_.empty()) {
      id = free_ids_.back();
      free_ids_.pop_back();
    } else {
      id = next_id_++;
      if (id >= max_slots_)
        throw std::runtime_error("vehicle population exceeded engine capacity");
    }
    ++incarnation_[id];
    Vehicle& v = vehicles_[id];
    v.alive = true;
    v.join_ms = t;
    v.tx_count = 0;
    v.rng = make_vehicle_rng(id);

    // Random selection at entry: arrivals have no usable sensing history.
    std::uniform_int_distribution<int> sf(0, grid_.rri_ms - 1);
    std::uniform_int_distribution<int> ch(0, n_subch_ - 1);
    if (caps_mode_) {
      v.caps = CapsVehicleState(id, grid_);
      v.caps.base_threshold_dbm = cfg_.caps.base_threshold_dbm;
      v.caps.threshold_step_db = cfg_.caps.threshold_step_db;
      v.caps.force_resource({sf(v.rng), ch(v.rng)});
      v.real_sf = *v.caps.tx_subframe(period_index_of(t, grid_));
    } else {
      v.sps = SpsVehicleState(id, grid_);
      v.sps.sel_min_ms = cfg_.sps.sel_min_ms;
      v.sps.sel_max_ms = cfg_.sps.sel_max_ms;
      v.sps.counter_min = cfg_.sps.counter_min;
      v.sps.counter_max = cfg_.sps.counter_max;
      v.sps.keep_probability = cfg_.sps.keep_probability;
      v.sps.force_schedule(t + 1 + sf(v.rng), ch(v.rng), v.rng);
    }
    alive_ids_.push_back(id);
    // Dynamic churn keeps the pair ledger keyed by the logical slot: the
    // replacement vehicle continues the departed one's update stream, so a
    // reused slot keeps its open pairs and their accumulated ages.
    if (measuring_ && !opened_[id]) {
      ledger_.open_vehicle(id, alive_ids_, t);
      opened_[id] = 1;
    }
    return id;
  }

  void despawn(int id, std::int64_t t) {
    Vehicle& v = vehicles_[id];
    if (!v.alive) return;
    if (measuring_ && !dynamic_) {
      ledger_.close_vehicle(id, alive_ids_, t);
      opened_[id] = 0;
    }
    v.alive = false;
    std::erase(alive_ids_, id);
    free_ids_.push_back(id);
  }

  void begin_measurement(std::int64_t t) {
    measuring_ = true;
    ledger_.reset(max_slots_, t);
    opened_.assign(max_slots_, 0);
    for (std::size_t i = 0; i < alive_ids_.size(); ++i) {
      opened_[alive_ids_[i]] = 1;
      for (std::size_t j = i + 1; j < alive_ids_.size(); ++j) {
        ledger_.open_pair(alive_ids_[i], alive_ids_[j], t);
        ledger_.open_pair(alive_ids_[j], alive_ids_[i], t);
      }
    }
    measure_begin_ms_ = t;
  }

  void refresh_caps_caches(std::int64_t t) {
    if (!caps_mode_) return;
    const std::int64_t period = period_index_of(t, grid_);
    for (int id : alive_ids_) {
      Vehicle& v = vehicles_[id];
      if (v.caps.resource()) v.real_sf = *v.caps.tx_subframe(period);
    }
  }

  void on_period_boundary(std::int64_t t) {
    if (cfg_.adaptive.enabled) {
      const int next = adapt_rri(cfg_.adaptive, grid_.rri_ms, cbr_.value());
      if (next != grid_.rri_ms) {
        grid_.rri_ms = next;
        for (int id : alive_ids_) {
          Vehicle& v = vehicles_[id];
          if (caps_mode_) {
            v.caps.set_rri(next);
            v.caps.select(t, v.rng); // empty ring: uniform over the new window
          } else {
            v.sps.set_rri(next);
            v.sps.select(t, v.rng);
          }
        }
      }
    }
    refresh_caps_caches(t);
  }

  void step_traffic(std::int64_t t) {
    const DynamicFlow::Step s = flow_.step(cfg_.traffic, grid_.rri_ms, traffic_rng_);
    for (int i = 0; i < s.departures && alive_ids_.size() > 1; ++i) {
      std::uniform_int_distribution<std::size_t> pick(0, alive_ids_.size() - 1);
      despawn(alive_ids_[pick(traffic_rng_)], t);
    }
    for (int i = 0; i < s.arrivals; ++i) spawn(t);
  }

  void gather_transmitters(std::int64_t t) {
    for (auto& v : tx_by_ch_) v.clear();
    tx_msgs_.clear();
    tx_ann_.clear();
    txs_this_ms_.clear();

    const int sf = static_cast<int>(t % grid_.rri_ms);
    for (int id : alive_ids_) {
      Vehicle& v = vehicles_[id];
      int ch = -1;
      if (caps_mode_) {
        if (v.real_sf != sf || !v.caps.resource()) continue;
        ch = v.caps.resource()->subchannel;
      } else {
        if (!v.sps.transmits_at(t)) continue;
        ch = v.sps.subchannel();
      }
      deaf_stamp_[id] = t;
      txs_this_ms_.push_back(id);
      tx_by_ch_[ch].push_back(id);

      int ch2 = -1;
      if (cfg_.message_pattern == MessagePattern::cycle && v.tx_count % 5 == 0 &&
          n_subch_ > 1) {
        ch2 = ch + 1 < n_subch_ ? ch + 1 : ch - 1;
        tx_by_ch_[ch2].push_back(id);
      }
      ++v.tx_count;

      if (caps_mode_) {
        // Only the canonical (reserved) sub-channel counts as our own slot.
        // The spill-over half of a long message tracks the primary anyway,
        // so collaboration about it is left to that slot's persistent owner.
        v.caps.record_own_tx(t, ch);
        tx_msgs_.emplace_back(id, v.caps.build_collab(t));
      } else if (cfg_.scheme == Scheme::sps_la) {
        if (auto ann = v.sps.spsla_announce(t, v.rng))
          tx_ann_.emplace_back(id, *ann);
      }
    }
  }

  const CollabMessage* msg_of(int tx) const {
    for (const auto& [id, msg] : tx_msgs_)
      if (id == tx) return &msg;
    return nullptr;
  }

  HistCell& hist_cell(std::int64_t t, int ch) {
    return hist_[static_cast<std::size_t>(t % kHistRows) * n_subch_ + ch];
  }

  int bin_of(double d) const {
    const int b = static_cast<int>(d / kBinWidth);
    return std::min(b, n_bins_ - 1);
  }

  void account_loss(int rx, int tx, bool rx_deaf, std::size_t n_tx, double dist) {
    ++report_.opportunities;
    const ErrorKind kind = classify_error(rx_deaf, static_cast<int>(n_tx), false);
    if (kind == ErrorKind::hd) ++report_.hd_errors;
    else if (kind == ErrorKind::collision) ++report_.collision_errors;
    else ++report_.phy_errors;
    if (freeway_) {
      const int b = bin_of(dist);
      ++opp_by_bin_[b];
      ++loss_by_bin_[b];
    }
    (void)rx;
    (void)tx;
  }

  void account_success(int rx, int tx, std::int64_t t, double dist) {
    ++report_.opportunities;
    ++report_.successes;
    ledger_.record_reception(rx, tx, t);
    if (freeway_) ++opp_by_bin_[bin_of(dist)];
  }

  void handle_caps_delivery(int rx, int tx, std::int64_t t) {
    const CollabMessage* msg = msg_of(tx);
    if (!msg || msg->empty()) return;
    Vehicle& v = vehicles_[rx];
    const CollabResult res = v.caps.handle_collab(*msg, t, v.rng);
    if (res.decision != CollabDecision::reselect) return;
    if (t < grid_.rri_ms + grid_.t_ost_ms) return; // not enough history yet
    ++report_.n_col;
    if (freeway_) note_hidden_terminal(rx, res.slot_ms, res.subchannel);
    v.caps.select(t, v.rng);
    v.real_sf = *v.caps.tx_subframe(period_index_of(t, grid_));
  }

  void note_hidden_terminal(int rx, std::int64_t slot_ms, int ch) {
    if (slot_ms < 0) return;
    const HistCell& cell = hist_cell(slot_ms, ch);
    if (cell.t != slot_ms) return;
    bool all_hidden = true;
    bool any_other = false;
    for (int other : cell.txs) {
      if (other == rx) continue;
      any_other = true;
      if (!vehicles_[other].alive) continue;
      const double pl = cfg_.channel.path_loss_db(fw_.distance(rx, other));
      if (cfg_.channel.tx_power_dbm - pl >= cfg_.channel.collision_detect_threshold_dbm)
        all_hidden = false;
    }
    if (any_other && all_hidden) ++report_.n_ht;
  }

  void resolve_subframe(std::int64_t t) {
    int busy = 0;
    int observer_busy = 0;
    const int observer = alive_ids_.empty() ? -1 : alive_ids_.front();

    for (int ch = 0; ch < n_subch_; ++ch) {
      const auto& txs = tx_by_ch_[ch];
      if (txs.empty()) continue;
      ++busy;

      HistCell& cell = hist_cell(t, ch);
      cell.t = t;
      cell.txs = txs;
      if (txs.size() >= 2) report_.last_collision_ms = t;

      if (freeway_) resolve_freeway_channel(t, ch, txs, observer, observer_busy);
      else resolve_mac_channel(t, ch, txs);
    }

    if (freeway_) {
      if (observer >= 0 && deaf_stamp_[observer] != t) cbr_.push(observer_busy);
      if (measuring_) {
        cbr_busy_sum_ += observer_busy;
        cbr_obs_sum_ += n_subch_;
      }
    } else {
      cbr_.push(busy);
      if (measuring_) {
        cbr_busy_sum_ += busy;
        cbr_obs_sum_ += n_subch_;
      }
    }
  }

  void resolve_mac_channel(std::int64_t t, int ch, const std::vector<int>& txs) {
    const bool collided = txs.size() >= 2;
    const SlotView view{t, ch,
                        collided ? SlotStatus::suspected_collision : SlotStatus::decoded,
                        cfg_.channel.mac_busy_dbm};
    if (collided) {
      ++report_.n_cd; // everyone in range senses the same collision
    }

    for (int rx : alive_ids_) {
      Vehicle& v = vehicles_[rx];
      const bool deaf = deaf_stamp_[rx] == t;
      if (!deaf) {
        if (caps_mode_) v.caps.sense(view, t);
        else v.sps.sense(view, !collided);
      }

      for (int tx : txs) {
        if (tx == rx) continue;
        const bool ok = !deaf && !collided;
        if (measuring_) {
          if (ok) account_success(rx, tx, t, 0);
          else account_loss(rx, tx, deaf, txs.size(), 0);
        }
        if (ok) {
          if (caps_mode_) handle_caps_delivery(rx, tx, t);
          else if (cfg_.scheme == Scheme::sps_la) deliver_announcement(rx, tx);
        }
      }
    }
  }

  void deliver_announcement(int rx, int tx) {
    for (const auto& [id, ann] : tx_ann_) {
      if (id != tx) continue;
      vehicles_[rx].sps.note_announcement(ann.first, ann.second, ann.first + 1);
      return;
    }
  }

  void resolve_freeway_channel(std::int64_t t, int ch, const std::vector<int>& txs,
                               int observer, int& observer_busy) {
    scratch_powers_.resize(txs.size());
    scratch_dists_.resize(txs.size());

    for (int rx : alive_ids_) {
      Vehicle& v = vehicles_[rx];
      const bool deaf = deaf_stamp_[rx] == t;

      for (std::size_t i = 0; i < txs.size(); ++i) {
        const double d = fw_.distance(rx, txs[i]);
        scratch_dists_[i] = d;
        scratch_powers_[i] = cfg_.channel.tx_power_dbm - cfg_.channel.path_loss_db(d) +
                             cfg_.channel.shadow_sigma_db *
                                 hashed_normal(channel_stream_, t, txs[i], rx);
      }

      if (deaf) {
        if (measuring_) {
          for (std::size_t i = 0; i < txs.size(); ++i) {
            if (txs[i] == rx) continue;
            account_loss(rx, txs[i], true, txs.size(), scratch_dists_[i]);
          }
        }
        continue;
      }

      const SlotOutcome out = resolve_slot(txs, scratch_powers_, false, cfg_.channel);
      const SlotView view{t, ch, out.status, out.energy_dbm};
      if (caps_mode_) v.caps.sense(view, t);
      else v.sps.sense(view, out.status == SlotStatus::decoded);

      if (rx == observer && out.energy_dbm >= cfg_.channel.cbr_threshold_dbm)
        ++observer_busy;

      if (out.status == SlotStatus::suspected_collision) {
        ++report_.n_cd;
        if (txs.size() < 2) ++report_.n_fd;
      }
      if (out.missed_collision) {
        // Farther-collider statistic: only colliders the receiver could have
        // communicated with count, so require received power above sensitivity.
        double far = 0;
        int in_range = 0;
        for (std::size_t i = 0; i < txs.size(); ++i) {
          if (scratch_powers_[i] < cfg_.channel.sensitivity_dbm) continue;
          ++in_range;
          far = std::max(far, scratch_dists_[i]);
        }
        if (in_range >= 2) {
          d_far_sum_ += far;
          ++d_far_n_;
        }
      }

      for (std::size_t i = 0; i < txs.size(); ++i) {
        const int tx = txs[i];
        if (tx == rx) continue;
        const bool ok = out.status == SlotStatus::decoded && out.decoded_tx == tx;
        if (measuring_) {
          if (ok) account_success(rx, tx, t, scratch_dists_[i]);
          else account_loss(rx, tx, false, txs.size(), scratch_dists_[i]);
        }
        if (ok) {
          if (caps_mode_) handle_caps_delivery(rx, tx, t);
          else if (cfg_.scheme == Scheme::sps_la) deliver_announcement(rx, tx);
        }
      }
    }
  }

  void post_transmit(std::int64_t t) {
    if (caps_mode_) return;
    for (int id : txs_this_ms_) {
      Vehicle& v = vehicles_[id];
      if (!v.alive) continue;
      // Own sub-frame is unobservable on every sub-channel.
      for (int ch = 0; ch < n_subch_; ++ch)
        v.sps.sense({t, ch, SlotStatus::hd_deaf, -1e9}, false);
      if (v.sps.on_transmit(t, v.rng)) v.sps.select(t, v.rng);
    }
  }

  void sample_metrics(std::int64_t t) {
    if (!measuring_) return;
    if ((t - measure_begin_ms_) % cfg_.cbr_window_ms == 0 && t > measure_begin_ms_) {
      ++report_.cbr_windows;
      const double c = cbr_.value();
      if (c >= 0.60 && c <= 0.90) ++report_.cbr_windows_in_band;
    }
    if (freeway_ && t % 100 == 0) {
      for (std::size_t i = 0; i < alive_ids_.size(); ++i)
        for (std::size_t j = 0; j < alive_ids_.size(); ++j) {
          if (i == j) continue;
          const int rx = alive_ids_[i];
          const int tx = alive_ids_[j];
          const int b = bin_of(fw_.distance(rx, tx));
          aoi_sum_by_bin_[b] += static_cast<double>(ledger_.age_at(rx, tx, t));
          ++aoi_n_by_bin_[b];
        }
    }
  }

  MetricsReport finalize(std::chrono::steady_clock::time_point wall_start) {
    report_.scheme = to_string(cfg_.scheme);
    report_.vehicles = cfg_.traffic.v0;
    report_.rri_ms = grid_.rri_ms;
    report_.t_upd_ms = grid_.t_upd_ms;
    report_.seed = cfg_.seed;
    report_.avg_aoi_ms = ledger_.finalize(duration_ms_);
    report_.cbr = cbr_obs_sum_ > 0
                      ? static_cast<double>(cbr_busy_sum_) / static_cast<double>(cbr_obs_sum_)
                      : 0.0;
    report_.d_farther_m = d_far_n_ > 0 ? d_far_sum_ / static_cast<double>(d_far_n_) : 0.0;
    if (freeway_) {
      report_.plr_by_bin.resize(n_bins_);
      report_.aoi_by_bin.resize(n_bins_);
      for (int b = 0; b < n_bins_; ++b) {
        report_.plr_by_bin[b] = opp_by_bin_[b] > 0
                                    ? static_cast<double>(loss_by_bin_[b]) / opp_by_bin_[b]
                                    : 0.0;
        report_.aoi_by_bin[b] =
            aoi_n_by_bin_[b] > 0 ? aoi_sum_by_bin_[b] / aoi_n_by_bin_[b] : 0.0;
      }
    }
    report_.finalize_rates();
    report_.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return report_;
  }

  ExperimentConfig cfg_;
  GridConfig grid_;
  int n_subch_ = 0;
  bool freeway_ = false;
  bool dynamic_ = false;
  bool caps_mode_ = true;
  std::int64_t duration_ms_ = 0;
  std::int64_t measure_start_ = 0;
  std::int64_t measure_begin_ms_ = 0;
  bool measuring_ = false;

  int max_slots_ = 0;
  int next_id_ = 0;
  std::vector<Vehicle> vehicles_;
  std::vector<int> alive_ids_;
  std::vector<int> free_ids_;
  std::vector<std::uint32_t> incarnation_;
  std::vector<std::int64_t> deaf_stamp_;
  std::vector<char> opened_;

  std::mt19937_64 traffic_rng_;
  std::mt19937_64 init_rng_;
  std::uint64_t channel_stream_ = 0;

  DynamicFlow flow_;
  FreewayState fw_;
  AoiLedger ledger_;
  CbrMeter cbr_;
  MetricsReport report_;

  std::vector<HistCell> hist_;
  std::vector<std::vector<int>> tx_by_ch_;
  std::vector<int> txs_this_ms_;
  std::vector<std::pair<int, CollabMessage>> tx_msgs_;
  std::vector<std::pair<int, std::pair<std::int64_t, int>>> tx_ann_;
  std::vector<double> scratch_powers_;
  std::vector<double> scratch_dists_;

  std::int64_t cbr_busy_sum_ = 0;
  std::int64_t cbr_obs_sum_ = 0;
  double d_far_sum_ = 0;
  std::int64_t d_far_n_ = 0;

  int n_bins_ = 0;
  std::vector<std::int64_t> opp_by_bin_;
  std::vector<std::int64_t> loss_by_bin_;
  std::vector<double> aoi_sum_by_bin_;
  std::vector<std::int64_t> aoi_n_by_bin_;
};

} // namespace

int adapt_rri(const AdaptiveRriConfig& cfg, int current_rri_ms, double measured_cbr) {
  const auto& c = cfg.candidates_ms;
  auto it = std::find(c.begin(), c.end(), current_rri_ms);
  std::size_t idx = it == c.end() ? 0 : static_cast<std::size_t>(it - c.begin());
  if (measured_cbr < cfg.cbr_low && idx > 0) --idx;
  else if (measured_cbr > cfg.cbr_high && idx + 1 < c.size()) ++idx;
  return c[idx];
}

MetricsReport run_experiment(const ExperimentConfig& cfg) {
  Simulation sim(cfg);
  return sim.run();
}

int thread_count_from_env() {
  const char* s = std::getenv("CAPSIM_THREADS");
  if (!s) return 1;
  const int n = std::atoi(s);
  return n > 0 ? n : 1;
}

std::vector<SweepPoint> run_sweep(const ExperimentConfig& base, const std::string& axis_key,
                                  const std::vector<std::string>& values, int n_seeds,
                                  int threads) {
  std::vector<SweepPoint> points;
  std::vector<std::string> vals = values;
  if (vals.empty()) vals.push_back(""); // degenerate: single point
  if (n_seeds < 1) n_seeds = 1;

  for (const std::string& v : vals)
    for (int s = 0; s < n_seeds; ++s) {
      SweepPoint p;
      p.axis_key = axis_key;
      p.axis_value = v;
      p.seed = base.seed + static_cast<std::uint64_t>(s);
      points.push_back(std::move(p));
    }

  std::mutex mu;
  std::size_t next = 0;
  auto worker = [&]() {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= points.size()) return;
        i = next++;
      }
      SweepPoint& p = points[i];
      try {
        ExperimentConfig cfg = base;
        if (!p.axis_value.empty()) apply_override(cfg, p.axis_key, p.axis_value);
        cfg.seed = p.seed;
        p.report = run_experiment(cfg);
        p.ok = true;
      } catch (const std::exception& e) {
        p.ok = false;
        p.error = e.what();
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return points;
}

} // namespace capsim
