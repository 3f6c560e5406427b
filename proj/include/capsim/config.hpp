#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "capsim/grid.hpp"
#include "capsim/scenario.hpp"

namespace capsim {

enum class Scheme { caps, sps, sps_la };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct AdaptiveRriConfig {
  bool enabled = false;
  double cbr_low = 0.40;   // below: step to a shorter RRI
  double cbr_high = 0.80;  // above: step to a longer RRI
  std::vector<int> candidates_ms = {20, 50, 100};
};

struct SpsTuning {
  int sel_min_ms = 4;
  int sel_max_ms = 100;
  int counter_min = 5;
  int counter_max = 15;
  double keep_probability = 0.0;
};

struct CapsTuning {
  double base_threshold_dbm = -95.0;
  double threshold_step_db = 3.0;
};

/// Either every message is 190 B (one sub-channel) or every fifth message is
/// 300 B and spills into a second sub-channel.
enum class MessagePattern { fixed, cycle };

struct ExperimentConfig {
  Scheme scheme = Scheme::caps;
  MessagePattern message_pattern = MessagePattern::fixed;
  int duration_s = 100;
  int warmup_s = 1;      // excluded from metrics unless include_warmup
  bool include_warmup = false;
  int cbr_window_ms = 100;
  std::uint64_t seed = 1;

  GridConfig grid;
  TrafficModel traffic;
  ChannelModel channel;
  SpsTuning sps;
  CapsTuning caps;
  AdaptiveRriConfig adaptive;

  void validate() const;
};

/// Parses a flat `key = value` config ('#' comments, dotted keys). Unknown
/// keys raise std::invalid_argument so typos fail loudly.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

/// Applies one `key=value` override on top of an existing config.
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

} // namespace capsim
