#include "capsim/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace capsim {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::caps: return "caps";
    case Scheme::sps: return "sps";
    case Scheme::sps_la: return "sps-la";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "caps") return Scheme::caps;
  if (s == "sps") return Scheme::sps;
  if (s == "sps-la" || s == "spsla") return Scheme::sps_la;
  throw std::invalid_argument("unknown scheme: " + s);
}

void ExperimentConfig::validate() const {
  grid.validate();
  traffic.validate();
  if (duration_s < 1) throw std::invalid_argument("duration_s must be >= 1");
  if (warmup_s < 0) throw std::invalid_argument("warmup_s must be >= 0");
  if (warmup_s >= duration_s) throw std::invalid_argument("warmup_s must be < duration_s");
  if (cbr_window_ms < 1) throw std::invalid_argument("cbr_window_ms must be >= 1");
  if (sps.sel_min_ms < 1 || sps.sel_max_ms < sps.sel_min_ms)
    throw std::invalid_argument("bad SPS selection window");
  if (sps.counter_min < 1 || sps.counter_max < sps.counter_min)
    throw std::invalid_argument("bad SPS counter range");
  if (adaptive.enabled) {
    if (adaptive.candidates_ms.empty())
      throw std::invalid_argument("adaptive mode needs RRI candidates");
    for (int r : adaptive.candidates_ms) {
      GridConfig g = grid;
      g.rri_ms = r;
      g.validate();
    }
    if (!(adaptive.cbr_low < adaptive.cbr_high))
      throw std::invalid_argument("adaptive thresholds must satisfy low < high");
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("not a boolean: " + v);
}

std::vector<int> parse_int_list(const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

} // namespace

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const std::string k = trim(key);
  const std::string v = trim(value);

  if (k == "scheme") cfg.scheme = scheme_from_string(v);
  else if (k == "duration_s") cfg.duration_s = std::stoi(v);
  else if (k == "warmup_s") cfg.warmup_s = std::stoi(v);
  else if (k == "include_warmup") cfg.include_warmup = parse_bool(v);
  else if (k == "cbr_window_ms") cfg.cbr_window_ms = std::stoi(v);
  else if (k == "message.pattern") {
    if (v == "fixed") cfg.message_pattern = MessagePattern::fixed;
    else if (v == "cycle") cfg.message_pattern = MessagePattern::cycle;
    else throw std::invalid_argument("unknown message.pattern: " + v);
  }
  else if (k == "seed") cfg.seed = std::stoull(v);

  else if (k == "grid.n_subch") cfg.grid.n_subch_per_subframe = std::stoi(v);
  else if (k == "grid.rri_ms") cfg.grid.rri_ms = std::stoi(v);
  else if (k == "grid.t_ost_ms") cfg.grid.t_ost_ms = std::stoi(v);
  else if (k == "grid.t_upd_ms") cfg.grid.t_upd_ms = std::stoi(v);
  else if (k == "grid.bandwidth_subchannels") cfg.grid.bandwidth_subchannels = std::stoi(v);

  else if (k == "traffic.kind") {
    if (v == "static") cfg.traffic.kind = TrafficKind::static_flow;
    else if (v == "dynamic") cfg.traffic.kind = TrafficKind::dynamic_flow;
    else if (v == "freeway") cfg.traffic.kind = TrafficKind::freeway;
    else throw std::invalid_argument("unknown traffic.kind: " + v);
  }
  else if (k == "traffic.v0") cfg.traffic.v0 = std::stoi(v);
  else if (k == "traffic.x") cfg.traffic.arrival_rate = std::stod(v);
  else if (k == "traffic.y") cfg.traffic.departure_rate = std::stod(v);
  else if (k == "traffic.poisson") cfg.traffic.poisson_batches = parse_bool(v);

  else if (k == "freeway.length_m") cfg.traffic.freeway.length_m = std::stod(v);
  else if (k == "freeway.lanes") cfg.traffic.freeway.lanes = std::stoi(v);
  else if (k == "freeway.lane_width_m") cfg.traffic.freeway.lane_width_m = std::stod(v);
  else if (k == "freeway.speed_kmh") cfg.traffic.freeway.speed_kmh = std::stod(v);

  else if (k == "channel.mode") {
    if (v == "mac") cfg.channel.mode = ChannelMode::ideal_mac;
    else if (v == "phy") cfg.channel.mode = ChannelMode::freeway_phy;
    else throw std::invalid_argument("unknown channel.mode: " + v);
  }
  else if (k == "channel.tx_power_dbm") cfg.channel.tx_power_dbm = std::stod(v);
  else if (k == "channel.carrier_ghz") cfg.channel.carrier_ghz = std::stod(v);
  else if (k == "channel.shadow_sigma_db") cfg.channel.shadow_sigma_db = std::stod(v);
  else if (k == "channel.collision_detect_threshold_dbm")
    cfg.channel.collision_detect_threshold_dbm = std::stod(v);
  else if (k == "channel.sinr_capture_db") cfg.channel.sinr_capture_db = std::stod(v);
  else if (k == "channel.sensitivity_dbm") cfg.channel.sensitivity_dbm = std::stod(v);
  else if (k == "channel.noise_dbm") cfg.channel.noise_dbm = std::stod(v);
  else if (k == "channel.cbr_threshold_dbm") cfg.channel.cbr_threshold_dbm = std::stod(v);
  else if (k == "channel.pathloss_a") cfg.channel.pathloss_a = std::stod(v);
  else if (k == "channel.pathloss_b") cfg.channel.pathloss_b = std::stod(v);
  else if (k == "channel.pathloss_c") cfg.channel.pathloss_c = std::stod(v);

  else if (k == "sps.sel_min_ms") cfg.sps.sel_min_ms = std::stoi(v);
  else if (k == "sps.sel_max_ms") cfg.sps.sel_max_ms = std::stoi(v);
  else if (k == "sps.counter_min") cfg.sps.counter_min = std::stoi(v);
  else if (k == "sps.counter_max") cfg.sps.counter_max = std::stoi(v);
  else if (k == "sps.keep_probability") cfg.sps.keep_probability = std::stod(v);

  else if (k == "caps.base_threshold_dbm") cfg.caps.base_threshold_dbm = std::stod(v);
  else if (k == "caps.threshold_step_db") cfg.caps.threshold_step_db = std::stod(v);

  else if (k == "adaptive.enabled") cfg.adaptive.enabled = parse_bool(v);
  else if (k == "adaptive.cbr_low") cfg.adaptive.cbr_low = std::stod(v);
  else if (k == "adaptive.cbr_high") cfg.adaptive.cbr_high = std::stod(v);
  else if (k == "adaptive.candidates_ms") cfg.adaptive.candidates_ms = parse_int_list(v);

  else throw std::invalid_argument("unknown config key: " + k);
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    apply_override(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

} // namespace capsim
