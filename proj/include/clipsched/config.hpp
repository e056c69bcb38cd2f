// Run configuration: §IV-B-style defaults, INI-style file round-trip, and
// timeline/normalizer construction from the configured models.
#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "clipsched/core.hpp"
#include "clipsched/format.hpp"

namespace clipsched {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct KinematicsConfig {
  double clip_height_px = 1000.0;   // h
  double drag_threshold = 50.0;     // s_T, pixels/second
  bool scale_threshold_with_ppi = true;
  double drag_decel = 2000.0;       // d, pixels/second^2
  double friction = 0.015;          // Fric
  double ppi = 326.0;

  static constexpr double kGravity = 9.80665;

  // log(0.78)/log(0.9); always computed, never a literal.
  double d_rate() const { return std::log(0.78) / std::log(0.9); }
  double p_coef() const { return kGravity * 39.37 * ppi * 0.84; }
  double threshold() const {
    return scale_threshold_with_ppi ? drag_threshold * ppi / 326.0 : drag_threshold;
  }

  void check() const {
    if (clip_height_px <= 0 || drag_threshold <= 0 || drag_decel <= 0 || friction <= 0 || ppi <= 0)
      throw ConfigError("kinematics: h, s_T, d, friction and ppi must be positive");
  }
};

struct TraceConfig {
  double zipf_exponent = 2.0;
  std::int64_t catalog = 10000;
  double repost_base = 1e6;          // reposts(rank) ~ repost_base * rank^-s
  double inter_log_mean = 7.438384;  // ln(1700 ms)
  double inter_log_sigma = 0.55;
  double p_click = 0.10;
  double p_drag = 0.20;
  double p_fling = 0.70;
  double fling_log_mean = 8.612503;  // ln(5500 px/s)
  double fling_log_sigma = 0.50;
  double fling_speed_cap = 40000.0;
  // Synthetic diurnal upload-rate weights (per hour of day); used to place
  // watching events and spread recent-section uploads. Not measured data.
  std::vector<double> hourly_upload_weights = {1, 1, 1, 1, 1, 2, 3, 5,  7,  8,  9,  10,
                                               10, 10, 9, 9, 9, 10, 11, 12, 11, 8, 5, 2};
};

struct SimConfig {
  // [sim]
  int slot_ms = 100;
  std::uint64_t seed = 1;
  std::int64_t session_ms = 330000;
  int events = 20;
  // [video]
  double length_s = 6.0;
  double rate_bps = 166670.0;
  // [playlist]
  int popular = 50;
  int recent = 150;
  // [network]
  std::int64_t cellular_bps = 1000000;
  std::int64_t wifi_bps = 1000000;
  int wifi_period_min = 60;
  int wifi_window_min = 5;
  bool both_links_in_window = false;
  // [cost]
  double usd_per_100mb = 1.0;
  // [energy]
  std::int64_t cellular_mj_per_slot = 100;
  std::int64_t wifi_mj_per_slot = 95;
  // [objective]
  double p = 1.5;
  double q = 1.0;
  double r = 1.0;
  // [prefetch]
  double alpha = 0.2;
  std::int64_t storage_mb = 100;
  // nested
  KinematicsConfig kin;
  TraceConfig trace;

  void check() const {
    if (slot_ms <= 0) throw ConfigError("sim.slot_ms must be positive");
    if (session_ms < 0) throw ConfigError("sim.session_ms must be non-negative");
    if (events <= 0) throw ConfigError("sim.events must be positive");
    if (length_s <= 0 || rate_bps <= 0) throw ConfigError("video.length_s/rate_bps must be positive");
    if (cellular_bps < 0 || wifi_bps < 0) throw ConfigError("network rates must be non-negative");
    if (usd_per_100mb < 0) throw ConfigError("cost.usd_per_100mb must be non-negative");
    if (cellular_mj_per_slot < 0 || wifi_mj_per_slot < 0) throw ConfigError("energy rates must be non-negative");
    if (alpha < 0.0 || alpha > 1.0) throw ConfigError("prefetch.alpha must lie in [0,1]");
    if (storage_mb < 0) throw ConfigError("prefetch.storage_mb must be non-negative");
    if (p < 0 || q < 0 || r < 0 || p + q + r <= 0) throw ConfigError("objective weights invalid");
    kin.check();
  }

  Bytes storage_bytes() const { return storage_mb * 1000000; }
  Bytes cellular_slot_bytes() const {
    return static_cast<Bytes>(std::llround(static_cast<double>(cellular_bps) * slot_ms / 1000.0));
  }
  Bytes wifi_slot_bytes() const {
    return static_cast<Bytes>(std::llround(static_cast<double>(wifi_bps) * slot_ms / 1000.0));
  }
  MicroUsd cost_per_slot(Bytes slot_bytes) const {
    // 1 USD per 100 MB = 0.01 micro-dollars per byte.
    return static_cast<MicroUsd>(std::llround(slot_bytes * usd_per_100mb * 0.01));
  }

  SlotLink cellular_link() const {
    Bytes b = cellular_slot_bytes();
    if (b <= 0) return SlotLink{};  // no link
    return SlotLink{LinkType::cellular, b, cost_per_slot(b), cellular_mj_per_slot};
  }
  SlotLink wifi_link() const {
    Bytes b = wifi_slot_bytes();
    if (b <= 0) return SlotLink{};
    return SlotLink{LinkType::wifi, b, 0, wifi_mj_per_slot};
  }

  Slot wifi_window_slots() const { return wifi_window_min * 60000LL / slot_ms; }
  Slot session_slots() const { return (session_ms + slot_ms - 1) / slot_ms; }

  // Watching begins right after the pre-fetch WiFi window.
  Slot watch_start_slot() const { return wifi_window_slots(); }
};

// Timeline for one watching event: a WiFi window for pre-fetching ending at
// u0, cellular-only afterwards ("during the watch-time only 3G links are
// available"). `horizon` covers the watch session plus one clip length so
// trailing deadlines exist.
inline NetworkTimeline build_event_timeline(const SimConfig& cfg, Slot horizon_watch_slots) {
  NetworkTimeline tl(cfg.slot_ms);
  SlotLink wifi = cfg.wifi_link();
  SlotLink cell = cfg.cellular_link();
  for (Slot t = 0; t < cfg.wifi_window_slots(); ++t) {
    SlotInfo s;
    s.primary = wifi;
    if (cfg.both_links_in_window) s.secondary = cell;
    tl.append(s);
  }
  for (Slot t = 0; t < horizon_watch_slots; ++t) tl.append(cell);
  return tl;
}

// Cmax/Emax: every playlist clip downloaded entirely over cellular, charged
// with the same pro-rata convention the simulator uses.
inline ObjectiveWeights make_objective_weights(const SimConfig& cfg, const Playlist& playlist) {
  ObjectiveWeights w;
  w.p = cfg.p;
  w.q = cfg.q;
  w.r = cfg.r;
  Bytes total = 0;
  for (const auto& c : playlist.clips) total += clip_geometry(c, cfg.slot_ms).size();
  SlotLink cell = cfg.cellular_link();
  if (cell.bandwidth > 0) {
    w.c_max = static_cast<MicroUsd>(
        std::llround(static_cast<double>(cell.cost) * total / cell.bandwidth));
    w.e_max = static_cast<MilliJoule>(
        std::llround(static_cast<double>(cell.energy) * total / cell.bandwidth));
  }
  if (w.q > 0 && w.c_max <= 0) w.q = 0;  // degenerate free network
  if (w.r > 0 && w.e_max <= 0) w.r = 0;
  return w;
}

// ---------------------------------------------------------------------------
// INI-style round-trip ([section] + key = value lines, '#' comments).

namespace detail {

inline std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_double(v[i], 3);
  }
  return out;
}

}  // namespace detail

inline std::string to_ini(const SimConfig& c) {
  std::ostringstream o;
  o << "[sim]\n"
    << "slot_ms = " << c.slot_ms << "\n"
    << "seed = " << c.seed << "\n"
    << "session_ms = " << c.session_ms << "\n"
    << "events = " << c.events << "\n"
    << "\n[video]\n"
    << "length_s = " << format_double(c.length_s, 6) << "\n"
    << "rate_bps = " << format_double(c.rate_bps, 3) << "\n"
    << "\n[playlist]\n"
    << "popular = " << c.popular << "\n"
    << "recent = " << c.recent << "\n"
    << "\n[network]\n"
    << "cellular_bps = " << c.cellular_bps << "\n"
    << "wifi_bps = " << c.wifi_bps << "\n"
    << "wifi_period_min = " << c.wifi_period_min << "\n"
    << "wifi_window_min = " << c.wifi_window_min << "\n"
    << "both_links_in_window = " << (c.both_links_in_window ? "true" : "false") << "\n"
    << "\n[cost]\n"
    << "usd_per_100mb = " << format_double(c.usd_per_100mb, 6) << "\n"
    << "\n[energy]\n"
    << "cellular_mj_per_slot = " << c.cellular_mj_per_slot << "\n"
    << "wifi_mj_per_slot = " << c.wifi_mj_per_slot << "\n"
    << "\n[objective]\n"
    << "p = " << format_double(c.p, 6) << "\n"
    << "q = " << format_double(c.q, 6) << "\n"
    << "r = " << format_double(c.r, 6) << "\n"
    << "\n[prefetch]\n"
    << "alpha = " << format_double(c.alpha, 6) << "\n"
    << "storage_mb = " << c.storage_mb << "\n"
    << "\n[kinematics]\n"
    << "clip_height_px = " << format_double(c.kin.clip_height_px, 3) << "\n"
    << "drag_threshold = " << format_double(c.kin.drag_threshold, 3) << "\n"
    << "scale_threshold_with_ppi = " << (c.kin.scale_threshold_with_ppi ? "true" : "false") << "\n"
    << "drag_decel = " << format_double(c.kin.drag_decel, 3) << "\n"
    << "friction = " << format_double(c.kin.friction, 6) << "\n"
    << "ppi = " << format_double(c.kin.ppi, 3) << "\n"
    << "\n[traces]\n"
    << "zipf_exponent = " << format_double(c.trace.zipf_exponent, 6) << "\n"
    << "catalog = " << c.trace.catalog << "\n"
    << "repost_base = " << format_double(c.trace.repost_base, 3) << "\n"
    << "inter_log_mean = " << format_double(c.trace.inter_log_mean, 6) << "\n"
    << "inter_log_sigma = " << format_double(c.trace.inter_log_sigma, 6) << "\n"
    << "p_click = " << format_double(c.trace.p_click, 6) << "\n"
    << "p_drag = " << format_double(c.trace.p_drag, 6) << "\n"
    << "p_fling = " << format_double(c.trace.p_fling, 6) << "\n"
    << "fling_log_mean = " << format_double(c.trace.fling_log_mean, 6) << "\n"
    << "fling_log_sigma = " << format_double(c.trace.fling_log_sigma, 6) << "\n"
    << "fling_speed_cap = " << format_double(c.trace.fling_speed_cap, 3) << "\n"
    << "hourly_upload_weights = " << detail::join_doubles(c.trace.hourly_upload_weights) << "\n";
  return o.str();
}

inline SimConfig parse_ini(std::istream& in, const std::string& origin = "<config>") {
  SimConfig c;
  std::string line, section;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = trim(line);
    if (s.empty() || s.front() == '#' || s.front() == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail("malformed section header");
      section = std::string(s.substr(1, s.size() - 2));
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string_view::npos) fail("expected key = value");
    std::string key = std::string(trim(s.substr(0, eq)));
    std::string val = std::string(trim(s.substr(eq + 1)));
    auto as_i64 = [&]() {
      std::int64_t v;
      if (!parse_i64(val, v)) fail("expected integer for " + key);
      return v;
    };
    auto as_f64 = [&]() {
      double v;
      if (!parse_f64(val, v)) fail("expected number for " + key);
      return v;
    };
    auto as_bool = [&]() {
      if (val == "true" || val == "1") return true;
      if (val == "false" || val == "0") return false;
      fail("expected true/false for " + key);
      return false;
    };
    std::string full = section + "." + key;
    if (full == "sim.slot_ms") c.slot_ms = static_cast<int>(as_i64());
    else if (full == "sim.seed") c.seed = static_cast<std::uint64_t>(as_i64());
    else if (full == "sim.session_ms") c.session_ms = as_i64();
    else if (full == "sim.events") c.events = static_cast<int>(as_i64());
    else if (full == "video.length_s") c.length_s = as_f64();
    else if (full == "video.rate_bps") c.rate_bps = as_f64();
    else if (full == "playlist.popular") c.popular = static_cast<int>(as_i64());
    else if (full == "playlist.recent") c.recent = static_cast<int>(as_i64());
    else if (full == "network.cellular_bps") c.cellular_bps = as_i64();
    else if (full == "network.wifi_bps") c.wifi_bps = as_i64();
    else if (full == "network.wifi_period_min") c.wifi_period_min = static_cast<int>(as_i64());
    else if (full == "network.wifi_window_min") c.wifi_window_min = static_cast<int>(as_i64());
    else if (full == "network.both_links_in_window") c.both_links_in_window = as_bool();
    else if (full == "cost.usd_per_100mb") c.usd_per_100mb = as_f64();
    else if (full == "energy.cellular_mj_per_slot") c.cellular_mj_per_slot = as_i64();
    else if (full == "energy.wifi_mj_per_slot") c.wifi_mj_per_slot = as_i64();
    else if (full == "objective.p") c.p = as_f64();
    else if (full == "objective.q") c.q = as_f64();
    else if (full == "objective.r") c.r = as_f64();
    else if (full == "prefetch.alpha") c.alpha = as_f64();
    else if (full == "prefetch.storage_mb") c.storage_mb = as_i64();
    else if (full == "kinematics.clip_height_px") c.kin.clip_height_px = as_f64();
    else if (full == "kinematics.drag_threshold") c.kin.drag_threshold = as_f64();
    else if (full == "kinematics.scale_threshold_with_ppi") c.kin.scale_threshold_with_ppi = as_bool();
    else if (full == "kinematics.drag_decel") c.kin.drag_decel = as_f64();
    else if (full == "kinematics.friction") c.kin.friction = as_f64();
    else if (full == "kinematics.ppi") c.kin.ppi = as_f64();
    else if (full == "traces.zipf_exponent") c.trace.zipf_exponent = as_f64();
    else if (full == "traces.catalog") c.trace.catalog = as_i64();
    else if (full == "traces.repost_base") c.trace.repost_base = as_f64();
    else if (full == "traces.inter_log_mean") c.trace.inter_log_mean = as_f64();
    else if (full == "traces.inter_log_sigma") c.trace.inter_log_sigma = as_f64();
    else if (full == "traces.p_click") c.trace.p_click = as_f64();
    else if (full == "traces.p_drag") c.trace.p_drag = as_f64();
    else if (full == "traces.p_fling") c.trace.p_fling = as_f64();
    else if (full == "traces.fling_log_mean") c.trace.fling_log_mean = as_f64();
    else if (full == "traces.fling_log_sigma") c.trace.fling_log_sigma = as_f64();
    else if (full == "traces.fling_speed_cap") c.trace.fling_speed_cap = as_f64();
    else if (full == "traces.hourly_upload_weights") {
      c.trace.hourly_upload_weights.clear();
      for (const auto& part : split_csv_line(val)) {
        double v;
        if (!parse_f64(part, v)) fail("bad weight list for " + key);
        c.trace.hourly_upload_weights.push_back(v);
      }
    } else {
      fail("unknown key '" + full + "'");
    }
  }
  c.check();
  return c;
}

inline SimConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  return parse_ini(f, path);
}

}  // namespace clipsched
