// Playback-discontinuity, monetary-cost and energy metrics plus the combined
// objective. Discontinuity counts playback slots whose data missed the
// deadline: playback slot k of a clip requires k units of cumulative
// delivered bytes (pre-fetch included) at the slot's start.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "clipsched/core.hpp"
#include "clipsched/format.hpp"

namespace clipsched {

// Per-video record of delivered bytes by slot, with cumulative queries.
class DeliveryLedger {
 public:
  explicit DeliveryLedger(std::size_t n_videos) : per_video_(n_videos) {}

  void add(std::size_t video, Slot slot, Bytes bytes) {
    if (bytes <= 0) return;
    auto& v = per_video_[video];
    if (!v.empty() && v.back().first == slot) {
      v.back().second += bytes;
    } else {
      // simulator appends in slot order; tolerate out-of-order test input
      if (!v.empty() && v.back().first > slot) {
        v.push_back({slot, bytes});
        std::sort(v.begin(), v.end());
        return;
      }
      v.push_back({slot, bytes});
    }
  }

  // Bytes delivered in slots strictly before `slot`.
  Bytes delivered_before(std::size_t video, Slot slot) const {
    Bytes sum = 0;
    for (const auto& [s, b] : per_video_[video]) {
      if (s >= slot) break;
      sum += b;
    }
    return sum;
  }

  Bytes delivered_total(std::size_t video) const {
    Bytes sum = 0;
    for (const auto& [s, b] : per_video_[video]) sum += b;
    return sum;
  }

  std::size_t size() const { return per_video_.size(); }

 private:
  std::vector<std::vector<std::pair<Slot, Bytes>>> per_video_;
};

// Fraction of the min(u, L) playback slots whose cumulative delivery missed
// the start-of-slot deadline. `cumulative_before(t)` must be monotone.
template <class F>
double video_discontinuity(int u_slots, int length_slots, Bytes unit_bytes, Slot playback_start,
                           F&& cumulative_before) {
  if (u_slots <= 0) throw std::invalid_argument("video_discontinuity: watch duration must be positive");
  if (length_slots <= 0 || unit_bytes <= 0)
    throw std::invalid_argument("video_discontinuity: bad clip geometry");
  int m = std::min(u_slots, length_slots);
  int met = 0;
  for (int k = 1; k <= m; ++k) {
    if (cumulative_before(playback_start + k - 1) >= static_cast<Bytes>(k) * unit_bytes) ++met;
  }
  return 1.0 - static_cast<double>(met) / m;
}

// Weighted sum of per-video discontinuities; weights must be normalized.
inline double playlist_discontinuity(const std::vector<double>& disc,
                                     const std::vector<double>& weights) {
  if (disc.size() != weights.size())
    throw std::invalid_argument("playlist_discontinuity: size mismatch");
  double wsum = 0.0;
  for (double w : weights) {
    if (w < 0) throw std::invalid_argument("playlist_discontinuity: negative weight");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-9)
    throw std::invalid_argument("playlist_discontinuity: weights must sum to 1");
  double out = 0.0;
  for (std::size_t i = 0; i < disc.size(); ++i) out += weights[i] * disc[i];
  return out;
}

// Pro-rata charge for using `used` of a link's per-slot capacity.
struct ChargeMeter {
  MicroUsd cost = 0;
  MilliJoule energy = 0;

  void charge(const SlotLink& link, Bytes used) {
    if (used <= 0 || link.bandwidth <= 0) return;
    cost += static_cast<MicroUsd>(
        std::llround(static_cast<double>(link.cost) * used / link.bandwidth));
    energy += static_cast<MilliJoule>(
        std::llround(static_cast<double>(link.energy) * used / link.bandwidth));
  }
};

// Total monetary cost and energy of a schedule (per-slot rates prorated by
// the bytes each slot carries). Rejects infeasible schedules.
inline std::pair<MicroUsd, MilliJoule> totals(const DownloadSchedule& schedule,
                                              const NetworkTimeline& timeline,
                                              const Playlist& playlist) {
  ValidationReport report = validate_schedule(schedule, timeline, playlist);
  if (!report.ok())
    throw std::invalid_argument("totals: schedule infeasible (" + report.violations.front().what + ")");
  std::map<std::pair<Slot, std::int8_t>, Bytes> per_slot;
  for (const auto& a : schedule.assignments) per_slot[{a.slot, a.link}] += a.bytes;
  ChargeMeter meter;
  for (const auto& [key, bytes] : per_slot) {
    const SlotInfo& info = timeline.at(key.first);
    meter.charge(key.second == 0 ? info.primary : info.secondary, bytes);
  }
  return {meter.cost, meter.energy};
}

inline double objective_value(double discontinuity, MicroUsd cost, MilliJoule energy,
                              const ObjectiveWeights& w) {
  w.check();
  double out = w.p * discontinuity;
  if (w.q > 0) out += w.q * static_cast<double>(cost) / static_cast<double>(w.c_max);
  if (w.r > 0) out += w.r * static_cast<double>(energy) / static_cast<double>(w.e_max);
  return out;
}

struct MetricsReport {
  std::string run_id;
  std::map<int, double> per_video;  // watched clips only
  double discontinuity = 0.0;
  MicroUsd total_cost = 0;
  MilliJoule total_energy = 0;
  double norm_cost = 0.0;
  double norm_energy = 0.0;
  double objective = 0.0;

  static std::string csv_header() {
    return "run_id,discontinuity,cost,energy,norm_cost,norm_energy,objective";
  }
  // cost in USD (exact micro-dollar decimal), energy in joules (exact mJ decimal)
  std::string csv_row() const {
    return run_id + "," + format_double(discontinuity, 9) + "," + scaled_decimal(total_cost, 6) +
           "," + scaled_decimal(total_energy, 3) + "," + format_double(norm_cost, 9) + "," +
           format_double(norm_energy, 9) + "," + format_double(objective, 9);
  }
};

inline MetricsReport make_report(std::string run_id, double discontinuity, MicroUsd cost,
                                 MilliJoule energy, const ObjectiveWeights& w) {
  MetricsReport r;
  r.run_id = std::move(run_id);
  r.discontinuity = discontinuity;
  r.total_cost = cost;
  r.total_energy = energy;
  r.norm_cost = w.c_max > 0 ? static_cast<double>(cost) / static_cast<double>(w.c_max) : 0.0;
  r.norm_energy = w.e_max > 0 ? static_cast<double>(energy) / static_cast<double>(w.e_max) : 0.0;
  r.objective = objective_value(discontinuity, cost, energy, w);
  return r;
}

}  // namespace clipsched
