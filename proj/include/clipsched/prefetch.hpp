// Pre-fetching scheduler: knapsack-variant greedy that assigns equal-weight
// playback units to clips, maximizing the drop of p_i * discontinuity(v_i)^2
// under the storage cap, the per-clip alpha cap and zero-cost-link capacity.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "clipsched/core.hpp"
#include "clipsched/metrics.hpp"

namespace clipsched {

// Pre-fetch-phase discontinuity: 1 - pf / (alpha * L * R).
inline double prefetch_discontinuity(Bytes pf_bytes, double alpha, double length_s, double rate_bps) {
  double cap = alpha * length_s * rate_bps;
  if (pf_bytes < 0 || static_cast<double>(pf_bytes) > cap + 1e-6)
    throw std::invalid_argument("prefetch_discontinuity: pf beyond the alpha cap");
  if (cap <= 0) return 1.0;
  return 1.0 - static_cast<double>(pf_bytes) / cap;
}

// Min-max normalization of raw preferences to [0,1] per playlist; a flat
// playlist maps to all-ones.
inline std::vector<double> normalize_preferences(const Playlist& playlist) {
  std::vector<double> p(playlist.size());
  double lo = 0, hi = 0;
  for (std::size_t i = 0; i < playlist.size(); ++i) {
    p[i] = playlist.clips[i].preference;
    if (i == 0) lo = hi = p[i];
    lo = std::min(lo, p[i]);
    hi = std::max(hi, p[i]);
  }
  for (auto& v : p) v = (hi > lo) ? (v - lo) / (hi - lo) : 1.0;
  return p;
}

// Drop of p * disc^2 from pre-fetching one more unit; negative when capped.
inline double prefetch_marginal_value(double pref_norm, int units_have, int cap_units) {
  if (cap_units <= 0 || units_have >= cap_units) return -1.0;
  double c = static_cast<double>(cap_units);
  double d0 = 1.0 - units_have / c;
  double d1 = 1.0 - (units_have + 1) / c;
  return pref_norm * (d0 * d0 - d1 * d1);
}

inline int prefetch_cap_units(const VideoClip& clip, double alpha, int slot_ms) {
  ClipGeometry g = clip_geometry(clip, slot_ms);
  return static_cast<int>(std::floor(alpha * g.length_slots + 1e-9));
}

struct PrefetchPlan {
  std::vector<int> units;                       // per playlist index
  std::vector<Bytes> pf_bytes;                  // units * unit_bytes
  Bytes budget_bytes = 0;                       // W
  std::int64_t budget_units = 0;                // W in units of the first clip
  std::vector<std::pair<int, int>> picks;       // (video, unit_index), greedy order
  DownloadSchedule schedule;                    // filled by slot_assignment
  bool truncated = false;
  std::string truncation_note;

  Bytes total_bytes() const {
    Bytes t = 0;
    for (Bytes b : pf_bytes) t += b;
    return t;
  }
};

inline Bytes zero_cost_capacity(const NetworkTimeline& timeline) {
  Bytes cap = 0;
  for (Slot t = 0; t < timeline.size(); ++t) {
    const SlotInfo& s = timeline.at(t);
    if (s.primary.link != LinkType::none && s.primary.cost == 0) cap += s.primary.bandwidth;
    if (s.has_secondary() && s.secondary.cost == 0) cap += s.secondary.bandwidth;
  }
  return cap;
}

// One unit per iteration to the clip with the greatest current value; ties
// break by playlist order. Equal unit weights and diminishing marginal values
// make the greedy result optimal for the weighted squared-discontinuity sum.
inline PrefetchPlan greedy_prefetch(const Playlist& playlist, const NetworkTimeline& timeline,
                                    double alpha, Bytes storage_bytes) {
  if (alpha < 0 || alpha > 1) throw std::invalid_argument("greedy_prefetch: alpha outside [0,1]");
  std::size_t n = playlist.size();
  PrefetchPlan plan;
  plan.units.assign(n, 0);
  plan.pf_bytes.assign(n, 0);
  plan.budget_bytes = std::min(storage_bytes, zero_cost_capacity(timeline));
  std::vector<double> pref = normalize_preferences(playlist);
  std::vector<int> caps(n);
  std::vector<Bytes> unit(n);
  for (std::size_t i = 0; i < n; ++i) {
    caps[i] = prefetch_cap_units(playlist.clips[i], alpha, timeline.slot_ms());
    unit[i] = clip_geometry(playlist.clips[i], timeline.slot_ms()).unit_bytes;
  }
  plan.budget_units = n > 0 && unit[0] > 0 ? plan.budget_bytes / unit[0] : 0;

  struct HeapItem {
    double value;
    int video;
    int at_units;  // lazy key: valid only if it still matches plan.units[video]
  };
  auto worse = [](const HeapItem& a, const HeapItem& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.video > b.video;  // lower playlist index wins ties
  };
  std::priority_queue<HeapItem, std::vector<HeapItem>, decltype(worse)> heap(worse);
  for (std::size_t i = 0; i < n; ++i) {
    double v = prefetch_marginal_value(pref[i], 0, caps[i]);
    if (v > 0) heap.push({v, static_cast<int>(i), 0});
  }
  Bytes remaining = plan.budget_bytes;
  while (!heap.empty()) {
    HeapItem top = heap.top();
    heap.pop();
    if (top.at_units != plan.units[top.video]) continue;  // stale
    if (unit[top.video] > remaining) continue;            // cannot afford; budget only shrinks
    plan.picks.push_back({top.video, plan.units[top.video]});
    plan.units[top.video] += 1;
    plan.pf_bytes[top.video] += unit[top.video];
    remaining -= unit[top.video];
    double v = prefetch_marginal_value(pref[top.video], plan.units[top.video], caps[top.video]);
    if (v > 0) heap.push({v, top.video, plan.units[top.video]});
  }
  return plan;
}

// Packs the plan's picks into zero-cost slots earliest-first (a unit may span
// slots). Picks that do not fit are dropped and reported; the plan's per-video
// counters are reduced accordingly.
inline void slot_assignment(PrefetchPlan& plan, const NetworkTimeline& timeline,
                            const Playlist& playlist) {
  std::vector<Bytes> unit(playlist.size());
  for (std::size_t i = 0; i < playlist.size(); ++i)
    unit[i] = clip_geometry(playlist.clips[i], timeline.slot_ms()).unit_bytes;

  plan.schedule.assignments.clear();
  struct Chunk {
    Slot slot;
    std::int8_t link;
    Bytes left;
  };
  std::vector<Chunk> chunks;
  for (Slot t = 0; t < timeline.size(); ++t) {
    const SlotInfo& s = timeline.at(t);
    if (s.primary.link != LinkType::none && s.primary.cost == 0 && s.primary.bandwidth > 0)
      chunks.push_back({t, 0, s.primary.bandwidth});
    if (s.has_secondary() && s.secondary.cost == 0 && s.secondary.bandwidth > 0)
      chunks.push_back({t, 1, s.secondary.bandwidth});
  }

  std::size_t ci = 0;
  std::size_t done = 0;
  for (; done < plan.picks.size(); ++done) {
    auto [video, unit_index] = plan.picks[done];
    Bytes need = unit[video];
    std::size_t mark = plan.schedule.assignments.size();
    while (need > 0 && ci < chunks.size()) {
      if (chunks[ci].left <= 0) {
        ++ci;
        continue;
      }
      Bytes take = std::min(need, chunks[ci].left);
      plan.schedule.assignments.push_back({chunks[ci].slot, video, unit_index, take, chunks[ci].link});
      chunks[ci].left -= take;
      need -= take;
    }
    if (need > 0) {  // out of zero-cost capacity: drop the partial pick
      plan.schedule.assignments.resize(mark);
      break;
    }
  }
  if (done < plan.picks.size()) {
    plan.truncated = true;
    plan.truncation_note = "insufficient zero-cost capacity: " +
                           format_int(static_cast<std::int64_t>(plan.picks.size() - done)) +
                           " of " + format_int(static_cast<std::int64_t>(plan.picks.size())) +
                           " units dropped";
    for (std::size_t k = done; k < plan.picks.size(); ++k) {
      int v = plan.picks[k].first;
      plan.units[v] -= 1;
      plan.pf_bytes[v] -= unit[v];
    }
    plan.picks.resize(done);
  }
  plan.schedule.sort();
}

// Plan dump: video_id,units_prefetched,bytes,first_slot,last_slot
inline std::string prefetch_plan_csv(const PrefetchPlan& plan, const Playlist& playlist) {
  std::string out = "video_id,units_prefetched,bytes,first_slot,last_slot\n";
  std::vector<Slot> first(playlist.size(), -1), last(playlist.size(), -1);
  for (const auto& a : plan.schedule.assignments) {
    if (first[a.video] < 0) first[a.video] = a.slot;
    first[a.video] = std::min(first[a.video], a.slot);
    last[a.video] = std::max(last[a.video], a.slot);
  }
  for (std::size_t i = 0; i < playlist.size(); ++i) {
    if (plan.units[i] <= 0) continue;
    out += playlist.clips[i].id + "," + format_int(plan.units[i]) + "," +
           format_int(plan.pf_bytes[i]) + "," + format_int(first[i]) + "," +
           format_int(last[i]) + "\n";
  }
  return out;
}

}  // namespace clipsched
