// Core domain types shared by every module: clips, playlists, the slotted
// network timeline, download schedules, cache state and objective weights.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "clipsched/format.hpp"

namespace clipsched {

using Slot = std::int64_t;
using Bytes = std::int64_t;
using MicroUsd = std::int64_t;
using MilliJoule = std::int64_t;

enum class Section { popular, recent, social };
enum class LinkType { wifi, cellular, none };

inline const char* to_string(Section s) {
  switch (s) {
    case Section::popular: return "popular";
    case Section::recent: return "recent";
    default: return "social";
  }
}
inline const char* to_string(LinkType l) {
  switch (l) {
    case LinkType::wifi: return "wifi";
    case LinkType::cellular: return "cellular";
    default: return "none";
  }
}

struct VideoClip {
  std::string id;
  double length_s = 6.0;       // L
  double rate_bps = 166670.0;  // R, bytes per second
  double preference = 0.0;     // p_i >= 0 (raw popularity, e.g. repost count)
  Section section = Section::recent;
  std::int64_t upload_ms = 0;  // when the clip enters the playlist (ms from sim start)

  Bytes size_bytes() const { return static_cast<Bytes>(std::llround(length_s * rate_bps)); }
};

struct Playlist {
  std::vector<VideoClip> clips;
  Slot start_offset_u0 = 0;  // slot at which watching begins

  std::size_t size() const { return clips.size(); }

  // Clip ids must be unique (order is fixed: passive view).
  void check() const {
    std::unordered_set<std::string> seen;
    for (const auto& c : clips) {
      if (c.length_s <= 0 || c.rate_bps <= 0 || c.preference < 0)
        throw std::invalid_argument("playlist: invalid clip fields for id " + c.id);
      if (!seen.insert(c.id).second)
        throw std::invalid_argument("playlist: duplicate clip id " + c.id);
    }
  }
};

// Slot-quantized view of one clip. One "unit" is R*delta bytes: the data for
// one playback slot. Sizes are kept as whole units so schedulers and metrics
// agree bit-for-bit.
struct ClipGeometry {
  Bytes unit_bytes = 0;
  int length_slots = 0;
  Bytes size() const { return unit_bytes * length_slots; }
};

inline ClipGeometry clip_geometry(const VideoClip& c, int slot_ms) {
  ClipGeometry g;
  g.unit_bytes = static_cast<Bytes>(std::llround(c.rate_bps * slot_ms / 1000.0));
  g.length_slots = static_cast<int>(std::llround(c.length_s * 1000.0 / slot_ms));
  if (g.unit_bytes <= 0 || g.length_slots <= 0)
    throw std::invalid_argument("clip_geometry: degenerate clip " + c.id);
  return g;
}

// One link of one time slot. cost/energy are the charge for using the link's
// whole capacity for the slot; actual charges are prorated by bytes used.
struct SlotLink {
  LinkType link = LinkType::none;
  Bytes bandwidth = 0;     // bytes per slot
  MicroUsd cost = 0;       // micro-dollars per fully used slot
  MilliJoule energy = 0;   // millijoules per fully used slot
};

struct SlotInfo {
  SlotLink primary;
  SlotLink secondary;  // optional (both-links-in-window mode); link==none otherwise

  bool has_secondary() const { return secondary.link != LinkType::none; }
};

class NetworkTimeline {
 public:
  NetworkTimeline() : slot_ms_(100) {}
  explicit NetworkTimeline(int slot_ms) : slot_ms_(slot_ms) {
    if (slot_ms <= 0) throw std::invalid_argument("timeline: slot_ms must be positive");
  }

  int slot_ms() const { return slot_ms_; }
  Slot size() const { return static_cast<Slot>(slots_.size()); }

  const SlotInfo& at(Slot t) const {
    static const SlotInfo kNone{};
    if (t < 0 || t >= size()) return kNone;
    return slots_[static_cast<std::size_t>(t)];
  }

  void append(const SlotInfo& s) { slots_.push_back(s); }
  void append(const SlotLink& primary) { slots_.push_back(SlotInfo{primary, SlotLink{}}); }
  void append_run(const SlotLink& primary, Slot count) {
    for (Slot i = 0; i < count; ++i) append(primary);
  }

  // Structural invariants: wifi is free, bandwidth 0 iff link none, and when
  // both link types appear, cellular costs more and burns more energy per slot.
  std::vector<std::string> check() const {
    std::vector<std::string> issues;
    MicroUsd max_cell_cost = 0;
    MilliJoule min_cell_energy = 0, max_wifi_energy = 0;
    bool has_cell = false, has_wifi = false;
    auto check_link = [&](const SlotLink& l, Slot t, const char* which) {
      if (l.link == LinkType::wifi && l.cost != 0)
        issues.push_back("slot " + format_int(t) + " (" + which + "): wifi slot has nonzero cost");
      if ((l.bandwidth == 0) != (l.link == LinkType::none))
        issues.push_back("slot " + format_int(t) + " (" + which + "): bandwidth 0 iff link none violated");
      if (l.link == LinkType::cellular) {
        if (!has_cell || l.energy < min_cell_energy) min_cell_energy = l.energy;
        max_cell_cost = std::max(max_cell_cost, l.cost);
        has_cell = true;
      }
      if (l.link == LinkType::wifi) {
        max_wifi_energy = std::max(max_wifi_energy, l.energy);
        has_wifi = true;
      }
    };
    for (Slot t = 0; t < size(); ++t) {
      check_link(at(t).primary, t, "primary");
      if (at(t).has_secondary()) check_link(at(t).secondary, t, "secondary");
    }
    if (has_cell && max_cell_cost <= 0)
      issues.push_back("cellular slots must have positive cost");
    if (has_cell && has_wifi && min_cell_energy <= max_wifi_energy)
      issues.push_back("cellular per-slot energy must exceed wifi per-slot energy");
    return issues;
  }

 private:
  int slot_ms_;
  std::vector<SlotInfo> slots_;
};

// Slot-level download assignment: in `slot`, `bytes` of playback unit
// `unit` of playlist clip `video` are downloaded over `link` (0 = primary).
struct DownloadSlot {
  Slot slot = 0;
  std::int32_t video = 0;
  std::int32_t unit = 0;
  Bytes bytes = 0;
  std::int8_t link = 0;
};

// Interval form matching the "(v, t, l)" tuples: download `video` during
// slots [start, start+length) at the slot's full bandwidth.
struct ScheduleEntry {
  std::int32_t video = 0;
  Slot start = 0;
  Slot length = 0;
};

struct DownloadSchedule {
  std::vector<DownloadSlot> assignments;  // kept sorted by (slot, video, unit)

  void sort() {
    std::sort(assignments.begin(), assignments.end(), [](const DownloadSlot& a, const DownloadSlot& b) {
      if (a.slot != b.slot) return a.slot < b.slot;
      if (a.video != b.video) return a.video < b.video;
      return a.unit < b.unit;
    });
  }

  // Coalesced per-video intervals (contiguous runs of occupied slots).
  std::vector<ScheduleEntry> entries() const {
    std::map<std::pair<std::int32_t, Slot>, bool> occupied;
    for (const auto& a : assignments) occupied[{a.video, a.slot}] = true;
    std::vector<ScheduleEntry> out;
    for (auto it = occupied.begin(); it != occupied.end();) {
      ScheduleEntry e{it->first.first, it->first.second, 1};
      auto next = std::next(it);
      while (next != occupied.end() && next->first.first == e.video &&
             next->first.second == e.start + e.length) {
        ++e.length;
        ++next;
      }
      out.push_back(e);
      it = next;
    }
    return out;
  }

  // Expands interval entries with the paper's semantics: each occupied slot
  // delivers the slot's bandwidth, capped by the video's remaining size.
  static DownloadSchedule from_intervals(const std::vector<ScheduleEntry>& entries,
                                         const NetworkTimeline& timeline,
                                         const Playlist& playlist) {
    DownloadSchedule s;
    std::vector<Bytes> got(playlist.size(), 0);
    for (const auto& e : entries) {
      if (e.video < 0 || static_cast<std::size_t>(e.video) >= playlist.size())
        throw std::invalid_argument("schedule entry references unknown video");
      ClipGeometry g = clip_geometry(playlist.clips[e.video], timeline.slot_ms());
      for (Slot t = e.start; t < e.start + e.length; ++t) {
        Bytes cap = timeline.at(t).primary.bandwidth;
        Bytes take = std::min(cap, g.size() - got[e.video]);
        take = std::max<Bytes>(take, 0);
        std::int32_t unit = static_cast<std::int32_t>(got[e.video] / g.unit_bytes);
        s.assignments.push_back({t, e.video, std::min(unit, g.length_slots - 1), take, 0});
        got[e.video] += take;
      }
    }
    s.sort();
    return s;
  }
};

struct ScheduleViolation {
  Slot slot = -1;
  std::int32_t video = -1;
  std::string what;
};

struct ValidationReport {
  std::vector<ScheduleViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Reports every violated schedule invariant: per-slot over-allocation,
// over-download beyond a video's size, and downloads in dead slots.
inline ValidationReport validate_schedule(const DownloadSchedule& schedule,
                                          const NetworkTimeline& timeline,
                                          const Playlist& playlist) {
  ValidationReport report;
  std::map<std::pair<Slot, std::int8_t>, Bytes> per_slot;
  std::vector<Bytes> per_video(playlist.size(), 0);
  for (const auto& a : schedule.assignments) {
    if (a.video < 0 || static_cast<std::size_t>(a.video) >= playlist.size()) {
      report.violations.push_back({a.slot, a.video, "unknown video index"});
      continue;
    }
    if (a.bytes < 0) report.violations.push_back({a.slot, a.video, "negative byte amount"});
    const SlotInfo& info = timeline.at(a.slot);
    const SlotLink& link = a.link == 0 ? info.primary : info.secondary;
    if (link.link == LinkType::none && a.bytes > 0)
      report.violations.push_back({a.slot, a.video, "download scheduled in a slot with no link"});
    per_slot[{a.slot, a.link}] += a.bytes;
    per_video[a.video] += a.bytes;
  }
  for (const auto& [key, bytes] : per_slot) {
    const SlotInfo& info = timeline.at(key.first);
    const SlotLink& link = key.second == 0 ? info.primary : info.secondary;
    if (bytes > link.bandwidth)
      report.violations.push_back(
          {key.first, -1,
           "slot over-allocated: " + format_int(bytes) + " > " + format_int(link.bandwidth)});
  }
  for (std::size_t v = 0; v < playlist.size(); ++v) {
    Bytes size = clip_geometry(playlist.clips[v], timeline.slot_ms()).size();
    if (per_video[v] > size)
      report.violations.push_back(
          {-1, static_cast<std::int32_t>(v),
           "video over-downloaded: " + format_int(per_video[v]) + " > " + format_int(size)});
  }
  return report;
}

// Per-video downloaded byte counters plus storage occupancy. Mutated only by
// one simulation instance; playlists/timelines stay immutable and shareable.
class CacheState {
 public:
  CacheState(std::size_t n_videos, Bytes storage_limit)
      : downloaded_(n_videos, 0), cached_(n_videos, true), limit_(storage_limit) {}

  Bytes storage_used() const { return used_; }
  Bytes storage_limit() const { return limit_; }
  Bytes downloaded(std::size_t v) const { return downloaded_[v]; }
  bool full() const { return used_ >= limit_; }

  // Accepts at most `bytes`, clamped by free storage and by `size` (the
  // video's total size); returns the amount actually stored.
  Bytes add(std::size_t v, Bytes bytes, Bytes size) {
    Bytes take = std::min({bytes, limit_ - used_, size - downloaded_[v]});
    take = std::max<Bytes>(take, 0);
    if (!cached_[v]) return 0;  // released videos are gone for good
    downloaded_[v] += take;
    used_ += take;
    return take;
  }

  // Frees a played clip's storage (its playback window has passed).
  void release(std::size_t v) {
    if (!cached_[v]) return;
    used_ -= downloaded_[v];
    cached_[v] = false;
  }

  bool released(std::size_t v) const { return !cached_[v]; }

 private:
  std::vector<Bytes> downloaded_;
  std::vector<bool> cached_;
  Bytes used_ = 0;
  Bytes limit_ = 0;
};

// Weights of Eq-style objective p*D + q*C/Cmax + r*E/Emax.
struct ObjectiveWeights {
  double p = 1.5;
  double q = 1.0;
  double r = 1.0;
  MicroUsd c_max = 0;
  MilliJoule e_max = 0;

  void check() const {
    if (p < 0 || q < 0 || r < 0) throw std::invalid_argument("objective weights must be non-negative");
    if (p + q + r <= 0) throw std::invalid_argument("objective weights must not all be zero");
    if (q > 0 && c_max <= 0) throw std::invalid_argument("q > 0 requires a positive cost normalizer");
    if (r > 0 && e_max <= 0) throw std::invalid_argument("r > 0 requires a positive energy normalizer");
  }
};

}  // namespace clipsched
