// Scroll-gesture kinematics: converts click/drag/fling input events into
// per-clip watch durations via the Android-style animation physics (uniform
// deceleration for drags, friction law for flings).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "clipsched/config.hpp"
#include "clipsched/core.hpp"

namespace clipsched {

enum class GestureKind { click, drag, fling };

inline const char* to_string(GestureKind k) {
  switch (k) {
    case GestureKind::click: return "click";
    case GestureKind::drag: return "drag";
    default: return "fling";
  }
}

struct GestureEvent {
  std::int64_t ts_ms = 0;   // milliseconds since session start
  GestureKind kind = GestureKind::click;
  double speed = 0.0;       // initial scrolling speed s_0, pixels/second (0 for clicks)
};

// Boundary speeds (s0 == threshold) classify as drag.
inline GestureKind classify_gesture(double s0, const KinematicsConfig& cfg) {
  if (s0 <= 0) throw std::invalid_argument("classify_gesture: speed must be positive");
  return s0 > cfg.threshold() ? GestureKind::fling : GestureKind::drag;
}

// Entry times (seconds) at which the (m+1)-th clip starts entering the
// viewport during a drag: t_m = (s0 - sqrt(s0^2 - 2mhd))/d, m = 1..floor(s0^2/2hd).
inline std::vector<double> drag_entry_times(double s0, const KinematicsConfig& cfg) {
  if (s0 <= 0) throw std::invalid_argument("drag_entry_times: speed must be positive");
  double h = cfg.clip_height_px, d = cfg.drag_decel;
  int count = static_cast<int>(std::floor(s0 * s0 / (2.0 * h * d)));
  std::vector<double> out;
  out.reserve(count);
  for (int m = 1; m <= count; ++m) {
    double disc = s0 * s0 - 2.0 * m * h * d;
    out.push_back((s0 - std::sqrt(std::max(disc, 0.0))) / d);
  }
  return out;
}

struct FlingTotals {
  double duration_ms = 0.0;  // T(s0)
  double distance_px = 0.0;  // D(s0)
};

inline FlingTotals fling_total(double s0, const KinematicsConfig& cfg) {
  if (s0 <= 0) throw std::invalid_argument("fling_total: speed must be positive");
  double fp = cfg.friction * cfg.p_coef();
  double dr = cfg.d_rate();
  double l = std::log(0.35 * s0 / fp);
  FlingTotals t;
  t.duration_ms = 1000.0 * std::exp(l / (dr - 1.0));
  t.distance_px = fp * std::exp(dr / (dr - 1.0) * l);
  return t;
}

// Entry times (milliseconds): t_m = T(s0) - 1000*[(T/1000)^DR - mh/(Fric*PCOEF)]^(1/DR).
inline std::vector<double> fling_entry_times(double s0, const KinematicsConfig& cfg) {
  FlingTotals tot = fling_total(s0, cfg);
  double fp = cfg.friction * cfg.p_coef();
  double dr = cfg.d_rate();
  double h = cfg.clip_height_px;
  int count = static_cast<int>(std::floor(tot.distance_px / h));
  std::vector<double> out;
  out.reserve(count);
  double t_pow = std::pow(tot.duration_ms / 1000.0, dr);
  for (int m = 1; m <= count; ++m) {
    double bracket = std::max(t_pow - m * h / fp, 0.0);
    out.push_back(tot.duration_ms - 1000.0 * std::pow(bracket, 1.0 / dr));
  }
  return out;
}

// One scroll animation, clip-boundary aligned at its start.
struct Animation {
  GestureKind kind = GestureKind::click;
  std::vector<double> entry_ms;  // boundary-crossing times
  double settle_ms = 0.0;        // time at which the animation stops
  double total_px = 0.0;

  // Scroll distance after `t_ms` of animation.
  double distance_at(double t_ms, const KinematicsConfig& cfg, double s0) const {
    if (t_ms >= settle_ms) return total_px;
    if (t_ms <= 0) return 0.0;
    if (kind == GestureKind::drag) {
      double t = t_ms / 1000.0;
      return s0 * t - cfg.drag_decel * t * t / 2.0;
    }
    double fp = cfg.friction * cfg.p_coef();
    double dr = cfg.d_rate();
    double rem = fp * std::pow((settle_ms - t_ms) / 1000.0, dr);
    return total_px - rem;
  }
};

inline Animation animate(GestureKind kind, double s0, const KinematicsConfig& cfg) {
  Animation a;
  a.kind = kind;
  if (kind == GestureKind::click) return a;
  if (kind == GestureKind::drag) {
    for (double t : drag_entry_times(s0, cfg)) a.entry_ms.push_back(t * 1000.0);
    a.settle_ms = s0 / cfg.drag_decel * 1000.0;
    a.total_px = s0 * s0 / (2.0 * cfg.drag_decel);
  } else {
    a.entry_ms = fling_entry_times(s0, cfg);
    FlingTotals t = fling_total(s0, cfg);
    a.settle_ms = t.duration_ms;
    a.total_px = t.distance_px;
  }
  return a;
}

// Clip occupying the majority of the viewport at scroll offset x
// (relative clip index; ties go to the earlier clip).
inline std::int64_t majority_clip_offset(double x_px, double h) {
  double c = std::floor(x_px / h);
  double frac = x_px - c * h;
  return static_cast<std::int64_t>(c) + (frac > h / 2.0 ? 1 : 0);
}

struct Visit {
  int clip = 0;
  double start_ms = 0.0;
  double end_ms = 0.0;
  double duration_ms() const { return end_ms - start_ms; }
};

struct WatchSession {
  std::vector<Visit> visits;  // consecutive in time, clip index strictly increasing... see merge
  double session_ms = 0.0;
  bool truncated_at_end = false;  // gesture stream scrolled past the last clip

  std::vector<double> durations_ms(std::size_t n_clips) const {
    std::vector<double> u(n_clips, 0.0);
    for (const auto& v : visits) u[static_cast<std::size_t>(v.clip)] += v.duration_ms();
    return u;
  }
};

// Where each gesture actually fired: the clip the new animation starts from.
// The simulator uses these to rebuild the scheduler's per-gesture prediction
// with exactly the anchoring the ground-truth composition used.
struct GestureAnchor {
  std::size_t gesture_index = 0;
  int clip = 0;
  bool in_session = true;  // false for gestures at/after session end (ignored)
};

struct ComposeResult {
  WatchSession session;
  std::vector<GestureAnchor> anchors;
};

// Composes a gesture stream into per-clip watch durations.
//
// Rules: within an animation the m-th crossed clip is watched for
// u_m = t_m - t_{m-1}; the tail from the last crossing plus the dwell until
// the next gesture accrues to the settled clip (viewport majority, ties to
// the earlier clip); a gesture arriving mid-animation truncates the running
// durations at its timestamp and starts boundary-aligned from the majority
// clip; clicks do not scroll. Scrolling past the playlist end pins the
// position to the last clip and sets truncated_at_end.
inline ComposeResult gestures_to_session(const std::vector<GestureEvent>& gestures,
                                         std::size_t n_clips, double session_ms,
                                         const KinematicsConfig& cfg) {
  if (n_clips == 0) throw std::invalid_argument("gestures_to_session: empty playlist");
  for (std::size_t i = 1; i < gestures.size(); ++i)
    if (gestures[i].ts_ms < gestures[i - 1].ts_ms)
      throw std::invalid_argument("gestures_to_session: gestures not sorted by timestamp");

  ComposeResult res;
  res.session.session_ms = session_ms;
  int last = static_cast<int>(n_clips) - 1;
  int clip = 0;
  auto emit = [&](double a, double b, int c) {
    if (b > a) res.session.visits.push_back({c, a, b});
  };

  double cursor = 0.0;
  for (std::size_t gi = 0; gi < gestures.size(); ++gi) {
    const GestureEvent& g = gestures[gi];
    double ts = static_cast<double>(g.ts_ms);
    if (ts >= session_ms) {
      res.anchors.push_back({gi, clip, false});
      continue;
    }
    // dwell on the current clip until this gesture fires
    emit(cursor, ts, clip);
    cursor = ts;
    double window_end = session_ms;
    if (gi + 1 < gestures.size())
      window_end = std::min(session_ms, static_cast<double>(gestures[gi + 1].ts_ms));
    double window = window_end - ts;

    res.anchors.push_back({gi, clip, true});
    if (g.kind == GestureKind::click) {
      emit(ts, window_end, clip);
      cursor = window_end;
      continue;
    }

    Animation anim = animate(g.kind, g.speed, cfg);
    int p0 = clip;
    double prev = 0.0;
    std::size_t crossed = 0;
    bool hit_end = false;
    while (crossed < anim.entry_ms.size() && anim.entry_ms[crossed] < window) {
      if (clip >= last) { hit_end = true; break; }
      emit(ts + prev, ts + anim.entry_ms[crossed], clip);
      prev = anim.entry_ms[crossed];
      ++clip;
      ++crossed;
    }
    if (hit_end) {
      res.session.truncated_at_end = true;
      emit(ts + prev, window_end, clip);
    } else if (crossed == anim.entry_ms.size() && anim.settle_ms < window + 1e-12 &&
               window >= 0) {
      // animation completed inside the window: tail + dwell go to the settled clip
      std::int64_t settled = p0 + majority_clip_offset(anim.total_px, cfg.clip_height_px);
      if (settled > last) { settled = last; res.session.truncated_at_end = true; }
      clip = static_cast<int>(settled);
      emit(ts + prev, window_end, clip);
    } else {
      // truncated mid-animation: partial duration to the clip in view,
      // next gesture anchors at the majority clip of the truncation point
      emit(ts + prev, window_end, clip);
      double x = anim.distance_at(window, cfg, g.speed);
      std::int64_t maj = p0 + majority_clip_offset(x, cfg.clip_height_px);
      if (maj > last) { maj = last; res.session.truncated_at_end = true; }
      clip = static_cast<int>(maj);
    }
    cursor = window_end;
  }
  emit(cursor, session_ms, clip);

  // merge adjacent visits of the same clip
  std::vector<Visit> merged;
  for (const auto& v : res.session.visits) {
    if (!merged.empty() && merged.back().clip == v.clip &&
        std::abs(merged.back().end_ms - v.start_ms) < 1e-9) {
      merged.back().end_ms = v.end_ms;
    } else {
      merged.push_back(v);
    }
  }
  res.session.visits = std::move(merged);
  return res;
}

// Slot-rounded playback plan: start slots use floor(absolute_ms / slot_ms),
// durations are rounded down to whole slots; zero-slot visits are dropped.
struct SlotVisit {
  int clip = 0;
  Slot start = 0;     // absolute slot (u0 already added)
  int duration = 0;   // slots
  Slot end() const { return start + duration; }
};

inline std::vector<SlotVisit> session_slot_visits(const WatchSession& s, Slot u0, int slot_ms) {
  std::vector<SlotVisit> out;
  for (const auto& v : s.visits) {
    Slot start = u0 + static_cast<Slot>(std::floor(v.start_ms / slot_ms));
    int dur = static_cast<int>(std::floor(v.duration_ms() / slot_ms));
    if (dur > 0) out.push_back({v.clip, start, dur});
  }
  return out;
}

}  // namespace clipsched
