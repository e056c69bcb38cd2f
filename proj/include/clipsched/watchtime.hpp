// Watch-time download scheduling: the gesture-driven heuristic (sort by
// u^2 * discontinuity, place each playback deadline's bytes as late as
// feasible, then pull paid downloads forward into idle zero-cost slots),
// the SeqD/NextD baselines, and an exhaustive-search oracle for tiny
// instances.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "clipsched/core.hpp"
#include "clipsched/kinematics.hpp"
#include "clipsched/metrics.hpp"

namespace clipsched {

// w_i = u_i^2 / sum u_k^2
inline std::vector<double> watch_weights(const std::vector<double>& durations) {
  if (durations.empty()) throw std::invalid_argument("watch_weights: empty durations");
  double sum = 0.0;
  for (double u : durations) {
    if (u <= 0) throw std::invalid_argument("watch_weights: durations must be positive");
    sum += u * u;
  }
  std::vector<double> w(durations.size());
  for (std::size_t i = 0; i < durations.size(); ++i) w[i] = durations[i] * durations[i] / sum;
  return w;
}

// A clip whose upcoming playback a gesture revealed: predicted viewport entry
// slot and predicted dwell (slots). The settled clip is predicted at the full
// clip length; a later gesture rebuilds the queue with fresh predictions.
struct RevealedVisit {
  int clip = 0;
  Slot playback_start = 0;
  int pred_slots = 0;
};

struct WatchCandidate {
  int clip = 0;
  Slot playback_start = 0;
  int m = 0;            // min(pred, L) playback slots that need data
  double u_pred = 0.0;  // predicted dwell, slots
  double weight = 0.0;  // u^2 / sum u^2 within the candidate set
  double disc_now = 0.0;
  Bytes have = 0;
  Bytes unit = 0;
  double priority() const { return u_pred * u_pred * disc_now; }
};

struct CandidateSet {
  std::vector<WatchCandidate> watch;  // sorted descending by u^2 * disc
};

// Per-slot download queue over [begin, end). Each slot tracks the free byte
// capacity and committed items per link; cleared wholesale on a new gesture
// by constructing a fresh queue.
class SlotQueue {
 public:
  struct Item {
    std::int32_t video = 0;
    std::int32_t unit = 0;
    Bytes bytes = 0;
    std::int8_t link = 0;
  };
  struct Placement {
    Slot slot = 0;
    std::int8_t link = 0;
    Bytes bytes = 0;
  };

  SlotQueue() = default;
  SlotQueue(Slot begin, Slot end, const NetworkTimeline& tl) : begin_(begin) {
    Slot n = std::max<Slot>(0, end - begin);
    cells_.resize(static_cast<std::size_t>(n));
    for (Slot i = 0; i < n; ++i) {
      const SlotInfo& s = tl.at(begin + i);
      auto& c = cells_[static_cast<std::size_t>(i)];
      c.rate[0] = s.primary;
      c.rate[1] = s.secondary;
      c.free[0] = s.primary.link != LinkType::none ? s.primary.bandwidth : 0;
      c.free[1] = s.has_secondary() ? s.secondary.bandwidth : 0;
    }
  }

  Slot begin() const { return begin_; }
  Slot end() const { return begin_ + static_cast<Slot>(cells_.size()); }
  bool empty() const {
    for (const auto& c : cells_)
      if (!c.items.empty()) return false;
    return true;
  }

  Bytes free_at(Slot t, int link) const {
    if (t < begin_ || t >= end()) return 0;
    return cells_[static_cast<std::size_t>(t - begin_)].free[link];
  }

  const std::vector<Item>& items_at(Slot t) const {
    static const std::vector<Item> kEmpty;
    if (t < begin_ || t >= end()) return kEmpty;
    return cells_[static_cast<std::size_t>(t - begin_)].items;
  }

  const SlotLink& link_at(Slot t, int link) const {
    static const SlotLink kNone{};
    if (t < begin_ || t >= end()) return kNone;
    return cells_[static_cast<std::size_t>(t - begin_)].rate[link];
  }

  // Gathers `need` bytes of free capacity scanning latest -> earliest within
  // [begin, latest]; at one slot the cheaper link goes first. Returns an
  // empty vector when the full need cannot be met.
  std::vector<Placement> trial_place_latest(Bytes need, Slot latest) const {
    std::vector<Placement> out;
    if (need <= 0) return out;
    Slot hi = std::min(latest, end() - 1);
    for (Slot t = hi; t >= begin_ && need > 0; --t) {
      const auto& c = cells_[static_cast<std::size_t>(t - begin_)];
      int order[2] = {0, 1};
      if (c.rate[1].link != LinkType::none && c.rate[1].cost < c.rate[0].cost) {
        order[0] = 1;
        order[1] = 0;
      }
      for (int li : order) {
        if (need <= 0) break;
        Bytes take = std::min(need, c.free[li]);
        if (take <= 0) continue;
        out.push_back({t, static_cast<std::int8_t>(li), take});
        need -= take;
      }
    }
    if (need > 0) return {};
    return out;
  }

  // Pro-rata charge (micro-dollars, millijoules) a trial would add.
  std::pair<double, double> charge_estimate(const std::vector<Placement>& trial) const {
    double cost = 0.0, energy = 0.0;
    for (const auto& p : trial) {
      const SlotLink& l = link_at(p.slot, p.link);
      if (l.bandwidth <= 0) continue;
      cost += static_cast<double>(l.cost) * p.bytes / l.bandwidth;
      energy += static_cast<double>(l.energy) * p.bytes / l.bandwidth;
    }
    return {cost, energy};
  }

  // Cost of serving `need` bytes from the cheapest free capacity <= latest.
  // Returns the placeable amount (may be less than need).
  Bytes cheapest_cost(Bytes need, Slot latest, double* cost, double* energy) const {
    struct Chunk {
      double cost_rate, energy_rate;
      Bytes avail;
    };
    std::vector<Chunk> chunks;
    Slot hi = std::min(latest, end() - 1);
    for (Slot t = begin_; t <= hi; ++t) {
      const auto& c = cells_[static_cast<std::size_t>(t - begin_)];
      for (int li = 0; li < 2; ++li) {
        if (c.free[li] <= 0 || c.rate[li].bandwidth <= 0) continue;
        chunks.push_back({static_cast<double>(c.rate[li].cost) / c.rate[li].bandwidth,
                          static_cast<double>(c.rate[li].energy) / c.rate[li].bandwidth,
                          c.free[li]});
      }
    }
    std::sort(chunks.begin(), chunks.end(),
              [](const Chunk& a, const Chunk& b) { return a.cost_rate < b.cost_rate; });
    Bytes placed = 0;
    *cost = 0;
    *energy = 0;
    for (const auto& ch : chunks) {
      if (placed >= need) break;
      Bytes take = std::min(need - placed, ch.avail);
      *cost += ch.cost_rate * take;
      *energy += ch.energy_rate * take;
      placed += take;
    }
    return placed;
  }

  void commit(const std::vector<Placement>& trial, int video, int unit) {
    for (const auto& p : trial) {
      auto& c = cells_[static_cast<std::size_t>(p.slot - begin_)];
      c.free[p.link] -= p.bytes;
      c.items.push_back({video, unit, p.bytes, p.link});
    }
  }

  Bytes scheduled_bytes(int video) const {
    Bytes sum = 0;
    for (const auto& c : cells_)
      for (const auto& it : c.items)
        if (it.video == video) sum += it.bytes;
    return sum;
  }

  // Moves paid downloads forward (earlier) into idle zero-cost capacity,
  // draining the latest-scheduled paid bytes first.
  void fill_forward() {
    for (std::size_t rc = 0; rc < cells_.size(); ++rc) {
      for (int rl = 0; rl < 2; ++rl) {
        auto& recv = cells_[rc];
        if (recv.rate[rl].link == LinkType::none || recv.rate[rl].cost != 0) continue;
        if (recv.free[rl] <= 0) continue;
        for (std::size_t dc = cells_.size(); dc-- > rc + 1 && recv.free[rl] > 0;) {
          auto& donor = cells_[dc];
          for (std::size_t ii = donor.items.size(); ii-- > 0 && recv.free[rl] > 0;) {
            Item& it = donor.items[ii];
            if (donor.rate[it.link].cost == 0) continue;
            Bytes mv = std::min(recv.free[rl], it.bytes);
            if (mv <= 0) continue;
            recv.items.push_back({it.video, it.unit, mv, static_cast<std::int8_t>(rl)});
            recv.free[rl] -= mv;
            donor.free[it.link] += mv;
            it.bytes -= mv;
            if (it.bytes == 0) donor.items.erase(donor.items.begin() + static_cast<long>(ii));
          }
        }
      }
    }
  }

  DownloadSchedule to_schedule() const {
    DownloadSchedule s;
    for (std::size_t i = 0; i < cells_.size(); ++i)
      for (const auto& it : cells_[i].items)
        s.assignments.push_back({begin_ + static_cast<Slot>(i), it.video, it.unit, it.bytes, it.link});
    s.sort();
    return s;
  }

 private:
  struct Cell {
    Bytes free[2] = {0, 0};
    SlotLink rate[2];
    std::vector<Item> items;
  };
  Slot begin_ = 0;
  std::vector<Cell> cells_;
};

// Marginal test of Algorithm-1 line 8: downloading is worth it iff the
// weighted discontinuity drop beats the normalized cost/energy it adds.
inline bool marginal_benefit_test(double disc_drop, double added_cost_microusd,
                                  double added_energy_mj, const ObjectiveWeights& w) {
  double gain = w.p * disc_drop;
  double loss = 0.0;
  if (w.q > 0 && w.c_max > 0) loss += w.q * added_cost_microusd / static_cast<double>(w.c_max);
  if (w.r > 0 && w.e_max > 0) loss += w.r * added_energy_mj / static_cast<double>(w.e_max);
  return gain > loss;
}

inline CandidateSet build_candidates(const std::vector<RevealedVisit>& revealed,
                                     const Playlist& playlist, int slot_ms,
                                     const std::vector<Bytes>& delivered) {
  CandidateSet set;
  double usq = 0.0;
  for (const auto& r : revealed) usq += static_cast<double>(r.pred_slots) * r.pred_slots;
  for (const auto& r : revealed) {
    if (r.pred_slots <= 0) continue;
    const VideoClip& clip = playlist.clips[static_cast<std::size_t>(r.clip)];
    ClipGeometry g = clip_geometry(clip, slot_ms);
    WatchCandidate c;
    c.clip = r.clip;
    c.playback_start = r.playback_start;
    c.m = std::min(r.pred_slots, g.length_slots);
    c.u_pred = static_cast<double>(r.pred_slots);
    c.weight = usq > 0 ? c.u_pred * c.u_pred / usq : 0.0;
    c.have = delivered[static_cast<std::size_t>(r.clip)];
    c.unit = g.unit_bytes;
    int covered = static_cast<int>(std::min<Bytes>(c.have / c.unit, c.m));
    c.disc_now = 1.0 - static_cast<double>(covered) / c.m;
    set.watch.push_back(c);
  }
  std::sort(set.watch.begin(), set.watch.end(), [](const WatchCandidate& a, const WatchCandidate& b) {
    double pa = a.priority(), pb = b.priority();
    if (pa != pb) return pa > pb;
    return a.clip < b.clip;
  });
  return set;
}

// Rebuilds the schedule queue for one gesture: fresh queue, candidates sorted
// by u^2 * disc, per-video benefit filter, cumulative-aware latest-feasible
// placement with a per-deadline benefit re-check, then fill-forward.
inline SlotQueue on_gesture(Slot now, const std::vector<RevealedVisit>& revealed,
                            const Playlist& playlist, const NetworkTimeline& timeline,
                            const std::vector<Bytes>& delivered, const ObjectiveWeights& weights) {
  Slot horizon = now + 1;
  for (const auto& r : revealed) {
    const VideoClip& clip = playlist.clips[static_cast<std::size_t>(r.clip)];
    ClipGeometry g = clip_geometry(clip, timeline.slot_ms());
    int m = std::min(r.pred_slots, g.length_slots);
    horizon = std::max(horizon, r.playback_start + m);  // last usable slot + 1
  }
  SlotQueue queue(now, horizon, timeline);
  CandidateSet set = build_candidates(revealed, playlist, timeline.slot_ms(), delivered);

  for (const auto& cand : set.watch) {
    Bytes missing = static_cast<Bytes>(cand.m) * cand.unit - cand.have;
    if (missing <= 0 || cand.disc_now <= 0.0) continue;
    Slot last_usable = cand.playback_start + cand.m - 2;

    // per-video filter on the cheapest feasible slots
    double est_cost = 0, est_energy = 0;
    Bytes placeable = queue.cheapest_cost(missing, last_usable, &est_cost, &est_energy);
    if (placeable <= 0) continue;
    double drop = cand.weight * cand.disc_now * static_cast<double>(placeable) / missing;
    if (!marginal_benefit_test(drop, est_cost, est_energy, weights)) continue;

    Bytes scheduled = 0;  // bytes committed for this clip (all land by their deadlines)
    for (int k = 1; k <= cand.m; ++k) {
      Slot usable = cand.playback_start + k - 2;
      if (usable < now) continue;  // deadline already unmeetable
      Bytes need = static_cast<Bytes>(k) * cand.unit - cand.have - scheduled;
      if (need <= 0) continue;
      auto trial = queue.trial_place_latest(need, usable);
      if (trial.empty()) continue;  // this deadline cannot be met in full
      auto [c_add, e_add] = queue.charge_estimate(trial);
      if (!marginal_benefit_test(cand.weight / cand.m, c_add, e_add, weights)) continue;
      queue.commit(trial, cand.clip, k - 1);
      scheduled += need;
    }
  }
  queue.fill_forward();
  return queue;
}

// Sequential Downloading: whole videos in playlist order from u0, saturating
// every slot, blind to user actions and storage.
inline DownloadSchedule seqd(const Playlist& playlist, const NetworkTimeline& timeline) {
  DownloadSchedule s;
  std::size_t v = 0;
  Bytes got = 0;
  for (Slot t = playlist.start_offset_u0; t < timeline.size() && v < playlist.size(); ++t) {
    const SlotInfo& info = timeline.at(t);
    for (int li = 0; li < 2 && v < playlist.size(); ++li) {
      const SlotLink& link = li == 0 ? info.primary : info.secondary;
      Bytes cap = link.link != LinkType::none ? link.bandwidth : 0;
      while (cap > 0 && v < playlist.size()) {
        ClipGeometry g = clip_geometry(playlist.clips[v], timeline.slot_ms());
        Bytes take = std::min(cap, g.size() - got);
        if (take > 0) {
          std::int32_t unit = static_cast<std::int32_t>(got / g.unit_bytes);
          s.assignments.push_back({t, static_cast<std::int32_t>(v),
                                   std::min(unit, g.length_slots - 1), take,
                                   static_cast<std::int8_t>(li)});
          cap -= take;
          got += take;
        }
        if (got >= g.size()) {
          ++v;
          got = 0;
        }
      }
    }
  }
  s.sort();
  return s;
}

// Next-one Downloading: during each visit, fetch the playlist successor of the
// viewport clip in its entirety; switch targets when the viewport moves.
inline DownloadSchedule nextd(const std::vector<SlotVisit>& visits, const Playlist& playlist,
                              const NetworkTimeline& timeline) {
  DownloadSchedule s;
  std::vector<Bytes> got(playlist.size(), 0);
  for (const auto& visit : visits) {
    std::size_t target = static_cast<std::size_t>(visit.clip) + 1;
    if (target >= playlist.size()) continue;
    ClipGeometry g = clip_geometry(playlist.clips[target], timeline.slot_ms());
    for (Slot t = visit.start; t < visit.end(); ++t) {
      if (got[target] >= g.size()) break;
      const SlotInfo& info = timeline.at(t);
      for (int li = 0; li < 2; ++li) {
        const SlotLink& link = li == 0 ? info.primary : info.secondary;
        Bytes cap = link.link != LinkType::none ? link.bandwidth : 0;
        Bytes take = std::min(cap, g.size() - got[target]);
        if (take <= 0) continue;
        std::int32_t unit = static_cast<std::int32_t>(got[target] / g.unit_bytes);
        s.assignments.push_back({t, static_cast<std::int32_t>(target),
                                 std::min(unit, g.length_slots - 1), take,
                                 static_cast<std::int8_t>(li)});
        got[target] += take;
      }
    }
  }
  s.sort();
  return s;
}

// ---------------------------------------------------------------------------
// Exhaustive oracle for tiny instances (tests only).

struct TinyInstance {
  Playlist playlist;               // <= 4 clips
  NetworkTimeline timeline;
  std::vector<SlotVisit> visits;   // playback plan
  ObjectiveWeights weights;
};

struct BruteForceResult {
  DownloadSchedule schedule;
  double objective = 0.0;
};

// Minimizes p*D + q*C/Cmax + r*E/Emax over all per-slot video assignments.
// Slot bandwidths must be whole multiples of the unit size.
inline BruteForceResult brute_force_optimal(const TinyInstance& inst) {
  const std::size_t n = inst.playlist.size();
  if (n == 0 || n > 4) throw std::invalid_argument("brute_force_optimal: need 1..4 videos");
  std::vector<ClipGeometry> geo(n);
  std::vector<int> m(n, 0);
  std::vector<Slot> start(n, 0);
  std::vector<double> weight(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) geo[i] = clip_geometry(inst.playlist.clips[i], inst.timeline.slot_ms());
  double usq = 0.0;
  for (const auto& v : inst.visits) usq += static_cast<double>(v.duration) * v.duration;
  for (const auto& v : inst.visits) {
    std::size_t i = static_cast<std::size_t>(v.clip);
    m[i] = std::min(v.duration, geo[i].length_slots);
    start[i] = v.start;
    weight[i] = usq > 0 ? static_cast<double>(v.duration) * v.duration / usq : 0.0;
  }
  Slot t_end = 0;
  std::size_t states = 1;
  for (std::size_t i = 0; i < n; ++i) {
    t_end = std::max(t_end, start[i] + m[i]);
    states *= static_cast<std::size_t>(m[i] + 1);
    if (states > 100000) throw std::invalid_argument("brute_force_optimal: instance too large");
  }
  if (t_end > 64) throw std::invalid_argument("brute_force_optimal: horizon too long");
  for (Slot t = 0; t < t_end; ++t) {
    const SlotLink& l = inst.timeline.at(t).primary;
    if (l.link == LinkType::none) continue;
    for (std::size_t i = 0; i < n; ++i)
      if (l.bandwidth % geo[i].unit_bytes != 0)
        throw std::invalid_argument("brute_force_optimal: bandwidth not unit-granular");
  }

  std::vector<std::size_t> radix(n, 1);
  for (std::size_t i = 1; i < n; ++i) radix[i] = radix[i - 1] * static_cast<std::size_t>(m[i - 1] + 1);
  auto encode = [&](const std::vector<int>& got) {
    std::size_t s = 0;
    for (std::size_t i = 0; i < n; ++i) s += radix[i] * static_cast<std::size_t>(got[i]);
    return s;
  };

  // miss penalty incurred when entering slot t with `got` units delivered
  auto miss_penalty = [&](Slot t, const std::vector<int>& got) {
    double pen = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (m[i] == 0) continue;
      Slot k = t - start[i] + 1;  // indicator index whose deadline slot is t
      if (k >= 1 && k <= m[i] && got[i] < static_cast<int>(k))
        pen += inst.weights.p * weight[i] / m[i];
    }
    return pen;
  };

  const double kInf = std::numeric_limits<double>::infinity();
  std::size_t total = states * static_cast<std::size_t>(t_end + 1);
  std::vector<double> memo(total, -1.0);
  std::vector<std::int8_t> choice(total, -2);

  auto action_charge = [&](Slot t, int units, Bytes unit_bytes, double* cost, double* energy) {
    const SlotLink& l = inst.timeline.at(t).primary;
    Bytes bytes = static_cast<Bytes>(units) * unit_bytes;
    *cost = l.bandwidth > 0 ? static_cast<double>(l.cost) * bytes / l.bandwidth : 0.0;
    *energy = l.bandwidth > 0 ? static_cast<double>(l.energy) * bytes / l.bandwidth : 0.0;
  };

  std::vector<int> got(n, 0);
  auto solve = [&](auto&& self, Slot t) -> double {
    if (t >= t_end) return 0.0;
    std::size_t key = static_cast<std::size_t>(t) * states + encode(got);
    if (memo[key] >= 0.0) return memo[key];
    double pen = miss_penalty(t, got);
    const SlotLink& l = inst.timeline.at(t).primary;
    // idle
    double best = pen + self(self, t + 1);
    std::int8_t best_choice = -1;
    if (l.link != LinkType::none && l.bandwidth > 0) {
      for (std::size_t v = 0; v < n; ++v) {
        if (got[v] >= m[v]) continue;
        int units = static_cast<int>(std::min<Bytes>(l.bandwidth / geo[v].unit_bytes,
                                                     m[v] - got[v]));
        if (units <= 0) continue;
        double c, e;
        action_charge(t, units, geo[v].unit_bytes, &c, &e);
        double extra = 0.0;
        if (inst.weights.q > 0 && inst.weights.c_max > 0)
          extra += inst.weights.q * c / static_cast<double>(inst.weights.c_max);
        if (inst.weights.r > 0 && inst.weights.e_max > 0)
          extra += inst.weights.r * e / static_cast<double>(inst.weights.e_max);
        got[v] += units;
        double val = pen + extra + self(self, t + 1);
        got[v] -= units;
        if (val < best - 1e-15) {
          best = val;
          best_choice = static_cast<std::int8_t>(v);
        }
      }
    }
    memo[key] = best;
    choice[key] = best_choice;
    return best;
  };
  double obj = solve(solve, 0);
  (void)kInf;

  // replay the argmin path to materialize the schedule
  BruteForceResult res;
  res.objective = obj;
  std::fill(got.begin(), got.end(), 0);
  for (Slot t = 0; t < t_end; ++t) {
    std::size_t key = static_cast<std::size_t>(t) * states + encode(got);
    std::int8_t ch = choice[key];
    if (ch >= 0) {
      std::size_t v = static_cast<std::size_t>(ch);
      const SlotLink& l = inst.timeline.at(t).primary;
      int units = static_cast<int>(std::min<Bytes>(l.bandwidth / geo[v].unit_bytes, m[v] - got[v]));
      res.schedule.assignments.push_back({t, static_cast<std::int32_t>(v), got[v],
                                          static_cast<Bytes>(units) * geo[v].unit_bytes, 0});
      got[v] += units;
    }
  }
  res.schedule.sort();
  return res;
}

}  // namespace clipsched
