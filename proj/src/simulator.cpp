#include "efc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "efc/rate_engine.hpp"

namespace efc {

const char* event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::kInit: return "init";
    case EventKind::kCoag: return "coag";
    case EventKind::kFrag: return "frag";
    case EventKind::kErosion: return "erosion";
    case EventKind::kDustMark: return "dust_mark";
  }
  return "unknown";
}

std::size_t PartitionTrajectory::index_at(double t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) throw ValidationError("time precedes the path start");
  return static_cast<std::size_t>(it - times.begin()) - 1;
}

double ScalarTrajectory::value_at(double t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) throw ValidationError("time precedes the path start");
  const auto i = static_cast<std::size_t>(it - times.begin()) - 1;
  double v = values[i];
  if (flow_rate > 0) v = 1.0 - (1.0 - v) * std::exp(-flow_rate * (t - times[i]));
  return v;
}

namespace {

// Holding-time draw; exact floating-point ties against the current clock are
// broken by redrawing.
double holding_time(RandomStream& rng, double rate, double now) {
  double dt = rng.exponential(rate);
  int guard = 0;
  while (now + dt == now) {
    dt = rng.exponential(rate);
    if (++guard > 1000) {
      dt = std::nextafter(now, std::numeric_limits<double>::infinity()) - now;
      break;
    }
  }
  return dt;
}

void require_runnable(const Characteristics& chars) {
  auto report = validate_characteristics(chars);
  if (!report.valid())
    throw ValidationError("invalid characteristics: " + report.violations.front());
}

int singleton_count(const Partition& pi) {
  int count = 0;
  for (const auto& blk : pi.blocks())
    if (blk.size() == 1) ++count;
  return count;
}

struct Recorder {
  PartitionTrajectory* traj;
  bool keep_states;

  void push(double t, EventKind kind, const Partition& pi, int dust) {
    traj->times.push_back(t);
    traj->events.push_back(kind);
    traj->block_counts.push_back(pi.block_count());
    traj->dust_counts.push_back(dust);
    if (keep_states) traj->states.push_back(pi);
  }
};

PartitionTrajectory make_trajectory(int n, SimMode mode, double horizon,
                                    std::uint64_t master_seed, std::uint64_t stream_index) {
  PartitionTrajectory traj;
  traj.n = n;
  traj.mode = mode;
  traj.horizon = horizon;
  traj.master_seed = master_seed;
  traj.stream_index = stream_index;
  return traj;
}

// ---------------------------------------------------------------------------
// Jump-chain mode: full transition rows, memoized per visited state.

PartitionTrajectory simulate_gillespie(const Characteristics& chars, int n,
                                       const Partition& init, double horizon,
                                       std::uint64_t master_seed, std::uint64_t stream_index,
                                       const SimulateOptions& options) {
  if (n > kMaxEnumerationN)
    throw ValidationError("jump mode needs full rate rows (n <= " +
                          std::to_string(kMaxEnumerationN) + "); use the atom mode instead");
  struct Row {
    std::vector<Partition> targets;
    std::vector<double> rates;
    double total = 0;
  };
  std::unordered_map<Partition, Row, PartitionHash> rows;
  auto row_of = [&](const Partition& pi) -> const Row& {
    auto it = rows.find(pi);
    if (it != rows.end()) return it->second;
    Row row;
    for (auto& [target, rate] : transition_rates(chars, pi)) {
      row.total += rate;
      row.targets.push_back(std::move(target));
      row.rates.push_back(rate);
    }
    return rows.emplace(pi, std::move(row)).first->second;
  };

  auto traj = make_trajectory(n, SimMode::kGillespie, horizon, master_seed, stream_index);
  RandomStream rng(master_seed, stream_index);
  Recorder rec{&traj, n <= options.record_threshold};

  Partition pi = init;
  double t = 0;
  rec.push(t, EventKind::kInit, pi, singleton_count(pi));
  while (traj.size() < options.max_events) {
    const Row& row = row_of(pi);
    if (row.total <= 0) {
      traj.absorbed = true;
      break;
    }
    t += holding_time(rng, row.total, t);
    if (t > horizon) break;
    const std::size_t pick = rng.categorical(row.rates, row.total);
    const auto& target = row.targets[pick];
    const EventKind kind =
        target.block_count() < pi.block_count() ? EventKind::kCoag : EventKind::kFrag;
    pi = target;
    rec.push(t, kind, pi, singleton_count(pi));
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Poisson-atom mode.  The state is the restricted partition plus, per
// element, whether it is dust of the unrestricted process: an element is
// dust after being eroded and stops being dust when a coagulation paintbox
// hands its slot a real color.  With no Kingman component this bookkeeping
// is exact; the Kingman channel clears flags only through merges visible in
// [n].

struct AtomView {
  double weight = 0;
  std::vector<double> masses;
  double dust = 0;
};

std::vector<AtomView> atom_views(const DiscreteMeasureOnSimplex& measure) {
  std::vector<AtomView> views;
  for (const auto& atom : measure.atoms())
    views.push_back({atom.weight, atom.vector.masses(), atom.vector.dust()});
  return views;
}

// probability that a paintbox leaves j slots pairwise separate
class SingletonProbCache {
 public:
  explicit SingletonProbCache(const RankedMassVector& x) : x_(x) {}
  double operator()(int j) {
    if (j <= 1) return 1.0;
    if (static_cast<int>(cache_.size()) <= j) cache_.resize(j + 1, -1.0);
    if (cache_[j] < 0) cache_[j] = paintbox_restriction_prob(x_, Partition::singletons(j));
    return cache_[j];
  }

 private:
  RankedMassVector x_;
  std::vector<double> cache_;
};

int color_of(const std::vector<double>& masses, double u) {
  double acc = 0;
  for (std::size_t c = 0; c < masses.size(); ++c) {
    acc += masses[c];
    if (u <= acc) return static_cast<int>(c);
  }
  return -1;  // dust
}

PartitionTrajectory simulate_poisson(const Characteristics& chars, int n,
                                     const Partition& init, double horizon,
                                     std::uint64_t master_seed, std::uint64_t stream_index,
                                     const SimulateOptions& options) {
  auto traj = make_trajectory(n, SimMode::kPoissonAtoms, horizon, master_seed, stream_index);
  traj.tracks_dust = true;
  RandomStream rng(master_seed, stream_index);
  Recorder rec{&traj, n <= options.record_threshold};

  const auto coag_atoms = atom_views(chars.coagulation);
  const auto disl_atoms = atom_views(chars.dislocation);
  std::vector<SingletonProbCache> separate_prob;
  separate_prob.reserve(coag_atoms.size());
  for (const auto& atom : chars.coagulation.atoms()) separate_prob.emplace_back(atom.vector);

  Partition pi = init;
  // initial-state convention: restriction singletons start as dust
  std::vector<char> dust(n + 1, 0);
  int dust_total = 0;
  for (int e = 1; e <= n; ++e) {
    dust[e] = pi.block(pi.block_of(e)).size() == 1 ? 1 : 0;
    dust_total += dust[e];
  }

  double t = 0;
  rec.push(t, EventKind::kInit, pi, dust_total);

  std::vector<double> channel_rates;
  std::vector<std::pair<int, int>> channel_ids;  // (channel kind, payload)
  constexpr int kChanKingman = 0, kChanCoag = 1, kChanErosion = 2, kChanDisl = 3;

  while (traj.size() < options.max_events) {
    const int m = pi.block_count();
    channel_rates.clear();
    channel_ids.clear();

    if (chars.kingman_rate > 0 && m >= 2) {
      channel_rates.push_back(chars.kingman_rate * m * (m - 1) / 2.0);
      channel_ids.emplace_back(kChanKingman, 0);
    }
    for (std::size_t a = 0; a < coag_atoms.size(); ++a) {
      // silent atom: every dust slot painted dust, all other slots apart
      const double p_silent =
          std::pow(coag_atoms[a].dust, dust_total) * separate_prob[a](m - dust_total);
      const double rate = coag_atoms[a].weight * (1.0 - p_silent);
      if (rate > 0) {
        channel_rates.push_back(rate);
        channel_ids.emplace_back(kChanCoag, static_cast<int>(a));
      }
    }
    if (chars.erosion_rate > 0 && dust_total < n) {
      channel_rates.push_back(chars.erosion_rate * (n - dust_total));
      channel_ids.emplace_back(kChanErosion, 0);
    }
    for (std::size_t a = 0; a < disl_atoms.size(); ++a) {
      for (int k = 1; k <= m; ++k) {
        const auto& blk = pi.block(k);
        if (blk.size() == 1 && dust[blk.front()]) continue;  // already dust
        double same_color = 0;
        for (double x : disl_atoms[a].masses)
          same_color += std::pow(x, static_cast<double>(blk.size()));
        const double rate = disl_atoms[a].weight * (1.0 - same_color);
        if (rate > 0) {
          channel_rates.push_back(rate);
          channel_ids.emplace_back(kChanDisl, static_cast<int>(a) * (n + 1) + k);
        }
      }
    }

    double total = 0;
    for (double r : channel_rates) total += r;
    if (total <= 0) {
      traj.absorbed = true;
      break;
    }
    t += holding_time(rng, total, t);
    if (t > horizon) break;

    const auto [chan, payload] = channel_ids[rng.categorical(channel_rates, total)];
    if (chan == kChanKingman) {
      const std::size_t pair =
          rng.uniform_index(static_cast<std::size_t>(m) * (m - 1) / 2);
      std::size_t seen = 0;
      int a = 1, b = 2;
      for (int i = 1; i <= m; ++i)
        for (int j = i + 1; j <= m; ++j)
          if (seen++ == pair) {
            a = i;
            b = j;
          }
      std::vector<std::vector<int>> blocks;
      std::vector<int> merged;
      for (int k = 1; k <= m; ++k) {
        if (k == a || k == b)
          merged.insert(merged.end(), pi.block(k).begin(), pi.block(k).end());
        else
          blocks.push_back(pi.block(k));
      }
      for (int e : merged)
        if (dust[e]) {
          dust[e] = 0;
          --dust_total;
        }
      blocks.push_back(std::move(merged));
      pi = Partition::from_blocks(n, std::move(blocks));
      rec.push(t, EventKind::kCoag, pi, dust_total);
    } else if (chan == kChanCoag) {
      const auto& atom = coag_atoms[payload];
      // redraw the slot coloring until it visibly does something
      std::vector<int> color(m);
      for (int guard = 0;; ++guard) {
        bool effect = false;
        for (int k = 1; k <= m; ++k) {
          color[k - 1] = color_of(atom.masses, rng.uniform01());
          if (color[k - 1] < 0) continue;
          const auto& blk = pi.block(k);
          if (blk.size() == 1 && dust[blk.front()]) effect = true;
          for (int k2 = 1; k2 < k && !effect; ++k2) effect = color[k2 - 1] == color[k - 1];
        }
        if (effect) break;
        if (guard > 10000000) throw NumericalError("coagulation atom rejection stalled");
      }
      std::vector<std::vector<int>> blocks;
      std::vector<int> group_color;
      bool merged_any = false;
      for (int k = 1; k <= m; ++k) {
        const auto& blk = pi.block(k);
        if (color[k - 1] >= 0) {
          if (blk.size() == 1 && dust[blk.front()]) {
            dust[blk.front()] = 0;  // painted into mass
            --dust_total;
          }
          bool joined = false;
          for (std::size_t g = 0; g < blocks.size(); ++g) {
            if (group_color[g] == color[k - 1]) {
              blocks[g].insert(blocks[g].end(), blk.begin(), blk.end());
              joined = true;
              merged_any = true;
              break;
            }
          }
          if (joined) continue;
        }
        blocks.push_back(blk);
        group_color.push_back(color[k - 1] >= 0 ? color[k - 1] : -k - 1);
      }
      pi = Partition::from_blocks(n, std::move(blocks));
      rec.push(t, merged_any ? EventKind::kCoag : EventKind::kDustMark, pi, dust_total);
    } else if (chan == kChanErosion) {
      std::vector<int> candidates;
      candidates.reserve(n - dust_total);
      for (int e = 1; e <= n; ++e)
        if (!dust[e]) candidates.push_back(e);
      const int target = candidates[rng.uniform_index(candidates.size())];
      dust[target] = 1;
      ++dust_total;
      const int label = pi.block_of(target);
      EventKind kind = EventKind::kDustMark;
      if (pi.block(label).size() >= 2) {
        std::vector<std::vector<int>> blocks;
        for (int k = 1; k <= m; ++k) {
          if (k != label) {
            blocks.push_back(pi.block(k));
            continue;
          }
          std::vector<int> rest;
          for (int e : pi.block(k))
            if (e != target) rest.push_back(e);
          blocks.push_back(std::move(rest));
          blocks.push_back({target});
        }
        pi = Partition::from_blocks(n, std::move(blocks));
        kind = EventKind::kErosion;
      }
      rec.push(t, kind, pi, dust_total);
    } else {
      const auto& atom = disl_atoms[payload / (n + 1)];
      const int label = payload % (n + 1);
      const auto blk = pi.block(label);
      const auto l = static_cast<int>(blk.size());
      std::vector<int> color(l);
      for (int guard = 0;; ++guard) {
        for (int i = 0; i < l; ++i) color[i] = color_of(atom.masses, rng.uniform01());
        if (l >= 2) {
          bool all_same_real = color[0] >= 0;
          for (int i = 1; i < l && all_same_real; ++i) all_same_real = color[i] == color[0];
          if (!all_same_real) break;
        } else if (color[0] < 0) {
          break;  // a size-one block only changes by dusting
        }
        if (guard > 10000000) throw NumericalError("dislocation atom rejection stalled");
      }
      std::vector<std::vector<int>> blocks;
      for (int k = 1; k <= m; ++k)
        if (k != label) blocks.push_back(pi.block(k));
      std::vector<std::pair<int, std::vector<int>>> classes;
      for (int i = 0; i < l; ++i) {
        if (color[i] < 0) {
          if (!dust[blk[i]]) {
            dust[blk[i]] = 1;
            ++dust_total;
          }
          blocks.push_back({blk[i]});
          continue;
        }
        bool joined = false;
        for (auto& [c, members] : classes)
          if (c == color[i]) {
            members.push_back(blk[i]);
            joined = true;
            break;
          }
        if (!joined) classes.push_back({color[i], {blk[i]}});
      }
      for (auto& [c, members] : classes) blocks.push_back(std::move(members));
      pi = Partition::from_blocks(n, std::move(blocks));
      rec.push(t, l >= 2 ? EventKind::kFrag : EventKind::kDustMark, pi, dust_total);
    }
  }
  return traj;
}

}  // namespace

PartitionTrajectory simulate_path(const Characteristics& chars, int n, const Partition& init,
                                  double horizon, std::uint64_t master_seed,
                                  std::uint64_t stream_index, const SimulateOptions& options) {
  require_runnable(chars);
  if (n < 1) throw ValidationError("simulation needs n >= 1");
  if (init.ground_size() != n) throw ValidationError("initial partition does not live on [n]");
  if (!(horizon > 0)) throw ValidationError("horizon must be positive");
  return options.mode == SimMode::kGillespie
             ? simulate_gillespie(chars, n, init, horizon, master_seed, stream_index, options)
             : simulate_poisson(chars, n, init, horizon, master_seed, stream_index, options);
}

// ---------------------------------------------------------------------------
// Coupled pair: shared fragmentation atoms, coalescence consumed by the EFC
// path alone.  Dislocation atoms address "the block whose least element is
// w", erosion atoms address single elements; neither labelling drifts with
// the state, which is what makes the block-of-1 containment hold pathwise.

CoupledPaths coupled_fragmentation(const Characteristics& chars, int n, const Partition& init,
                                   double horizon, std::uint64_t master_seed,
                                   std::uint64_t stream_index, const SimulateOptions& options) {
  require_runnable(chars);
  if (n < 1) throw ValidationError("simulation needs n >= 1");
  if (init.ground_size() != n) throw ValidationError("initial partition does not live on [n]");
  if (!(horizon > 0)) throw ValidationError("horizon must be positive");

  CoupledPaths out;
  out.efc = make_trajectory(n, SimMode::kPoissonAtoms, horizon, master_seed, stream_index);
  out.fragmentation_only =
      make_trajectory(n, SimMode::kPoissonAtoms, horizon, master_seed, stream_index);
  RandomStream rng(master_seed, stream_index);
  const bool keep_states = n <= options.record_threshold;
  Recorder rec_efc{&out.efc, keep_states};
  Recorder rec_frag{&out.fragmentation_only, keep_states};

  const auto coag_atoms = atom_views(chars.coagulation);
  const auto disl_atoms = atom_views(chars.dislocation);
  std::vector<SingletonProbCache> separate_prob;
  for (const auto& atom : chars.coagulation.atoms()) separate_prob.emplace_back(atom.vector);
  double disl_mass = 0;
  std::vector<double> disl_weights;
  for (const auto& a : disl_atoms) {
    disl_mass += a.weight;
    disl_weights.push_back(a.weight);
  }

  Partition efc_pi = init, frag_pi = init;
  double t = 0;
  rec_efc.push(t, EventKind::kInit, efc_pi, singleton_count(efc_pi));
  rec_frag.push(t, EventKind::kInit, frag_pi, singleton_count(frag_pi));

  // split one block by per-element colors; true if the partition changed
  auto split_by_colors = [n](Partition& pi, int label, const std::vector<int>& palette) {
    const auto blk = pi.block(label);
    if (blk.size() < 2) return false;
    std::vector<std::pair<int, std::vector<int>>> classes;
    for (int e : blk) {
      const int c = palette[e - 1] >= 0 ? palette[e - 1] : -e - 1;
      bool joined = false;
      for (auto& [cc, members] : classes)
        if (cc == c) {
          members.push_back(e);
          joined = true;
          break;
        }
      if (!joined) classes.push_back({c, {e}});
    }
    if (classes.size() <= 1) return false;
    std::vector<std::vector<int>> blocks;
    for (int k = 1; k <= pi.block_count(); ++k)
      if (k != label) blocks.push_back(pi.block(k));
    for (auto& [c, members] : classes) blocks.push_back(std::move(members));
    pi = Partition::from_blocks(n, std::move(blocks));
    return true;
  };

  std::vector<double> channel_rates;
  std::vector<int> channel_kinds;  // 0 erosion, 1 dislocation, 2 kingman, 3+a coag atom a
  while (out.efc.size() < options.max_events) {
    const int m = efc_pi.block_count();
    channel_rates.clear();
    channel_kinds.clear();
    if (chars.erosion_rate > 0) {
      channel_rates.push_back(chars.erosion_rate * n);
      channel_kinds.push_back(0);
    }
    if (disl_mass > 0) {
      channel_rates.push_back(disl_mass * n);
      channel_kinds.push_back(1);
    }
    if (chars.kingman_rate > 0 && m >= 2) {
      channel_rates.push_back(chars.kingman_rate * m * (m - 1) / 2.0);
      channel_kinds.push_back(2);
    }
    for (std::size_t a = 0; a < coag_atoms.size(); ++a) {
      const double rate = coag_atoms[a].weight * (1.0 - separate_prob[a](m));
      if (rate > 0) {
        channel_rates.push_back(rate);
        channel_kinds.push_back(3 + static_cast<int>(a));
      }
    }
    double total = 0;
    for (double r : channel_rates) total += r;
    if (total <= 0) {
      out.efc.absorbed = out.fragmentation_only.absorbed = true;
      break;
    }
    t += holding_time(rng, total, t);
    if (t > horizon) break;

    const int chan = channel_kinds[rng.categorical(channel_rates, total)];
    bool efc_changed = false, frag_changed = false;
    EventKind kind = EventKind::kDustMark;
    if (chan == 0) {
      // erosion atom: detach one element in whichever path still holds it
      const int target = static_cast<int>(rng.uniform_index(n)) + 1;
      kind = EventKind::kErosion;
      std::vector<int> palette(n, 7);
      palette[target - 1] = -1;
      const int efc_label = efc_pi.block_of(target);
      efc_changed = split_by_colors(efc_pi, efc_label, palette);
      const int frag_label = frag_pi.block_of(target);
      frag_changed = split_by_colors(frag_pi, frag_label, palette);
    } else if (chan == 1) {
      // dislocation atom addressed by least element, one shared coloring
      const std::size_t a = rng.categorical(disl_weights, disl_mass);
      const int w_elem = static_cast<int>(rng.uniform_index(n)) + 1;
      kind = EventKind::kFrag;
      std::vector<int> palette(n);
      for (int e = 0; e < n; ++e) palette[e] = color_of(disl_atoms[a].masses, rng.uniform01());
      const int efc_label = efc_pi.block_of(w_elem);
      if (efc_pi.block(efc_label).front() == w_elem)
        efc_changed = split_by_colors(efc_pi, efc_label, palette);
      const int frag_label = frag_pi.block_of(w_elem);
      if (frag_pi.block(frag_label).front() == w_elem)
        frag_changed = split_by_colors(frag_pi, frag_label, palette);
    } else if (chan == 2) {
      const std::size_t pair = rng.uniform_index(static_cast<std::size_t>(m) * (m - 1) / 2);
      std::size_t seen = 0;
      int a = 1, b = 2;
      for (int i = 1; i <= m; ++i)
        for (int j = i + 1; j <= m; ++j)
          if (seen++ == pair) {
            a = i;
            b = j;
          }
      std::vector<std::vector<int>> blocks;
      std::vector<int> merged;
      for (int k = 1; k <= m; ++k) {
        if (k == a || k == b)
          merged.insert(merged.end(), efc_pi.block(k).begin(), efc_pi.block(k).end());
        else
          blocks.push_back(efc_pi.block(k));
      }
      blocks.push_back(std::move(merged));
      efc_pi = Partition::from_blocks(n, std::move(blocks));
      efc_changed = true;
      kind = EventKind::kCoag;
    } else {
      const auto& atom = coag_atoms[chan - 3];
      std::vector<int> color(m);
      for (int guard = 0;; ++guard) {
        for (int k = 0; k < m; ++k) color[k] = color_of(atom.masses, rng.uniform01());
        bool merge = false;
        for (int i = 0; i < m && !merge; ++i)
          for (int j = i + 1; j < m && !merge; ++j)
            merge = color[i] >= 0 && color[i] == color[j];
        if (merge) break;
        if (guard > 10000000) throw NumericalError("coagulation atom rejection stalled");
      }
      std::vector<std::vector<int>> blocks;
      std::vector<int> group_color;
      for (int k = 1; k <= m; ++k) {
        const auto& blk = efc_pi.block(k);
        if (color[k - 1] >= 0) {
          bool joined = false;
          for (std::size_t g = 0; g < blocks.size(); ++g)
            if (group_color[g] == color[k - 1]) {
              blocks[g].insert(blocks[g].end(), blk.begin(), blk.end());
              joined = true;
              break;
            }
          if (joined) continue;
        }
        blocks.push_back(blk);
        group_color.push_back(color[k - 1] >= 0 ? color[k - 1] : -k - 1);
      }
      efc_pi = Partition::from_blocks(n, std::move(blocks));
      efc_changed = true;
      kind = EventKind::kCoag;
    }

    if (!efc_changed && !frag_changed) continue;  // silent atom
    rec_efc.push(t, kind, efc_pi, singleton_count(efc_pi));
    rec_frag.push(t, kind, frag_pi, singleton_count(frag_pi));
  }
  return out;
}

ObservableSeries observables(const PartitionTrajectory& traj) {
  ObservableSeries series;
  series.times = traj.times;
  series.block_counts = traj.block_counts;
  series.dust_fractions.reserve(traj.size());
  for (int d : traj.dust_counts)
    series.dust_fractions.push_back(static_cast<double>(d) / traj.n);
  if (!traj.states.empty()) {
    series.sorted_frequencies.reserve(traj.states.size());
    for (const auto& pi : traj.states) {
      std::vector<double> freq;
      freq.reserve(pi.block_count());
      for (const auto& blk : pi.blocks())
        freq.push_back(static_cast<double>(blk.size()) / traj.n);
      std::sort(freq.begin(), freq.end(), std::greater<>());
      series.sorted_frequencies.push_back(std::move(freq));
    }
  }
  return series;
}

// ---------------------------------------------------------------------------
// Dust-fraction chain.

DustChainParams DustChainParams::from_characteristics(const Characteristics& chars, int n) {
  if (n < 1) throw ValidationError("dust chain needs n >= 1");
  DustChainParams params;
  params.n = n;
  params.erosion_rate = chars.erosion_rate;
  for (const auto& atom : chars.coagulation.atoms())
    params.dust_atoms.emplace_back(atom.weight, atom.vector.dust());
  return params;
}

DustChainRates dust_chain_rates(const DustChainParams& params, int k) {
  if (k < 0 || k > params.n) throw ValidationError("dust count out of range");
  DustChainRates rates;
  rates.up_rate = k < params.n
                      ? params.erosion_rate * params.n * (1.0 - static_cast<double>(k) / params.n)
                      : 0.0;
  rates.down_rates.assign(k + 1, 0.0);
  for (int r = 0; r <= k; ++r) {
    long double binom = 1.0L;
    for (int i = 1; i <= r; ++i) binom = binom * (k - r + i) / i;
    for (const auto& [weight, theta] : params.dust_atoms)
      rates.down_rates[r] += static_cast<double>(
          weight * binom * std::pow(static_cast<long double>(theta), r) *
          std::pow(1.0L - static_cast<long double>(theta), k - r));
  }
  return rates;
}

ScalarTrajectory simulate_dust_chain(const DustChainParams& params, int k0, double horizon,
                                     std::uint64_t master_seed, std::uint64_t stream_index,
                                     std::uint64_t max_events) {
  if (k0 < 0 || k0 > params.n) throw ValidationError("initial dust count out of range");
  if (!(horizon > 0)) throw ValidationError("horizon must be positive");
  ScalarTrajectory traj;
  traj.horizon = horizon;
  traj.master_seed = master_seed;
  traj.stream_index = stream_index;
  RandomStream rng(master_seed, stream_index);

  int k = k0;
  double t = 0;
  traj.times.push_back(t);
  traj.values.push_back(static_cast<double>(k) / params.n);
  while (traj.size() < max_events) {
    auto rates = dust_chain_rates(params, k);
    rates.down_rates.resize(k);  // the r = k entry is a self-transition, drop it
    double total = rates.up_rate;
    for (double w : rates.down_rates) total += w;
    if (total <= 0) {
      traj.absorbed = true;
      break;
    }
    t += holding_time(rng, total, t);
    if (t > horizon) break;
    const double pick = rng.uniform01() * total;
    if (pick <= rates.up_rate && rates.up_rate > 0) {
      ++k;
    } else {
      double remaining = pick - rates.up_rate;
      int r = k - 1;
      for (int i = 0; i < k; ++i) {
        remaining -= rates.down_rates[i];
        if (remaining <= 0) {
          r = i;
          break;
        }
      }
      k = r;
    }
    traj.times.push_back(t);
    traj.values.push_back(static_cast<double>(k) / params.n);
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Limiting dust process: multiplicative jumps plus exponential relaxation.
// Between jumps the flow solves D' = c_e (1 - D) in closed form; at a jump
// with dust mass theta the value multiplies by theta.

ScalarTrajectory simulate_dust_sde(double erosion_rate,
                                   const std::vector<std::pair<double, double>>& dust_atoms,
                                   double d0, double horizon, std::uint64_t master_seed,
                                   std::uint64_t stream_index, std::uint64_t max_events) {
  if (d0 < 0 || d0 > 1) throw ValidationError("initial dust fraction must lie in [0,1]");
  if (!(horizon > 0)) throw ValidationError("horizon must be positive");
  if (erosion_rate < 0) throw ValidationError("erosion rate must be nonnegative");
  double jump_mass = 0;
  std::vector<double> weights;
  for (const auto& [w, theta] : dust_atoms) {
    if (w <= 0 || theta < 0 || theta > 1)
      throw ValidationError("dust atoms need positive weight and theta in [0,1]");
    jump_mass += w;
    weights.push_back(w);
  }

  ScalarTrajectory traj;
  traj.horizon = horizon;
  traj.master_seed = master_seed;
  traj.stream_index = stream_index;
  traj.flow_rate = erosion_rate;
  RandomStream rng(master_seed, stream_index);

  double t = 0, d = d0;
  traj.times.push_back(t);
  traj.values.push_back(d);
  if (jump_mass <= 0) return traj;  // pure flow, fully described by flow_rate

  while (traj.size() < max_events) {
    const double dt = holding_time(rng, jump_mass, t);
    if (t + dt > horizon) break;
    t += dt;
    if (erosion_rate > 0) d = 1.0 - (1.0 - d) * std::exp(-erosion_rate * dt);
    d *= dust_atoms[rng.categorical(weights, jump_mass)].second;
    traj.times.push_back(t);
    traj.values.push_back(d);
    if (erosion_rate == 0 && d == 0) {
      traj.absorbed = true;  // multiplicative jumps cannot leave zero
      break;
    }
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Logistic block-count chain.

LogisticParams LogisticParams::from_characteristics(const Characteristics& chars) {
  std::string missing;
  if (chars.erosion_rate != 0) missing += " zero-erosion";
  if (!chars.coagulation.empty()) missing += " empty-coagulation-measure";
  if (!(chars.kingman_rate > 0)) missing += " positive-kingman-rate";
  for (const auto& atom : chars.dislocation.atoms())
    if (!atom.vector.is_conservative()) {
      missing += " conservative-dislocation";
      break;
    }
  if (!missing.empty()) throw ValidationError("block-count chain requires:" + missing);

  LogisticParams params;
  params.kingman_rate = chars.kingman_rate;
  for (const auto& atom : chars.dislocation.atoms()) {
    const int extra_parts = atom.vector.color_count() - 1;
    if (extra_parts < 1) continue;
    if (static_cast<int>(params.birth_weights.size()) < extra_parts)
      params.birth_weights.resize(extra_parts, 0.0);
    params.birth_weights[extra_parts - 1] += atom.weight;
  }
  return params;
}

LogisticResult simulate_logistic_chain(const LogisticParams& params, std::int64_t init,
                                       double horizon, std::uint64_t master_seed,
                                       std::uint64_t stream_index,
                                       const LogisticOptions& options) {
  if (init < 1) throw ValidationError("initial population must be >= 1");
  if (!(params.kingman_rate > 0))
    throw ValidationError("the block-count chain needs a positive kingman rate");
  for (double p : params.birth_weights)
    if (!(p >= 0) || !std::isfinite(p))
      throw ValidationError("birth weights must be finite and nonnegative");
  if (!(horizon > 0)) throw ValidationError("horizon must be positive");

  LogisticResult result;
  auto& traj = result.trajectory;
  traj.horizon = horizon;
  traj.master_seed = master_seed;
  traj.stream_index = stream_index;
  RandomStream rng(master_seed, stream_index);

  std::int64_t state = init;
  double t = 0;
  traj.times.push_back(t);
  traj.values.push_back(static_cast<double>(state));
  if (state == 1) result.absorption_time = 0.0;

  double birth_mass = 0;
  for (double p : params.birth_weights) birth_mass += p;

  while (traj.size() < options.max_events) {
    if (options.stop_at_one && state == 1) break;
    const double down =
        state > 1 ? params.kingman_rate * static_cast<double>(state) * (state - 1) / 2.0 : 0.0;
    const double up = birth_mass * static_cast<double>(state);
    const double total = up + down;
    if (total <= 0) {
      traj.absorbed = true;
      break;
    }
    t += holding_time(rng, total, t);
    if (t > horizon) break;
    if (down > 0 && rng.uniform01() * total <= down) {
      --state;
    } else {
      state += static_cast<std::int64_t>(rng.categorical(params.birth_weights, birth_mass)) + 1;
    }
    traj.times.push_back(t);
    traj.values.push_back(static_cast<double>(state));
    if (state == 1 && !result.absorption_time) result.absorption_time = t;
  }
  return result;
}

}  // namespace efc
