#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "efc/measures.hpp"
#include "efc/partition.hpp"
#include "efc/rng.hpp"

namespace efc {

enum class SimMode { kGillespie, kPoissonAtoms };

// kDustMark records an atom that changed only the dust bookkeeping (an
// element joined or left the dust at the level of the unrestricted process)
// while the restricted partition stayed put.
enum class EventKind : std::uint8_t { kInit, kCoag, kFrag, kErosion, kDustMark };
const char* event_kind_name(EventKind kind);

struct SimulateOptions {
  SimMode mode = SimMode::kGillespie;
  // Full partition states are recorded only for n <= record_threshold;
  // beyond it the trajectory carries observables alone.
  int record_threshold = 16;
  std::uint64_t max_events = 50000000;
};

struct PartitionTrajectory {
  int n = 0;
  SimMode mode = SimMode::kGillespie;
  double horizon = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
  bool absorbed = false;
  // Poisson-atom paths track which elements are dust of the unrestricted
  // process; jump paths fall back to counting restriction singletons.
  bool tracks_dust = false;

  std::vector<double> times;  // strictly increasing, times[0] = 0
  std::vector<EventKind> events;
  std::vector<int> block_counts;
  std::vector<int> dust_counts;
  std::vector<Partition> states;  // empty when n > record_threshold

  std::size_t size() const { return times.size(); }
  std::size_t index_at(double t) const;  // last event index with time <= t
  int block_count_at(double t) const { return block_counts[index_at(t)]; }
  double dust_fraction_at(double t) const {
    return static_cast<double>(dust_counts[index_at(t)]) / n;
  }
};

// Path of the restricted chain.  Jump mode draws whole rows of transition
// rates (enumeration-bounded); Poisson-atom mode replays thinned atom
// streams and works at any n.
PartitionTrajectory simulate_path(const Characteristics& chars, int n, const Partition& init,
                                  double horizon, std::uint64_t master_seed,
                                  std::uint64_t stream_index = 0,
                                  const SimulateOptions& options = {});

// One EFC path and one pure-fragmentation path driven by the same
// fragmentation atoms (erosion indexed by element, dislocation indexed by
// the least element of the target block); the fragmentation path ignores
// coalescence atoms.  Entries are time-aligned: every event lands in both
// logs.  Pathwise, the block containing 1 in the fragmentation path stays
// inside the block containing 1 in the EFC path; with no coalescence atoms
// the two paths coincide.
struct CoupledPaths {
  PartitionTrajectory efc;
  PartitionTrajectory fragmentation_only;
};
CoupledPaths coupled_fragmentation(const Characteristics& chars, int n, const Partition& init,
                                   double horizon, std::uint64_t master_seed,
                                   std::uint64_t stream_index = 0,
                                   const SimulateOptions& options = {});

// Derived per-event series; sorted block frequencies need recorded states
// and come back empty otherwise.
struct ObservableSeries {
  std::vector<double> times;
  std::vector<int> block_counts;
  std::vector<double> dust_fractions;
  std::vector<std::vector<double>> sorted_frequencies;
};
ObservableSeries observables(const PartitionTrajectory& traj);

// Scalar-valued chains.  flow_rate = 0 means piecewise constant; a positive
// flow rate means the value relaxes toward 1 as 1 - (1-v) e^{-c dt} between
// events (the dust-flow solution).
struct ScalarTrajectory {
  double horizon = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
  bool absorbed = false;
  double flow_rate = 0;
  std::vector<double> times;
  std::vector<double> values;

  std::size_t size() const { return times.size(); }
  double value_at(double t) const;
};

// Dust-fraction chain on {0, 1/n, ..., 1}: up-moves by single-element
// erosion, down-moves binomial under the dust image of the coagulation
// measure.
struct DustChainParams {
  int n = 0;
  double erosion_rate = 0;
  std::vector<std::pair<double, double>> dust_atoms;  // (weight, dust mass in [0,1])

  static DustChainParams from_characteristics(const Characteristics& chars, int n);
};

// Exact rate table at state k/n: the up rate c_e n (1 - k/n) and the down
// rates C(k,r) int theta^r (1-theta)^{k-r} for r = 0..k.  The r = k entry is
// the formula's self-transition; the simulation drops it (it changes
// nothing) but the table reports it.
struct DustChainRates {
  double up_rate = 0;
  std::vector<double> down_rates;
};
DustChainRates dust_chain_rates(const DustChainParams& params, int k);

ScalarTrajectory simulate_dust_chain(const DustChainParams& params, int k0, double horizon,
                                     std::uint64_t master_seed, std::uint64_t stream_index = 0,
                                     std::uint64_t max_events = 50000000);

// Event-driven exact simulation of the limiting dust process: multiplicative
// jumps D -> D theta at Poisson times of the dust-atom measure, exponential
// relaxation toward 1 at the erosion rate in between.
ScalarTrajectory simulate_dust_sde(double erosion_rate,
                                   const std::vector<std::pair<double, double>>& dust_atoms,
                                   double d0, double horizon, std::uint64_t master_seed,
                                   std::uint64_t stream_index = 0,
                                   std::uint64_t max_events = 50000000);

// Block-count chain under conservative dislocation and Kingman coalescence:
// births i -> i+j at rate i p_j, deaths i -> i-1 at rate c_k i (i-1) / 2.
struct LogisticParams {
  std::vector<double> birth_weights;  // p_1..p_J
  double kingman_rate = 0;

  // Requires conservative dislocation atoms, no erosion, no coagulation
  // measure and c_k > 0; p_j collects the weight of atoms with j+1 parts.
  static LogisticParams from_characteristics(const Characteristics& chars);
};

struct LogisticOptions {
  bool stop_at_one = false;
  std::uint64_t max_events = 50000000;
};

struct LogisticResult {
  ScalarTrajectory trajectory;
  std::optional<double> absorption_time;  // first hit of state 1
};
LogisticResult simulate_logistic_chain(const LogisticParams& params, std::int64_t init,
                                       double horizon, std::uint64_t master_seed,
                                       std::uint64_t stream_index = 0,
                                       const LogisticOptions& options = {});

inline constexpr std::int64_t kDefaultLargeInit = 10000;  // stand-in for "from infinity"

}  // namespace efc
