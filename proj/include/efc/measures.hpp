#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "efc/partition.hpp"
#include "efc/rng.hpp"

namespace efc {

inline constexpr double kMassTol = 1e-12;

// Element of the ranked-mass simplex: masses x_1 >= x_2 >= ... > 0 with
// sum <= 1.  The dust mass 1 - sum(x_i) is always derived, never stored.
class RankedMassVector {
 public:
  RankedMassVector() = default;

  // Sorts descending, drops exact zeros.  Rejects negative or non-finite
  // entries and total mass above 1 + kMassTol.
  static RankedMassVector from(std::vector<double> masses);

  const std::vector<double>& masses() const { return masses_; }
  int color_count() const { return static_cast<int>(masses_.size()); }
  double total() const;
  double dust() const;  // clamped to [0,1]

  // Membership in the finite-mass face: total mass 1 within kMassTol.
  bool is_conservative() const;

  friend bool operator==(const RankedMassVector&, const RankedMassVector&) = default;

 private:
  std::vector<double> masses_;
};

struct WeightedAtom {
  double weight = 0;
  RankedMassVector vector;
};

// Finite discrete measure on the ranked-mass simplex.
class DiscreteMeasureOnSimplex {
 public:
  // Rejects nonpositive or non-finite weights; duplicate vectors merge.
  void add(double weight, RankedMassVector vector);

  const std::vector<WeightedAtom>& atoms() const { return atoms_; }
  bool empty() const { return atoms_.empty(); }
  double total_mass() const;
  // Mass carried by conservative atoms (total mass 1).
  double conservative_mass() const;

 private:
  std::vector<WeightedAtom> atoms_;
};

// The four characteristics of an exchangeable fragmentation-coalescence
// process: erosion rate, Kingman pair-merge rate, dislocation measure and
// coagulation measure.
struct Characteristics {
  double erosion_rate = 0;   // c_e
  double kingman_rate = 0;   // c_k
  DiscreteMeasureOnSimplex dislocation;
  DiscreteMeasureOnSimplex coagulation;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool degenerate = false;  // no dynamics at all: every channel is zero
  double dislocation_mass = 0;
  double coagulation_mass = 0;
  double coag_sum_sq_integral = 0;        // integral of sum(x_i^2) against nu_coag
  double disl_one_minus_sq_integral = 0;  // integral of 1 - sum(x_i^2) against nu_disl
  double coag_sum_integral = 0;           // integral of sum(x_i) against nu_coag

  bool valid() const { return violations.empty(); }
};

// Report-style check of the structural rules: nonnegative scalar rates, no
// dislocation atom at (1,0,...), no empty coagulation atom.  The integrals
// above are finite by construction and reported for reference.
ValidationReport validate_characteristics(const Characteristics& chars);

// Random partition of [n] where each element independently picks color k
// with probability x_k or a private dust label with the leftover mass.
Partition paintbox_sample(const RankedMassVector& x, int n, RandomStream& rng);

// Exact probability that the x-paintbox on [n] equals pi.
double paintbox_restriction_prob(const RankedMassVector& x, const Partition& pi);

// Number of atoms of the single-element detachment measure whose restriction
// to [l] equals the given partition (the all-but-one-element split).  The
// one-block partition is the neutral move and is rejected.
int erosion_restriction_mass(const Partition& pi);

// 1 when pi is a single merged pair plus singletons (the restriction of a
// pair-merge atom), else 0.  The all-singleton partition is rejected.
int kingman_restriction_mass(const Partition& pi);

// c_e (q+1) + integral of (1 - sum_i x_i^(q+1)) against the dislocation
// measure: for integer q >= 1 this is the total split rate of a block of
// q+1 elements; concave and nondecreasing in q.
double split_rate_exponent(const Characteristics& chars, double q);

// P(#blocks of an x-paintbox on [n] = r) for a conservative x, by
// inclusion-exclusion over color subsets.  Errors when x carries dust.
double conservative_paintbox_block_count_prob(const RankedMassVector& x, int n, int r);

struct CollisionRateOptions {
  int exact_threshold = 8;         // enumerate P_b up to here, Monte Carlo beyond
  std::uint64_t mc_samples = 20000;
  std::uint64_t seed = 1;
};

// Rates of the block-count process of the coalescent started with b blocks:
// total collision rate, rate at which the block count decreases
// (exact by enumeration for b <= exact_threshold, Monte Carlo beyond,
// with standard error), and the closed-form rate at which a tagged
// singleton is captured by a multiple collision.
struct CollisionRates {
  double total_collision_rate = 0;   // lambda_b
  double block_decrease_rate = 0;    // gamma_b
  double tagged_capture_rate = 0;    // zeta_b
  double block_decrease_stderr = 0;  // zero in exact mode
  bool monte_carlo = false;
};

CollisionRates collision_rates(const Characteristics& chars, int b,
                               const CollisionRateOptions& options = {});

// Truncated comes-down-from-infinity criterion: partial sums of 1/gamma_b up
// to the horizon plus the coagulation mass on conservative vectors.  The
// verdict is a heuristic reading of a truncated infinite criterion and says
// so in its wording.
struct ComesDownReport {
  int horizon = 0;
  std::vector<double> block_decrease_rates;  // gamma_b, b = 2..B
  std::vector<double> partial_sums;          // running sums of 1/gamma_b
  double conservative_coag_mass = 0;
  bool gamma_has_monte_carlo = false;
  std::string verdict;
};

ComesDownReport comes_down_diagnostic(const Characteristics& chars, int horizon,
                                      const CollisionRateOptions& options = {});

}  // namespace efc
