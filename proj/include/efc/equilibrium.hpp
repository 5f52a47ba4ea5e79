#pragma once

#include <cstdint>
#include <vector>

#include "efc/rate_engine.hpp"

namespace efc {

// Probability vector over the enumeration of P_n.
struct DistributionOnPn {
  int n = 0;
  std::vector<double> weights;
};

double tv_distance(const DistributionOnPn& a, const DistributionOnPn& b);

// Enumeration index of a partition inside a generator's state list.
std::size_t state_index(const Generator& gen, const Partition& pi);

DistributionOnPn dirac_at(const Generator& gen, const Partition& pi);

// Closed communicating classes of the rate graph (strongly connected
// components with no outgoing rate).
struct ClosedClassSummary {
  std::size_t component_count = 0;
  std::vector<std::vector<std::uint32_t>> closed_classes;
};
ClosedClassSummary closed_classes(const Generator& gen);

// Raised when the rate graph has several closed classes, so no unique
// stationary distribution exists.  Cannot happen for characteristics built
// from the four-parameter family, but the solver checks rather than assumes.
class MultipleClosedClassesError : public NumericalError {
 public:
  explicit MultipleClosedClassesError(std::vector<std::vector<std::uint32_t>> classes);
  const std::vector<std::vector<std::uint32_t>>& classes() const { return classes_; }

 private:
  std::vector<std::vector<std::uint32_t>> classes_;
};

// Unique stationary distribution: zero off the closed class, solved to
// residual 1e-12 on it (sparse LU, dense and power-iteration fallbacks).
DistributionOnPn stationary_distribution(const Generator& gen);

// Pushforward under restriction to [m].
DistributionOnPn project(const DistributionOnPn& rho, int m);

// init * exp(t G) by uniformization; the reported truncation error is the
// discarded Poisson tail mass.
struct TransientResult {
  DistributionOnPn distribution;
  double truncation_error = 0;
  int terms = 0;
};
TransientResult transient_distribution(const Generator& gen, const DistributionOnPn& init,
                                       double t);

// Doubles t until the transient distribution from init is within tv_target
// of rho; returns the achieved (t, tv).
struct ConvergencePoint {
  double t = 0;
  double tv = 0;
};
ConvergencePoint convergence_time(const Generator& gen, const DistributionOnPn& init,
                                  const DistributionOnPn& rho, double tv_target,
                                  double t_limit = 1e6);

std::vector<double> block_count_marginal(const Generator& gen, const DistributionOnPn& rho);

// Stationary mass of states whose first block is the singleton {1}.
double isolated_first_element_mass(const Generator& gen, const DistributionOnPn& rho);

// Smallest total fragmentation exit rate among states of P_n with exactly K
// blocks: minimized over the integer partitions of n into K parts, not over
// a guessed extremal profile.
double min_fragmentation_exit_rate(const Characteristics& chars, int n, int K);

// Diagnostics mirroring the equilibrium bounds: block-count tail bounds,
// the binary-fragmentation birth/death balance, and the isolated-element
// (dust proxy) bounds, all evaluated on the exact stationary solution.
struct EquilibriumReport {
  int n = 0;
  DistributionOnPn rho;
  std::size_t closed_class_size = 0;
  std::vector<double> block_count_marginal;  // a_1..a_n
  double isolated_one_mass = 0;
  double pair_split_bound = 0;  // q_2: rate at which 1 splits from a fixed neighbor
  bool fragmentates_quickly = false;  // representable criterion: c_e > 0
  bool coalesces_quickly = false;     // representable criterion: c_k > 0
  double dislocation_mass = 0;
  double coag_sum_integral = 0;

  struct BlockCountBound {
    int K = 0;
    double mass = 0;          // a_K
    double reentry_rate = 0;  // total collision rate at K+1 blocks
    double min_exit_rate = 0;
    double bound = 0;  // reentry / min exit
    bool holds = false;
  };
  std::vector<BlockCountBound> block_count_bounds;

  bool balance_applicable = false;  // binary conservative dislocation, no erosion, c_k > 0
  struct BalanceRow {
    int K = 0;
    double lhs = 0;  // a_K * K * p
    double rhs = 0;  // a_{K+1} * c_k K (K+1) / 2
    bool holds = false;
  };
  std::vector<BalanceRow> balance_rows;

  struct DustBound {
    int b = 0;
    double exit_rate = 0;            // f(b)
    double isolated_tail_mass = 0;   // rho(I_n, #blocks > b)
    double bound = 0;                // q_2 / f(b)
    double isolated_low_mass = 0;    // rho(I_n, #blocks <= b)
    bool holds = false;
  };
  std::vector<DustBound> dust_bounds;
};

EquilibriumReport equilibrium_report(const Characteristics& chars, int n, int k_max, int b_max);

}  // namespace efc
