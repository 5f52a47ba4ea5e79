#include "efc/measures.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "efc/rate_kernel.hpp"

namespace efc {

RankedMassVector RankedMassVector::from(std::vector<double> masses) {
  std::vector<double> kept;
  kept.reserve(masses.size());
  for (double m : masses) {
    if (!std::isfinite(m) || m < 0)
      throw ValidationError("mass entries must be finite and nonnegative");
    if (m > 0) kept.push_back(m);
  }
  std::sort(kept.begin(), kept.end(), std::greater<>());
  const double total = std::accumulate(kept.begin(), kept.end(), 0.0);
  if (total > 1.0 + kMassTol)
    throw ValidationError("mass vector sums to " + std::to_string(total) + " > 1");
  RankedMassVector v;
  v.masses_ = std::move(kept);
  return v;
}

double RankedMassVector::total() const {
  return std::accumulate(masses_.begin(), masses_.end(), 0.0);
}

double RankedMassVector::dust() const { return std::clamp(1.0 - total(), 0.0, 1.0); }

bool RankedMassVector::is_conservative() const { return std::abs(total() - 1.0) <= kMassTol; }

void DiscreteMeasureOnSimplex::add(double weight, RankedMassVector vector) {
  if (!std::isfinite(weight) || weight <= 0)
    throw ValidationError("atom weights must be finite and positive");
  for (auto& atom : atoms_) {
    if (atom.vector == vector) {
      atom.weight += weight;
      return;
    }
  }
  atoms_.push_back({weight, std::move(vector)});
}

double DiscreteMeasureOnSimplex::total_mass() const {
  double t = 0;
  for (const auto& a : atoms_) t += a.weight;
  return t;
}

double DiscreteMeasureOnSimplex::conservative_mass() const {
  double t = 0;
  for (const auto& a : atoms_)
    if (a.vector.is_conservative()) t += a.weight;
  return t;
}

ValidationReport validate_characteristics(const Characteristics& chars) {
  ValidationReport report;
  auto bad_rate = [](double r) { return !std::isfinite(r) || r < 0; };
  if (bad_rate(chars.erosion_rate))
    report.violations.push_back("erosion rate must be finite and nonnegative");
  if (bad_rate(chars.kingman_rate))
    report.violations.push_back("kingman rate must be finite and nonnegative");

  for (const auto& atom : chars.dislocation.atoms()) {
    if (atom.vector.color_count() == 1 && atom.vector.is_conservative())
      report.violations.push_back(
          "dislocation atom at (1,0,...): the trivial split carries no rate");
    report.dislocation_mass += atom.weight;
    double sum_sq = 0;
    for (double x : atom.vector.masses()) sum_sq += x * x;
    report.disl_one_minus_sq_integral += atom.weight * (1.0 - sum_sq);
  }
  for (const auto& atom : chars.coagulation.atoms()) {
    if (atom.vector.color_count() == 0)
      report.violations.push_back(
          "coagulation atom with no mass: the zero vector merges nothing");
    report.coagulation_mass += atom.weight;
    double sum_sq = 0, sum = 0;
    for (double x : atom.vector.masses()) {
      sum_sq += x * x;
      sum += x;
    }
    report.coag_sum_sq_integral += atom.weight * sum_sq;
    report.coag_sum_integral += atom.weight * sum;
  }

  report.degenerate = chars.erosion_rate == 0 && chars.kingman_rate == 0 &&
                      chars.dislocation.empty() && chars.coagulation.empty();
  return report;
}

Partition paintbox_sample(const RankedMassVector& x, int n, RandomStream& rng) {
  if (n < 1) throw ValidationError("paintbox sample needs n >= 1");
  const auto& masses = x.masses();
  // label per element: color index, or a private negative label for dust
  std::vector<int> label(n);
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform01();
    double acc = 0;
    label[i] = -(i + 1);
    for (std::size_t c = 0; c < masses.size(); ++c) {
      acc += masses[c];
      if (u <= acc) {
        label[i] = static_cast<int>(c);
        break;
      }
    }
  }
  std::vector<std::vector<int>> blocks;
  for (int i = 0; i < n; ++i) {
    bool placed = false;
    if (label[i] >= 0) {
      for (auto& blk : blocks) {
        if (label[blk.front() - 1] == label[i]) {
          blk.push_back(i + 1);
          placed = true;
          break;
        }
      }
    }
    if (!placed) blocks.push_back({i + 1});
  }
  return Partition::from_blocks(n, std::move(blocks));
}

double paintbox_restriction_prob(const RankedMassVector& x, const Partition& pi) {
  return detail::paintbox_partition_prob(x.masses(), pi);
}

int erosion_restriction_mass(const Partition& pi) {
  if (pi.is_one_block())
    throw ValidationError("the one-block partition is the neutral fragmentation move");
  const int l = pi.ground_size();
  int count = 0;
  for (int i = 1; i <= l; ++i) {
    std::vector<int> rest;
    for (int e = 1; e <= l; ++e)
      if (e != i) rest.push_back(e);
    auto detachment = Partition::from_blocks(l, {{i}, std::move(rest)});
    if (detachment == pi) ++count;
  }
  return count;
}

int kingman_restriction_mass(const Partition& pi) {
  if (pi.is_singletons())
    throw ValidationError("the all-singleton partition is the neutral coagulation move");
  int pairs = 0;
  for (const auto& blk : pi.blocks()) {
    if (blk.size() == 2)
      ++pairs;
    else if (blk.size() > 2)
      return 0;
  }
  return pairs == 1 ? 1 : 0;
}

int detail::erosion_match_count(const Partition& pi) { return erosion_restriction_mass(pi); }

int detail::kingman_pair_indicator(const Partition& pi) { return kingman_restriction_mass(pi); }

double split_rate_exponent(const Characteristics& chars, double q) {
  if (q < 0) throw ValidationError("split rate exponent needs q >= 0");
  double value = chars.erosion_rate * (q + 1.0);
  for (const auto& atom : chars.dislocation.atoms()) {
    double sum_pow = 0;
    for (double x : atom.vector.masses()) sum_pow += std::pow(x, q + 1.0);
    value += atom.weight * (1.0 - sum_pow);
  }
  return value;
}

double conservative_paintbox_block_count_prob(const RankedMassVector& x, int n, int r) {
  if (!x.is_conservative())
    throw ValidationError("block-count formula applies to conservative mass vectors only");
  const auto& masses = x.masses();
  const int k = static_cast<int>(masses.size());
  if (k > 24) throw ValidationError("too many colors for subset enumeration");
  if (n < 1 || r < 1) throw ValidationError("block-count probability needs n, r >= 1");
  if (r > std::min(n, k)) return 0.0;
  // g(T) = (mass of T)^n; the Moebius transform over subsets turns this into
  // P(set of colors used = exactly T).
  const std::size_t size = std::size_t{1} << k;
  std::vector<double> f(size, 0.0);
  for (std::size_t mask = 0; mask < size; ++mask) {
    double s = 0;
    for (int c = 0; c < k; ++c)
      if (mask & (std::size_t{1} << c)) s += masses[c];
    f[mask] = std::pow(s, n);
  }
  for (int c = 0; c < k; ++c)
    for (std::size_t mask = 0; mask < size; ++mask)
      if (mask & (std::size_t{1} << c)) f[mask] -= f[mask ^ (std::size_t{1} << c)];
  double prob = 0;
  for (std::size_t mask = 0; mask < size; ++mask)
    if (static_cast<int>(std::popcount(mask)) == r) prob += f[mask];
  return std::max(prob, 0.0);
}

namespace {

// Block count of a paintbox draw without materializing the partition.
int sample_block_count(const std::vector<double>& masses, int b, RandomStream& rng) {
  std::vector<bool> used(masses.size(), false);
  int blocks = 0;
  for (int i = 0; i < b; ++i) {
    double u = rng.uniform01();
    double acc = 0;
    bool dust = true;
    for (std::size_t c = 0; c < masses.size(); ++c) {
      acc += masses[c];
      if (u <= acc) {
        if (!used[c]) {
          used[c] = true;
          ++blocks;
        }
        dust = false;
        break;
      }
    }
    if (dust) ++blocks;
  }
  return blocks;
}

}  // namespace

CollisionRates collision_rates(const Characteristics& chars, int b,
                               const CollisionRateOptions& options) {
  if (b < 2) throw ValidationError("collision rates need b >= 2");
  CollisionRates out;
  const double kingman = chars.kingman_rate * b * (b - 1) / 2.0;
  out.total_collision_rate = kingman;
  out.block_decrease_rate = kingman;

  const auto singles = Partition::singletons(b);
  double mc_variance = 0;
  for (const auto& atom : chars.coagulation.atoms()) {
    out.total_collision_rate +=
        atom.weight * (1.0 - paintbox_restriction_prob(atom.vector, singles));
    double capture = 0;
    for (double x : atom.vector.masses()) capture += x * (1.0 - std::pow(1.0 - x, b - 1));
    out.tagged_capture_rate += atom.weight * capture;

    if (b <= options.exact_threshold) {
      for (const auto& pi : enumerate_partitions(b)) {
        if (pi.block_count() == b) continue;
        out.block_decrease_rate += atom.weight * (b - pi.block_count()) *
                                   paintbox_restriction_prob(atom.vector, pi);
      }
    } else {
      out.monte_carlo = true;
      const auto atom_index =
          static_cast<std::uint64_t>(&atom - chars.coagulation.atoms().data());
      RandomStream rng(options.seed, (static_cast<std::uint64_t>(b) << 32) | atom_index);
      double sum = 0, sum_sq = 0;
      for (std::uint64_t s = 0; s < options.mc_samples; ++s) {
        const double drop = b - sample_block_count(atom.vector.masses(), b, rng);
        sum += drop;
        sum_sq += drop * drop;
      }
      const double mean = sum / options.mc_samples;
      const double var = std::max(0.0, sum_sq / options.mc_samples - mean * mean);
      out.block_decrease_rate += atom.weight * mean;
      mc_variance += atom.weight * atom.weight * var / options.mc_samples;
    }
  }
  out.block_decrease_stderr = std::sqrt(mc_variance);
  return out;
}

ComesDownReport comes_down_diagnostic(const Characteristics& chars, int horizon,
                                      const CollisionRateOptions& options) {
  if (horizon < 2) throw ValidationError("comes-down diagnostic needs a horizon >= 2");
  ComesDownReport report;
  report.horizon = horizon;
  report.conservative_coag_mass = chars.coagulation.conservative_mass();

  double running = 0;
  bool degenerate = false;
  for (int b = 2; b <= horizon; ++b) {
    auto rates = collision_rates(chars, b, options);
    report.block_decrease_rates.push_back(rates.block_decrease_rate);
    report.gamma_has_monte_carlo |= rates.monte_carlo;
    if (rates.block_decrease_rate <= 0) {
      degenerate = true;
      report.partial_sums.push_back(running);
      continue;
    }
    running += 1.0 / rates.block_decrease_rate;
    report.partial_sums.push_back(running);
  }

  if (degenerate) {
    report.verdict = "inapplicable (gamma_b = 0)";
    return report;
  }
  // Crude tail estimate: if B more terms of the final size are still small
  // against the accumulated sum, the series has visibly plateaued.
  const double last_term = 1.0 / report.block_decrease_rates.back();
  if (horizon * last_term <= 0.05 * running)
    report.verdict = "criterion met (partial sums plateau)";
  else
    report.verdict = "criterion not met at horizon " + std::to_string(horizon);
  return report;
}

}  // namespace efc
