#include "efc/equilibrium.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace efc {

double tv_distance(const DistributionOnPn& a, const DistributionOnPn& b) {
  if (a.n != b.n || a.weights.size() != b.weights.size())
    throw ValidationError("total-variation distance needs distributions on the same space");
  double sum = 0;
  for (std::size_t i = 0; i < a.weights.size(); ++i) sum += std::abs(a.weights[i] - b.weights[i]);
  return 0.5 * sum;
}

std::size_t state_index(const Generator& gen, const Partition& pi) {
  for (std::size_t i = 0; i < gen.states.size(); ++i)
    if (gen.states[i] == pi) return i;
  throw ValidationError("partition " + pi.to_string() + " is not a state of P_" +
                        std::to_string(gen.n));
}

DistributionOnPn dirac_at(const Generator& gen, const Partition& pi) {
  DistributionOnPn d;
  d.n = gen.n;
  d.weights.assign(gen.states.size(), 0.0);
  d.weights[state_index(gen, pi)] = 1.0;
  return d;
}

ClosedClassSummary closed_classes(const Generator& gen) {
  const std::size_t n = gen.states.size();
  // Tarjan's strongly-connected components, iterative.
  std::vector<int> index(n, -1), low(n, 0), component(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<std::uint32_t> stack;
  int next_index = 0;
  int component_count = 0;

  struct Frame {
    std::uint32_t v;
    std::size_t edge;
  };
  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& frame = frames.back();
      const auto& row = gen.rows[frame.v];
      if (frame.edge < row.size()) {
        const std::uint32_t w = row[frame.edge++].col;
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[frame.v] = std::min(low[frame.v], index[w]);
        }
      } else {
        if (low[frame.v] == index[frame.v]) {
          for (;;) {
            const std::uint32_t w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            component[w] = component_count;
            if (w == frame.v) break;
          }
          ++component_count;
        }
        const std::uint32_t v = frame.v;
        frames.pop_back();
        if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
      }
    }
  }

  std::vector<bool> closed(component_count, true);
  for (std::uint32_t v = 0; v < n; ++v)
    for (const auto& e : gen.rows[v])
      if (component[e.col] != component[v]) closed[component[v]] = false;

  ClosedClassSummary summary;
  summary.component_count = component_count;
  std::vector<int> slot(component_count, -1);
  for (std::uint32_t v = 0; v < n; ++v) {
    const int c = component[v];
    if (!closed[c]) continue;
    if (slot[c] == -1) {
      slot[c] = static_cast<int>(summary.closed_classes.size());
      summary.closed_classes.emplace_back();
    }
    summary.closed_classes[slot[c]].push_back(v);
  }
  return summary;
}

MultipleClosedClassesError::MultipleClosedClassesError(
    std::vector<std::vector<std::uint32_t>> classes)
    : NumericalError("rate graph has " + std::to_string(classes.size()) +
                     " closed communicating classes; the stationary distribution is not unique"),
      classes_(std::move(classes)) {}

namespace {

// max |rho G|_j over columns j, with rho given on the full state space.
double stationary_residual(const Generator& gen, const std::vector<double>& weights) {
  std::vector<double> flow(weights.size(), 0.0);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0.0) continue;
    flow[i] -= weights[i] * gen.row_sums[i];
    for (const auto& e : gen.rows[i]) flow[e.col] += weights[i] * e.rate;
  }
  double r = 0;
  for (double f : flow) r = std::max(r, std::abs(f));
  return r;
}

void clamp_and_normalize(std::vector<double>& weights) {
  double total = 0;
  for (double& w : weights) {
    if (w < 0) w = 0;
    total += w;
  }
  if (total <= 0) throw NumericalError("stationary solve produced a zero vector");
  for (double& w : weights) w /= total;
}

// Power iteration on the uniformized kernel restricted to the closed class.
std::vector<double> stationary_by_power_iteration(const Generator& gen,
                                                  const std::vector<std::uint32_t>& cls) {
  std::unordered_map<std::uint32_t, std::size_t> local;
  local.reserve(cls.size() * 2);
  for (std::size_t i = 0; i < cls.size(); ++i) local.emplace(cls[i], i);
  double lambda = 0;
  for (auto g : cls) lambda = std::max(lambda, gen.row_sums[g]);
  if (lambda <= 0) throw NumericalError("closed class with zero dynamics");

  std::vector<double> v(cls.size(), 1.0 / cls.size()), next(cls.size());
  for (int iter = 0; iter < 2000000; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < cls.size(); ++i) {
      const auto g = cls[i];
      next[i] += v[i] * (1.0 - gen.row_sums[g] / lambda);
      for (const auto& e : gen.rows[g]) next[local.at(e.col)] += v[i] * e.rate / lambda;
    }
    double diff = 0;
    for (std::size_t i = 0; i < cls.size(); ++i) diff = std::max(diff, std::abs(next[i] - v[i]));
    v.swap(next);
    if (diff * lambda < 1e-13 && iter > 10) break;
  }
  return v;
}

}  // namespace

DistributionOnPn stationary_distribution(const Generator& gen) {
  auto summary = closed_classes(gen);
  if (summary.closed_classes.size() != 1)
    throw MultipleClosedClassesError(std::move(summary.closed_classes));
  const auto& cls = summary.closed_classes.front();

  DistributionOnPn rho;
  rho.n = gen.n;
  rho.weights.assign(gen.states.size(), 0.0);

  if (cls.size() == 1) {
    rho.weights[cls[0]] = 1.0;
    return rho;
  }

  std::unordered_map<std::uint32_t, std::size_t> local;
  local.reserve(cls.size() * 2);
  for (std::size_t i = 0; i < cls.size(); ++i) local.emplace(cls[i], i);
  const auto n_local = static_cast<Eigen::Index>(cls.size());

  bool solved = false;
  if (cls.size() <= 100000) {
    // Augmented transposed system: flow balance for every state except one,
    // replaced by the normalization row.
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t i = 0; i < cls.size(); ++i) {
      const auto g = cls[i];
      if (i != 0)
        triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), -gen.row_sums[g]);
      for (const auto& e : gen.rows[g]) {
        const std::size_t j = local.at(e.col);
        if (j != 0) triplets.emplace_back(static_cast<int>(j), static_cast<int>(i), e.rate);
      }
    }
    for (Eigen::Index i = 0; i < n_local; ++i) triplets.emplace_back(0, i, 1.0);

    Eigen::SparseMatrix<double> A(n_local, n_local);
    A.setFromTriplets(triplets.begin(), triplets.end());
    A.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() == Eigen::Success) {
      Eigen::VectorXd b = Eigen::VectorXd::Zero(n_local);
      b(0) = 1.0;
      Eigen::VectorXd x = lu.solve(b);
      for (int refine = 0; refine < 2; ++refine) {
        Eigen::VectorXd r = b - A * x;
        if (r.lpNorm<Eigen::Infinity>() < 1e-15) break;
        x += lu.solve(r);
      }
      if (x.allFinite()) {
        for (std::size_t i = 0; i < cls.size(); ++i) rho.weights[cls[i]] = x(i);
        clamp_and_normalize(rho.weights);
        solved = stationary_residual(gen, rho.weights) <= 1e-12;
      }
    }
    if (!solved && cls.size() <= 6000) {
      Eigen::MatrixXd dense = Eigen::MatrixXd(A);
      Eigen::VectorXd b = Eigen::VectorXd::Zero(n_local);
      b(0) = 1.0;
      Eigen::VectorXd x = Eigen::PartialPivLU<Eigen::MatrixXd>(dense).solve(b);
      if (x.allFinite()) {
        std::fill(rho.weights.begin(), rho.weights.end(), 0.0);
        for (std::size_t i = 0; i < cls.size(); ++i) rho.weights[cls[i]] = x(i);
        clamp_and_normalize(rho.weights);
        solved = stationary_residual(gen, rho.weights) <= 1e-12;
      }
    }
  }
  if (!solved) {
    auto v = stationary_by_power_iteration(gen, cls);
    std::fill(rho.weights.begin(), rho.weights.end(), 0.0);
    for (std::size_t i = 0; i < cls.size(); ++i) rho.weights[cls[i]] = v[i];
    clamp_and_normalize(rho.weights);
  }

  const double residual = stationary_residual(gen, rho.weights);
  if (residual > 1e-10)
    throw NumericalError("stationary solve residual " + std::to_string(residual) +
                         " above tolerance");
  return rho;
}

DistributionOnPn project(const DistributionOnPn& rho, int m) {
  if (m < 1 || m > rho.n) throw ValidationError("projection level out of range");
  auto coarse_states = enumerate_partitions(m);
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(coarse_states.size() * 2);
  for (std::size_t i = 0; i < coarse_states.size(); ++i)
    index.emplace(coarse_states[i].rgs_string(), i);

  DistributionOnPn out;
  out.n = m;
  out.weights.assign(coarse_states.size(), 0.0);
  auto fine_states = enumerate_partitions(rho.n);
  if (fine_states.size() != rho.weights.size())
    throw ValidationError("distribution length does not match P_n");
  for (std::size_t i = 0; i < fine_states.size(); ++i) {
    if (rho.weights[i] == 0.0) continue;
    out.weights[index.at(restrict_to(fine_states[i], m).rgs_string())] += rho.weights[i];
  }
  return out;
}

TransientResult transient_distribution(const Generator& gen, const DistributionOnPn& init,
                                       double t) {
  if (t < 0) throw ValidationError("transient distribution needs t >= 0");
  if (init.n != gen.n || init.weights.size() != gen.states.size())
    throw ValidationError("initial distribution does not match the generator");

  TransientResult result;
  result.distribution = init;
  double lambda = 0;
  for (double r : gen.row_sums) lambda = std::max(lambda, r);
  if (lambda * t == 0) return result;

  const double mean = lambda * t;
  if (mean > 5e6) throw NumericalError("uniformization horizon too large: lambda t > 5e6");

  std::vector<double> v = init.weights, next(v.size());
  std::vector<double> acc(v.size(), 0.0);
  double covered = 0;
  int k = 0;
  for (;;) {
    // Poisson(mean) weight of k, in log space to survive large means.
    const double logw = -mean + k * std::log(mean) - std::lgamma(k + 1.0);
    const double w = std::exp(logw);
    if (w > 0) {
      covered += w;
      for (std::size_t i = 0; i < v.size(); ++i) acc[i] += w * v[i];
    }
    ++k;
    if (covered >= 1.0 - 1e-10) break;
    if (k > mean + 12 * std::sqrt(mean) + 60) break;  // numerically exhausted tail
    // v <- v P with P = I + Q / lambda
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] == 0.0) continue;
      next[i] += v[i] * (1.0 - gen.row_sums[i] / lambda);
      for (const auto& e : gen.rows[i]) next[e.col] += v[i] * e.rate / lambda;
    }
    v.swap(next);
  }
  result.truncation_error = std::max(0.0, 1.0 - covered);
  result.terms = k;
  result.distribution.weights = std::move(acc);
  return result;
}

ConvergencePoint convergence_time(const Generator& gen, const DistributionOnPn& init,
                                  const DistributionOnPn& rho, double tv_target,
                                  double t_limit) {
  double lambda = 0;
  for (double r : gen.row_sums) lambda = std::max(lambda, r);
  if (lambda == 0) throw NumericalError("frozen generator cannot converge");
  for (double t = 1.0 / lambda; t <= t_limit; t *= 2) {
    auto res = transient_distribution(gen, init, t);
    const double tv = tv_distance(res.distribution, rho);
    if (tv <= tv_target) return {t, tv};
  }
  throw NumericalError("no convergence to the target total-variation distance by t = " +
                       std::to_string(t_limit));
}

std::vector<double> block_count_marginal(const Generator& gen, const DistributionOnPn& rho) {
  std::vector<double> a(gen.n, 0.0);
  for (std::size_t i = 0; i < gen.states.size(); ++i)
    a[gen.states[i].block_count() - 1] += rho.weights[i];
  return a;
}

double isolated_first_element_mass(const Generator& gen, const DistributionOnPn& rho) {
  double mass = 0;
  for (std::size_t i = 0; i < gen.states.size(); ++i)
    if (gen.states[i].block(1).size() == 1) mass += rho.weights[i];
  return mass;
}

double min_fragmentation_exit_rate(const Characteristics& chars, int n, int K) {
  if (K < 1 || K > n) throw ValidationError("block count out of range");
  std::vector<double> phi(n, 0.0);  // phi[j] = split rate of a block of j+1 elements
  for (int j = 1; j < n; ++j) phi[j] = split_rate_exponent(chars, j);

  double best = std::numeric_limits<double>::infinity();
  // nonincreasing part lists of n with exactly K parts
  auto descend = [&](auto&& self, int remaining, int slots, int cap, double acc) -> void {
    if (slots == 0) {
      if (remaining == 0) best = std::min(best, acc);
      return;
    }
    for (int part = std::min(remaining - (slots - 1), cap); part >= 1; --part)
      self(self, remaining - part, slots - 1, part, acc + (part > 1 ? phi[part - 1] : 0.0));
  };
  descend(descend, n, K, n, 0.0);
  return best;
}

EquilibriumReport equilibrium_report(const Characteristics& chars, int n, int k_max,
                                     int b_max) {
  if (n < 2) throw ValidationError("equilibrium report needs n >= 2");
  if (k_max < 1 || k_max >= n) throw ValidationError("k_max must satisfy 1 <= k_max < n");
  if (b_max < 2 || b_max >= n) throw ValidationError("b_max must satisfy 2 <= b_max < n");

  EquilibriumReport report;
  report.n = n;
  auto gen = build_generator(chars, n);
  report.rho = stationary_distribution(gen);
  report.closed_class_size = closed_classes(gen).closed_classes.front().size();
  report.block_count_marginal = block_count_marginal(gen, report.rho);
  report.isolated_one_mass = isolated_first_element_mass(gen, report.rho);
  report.pair_split_bound = pair_split_rate(chars);
  report.fragmentates_quickly = chars.erosion_rate > 0;
  report.coalesces_quickly = chars.kingman_rate > 0;
  auto validation = validate_characteristics(chars);
  report.dislocation_mass = validation.dislocation_mass;
  report.coag_sum_integral = validation.coag_sum_integral;

  for (int K = 1; K <= k_max; ++K) {
    EquilibriumReport::BlockCountBound row;
    row.K = K;
    row.mass = report.block_count_marginal[K - 1];
    row.reentry_rate = collision_rates(chars, K + 1).total_collision_rate;
    row.min_exit_rate = min_fragmentation_exit_rate(chars, n, K);
    row.bound = row.min_exit_rate > 0 ? row.reentry_rate / row.min_exit_rate
                                      : std::numeric_limits<double>::infinity();
    row.holds = row.mass <= row.bound + 1e-12;
    report.block_count_bounds.push_back(row);
  }

  bool binary = chars.erosion_rate == 0 && chars.kingman_rate > 0;
  for (const auto& atom : chars.dislocation.atoms())
    binary = binary && atom.vector.is_conservative() && atom.vector.color_count() <= 2;
  report.balance_applicable = binary;
  if (binary) {
    const double p = chars.dislocation.total_mass();
    for (int K = 1; K < n; ++K) {
      EquilibriumReport::BalanceRow row;
      row.K = K;
      row.lhs = report.block_count_marginal[K - 1] * K * p;
      row.rhs = report.block_count_marginal[K] * chars.kingman_rate * K * (K + 1) / 2.0;
      row.holds = row.lhs >= row.rhs - 1e-12;
      report.balance_rows.push_back(row);
    }
  }

  for (int b = 2; b <= b_max; ++b) {
    EquilibriumReport::DustBound row;
    row.b = b;
    row.exit_rate = std::numeric_limits<double>::infinity();
    for (int m = b + 1; m <= n; ++m)
      row.exit_rate = std::min(row.exit_rate, first_block_capture_rate(chars, m));
    for (std::size_t i = 0; i < gen.states.size(); ++i) {
      if (gen.states[i].block(1).size() != 1) continue;
      if (gen.states[i].block_count() > b)
        row.isolated_tail_mass += report.rho.weights[i];
      else
        row.isolated_low_mass += report.rho.weights[i];
    }
    row.bound = row.exit_rate > 0 ? report.pair_split_bound / row.exit_rate
                                  : std::numeric_limits<double>::infinity();
    row.holds = row.isolated_tail_mass <= row.bound + 1e-12;
    report.dust_bounds.push_back(row);
  }
  return report;
}

}  // namespace efc
