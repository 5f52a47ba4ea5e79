#pragma once

// Test-only oracles, kept independent of the library code paths they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

// Bell numbers via the Bell-triangle recurrence.
inline std::vector<std::uint64_t> bell_table(int n_max) {
  std::vector<std::uint64_t> bell{1};  // B_0
  std::vector<std::uint64_t> row{1};
  for (int i = 1; i <= n_max; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (std::size_t j = 0; j < row.size(); ++j) next.push_back(next[j] + row[j]);
    row = std::move(next);
    bell.push_back(row.front());
  }
  return bell;
}

// All set partitions of [n] as sorted block lists, generated by recursive
// insertion of element k into each existing block or a new one.
inline std::vector<std::vector<std::vector<int>>> all_set_partitions(int n) {
  std::vector<std::vector<std::vector<int>>> result;
  std::vector<std::vector<int>> current;
  std::function<void(int)> insert = [&](int k) {
    if (k > n) {
      result.push_back(current);
      return;
    }
    for (std::size_t b = 0; b < current.size(); ++b) {
      current[b].push_back(k);
      insert(k + 1);
      current[b].pop_back();
    }
    current.push_back({k});
    insert(k + 1);
    current.pop_back();
  };
  insert(1);
  return result;
}

// Exact paintbox probability by brute force over all color assignments.
// Element i takes color c in [1..K] with probability colors[c-1] and a
// private dust color with the leftover probability.  Returns the probability
// that the induced partition (same color <=> same block, dust = singleton)
// has exactly the given blocks (0-based labels per element).
inline double paintbox_prob_bruteforce(const std::vector<double>& colors,
                                       const std::vector<int>& labels) {
  const int n = static_cast<int>(labels.size());
  const int k = static_cast<int>(colors.size());
  double dust = 1.0;
  for (double c : colors) dust -= c;
  double total = 0.0;
  // assignment[i] in [0..k]: 0 = dust, 1..k = colors
  std::vector<int> assignment(n, 0);
  for (;;) {
    double p = 1.0;
    for (int i = 0; i < n; ++i) p *= assignment[i] == 0 ? dust : colors[assignment[i] - 1];
    if (p > 0) {
      bool match = true;
      for (int i = 0; i < n && match; ++i)
        for (int j = i + 1; j < n && match; ++j) {
          bool together = labels[i] == labels[j];
          bool same_color = assignment[i] != 0 && assignment[i] == assignment[j];
          if (together != same_color) match = false;
        }
      if (match) total += p;
    }
    int pos = n - 1;
    while (pos >= 0 && assignment[pos] == k) assignment[pos--] = 0;
    if (pos < 0) break;
    ++assignment[pos];
  }
  return total;
}

// Classical fourth-order Runge-Kutta for scalar ODEs, used as the flow oracle.
inline double rk4(std::function<double(double, double)> f, double y0, double t0, double t1,
                  int steps) {
  double y = y0;
  double t = t0;
  const double h = (t1 - t0) / steps;
  for (int i = 0; i < steps; ++i) {
    double k1 = f(t, y);
    double k2 = f(t + h / 2, y + h / 2 * k1);
    double k3 = f(t + h / 2, y + h / 2 * k2);
    double k4 = f(t + h, y + h * k3);
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += h;
  }
  return y;
}

// Two-sample 3-sigma agreement for binomial proportions.
inline bool proportions_within_3_sigma(std::uint64_t count1, std::uint64_t total1,
                                       std::uint64_t count2, std::uint64_t total2) {
  if (total1 == 0 || total2 == 0) return true;
  const double p1 = static_cast<double>(count1) / total1;
  const double p2 = static_cast<double>(count2) / total2;
  const double pooled = static_cast<double>(count1 + count2) / (total1 + total2);
  const double se =
      std::sqrt(pooled * (1.0 - pooled) * (1.0 / total1 + 1.0 / total2));
  return std::abs(p1 - p2) <= 3.0 * se + 1e-12;
}

}  // namespace oracle
