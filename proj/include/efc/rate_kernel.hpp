#pragma once

// Scalar-generic combinatorics shared by the double-precision rate engine and
// the exact-rational mode.  Everything here is a finite sum over color
// assignments, so instantiating with an exact number type gives exact rates.

#include <map>
#include <utility>
#include <vector>

#include "efc/partition.hpp"

namespace efc::detail {

template <class T>
T int_pow(T base, int e) {
  T out(1);
  for (int i = 0; i < e; ++i) out = out * base;
  return out;
}

// Probability that an x-paintbox on [n] produces exactly the partition pi,
// where x has the given color masses and dust = 1 - sum(colors).  Blocks of
// size >= 2 must be color classes with pairwise distinct colors; singleton
// blocks are either dust-painted or take a color nobody else uses.
template <class T>
T paintbox_partition_prob(const std::vector<T>& colors, const Partition& pi) {
  const int color_count = static_cast<int>(colors.size());
  T dust(1);
  for (const T& c : colors) dust = dust - c;
  if (dust < T(0)) dust = T(0);

  std::vector<int> heavy_sizes;
  int singles = 0;
  for (const auto& blk : pi.blocks()) {
    if (blk.size() >= 2)
      heavy_sizes.push_back(static_cast<int>(blk.size()));
    else
      ++singles;
  }
  if (static_cast<int>(heavy_sizes.size()) > color_count) return T(0);

  std::vector<bool> used(colors.size(), false);

  // Sum over j of (ways to give j of the singletons distinct unused colors)
  // times dust mass for the rest.
  auto singleton_term = [&]() {
    std::vector<T> unused;
    for (int c = 0; c < color_count; ++c)
      if (!used[c]) unused.push_back(colors[c]);
    const int j_max = std::min<int>(singles, static_cast<int>(unused.size()));
    // elementary symmetric polynomials e_0..e_jmax of the unused masses
    std::vector<T> elem(j_max + 1, T(0));
    elem[0] = T(1);
    for (const T& m : unused)
      for (int j = j_max; j >= 1; --j) elem[j] = elem[j] + elem[j - 1] * m;
    T total(0);
    T falling(1);  // singles * (singles-1) * ... , injective placements
    for (int j = 0; j <= j_max; ++j) {
      if (j > 0) falling = falling * T(singles - j + 1);
      total = total + falling * elem[j] * int_pow(dust, singles - j);
    }
    return total;
  };

  // Injective color assignment over the heavy blocks.
  auto assign = [&](auto&& self, std::size_t i) -> T {
    if (i == heavy_sizes.size()) return singleton_term();
    T sum(0);
    for (int c = 0; c < color_count; ++c) {
      if (used[c]) continue;
      used[c] = true;
      sum = sum + int_pow(colors[c], heavy_sizes[i]) * self(self, i + 1);
      used[c] = false;
    }
    return sum;
  };
  return assign(assign, 0);
}

// Number of single-element detachments of [l] matching the partition: counts
// i <= l whose detachment {i} | [l]\{i} restricts to exactly this partition.
int erosion_match_count(const Partition& pi);

// 1 when the partition is one merged pair plus singletons, else 0.
int kingman_pair_indicator(const Partition& pi);

// Characteristics over a generic scalar, for the exact-rational mode.  Atom
// masses must be positive with sum <= 1; weights positive.
template <class T>
struct BasicCharacteristics {
  T erosion_rate{0};
  T kingman_rate{0};
  std::vector<std::pair<T, std::vector<T>>> dislocation_atoms;
  std::vector<std::pair<T, std::vector<T>>> coagulation_atoms;
};

template <class T>
T coag_rate_of(const BasicCharacteristics<T>& chars, const Partition& grouping) {
  if (grouping.is_singletons())
    throw ValidationError("coagulation by the all-singleton partition is the neutral move");
  T rate = chars.kingman_rate * T(kingman_pair_indicator(grouping));
  for (const auto& [w, masses] : chars.coagulation_atoms)
    rate = rate + w * paintbox_partition_prob(masses, grouping);
  return rate;
}

template <class T>
T frag_rate_of(const BasicCharacteristics<T>& chars, const Partition& sub) {
  if (sub.is_one_block())
    throw ValidationError("fragmentation by the one-block partition is the neutral move");
  T rate = chars.erosion_rate * T(erosion_match_count(sub));
  for (const auto& [w, masses] : chars.dislocation_atoms)
    rate = rate + w * paintbox_partition_prob(masses, sub);
  return rate;
}

// Off-diagonal transition rates out of pi as (target, rate) pairs; rates to a
// common target accumulate.  The targets are all coagulations of pi by a
// non-trivial grouping plus all single-block fragmentations by a non-trivial
// sub-partition.
template <class T>
std::vector<std::pair<Partition, T>> transition_rates_of(const BasicCharacteristics<T>& chars,
                                                         const Partition& pi) {
  // Accumulate through the growth-string key so the emitted order is the
  // enumeration order regardless of how moves interleave.
  std::map<std::vector<int>, T> acc;
  auto deposit = [&acc](const Partition& target, T rate) {
    if (!(rate > T(0))) return;
    auto [it, fresh] = acc.emplace(target.rgs(), rate);
    if (!fresh) it->second = it->second + rate;
  };

  const int m = pi.block_count();
  if (m >= 2)
    for (const auto& grouping : enumerate_partitions(m)) {
      if (grouping.is_singletons()) continue;
      deposit(coag(pi, grouping), coag_rate_of(chars, grouping));
    }
  for (int k = 1; k <= m; ++k) {
    const int l = pi.block_size(k);
    if (l < 2) continue;
    for (const auto& sub : enumerate_partitions(l)) {
      if (sub.is_one_block()) continue;
      deposit(frag(pi, sub, k), frag_rate_of(chars, sub));
    }
  }
  std::vector<std::pair<Partition, T>> row;
  row.reserve(acc.size());
  for (auto& [code, rate] : acc) row.emplace_back(Partition::from_rgs(code), std::move(rate));
  return row;
}

}  // namespace efc::detail
