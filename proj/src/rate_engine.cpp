#include "efc/rate_engine.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <unordered_map>

#include "efc/rate_kernel.hpp"

namespace efc {

namespace {

detail::BasicCharacteristics<double> to_basic(const Characteristics& chars) {
  detail::BasicCharacteristics<double> basic;
  basic.erosion_rate = chars.erosion_rate;
  basic.kingman_rate = chars.kingman_rate;
  for (const auto& atom : chars.dislocation.atoms())
    basic.dislocation_atoms.emplace_back(atom.weight, atom.vector.masses());
  for (const auto& atom : chars.coagulation.atoms())
    basic.coagulation_atoms.emplace_back(atom.weight, atom.vector.masses());
  return basic;
}

std::string rgs_key(const Partition& pi) {
  std::string key;
  for (int a : pi.rgs()) key.push_back(static_cast<char>(a));
  return key;
}

}  // namespace

double coag_rate(const Characteristics& chars, const Partition& grouping) {
  return detail::coag_rate_of(to_basic(chars), grouping);
}

double frag_rate(const Characteristics& chars, const Partition& sub) {
  return detail::frag_rate_of(to_basic(chars), sub);
}

std::vector<std::pair<Partition, double>> transition_rates(const Characteristics& chars,
                                                           const Partition& pi) {
  return detail::transition_rates_of(to_basic(chars), pi);
}

std::size_t Generator::entry_count() const {
  std::size_t total = 0;
  for (const auto& row : rows) total += row.size();
  return total;
}

Generator build_generator(const Characteristics& chars, int n, int max_n) {
  if (n < 1) throw ValidationError("generator needs n >= 1");
  const int bound = std::min(max_n, kMaxEnumerationN);
  if (n > bound)
    throw ValidationError("state-space too large: Bell(" + std::to_string(n) + ") = " +
                          std::to_string(bell_number(n)) + " states exceeds the bound n <= " +
                          std::to_string(bound));

  const auto basic = to_basic(chars);

  Generator gen;
  gen.n = n;
  gen.states = enumerate_partitions(n);
  std::unordered_map<std::string, std::uint32_t> index;
  index.reserve(gen.states.size() * 2);
  for (std::size_t i = 0; i < gen.states.size(); ++i)
    index.emplace(rgs_key(gen.states[i]), static_cast<std::uint32_t>(i));

  // Per-level move tables: rates depend only on the grouping / sub-partition,
  // not on the state, so they are shared across all rows.
  std::vector<std::vector<Partition>> level(n + 1);
  std::vector<std::vector<double>> coag_table(n + 1), frag_table(n + 1);
  for (int m = 1; m <= n; ++m) {
    level[m] = enumerate_partitions(m);
    coag_table[m].resize(level[m].size(), 0.0);
    frag_table[m].resize(level[m].size(), 0.0);
    for (std::size_t j = 0; j < level[m].size(); ++j) {
      const auto& move = level[m][j];
      if (!move.is_singletons()) coag_table[m][j] = detail::coag_rate_of(basic, move);
      if (!move.is_one_block()) frag_table[m][j] = detail::frag_rate_of(basic, move);
    }
  }

  gen.rows.resize(gen.states.size());
  gen.row_sums.assign(gen.states.size(), 0.0);
  for (std::size_t i = 0; i < gen.states.size(); ++i) {
    const auto& pi = gen.states[i];
    const int m = pi.block_count();
    std::vector<Generator::Entry> entries;
    if (m >= 2)
      for (std::size_t j = 0; j < level[m].size(); ++j) {
        if (coag_table[m][j] <= 0) continue;
        entries.push_back({index.at(rgs_key(coag(pi, level[m][j]))), coag_table[m][j]});
      }
    for (int k = 1; k <= m; ++k) {
      const int l = pi.block_size(k);
      if (l < 2) continue;
      for (std::size_t j = 0; j < level[l].size(); ++j) {
        if (frag_table[l][j] <= 0) continue;
        entries.push_back({index.at(rgs_key(frag(pi, level[l][j], k))), frag_table[l][j]});
      }
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.col < b.col; });
    auto& row = gen.rows[i];
    for (const auto& e : entries) {
      if (!row.empty() && row.back().col == e.col)
        row.back().rate += e.rate;
      else
        row.push_back(e);
    }
    for (const auto& e : row) gen.row_sums[i] += e.rate;
  }
  return gen;
}

double first_block_capture_rate(const Characteristics& chars, int m) {
  if (m < 2) throw ValidationError("capture rate needs at least two blocks");
  const auto basic = to_basic(chars);
  double rate = 0;
  for (const auto& grouping : enumerate_partitions(m))
    if (grouping.block(1).size() >= 2) rate += detail::coag_rate_of(basic, grouping);
  return rate;
}

double pair_split_rate(const Characteristics& chars) {
  return frag_rate(chars, Partition::singletons(2));
}

void write_generator(const Generator& gen, const std::string& triplet_path,
                     const std::string& states_path) {
  std::ofstream triplets(triplet_path);
  if (!triplets) throw IoError("cannot open " + triplet_path);
  char buffer[64];
  for (std::size_t i = 0; i < gen.rows.size(); ++i)
    for (const auto& e : gen.rows[i]) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", e.rate);
      triplets << i << ' ' << e.col << ' ' << buffer << '\n';
    }
  if (!triplets.flush()) throw IoError("failed writing " + triplet_path);

  std::ofstream states(states_path);
  if (!states) throw IoError("cannot open " + states_path);
  for (std::size_t i = 0; i < gen.states.size(); ++i)
    states << i << '\t' << gen.states[i].to_string() << '\n';
  if (!states.flush()) throw IoError("failed writing " + states_path);
}

}  // namespace efc
