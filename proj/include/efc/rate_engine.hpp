#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "efc/measures.hpp"
#include "efc/partition.hpp"

namespace efc {

// Rate of coagulating by the grouping: kingman pair mass plus the paintbox
// mass of the grouping under the coagulation measure.  The all-singleton
// grouping (the neutral move) is rejected.
double coag_rate(const Characteristics& chars, const Partition& grouping);

// Rate of fragmenting a block by the sub-partition: erosion mass plus the
// paintbox mass under the dislocation measure.  The one-block sub-partition
// is rejected.
double frag_rate(const Characteristics& chars, const Partition& sub);

// Off-diagonal transition rates out of pi, in enumeration order of the
// targets.  Rates landing on a common target accumulate; no self-entries.
std::vector<std::pair<Partition, double>> transition_rates(const Characteristics& chars,
                                                           const Partition& pi);

// Sparse rate matrix of the restricted chain over the enumeration of P_n.
// Rows hold off-diagonal entries only; the diagonal is minus the row sum.
struct Generator {
  int n = 0;
  std::vector<Partition> states;
  struct Entry {
    std::uint32_t col;
    double rate;
  };
  std::vector<std::vector<Entry>> rows;
  std::vector<double> row_sums;

  std::size_t entry_count() const;
};

inline constexpr int kDefaultGeneratorBound = 9;

// Builds the full generator; errors when Bell(n) would exceed the bound's
// state count (the error message reports Bell(n)).
Generator build_generator(const Characteristics& chars, int n,
                          int max_n = kDefaultGeneratorBound);

// Total rate at which a state whose first block is the singleton {1} and
// which has m blocks stops having 1 isolated, i.e. the coagulation mass of
// groupings whose first block is not a singleton.
double first_block_capture_rate(const Characteristics& chars, int m);

// Rate at which a given pair of elements in one block is separated: the
// fragmentation rate of the pair partition into singletons.
double pair_split_rate(const Characteristics& chars);

// Plain-text export: "i j rate" triplets plus an index -> partition map.
void write_generator(const Generator& gen, const std::string& triplet_path,
                     const std::string& states_path);

}  // namespace efc
