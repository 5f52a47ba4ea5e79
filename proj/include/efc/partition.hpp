#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "efc/errors.hpp"

namespace efc {

// Canonical partition of [n] = {1..n}.
//
// Blocks are stored as sorted integer sequences, the block list is ordered by
// least element, so the block containing 1 is always block 1.  Block labels in
// the public interface are 1-based to match that convention.  Values are
// immutable after construction; all operations return fresh partitions.
class Partition {
 public:
  Partition() = default;

  // Canonicalizes raw blocks: each block sorted, blocks ordered by least
  // element.  Rejects empty blocks, overlaps, out-of-range or missing
  // elements, naming the offending element.
  static Partition from_blocks(int n, std::vector<std::vector<int>> raw);

  static Partition singletons(int n);  // finest partition of [n]
  static Partition one_block(int n);   // coarsest partition of [n]

  // Restricted-growth-string codec.  code[k-1] is the 0-based label of the
  // block containing k; code[0] = 0 and code[k] <= 1 + max(code[0..k-1]).
  static Partition from_rgs(const std::vector<int>& code);
  std::vector<int> rgs() const;

  // Text forms. Blocks print as "{1,3}{2}"; the RGS form prints as "0,1,0".
  // Both round-trip exactly through the parsers below.
  static Partition parse(std::string_view text);
  static Partition parse_rgs(std::string_view text);
  std::string to_string() const;
  std::string rgs_string() const;

  int ground_size() const { return n_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }

  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  // 1-based block label, per the least-element labelling.
  const std::vector<int>& block(int label) const;
  int block_size(int label) const { return static_cast<int>(block(label).size()); }
  // Label of the block containing the given element.
  int block_of(int element) const;

  bool is_singletons() const { return block_count() == n_; }
  bool is_one_block() const { return block_count() == 1; }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  int n_ = 0;
  std::vector<std::vector<int>> blocks_;
};

struct PartitionHash {
  std::size_t operator()(const Partition& p) const;
};

// Bijection of [n]; image(i) is the image of i.
class Permutation {
 public:
  static Permutation identity(int n);
  static Permutation from_image(std::vector<int> image);

  int size() const { return static_cast<int>(image_.size()); }
  int operator()(int i) const { return image_[i - 1]; }
  Permutation inverse() const;

 private:
  std::vector<int> image_;
};

// Blocks intersected with [m], empties dropped, result canonical.
Partition restrict_to(const Partition& pi, int m);

// Coagulation: blocks of pi merged according to the blocks of grouping,
// which must be a partition of [#pi].
Partition coag(const Partition& pi, const Partition& grouping);

// Fragmentation of block `label` of pi by sub, a partition of [block size]
// carried onto the block through the increasing bijection.
Partition frag(const Partition& pi, const Partition& sub, int label);

// Partition induced by i ~ j  <=>  sigma(i) ~_pi sigma(j).
Partition apply_permutation(const Partition& pi, const Permutation& sigma);

// All partitions of [n] in lexicographic restricted-growth-string order.
// Supported for n <= kMaxEnumerationN (Bell(12) ~ 4.2e6 already strains
// memory; larger n has no use at desk scale).
inline constexpr int kMaxEnumerationN = 12;
std::vector<Partition> enumerate_partitions(int n);

// Bell numbers B_0..B_25 fit in 64 bits comfortably up to B_25.
std::uint64_t bell_number(int n);

}  // namespace efc
