#include "efc/partition.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace efc {

namespace {

void check_ground_size(int n) {
  if (n < 1) throw ValidationError("ground-set size must be >= 1, got " + std::to_string(n));
}

}  // namespace

Partition Partition::from_blocks(int n, std::vector<std::vector<int>> raw) {
  check_ground_size(n);
  std::vector<int> label_of(n + 1, -1);
  for (std::size_t b = 0; b < raw.size(); ++b) {
    if (raw[b].empty()) throw ValidationError("empty block at position " + std::to_string(b + 1));
    for (int e : raw[b]) {
      if (e < 1 || e > n)
        throw ValidationError("element " + std::to_string(e) + " out of range [1," +
                              std::to_string(n) + "]");
      if (label_of[e] != -1)
        throw ValidationError("element " + std::to_string(e) + " appears in two blocks");
      label_of[e] = static_cast<int>(b);
    }
  }
  for (int e = 1; e <= n; ++e)
    if (label_of[e] == -1)
      throw ValidationError("element " + std::to_string(e) + " missing from every block");

  Partition p;
  p.n_ = n;
  p.blocks_ = std::move(raw);
  for (auto& blk : p.blocks_) std::sort(blk.begin(), blk.end());
  std::sort(p.blocks_.begin(), p.blocks_.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return p;
}

Partition Partition::singletons(int n) {
  check_ground_size(n);
  Partition p;
  p.n_ = n;
  p.blocks_.reserve(n);
  for (int e = 1; e <= n; ++e) p.blocks_.push_back({e});
  return p;
}

Partition Partition::one_block(int n) {
  check_ground_size(n);
  Partition p;
  p.n_ = n;
  p.blocks_.emplace_back();
  p.blocks_[0].reserve(n);
  for (int e = 1; e <= n; ++e) p.blocks_[0].push_back(e);
  return p;
}

Partition Partition::from_rgs(const std::vector<int>& code) {
  if (code.empty()) throw ValidationError("empty restricted-growth string");
  int max_seen = -1;
  std::vector<std::vector<int>> blocks;
  for (std::size_t k = 0; k < code.size(); ++k) {
    int a = code[k];
    if (a < 0 || a > max_seen + 1)
      throw ValidationError("invalid restricted-growth value " + std::to_string(a) +
                            " at position " + std::to_string(k + 1));
    if (a == max_seen + 1) {
      blocks.emplace_back();
      max_seen = a;
    }
    blocks[a].push_back(static_cast<int>(k) + 1);
  }
  Partition p;
  p.n_ = static_cast<int>(code.size());
  p.blocks_ = std::move(blocks);
  return p;  // already canonical: labels appear in least-element order
}

std::vector<int> Partition::rgs() const {
  std::vector<int> code(n_);
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    for (int e : blocks_[b]) code[e - 1] = static_cast<int>(b);
  return code;
}

Partition Partition::parse(std::string_view text) {
  std::vector<std::vector<int>> blocks;
  int max_elem = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '{') throw ValidationError("expected '{' in partition text");
    ++i;
    std::vector<int> blk;
    while (i < text.size() && text[i] != '}') {
      int value = 0;
      auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), value);
      if (ec != std::errc() || value < 1)
        throw ValidationError("malformed element in partition text");
      blk.push_back(value);
      max_elem = std::max(max_elem, value);
      i = static_cast<std::size_t>(ptr - text.data());
      if (i < text.size() && text[i] == ',') ++i;
    }
    if (i == text.size()) throw ValidationError("unterminated block in partition text");
    ++i;  // consume '}'
    blocks.push_back(std::move(blk));
  }
  if (blocks.empty()) throw ValidationError("empty partition text");
  return from_blocks(max_elem, std::move(blocks));
}

Partition Partition::parse_rgs(std::string_view text) {
  std::vector<int> code;
  std::size_t i = 0;
  while (i < text.size()) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), value);
    if (ec != std::errc()) throw ValidationError("malformed restricted-growth string");
    code.push_back(value);
    i = static_cast<std::size_t>(ptr - text.data());
    if (i < text.size()) {
      if (text[i] != ',') throw ValidationError("expected ',' in restricted-growth string");
      ++i;
    }
  }
  return from_rgs(code);
}

std::string Partition::to_string() const {
  std::string out;
  for (const auto& blk : blocks_) {
    out += '{';
    for (std::size_t i = 0; i < blk.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(blk[i]);
    }
    out += '}';
  }
  return out;
}

std::string Partition::rgs_string() const {
  std::string out;
  auto code = rgs();
  for (std::size_t i = 0; i < code.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(code[i]);
  }
  return out;
}

const std::vector<int>& Partition::block(int label) const {
  if (label < 1 || label > block_count())
    throw ValidationError("block label " + std::to_string(label) + " out of range");
  return blocks_[label - 1];
}

int Partition::block_of(int element) const {
  if (element < 1 || element > n_)
    throw ValidationError("element " + std::to_string(element) + " out of range");
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    if (std::binary_search(blocks_[b].begin(), blocks_[b].end(), element))
      return static_cast<int>(b) + 1;
  return 0;  // unreachable on a valid partition
}

std::size_t PartitionHash::operator()(const Partition& p) const {
  // FNV-1a over the restricted-growth string.
  std::uint64_t h = 1469598103934665603ull;
  h = (h ^ static_cast<std::uint64_t>(p.ground_size())) * 1099511628211ull;
  for (int a : p.rgs()) h = (h ^ static_cast<std::uint64_t>(a)) * 1099511628211ull;
  return static_cast<std::size_t>(h);
}

Permutation Permutation::identity(int n) {
  check_ground_size(n);
  std::vector<int> image(n);
  for (int i = 1; i <= n; ++i) image[i - 1] = i;
  return from_image(std::move(image));
}

Permutation Permutation::from_image(std::vector<int> image) {
  const int n = static_cast<int>(image.size());
  check_ground_size(n);
  std::vector<bool> seen(n + 1, false);
  for (int v : image) {
    if (v < 1 || v > n || seen[v])
      throw ValidationError("image is not a permutation of [" + std::to_string(n) + "]");
    seen[v] = true;
  }
  Permutation s;
  s.image_ = std::move(image);
  return s;
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(image_.size());
  for (std::size_t i = 0; i < image_.size(); ++i) inv[image_[i] - 1] = static_cast<int>(i) + 1;
  return from_image(std::move(inv));
}

Partition restrict_to(const Partition& pi, int m) {
  if (m < 1 || m > pi.ground_size())
    throw ValidationError("restriction size " + std::to_string(m) + " out of range [1," +
                          std::to_string(pi.ground_size()) + "]");
  std::vector<std::vector<int>> blocks;
  for (const auto& blk : pi.blocks()) {
    std::vector<int> cut;
    for (int e : blk) {
      if (e > m) break;  // blocks are sorted
      cut.push_back(e);
    }
    if (!cut.empty()) blocks.push_back(std::move(cut));
  }
  return Partition::from_blocks(m, std::move(blocks));
}

Partition coag(const Partition& pi, const Partition& grouping) {
  const int m = pi.block_count();
  if (grouping.ground_size() != m)
    throw ValidationError("coag: grouping is a partition of [" +
                          std::to_string(grouping.ground_size()) + "], expected [" +
                          std::to_string(m) + "]");
  std::vector<std::vector<int>> blocks;
  blocks.reserve(grouping.block_count());
  for (const auto& group : grouping.blocks()) {
    std::vector<int> merged;
    for (int label : group) {
      const auto& blk = pi.block(label);
      merged.insert(merged.end(), blk.begin(), blk.end());
    }
    blocks.push_back(std::move(merged));
  }
  return Partition::from_blocks(pi.ground_size(), std::move(blocks));
}

Partition frag(const Partition& pi, const Partition& sub, int label) {
  if (label < 1 || label > pi.block_count())
    throw ValidationError("frag: block label " + std::to_string(label) + " out of range");
  const auto& target = pi.block(label);
  if (sub.ground_size() != static_cast<int>(target.size()))
    throw ValidationError("frag: sub-partition of [" + std::to_string(sub.ground_size()) +
                          "] does not match block size " + std::to_string(target.size()));
  std::vector<std::vector<int>> blocks;
  for (int b = 1; b <= pi.block_count(); ++b)
    if (b != label) blocks.push_back(pi.block(b));
  // Increasing bijection [l] -> target carries the sub-blocks onto the block.
  for (const auto& sub_blk : sub.blocks()) {
    std::vector<int> piece;
    piece.reserve(sub_blk.size());
    for (int pos : sub_blk) piece.push_back(target[pos - 1]);
    blocks.push_back(std::move(piece));
  }
  return Partition::from_blocks(pi.ground_size(), std::move(blocks));
}

Partition apply_permutation(const Partition& pi, const Permutation& sigma) {
  const int n = pi.ground_size();
  if (sigma.size() != n)
    throw ValidationError("permutation size " + std::to_string(sigma.size()) +
                          " does not match ground-set size " + std::to_string(n));
  // i and j end up together exactly when sigma(i), sigma(j) share a block.
  std::vector<std::vector<int>> groups(pi.block_count());
  for (int i = 1; i <= n; ++i) groups[pi.block_of(sigma(i)) - 1].push_back(i);
  std::vector<std::vector<int>> blocks;
  for (auto& g : groups)
    if (!g.empty()) blocks.push_back(std::move(g));
  return Partition::from_blocks(n, std::move(blocks));
}

std::vector<Partition> enumerate_partitions(int n) {
  check_ground_size(n);
  if (n > kMaxEnumerationN)
    throw ValidationError("enumeration bound exceeded: n = " + std::to_string(n) +
                          " > " + std::to_string(kMaxEnumerationN));
  std::vector<Partition> out;
  out.reserve(bell_number(n));
  std::vector<int> code(n, 0);
  for (;;) {
    out.push_back(Partition::from_rgs(code));
    // next restricted-growth string in lexicographic order
    int k = n - 1;
    for (; k > 0; --k) {
      int max_prefix = 0;
      for (int i = 0; i < k; ++i) max_prefix = std::max(max_prefix, code[i]);
      if (code[k] <= max_prefix) break;
    }
    if (k == 0) break;
    ++code[k];
    std::fill(code.begin() + k + 1, code.end(), 0);
  }
  return out;
}

std::uint64_t bell_number(int n) {
  if (n < 0 || n > 25) throw ValidationError("bell_number supports 0 <= n <= 25");
  // Bell triangle.
  std::vector<std::uint64_t> row{1};
  for (int i = 1; i <= n; ++i) {
    std::vector<std::uint64_t> next;
    next.reserve(row.size() + 1);
    next.push_back(row.back());
    for (std::size_t j = 0; j < row.size(); ++j) next.push_back(next[j] + row[j]);
    row = std::move(next);
  }
  return row.front();
}

}  // namespace efc
