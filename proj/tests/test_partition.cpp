#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <unordered_set>

#include "efc/partition.hpp"
#include "oracles.hpp"

using efc::Partition;
using efc::Permutation;

TEST_CASE("canonicalization sorts blocks by least element") {
  auto p = Partition::from_blocks(3, {{3, 1}, {2}});
  CHECK(p.to_string() == "{1,3}{2}");

  CHECK(Partition::from_blocks(3, {{1}, {2}, {3}}) == Partition::singletons(3));

  auto q = Partition::from_blocks(4, {{2, 4}, {1, 3}});
  CHECK(q.to_string() == "{1,3}{2,4}");

  // idempotent
  CHECK(Partition::from_blocks(4, q.blocks()) == q);
}

TEST_CASE("canonicalization rejects malformed input naming the element") {
  CHECK_THROWS_WITH_AS(Partition::from_blocks(3, {{1, 2}, {2, 3}}),
                       doctest::Contains("element 2"), efc::ValidationError);
  CHECK_THROWS_WITH_AS(Partition::from_blocks(3, {{1, 2}}), doctest::Contains("element 3"),
                       efc::ValidationError);
  CHECK_THROWS_WITH_AS(Partition::from_blocks(2, {{1, 2, 5}}), doctest::Contains("element 5"),
                       efc::ValidationError);
  CHECK_THROWS_AS(Partition::from_blocks(2, {{1}, {}, {2}}), efc::ValidationError);
  CHECK_THROWS_AS(Partition::from_blocks(0, {}), efc::ValidationError);
}

TEST_CASE("restriction") {
  auto p = Partition::from_blocks(4, {{1, 3}, {2, 4}});
  CHECK(restrict_to(p, 2) == Partition::singletons(2));
  CHECK(restrict_to(Partition::one_block(5), 3) == Partition::one_block(3));
  auto q = Partition::from_blocks(4, {{1, 4}, {2}, {3}});
  CHECK(restrict_to(q, 3) == Partition::singletons(3));
  CHECK(restrict_to(p, 4) == p);
  CHECK_THROWS_AS(restrict_to(p, 0), efc::ValidationError);
  CHECK_THROWS_AS(restrict_to(p, 5), efc::ValidationError);
}

TEST_CASE("coagulation") {
  auto p = Partition::from_blocks(4, {{1, 3}, {2}, {4}});
  auto grouping = Partition::from_blocks(3, {{1, 2}, {3}});
  CHECK(coag(p, grouping).to_string() == "{1,2,3}{4}");

  CHECK(coag(Partition::singletons(3), Partition::one_block(3)) == Partition::one_block(3));
  CHECK_THROWS_AS(coag(p, Partition::one_block(2)), efc::ValidationError);
}

TEST_CASE("fragmentation") {
  auto p = Partition::from_blocks(4, {{1, 2, 4}, {3}});
  auto sub = Partition::from_blocks(3, {{1}, {2, 3}});
  CHECK(frag(p, sub, 1).to_string() == "{1}{2,4}{3}");

  CHECK(frag(Partition::one_block(2), Partition::singletons(2), 1) == Partition::singletons(2));
  CHECK_THROWS_AS(frag(p, sub, 3), efc::ValidationError);
  CHECK_THROWS_AS(frag(p, Partition::one_block(2), 1), efc::ValidationError);
}

TEST_CASE("neutral elements over all partitions, n <= 6") {
  for (int n = 1; n <= 6; ++n) {
    for (const auto& p : efc::enumerate_partitions(n)) {
      const int m = p.block_count();
      CHECK(coag(p, Partition::singletons(m)) == p);
      for (int k = 1; k <= m; ++k)
        CHECK(frag(p, Partition::one_block(p.block_size(k)), k) == p);
    }
  }
}

TEST_CASE("block count after fragmentation") {
  std::mt19937_64 gen(7);
  for (const auto& p : efc::enumerate_partitions(6)) {
    for (int k = 1; k <= p.block_count(); ++k) {
      const int l = p.block_size(k);
      auto subs = efc::enumerate_partitions(l);
      const auto& sub = subs[gen() % subs.size()];
      CHECK(frag(p, sub, k).block_count() == p.block_count() - 1 + sub.block_count());
    }
  }
}

TEST_CASE("restriction commutes with coagulation, n <= 6") {
  for (int n = 2; n <= 6; ++n) {
    for (const auto& p : efc::enumerate_partitions(n)) {
      const int m = p.block_count();
      for (const auto& grouping : efc::enumerate_partitions(m)) {
        for (int r = 1; r <= n; ++r) {
          auto lhs = restrict_to(coag(p, grouping), r);
          auto pr = restrict_to(p, r);
          auto rhs = coag(pr, restrict_to(grouping, pr.block_count()));
          CHECK(lhs == rhs);
        }
      }
    }
  }
}

TEST_CASE("coag is injective in its second argument") {
  for (int n = 2; n <= 6; ++n) {
    for (const auto& p : efc::enumerate_partitions(n)) {
      const int m = p.block_count();
      std::set<std::string> images;
      for (const auto& grouping : efc::enumerate_partitions(m))
        images.insert(coag(p, grouping).to_string());
      CHECK(images.size() == efc::bell_number(m));
    }
  }
}

TEST_CASE("enumeration counts match the Bell recurrence") {
  auto bell = oracle::bell_table(8);
  CHECK(efc::enumerate_partitions(1).size() == 1);
  CHECK(efc::enumerate_partitions(3).size() == 5);
  CHECK(efc::enumerate_partitions(8).size() == 4140);
  for (int n = 1; n <= 8; ++n) {
    CHECK(efc::enumerate_partitions(n).size() == bell[n]);
    CHECK(efc::bell_number(n) == bell[n]);
  }
  CHECK_THROWS_AS(efc::enumerate_partitions(efc::kMaxEnumerationN + 1), efc::ValidationError);
}

TEST_CASE("enumeration is lexicographic in the growth string and duplicate-free") {
  for (int n = 1; n <= 7; ++n) {
    auto all = efc::enumerate_partitions(n);
    std::unordered_set<std::string> seen;
    std::vector<int> prev;
    for (const auto& p : all) {
      CHECK(seen.insert(p.rgs_string()).second);
      auto code = p.rgs();
      if (!prev.empty()) CHECK(std::lexicographical_compare(prev.begin(), prev.end(),
                                                            code.begin(), code.end()));
      prev = code;
    }
  }
  // cross-check the state set against independent recursive generation
  auto mine = efc::enumerate_partitions(6);
  auto reference = oracle::all_set_partitions(6);
  std::set<std::string> a, b;
  for (const auto& p : mine) a.insert(p.to_string());
  for (auto blocks : reference) b.insert(Partition::from_blocks(6, blocks).to_string());
  CHECK(a == b);
}

TEST_CASE("growth-string codec round-trips over P_n, n <= 8") {
  for (int n = 1; n <= 8; ++n)
    for (const auto& p : efc::enumerate_partitions(n)) {
      CHECK(Partition::from_rgs(p.rgs()) == p);
      CHECK(Partition::parse_rgs(p.rgs_string()) == p);
      CHECK(Partition::parse(p.to_string()) == p);
    }
  CHECK_THROWS_AS(Partition::from_rgs({0, 2}), efc::ValidationError);
  CHECK_THROWS_AS(Partition::parse("{1,3}{2"), efc::ValidationError);
  CHECK_THROWS_AS(Partition::parse(""), efc::ValidationError);
}

TEST_CASE("permutation action") {
  auto p = Partition::from_blocks(3, {{1, 2}, {3}});
  auto sigma = Permutation::from_image({3, 2, 1});
  CHECK(apply_permutation(p, sigma).to_string() == "{1}{2,3}");

  CHECK(apply_permutation(p, Permutation::identity(3)) == p);
  CHECK_THROWS_AS(apply_permutation(p, Permutation::identity(4)), efc::ValidationError);
  CHECK_THROWS_AS(Permutation::from_image({1, 1, 3}), efc::ValidationError);

  std::mt19937_64 gen(11);
  for (int n = 2; n <= 8; ++n) {
    std::vector<int> image(n);
    for (int i = 0; i < n; ++i) image[i] = i + 1;
    for (int rep = 0; rep < 20; ++rep) {
      std::shuffle(image.begin(), image.end(), gen);
      auto s = Permutation::from_image(image);
      CHECK(apply_permutation(Partition::one_block(n), s) == Partition::one_block(n));
      auto all = efc::enumerate_partitions(std::min(n, 5));
      const auto& q = all[gen() % all.size()];
      if (q.ground_size() == n)
        CHECK(apply_permutation(apply_permutation(q, s), s.inverse()) == q);
    }
    // explicit inverse round-trip at matching size
    std::shuffle(image.begin(), image.end(), gen);
    auto s = Permutation::from_image(image);
    for (const auto& q : efc::enumerate_partitions(std::min(n, 6)))
      if (q.ground_size() == n)
        CHECK(apply_permutation(apply_permutation(q, s), s.inverse()) == q);
  }
}
