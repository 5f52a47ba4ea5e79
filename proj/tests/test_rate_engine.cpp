#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "efc/rate_engine.hpp"
#include "efc/rational.hpp"
#include "oracles.hpp"

using efc::Characteristics;
using efc::Partition;
using efc::RankedMassVector;

namespace {

Characteristics make_chars(double c_e, double c_k,
                           std::vector<std::pair<double, std::vector<double>>> disl,
                           std::vector<std::pair<double, std::vector<double>>> coag) {
  Characteristics chars;
  chars.erosion_rate = c_e;
  chars.kingman_rate = c_k;
  for (auto& [w, m] : disl) chars.dislocation.add(w, RankedMassVector::from(m));
  for (auto& [w, m] : coag) chars.coagulation.add(w, RankedMassVector::from(m));
  return chars;
}

std::map<std::string, double> as_map(const std::vector<std::pair<Partition, double>>& row) {
  std::map<std::string, double> out;
  for (const auto& [target, rate] : row) out[target.to_string()] = rate;
  return out;
}

}  // namespace

TEST_CASE("coagulation rates") {
  auto chars = make_chars(0, 1, {}, {{2.0, {1.0 / 3, 1.0 / 3}}});
  CHECK(efc::coag_rate(chars, Partition::one_block(2)) ==
        doctest::Approx(13.0 / 9).epsilon(1e-12));

  auto kingman_only = make_chars(0, 1, {}, {});
  CHECK(efc::coag_rate(kingman_only, Partition::one_block(3)) == 0.0);

  auto nothing = make_chars(1, 0, {{1.0, {0.5, 0.5}}}, {});
  for (const auto& pi : efc::enumerate_partitions(4))
    if (!pi.is_singletons()) CHECK(efc::coag_rate(nothing, pi) == 0.0);

  CHECK_THROWS_AS(efc::coag_rate(chars, Partition::singletons(3)), efc::ValidationError);
}

TEST_CASE("fragmentation rates") {
  auto binary = make_chars(0, 0, {{1.0, {0.5, 0.5}}}, {});
  CHECK(efc::frag_rate(binary, Partition::singletons(2)) ==
        doctest::Approx(0.5).epsilon(1e-12));

  auto erosion = make_chars(1, 0, {}, {});
  CHECK(efc::frag_rate(erosion, Partition::singletons(2)) == doctest::Approx(2.0));

  CHECK(efc::pair_split_rate(make_chars(1, 0, {{1.0, {0.5, 0.5}}}, {})) ==
        doctest::Approx(2.5).epsilon(1e-12));

  CHECK_THROWS_AS(efc::frag_rate(binary, Partition::one_block(2)), efc::ValidationError);
  CHECK_THROWS_AS(efc::frag_rate(binary, Partition::one_block(1)), efc::ValidationError);
}

TEST_CASE("transition rows") {
  auto binary = make_chars(0, 0, {{1.0, {0.5, 0.5}}}, {});
  auto row = efc::transition_rates(binary, Partition::one_block(2));
  REQUIRE(row.size() == 1);
  CHECK(row[0].first == Partition::singletons(2));
  CHECK(row[0].second == doctest::Approx(0.5).epsilon(1e-12));

  auto kingman = make_chars(0, 1, {}, {});
  auto row2 = efc::transition_rates(kingman, Partition::singletons(2));
  REQUIRE(row2.size() == 1);
  CHECK(row2[0].first == Partition::one_block(2));
  CHECK(row2[0].second == doctest::Approx(1.0));

  // pure coalescence: the one-block state is absorbing
  auto pure_coag = make_chars(0, 1, {}, {{1.0, {0.4, 0.4}}});
  CHECK(efc::transition_rates(pure_coag, Partition::one_block(5)).empty());

  // a structural check: every positive-rate target is one coagulation or one
  // single-block fragmentation away
  auto mixed = make_chars(0.5, 0.7, {{1.0, {0.5, 0.3}}}, {{0.8, {0.6, 0.2}}});
  for (const auto& pi : efc::enumerate_partitions(4)) {
    for (const auto& [target, rate] : efc::transition_rates(mixed, pi)) {
      CHECK(rate > 0);
      CHECK(target != pi);
      bool coarser = target.block_count() < pi.block_count();
      bool finer = target.block_count() > pi.block_count();
      CHECK((coarser || finer));
      if (coarser) {
        // each target block must be a union of pi-blocks
        for (const auto& blk : target.blocks()) {
          std::set<int> labels;
          for (int e : blk) labels.insert(pi.block_of(e));
          std::size_t union_size = 0;
          for (int lab : labels) union_size += pi.block(lab).size();
          CHECK(union_size == blk.size());
        }
      } else {
        // exactly one pi-block is split, all others intact
        int split_blocks = 0;
        for (int k = 1; k <= pi.block_count(); ++k) {
          std::set<int> target_labels;
          for (int e : pi.block(k)) target_labels.insert(target.block_of(e));
          if (target_labels.size() > 1) ++split_blocks;
        }
        CHECK(split_blocks == 1);
      }
    }
  }
}

TEST_CASE("generator structure") {
  auto chars = make_chars(0, 1, {{1.0, {0.5, 0.5}}}, {});
  auto gen = efc::build_generator(chars, 2);
  REQUIRE(gen.states.size() == 2);
  const double c = efc::coag_rate(chars, Partition::one_block(2));
  const double f = efc::frag_rate(chars, Partition::singletons(2));
  // state order: {1,2} then {1}{2} (lexicographic growth strings 00, 01)
  CHECK(gen.states[0] == Partition::one_block(2));
  REQUIRE(gen.rows[0].size() == 1);
  CHECK(gen.rows[0][0].rate == doctest::Approx(f));
  REQUIRE(gen.rows[1].size() == 1);
  CHECK(gen.rows[1][0].rate == doctest::Approx(c));

  auto trivial = efc::build_generator(chars, 1);
  CHECK(trivial.states.size() == 1);
  CHECK(trivial.rows[0].empty());
  CHECK(trivial.row_sums[0] == 0.0);

  auto erosion_kingman = make_chars(1, 1, {}, {});
  auto gen4 = efc::build_generator(erosion_kingman, 4);
  for (std::size_t i = 0; i < gen4.states.size(); ++i) {
    double total = 0;
    for (const auto& e : gen4.rows[i]) total += e.rate;
    CHECK(total == doctest::Approx(gen4.row_sums[i]).epsilon(1e-12));
  }
  CHECK_THROWS_WITH_AS(efc::build_generator(chars, 12, 9), doctest::Contains("4213597"),
                       efc::ValidationError);
}

TEST_CASE("generator rows equal the public transition rows") {
  auto chars = make_chars(0.3, 0.9, {{1.0, {0.5, 0.25}}}, {{0.6, {0.5, 0.5}}});
  auto gen = efc::build_generator(chars, 5);
  std::mt19937_64 pick(5);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t i = pick() % gen.states.size();
    auto expected = as_map(efc::transition_rates(chars, gen.states[i]));
    std::map<std::string, double> got;
    for (const auto& e : gen.rows[i]) got[gen.states[e.col].to_string()] = e.rate;
    REQUIRE(got.size() == expected.size());
    for (const auto& [key, value] : expected)
      CHECK(got.at(key) == doctest::Approx(value).epsilon(1e-12));
  }
}

TEST_CASE("rates are exchangeable, n <= 5") {
  auto chars = make_chars(0.2, 0.8, {{1.0, {0.5, 0.3}}}, {{0.5, {0.6, 0.2}}});
  for (int n = 2; n <= 5; ++n) {
    auto states = efc::enumerate_partitions(n);
    std::vector<int> image(n);
    for (int i = 0; i < n; ++i) image[i] = i + 1;
    std::mt19937_64 gen(n);
    for (int rep = 0; rep < (n <= 3 ? 2 : 6); ++rep) {
      std::shuffle(image.begin(), image.end(), gen);
      auto sigma = efc::Permutation::from_image(image);
      for (const auto& pi : states) {
        auto row = as_map(efc::transition_rates(chars, pi));
        auto mapped = efc::apply_permutation(pi, sigma);
        auto mapped_row = efc::transition_rates(chars, mapped);
        // q(sigma pi, sigma pi') must equal q(pi, pi'): push the mapped row
        // back through sigma^{-1} and compare
        std::map<std::string, double> back;
        for (const auto& [target, rate] : mapped_row)
          back[efc::apply_permutation(target, sigma.inverse()).to_string()] = rate;
        REQUIRE(back.size() == row.size());
        for (const auto& [key, value] : row)
          CHECK(back.at(key) == doctest::Approx(value).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("compatibility of rates across levels, double precision") {
  auto chars = make_chars(0.25, 0.75, {{0.8, {0.5, 0.25}}}, {{0.4, {0.5, 0.3}}});
  for (int n = 2; n <= 5; ++n) {
    for (const auto& pi : efc::enumerate_partitions(n)) {
      auto fine = efc::transition_rates(chars, pi);
      for (int m = 1; m < n; ++m) {
        auto pim = restrict_to(pi, m);
        std::map<std::string, double> coarse_from_fine;
        for (const auto& [target, rate] : fine) {
          auto projected = restrict_to(target, m);
          if (projected == pim) continue;
          coarse_from_fine[projected.to_string()] += rate;
        }
        auto coarse = as_map(efc::transition_rates(chars, pim));
        for (const auto& [key, value] : coarse_from_fine)
          CHECK(coarse.at(key) == doctest::Approx(value).epsilon(1e-12));
        for (const auto& [key, value] : coarse)
          if (!coarse_from_fine.count(key)) CHECK(value == doctest::Approx(0.0));
      }
    }
  }
}

TEST_CASE("compatibility of rates across levels, exact rational witness") {
  using efc::exact::Rational;
  efc::exact::RationalCharacteristics chars;
  chars.erosion_rate = Rational(1, 4);
  chars.kingman_rate = Rational(1, 3);
  chars.dislocation_atoms.push_back(
      {Rational(2, 3), {Rational(1, 2), Rational(1, 4)}});
  chars.coagulation_atoms.push_back(
      {Rational(3, 5), {Rational(1, 3), Rational(1, 3), Rational(1, 6)}});

  for (int n = 2; n <= 4; ++n) {
    for (const auto& pi : efc::enumerate_partitions(n)) {
      auto fine = efc::exact::transition_rates(chars, pi);
      for (int m = 1; m < n; ++m) {
        auto pim = restrict_to(pi, m);
        std::map<std::string, Rational> coarse_from_fine;
        for (const auto& [target, rate] : fine) {
          auto projected = restrict_to(target, m);
          if (projected == pim) continue;
          coarse_from_fine[projected.to_string()] += rate;
        }
        for (const auto& [target, rate] : efc::exact::transition_rates(chars, pim)) {
          auto it = coarse_from_fine.find(target.to_string());
          REQUIRE(it != coarse_from_fine.end());
          CHECK(it->second == rate);  // exact equality
          coarse_from_fine.erase(it);
        }
        for (const auto& [key, leftover] : coarse_from_fine) CHECK(leftover == 0);
      }
    }
  }
}

TEST_CASE("total fragmentation rate decomposes over blocks") {
  auto chars = make_chars(0.4, 0.6, {{1.0, {0.5, 0.3}}, {0.3, {0.2, 0.2, 0.2}}},
                          {{0.5, {0.7}}});
  for (int n = 2; n <= 6; ++n) {
    for (const auto& pi : efc::enumerate_partitions(n)) {
      double frag_total = 0;
      for (const auto& [target, rate] : efc::transition_rates(chars, pi))
        if (target.block_count() > pi.block_count()) frag_total += rate;
      double expected = 0;
      for (int k = 1; k <= pi.block_count(); ++k)
        if (pi.block_size(k) > 1)
          expected += efc::split_rate_exponent(chars, pi.block_size(k) - 1);
      CHECK(frag_total == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("total coagulation rate matches the collision-rate formula") {
  auto chars = make_chars(0, 0.7, {}, {{1.2, {0.5, 0.3}}, {0.4, {0.25, 0.25, 0.25, 0.25}}});
  for (int m = 2; m <= 7; ++m) {
    double total = 0;
    for (const auto& grouping : efc::enumerate_partitions(m))
      if (!grouping.is_singletons()) total += efc::coag_rate(chars, grouping);
    auto rates = efc::collision_rates(chars, m);
    CHECK(total == doctest::Approx(rates.total_collision_rate).epsilon(1e-12));
  }
}

TEST_CASE("first-block capture rate") {
  auto kingman = make_chars(0, 1, {}, {});
  // with m blocks, the singleton {1} is captured by any of the m-1 pairs
  // containing label 1
  for (int m = 2; m <= 6; ++m)
    CHECK(efc::first_block_capture_rate(kingman, m) == doctest::Approx(m - 1.0));

  auto chars = make_chars(0, 0.5, {}, {{1.0, {0.4, 0.3}}});
  for (int m = 2; m <= 6; ++m) {
    double expected = 0;
    for (const auto& grouping : efc::enumerate_partitions(m))
      if (grouping.block(1).size() >= 2) expected += efc::coag_rate(chars, grouping);
    CHECK(efc::first_block_capture_rate(chars, m) == doctest::Approx(expected));
  }
}

TEST_CASE("generator export round-trips") {
  auto chars = make_chars(0.3, 0.5, {{1.0, {0.5, 0.25}}}, {{0.7, {0.6, 0.3}}});
  auto gen = efc::build_generator(chars, 4);
  const std::string triplets = "build_test_triplets.txt";
  const std::string states = "build_test_states.txt";
  efc::write_generator(gen, triplets, states);

  std::ifstream tin(triplets);
  REQUIRE(tin.good());
  std::map<std::pair<int, int>, double> entries;
  int i, j;
  double rate;
  while (tin >> i >> j >> rate) entries[{i, j}] = rate;
  CHECK(entries.size() == gen.entry_count());
  for (std::size_t row = 0; row < gen.rows.size(); ++row)
    for (const auto& e : gen.rows[row])
      CHECK(entries.at({static_cast<int>(row), static_cast<int>(e.col)}) == e.rate);

  std::ifstream sin(states);
  REQUIRE(sin.good());
  std::string line;
  std::size_t count = 0;
  while (std::getline(sin, line)) {
    auto tab = line.find('\t');
    REQUIRE(tab != std::string::npos);
    CHECK(Partition::parse(line.substr(tab + 1)) == gen.states[count]);
    ++count;
  }
  CHECK(count == gen.states.size());
  std::remove(triplets.c_str());
  std::remove(states.c_str());
}
