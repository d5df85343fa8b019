// SPDX-License-Identifier: Apache-2.0
#include <illposed/lwe_bridge.hpp>

#include <gtest/gtest.h>

#include <set>

using namespace illposed;

namespace {

using Matrix = std::vector<std::vector<std::uint32_t>>;
using Vec = std::vector<std::uint32_t>;

const Matrix small_rows{{1, 0}, {0, 1}, {1, 1}};

}  // namespace

TEST(LweParams, Validation) {
   EXPECT_NO_THROW(validate(LweParams{}));
   EXPECT_THROW(validate(LweParams{15, 3, 12, 1}), Error);
   EXPECT_THROW(validate(LweParams{17, 3, 2, 1}), Error);
   EXPECT_THROW(validate(LweParams{17, 0, 2, 1}), Error);
   EXPECT_NO_THROW(validate(LweParams{17, 3, 12, 4}));
   EXPECT_THROW(validate(LweParams{17, 3, 12, 5}), Error);
   EXPECT_TRUE(is_prime(2));
   EXPECT_TRUE(is_prime(3329));
   EXPECT_FALSE(is_prime(1));
   EXPECT_FALSE(is_prime(3327));
}

TEST(CenteredMod, Range) {
   EXPECT_EQ(centered_mod(0, 5), 0);
   EXPECT_EQ(centered_mod(2, 5), 2);
   EXPECT_EQ(centered_mod(3, 5), -2);
   EXPECT_EQ(centered_mod(-1, 5), -1);
   EXPECT_EQ(centered_mod(4, 8), 4);  // (-q/2, q/2]
   EXPECT_EQ(centered_mod(-4, 8), 4);
   for(std::int64_t x = -40; x <= 40; ++x) {
      const auto r = centered_mod(x, 17);
      ASSERT_GT(2 * r, -17);
      ASSERT_LE(2 * r, 17);
      ASSERT_EQ(((x - r) % 17 + 17) % 17, 0);
   }
}

TEST(LweInstance, HandComputedExample) {
   const LweParams p{5, 2, 3, 1};
   // (1,0,-1) added to A s = (2,3,0)
   const auto inst = lwe_instance(p, small_rows, {2, 3}, {1, 0, -1});
   EXPECT_EQ(inst.b, (Vec{3, 3, 4}));
   const auto noiseless_last = lwe_instance(p, small_rows, {2, 3}, {1, 0, 0});
   EXPECT_EQ(noiseless_last.b, (Vec{3, 3, 0}));
}

TEST(LweBruteForce, HandEnumeration) {
   // b = (3,3,0): x in {2,3,4}, y in {2,3,4}, x + y in {4,0,1} mod 5
   const auto got = lwe_brute_force(small_rows, {3, 3, 0}, 5, 1);
   const std::set<Vec> want{{2, 2}, {2, 3}, {2, 4}, {3, 2}, {3, 3}, {4, 2}};
   EXPECT_EQ(std::set<Vec>(got.begin(), got.end()), want);
   EXPECT_EQ(got.size(), want.size());
   EXPECT_EQ(lwe_brute_force(small_rows, {2, 3, 0}, 5, 0), (Matrix{{2, 3}}));
   EXPECT_THROW(lwe_brute_force(Matrix(8, Vec(6, 1)), Vec(8, 0), 17, 1), Error);
   EXPECT_THROW(lwe_brute_force(small_rows, {1, 2}, 5, 1), DimensionError);
}

TEST(LweGen, InvariantAndNoiselessSingleton) {
   Rng rng(Bytes{1});
   int full_rank = 0;
   for(int i = 0; i < 200; ++i) {
      for(auto shape : {LweErrorShape::uniform, LweErrorShape::centered_binomial}) {
         const LweParams p{17, 3, 6, 2, shape};
         const auto inst = lwe_gen(p, rng);
         const auto as = lwe_multiply(inst.a, inst.s, p.q);
         for(std::size_t j = 0; j < p.n; ++j) {
            ASSERT_EQ(centered_mod(static_cast<std::int64_t>(inst.b[j]) - as[j], p.q), inst.e[j]);
            ASSERT_LE(std::abs(inst.e[j]), 2);
         }
      }
      const LweParams p0{17, 3, 5, 0};
      const auto inst = lwe_gen(p0, rng);
      EXPECT_EQ(inst.b, lwe_multiply(inst.a, inst.s, p0.q));
      const auto cands = lwe_brute_force(inst.a, inst.b, p0.q, 0);
      if(rank_mod_q(inst.a, p0.q) == p0.m) {
         ++full_rank;
         ASSERT_EQ(cands, (Matrix{inst.s}));
      } else {
         ASSERT_GT(cands.size(), 1U);
      }
   }
   EXPECT_GT(full_rank, 150);
}

TEST(RankModQ, Examples) {
   EXPECT_EQ(rank_mod_q(small_rows, 5), 2U);
   EXPECT_EQ(rank_mod_q({{1, 2}, {2, 4}, {3, 6}}, 7), 1U);
   EXPECT_EQ(rank_mod_q({{1, 2}, {3, 1}}, 5), 1U);  // 3*(1,2) = (3,6) = (3,1) mod 5
   EXPECT_EQ(rank_mod_q({{0, 0}}, 5), 0U);
}

TEST(LweDemo, UniqueRecoveryAndContainment) {
   const auto rows = lwe_demo(LweParams{17, 3, 12, 1}, 100, Bytes{0x07});
   ASSERT_EQ(rows.size(), 100U);
   std::size_t unique = 0;
   for(const auto& r : rows) {
      ASSERT_TRUE(r.witness_contained);
      unique += r.recovered;
      EXPECT_EQ(r.unique, r.candidates == 1);
   }
   EXPECT_GE(unique, 95U);
}

TEST(LweDemo, AmbiguityGrowsWithErrorBound) {
   double prev = 0.0;
   for(std::uint32_t bound = 0; bound <= 4; ++bound) {
      const auto rows = lwe_demo(LweParams{17, 3, 8, bound}, 100, Bytes{0x08});
      double mean = 0;
      for(const auto& r : rows) {
         ASSERT_TRUE(r.witness_contained);
         mean += static_cast<double>(r.candidates);
      }
      mean /= 100;
      EXPECT_GE(mean, prev) << "bound=" << bound;
      prev = mean;
   }
   EXPECT_GT(prev, 10.0);
}

TEST(AnalogyReport, RowsAndMissingMarkers) {
   const LweParams p{17, 3, 12, 1};
   const auto trials = lwe_demo(p, 10, Bytes{1});
   const auto bare = analogy_report(p, trials, std::nullopt);
   const auto rows = bare.rows();
   ASSERT_EQ(rows.size(), 4U);
   const char* labels[] = {"Dimension", "Data", "Solution", "Noise"};
   for(std::size_t i = 0; i < 4; ++i) {
      EXPECT_EQ(rows[i].label, labels[i]);
      EXPECT_EQ(rows[i].op, "missing");
      EXPECT_FALSE(rows[i].lwe.empty());
   }
   EXPECT_EQ(bare.to_map().at("op.present"), "0");
   EXPECT_EQ(AnalogyReport::from_kv(bare.to_kv()), bare);
}

TEST(AnalogyReport, WithOperatorSummaryRoundtrips) {
   const LweParams p{17, 3, 12, 1};
   const auto sys = hso_system(256);
   const auto& s = sys->factors.singular_values;
   OperatorSummary summary{
      classify_decay(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())), default_fit_range(256)),
      noise_amplification_experiment(sys->op, sys->factors, GridFunction::constant(256, 1.0), 0.01, 20, Bytes{2})};
   const auto rep = analogy_report(p, lwe_demo(p, 20, Bytes{3}), summary);
   EXPECT_TRUE(rep.has_operator);
   EXPECT_EQ(rep.decay_kind, "mild");
   EXPECT_EQ(rep.grid_n, 256U);
   for(const auto& row : rep.rows()) {
      EXPECT_NE(row.op, "missing");
   }
   const auto text = rep.to_text();
   for(const char* label : {"Dimension", "Data", "Solution", "Noise"}) {
      EXPECT_NE(text.find(label), std::string::npos);
   }
   const auto back = AnalogyReport::from_kv(rep.to_kv());
   EXPECT_EQ(back, rep);
   EXPECT_EQ(back.to_kv(), rep.to_kv());
   EXPECT_THROW(AnalogyReport::from_kv("lwe.q=17\n"), FormatError);
   EXPECT_THROW(AnalogyReport::from_kv("garbage\n"), FormatError);
}
