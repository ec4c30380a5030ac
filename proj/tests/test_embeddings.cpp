#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "citetime/embeddings.hpp"
#include "test_util.hpp"

using namespace citetime;
using citetime::testing::temp_dir;

namespace {

EmbeddingTable random_table(std::size_t n, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  EmbeddingTable t(Space::kNode, dim);
  Vec v(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : v) x = (uniform01(rng) - 0.5) * 1e3 * uniform01(rng);
    t.add("id" + std::to_string(i), v);
  }
  return t;
}

}  // namespace

TEST(EmbeddingTable, RejectsWrongLengthDuplicateAndNonFinite) {
  EmbeddingTable t(Space::kContent, 2);
  t.add("a", Vec{1, 2});
  EXPECT_THROW(t.add("b", Vec{1}), DataError);
  EXPECT_THROW(t.add("a", Vec{1, 2}), DataError);
  EXPECT_THROW(t.add("c", Vec{1, std::numeric_limits<Real>::quiet_NaN()}), NumericalError);
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ(t.find("a"), 0u);
  EXPECT_FALSE(t.find("zz"));
}

TEST(EmbeddingTable, BinaryRoundTripIsExact) {
  auto dir = temp_dir();
  auto t = random_table(50, 7, 1);
  t.save_binary((dir / "t.emb").string());
  auto back = EmbeddingTable::load_binary((dir / "t.emb").string());
  EXPECT_EQ(back.space(), Space::kNode);
  EXPECT_TRUE(back == t);
}

TEST(EmbeddingTable, TextRoundTripIsExact) {
  auto dir = temp_dir();
  auto t = random_table(20, 5, 2);
  t.save_text((dir / "t.txt").string());
  auto back = EmbeddingTable::load_text((dir / "t.txt").string(), Space::kNode);
  EXPECT_TRUE(back == t);
}

TEST(EmbeddingTable, BadMagicAndTruncationAreDataErrors) {
  auto dir = temp_dir();
  citetime::testing::write_file(dir / "bad.emb", "NOTANEMBEDDING");
  EXPECT_THROW(EmbeddingTable::load_binary((dir / "bad.emb").string()), DataError);
  auto t = random_table(3, 4, 3);
  t.save_binary((dir / "t.emb").string());
  auto bytes = citetime::testing::read_file(dir / "t.emb");
  citetime::testing::write_file(dir / "cut.emb", bytes.substr(0, bytes.size() - 5));
  EXPECT_THROW(EmbeddingTable::load_binary((dir / "cut.emb").string()), DataError);
}

TEST(MaxAbsScaler, ScalesIntoUnitRangeAndPassesZeroColumns) {
  std::vector<Vec> rows{{2, 0, -8}, {-4, 0, 1}, {1, 0, 4}};
  auto s = MaxAbsScaler::fit(rows);
  EXPECT_EQ(s.max_abs(), (Vec{4, 0, 8}));
  EXPECT_EQ(s.apply(Vec{2, 0, -8}), (Vec{0.5, 0, -1}));
  EXPECT_EQ(s.apply(Vec{0, 3, 0}), (Vec{0, 3, 0}));
  Rng rng(4);
  std::vector<Vec> many;
  for (int i = 0; i < 100; ++i) many.push_back({uniform01(rng) * 50 - 25, uniform01(rng) - 2});
  auto s2 = MaxAbsScaler::fit(many);
  for (const auto& r : many)
    for (Real v : s2.apply(r)) EXPECT_LE(std::abs(v), 1.0);
}

TEST(MaxAbsScaler, LengthMismatchIsUsageError) {
  std::vector<Vec> rows{{1, 2}};
  auto s = MaxAbsScaler::fit(rows);
  EXPECT_THROW(s.apply(Vec{1, 2, 3}), UsageError);
}
