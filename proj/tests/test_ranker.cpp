#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "citetime/ranker.hpp"
#include "oracles.hpp"

using namespace citetime;

namespace {

// Four papers in two slices: a, b in 2000 (slice 0); c, d in 2001 (slice 1).
Corpus two_slice_corpus() {
  std::vector<PaperRecord> recs{
      {"a", 2000, "", {}}, {"b", 2000, "", {}}, {"c", 2001, "", {}}, {"d", 2001, "", {}}};
  return assign_slices(Corpus::from_records(recs),
                       TimeSliceConfig({{std::nullopt, 2000}, {2001, 2001}}));
}

RankedList list_of(std::vector<ScoredPaper> e) {
  RankedList l;
  l.entries = std::move(e);
  l.sort();
  return l;
}

}  // namespace

TEST(TimePreferenceRerank, WorkedMultiplier) {
  // cosine 0.8 and predicted mass 0.282 on the candidate's slice
  EXPECT_NEAR(0.8 * time_preference_multiplier(0.282), 0.4560291857840444, 1e-15);
  EXPECT_DOUBLE_EQ(time_preference_multiplier(0), 0.5);
  EXPECT_NEAR(time_preference_multiplier(1), 0.7310585786300049, 1e-15);
  for (Real p = 0; p <= 1; p += 0.05) {
    EXPECT_GE(time_preference_multiplier(p), 0.5);
    EXPECT_LE(time_preference_multiplier(p), 0.7310585786300049 + 1e-15);
  }
}

TEST(TimePreferenceRerank, FavouresPreferredSliceAndKeepsSliceLocalOrder) {
  auto c = two_slice_corpus();
  auto base = list_of({{0, 0.9}, {1, 0.5}, {2, 0.85}, {3, 0.4}});
  TimePreference pref{{0.1, 0.9}};
  auto out = rerank_time_preference(base, pref, c);
  EXPECT_TRUE(out.well_formed());
  EXPECT_EQ(out.papers(), (std::vector<PaperIndex>{2, 0, 3, 1}));
  for (const auto& e : out.entries) {
    const Real cos = e.paper == 0 ? 0.9 : e.paper == 1 ? 0.5 : e.paper == 2 ? 0.85 : 0.4;
    EXPECT_DOUBLE_EQ(e.score, cos * time_preference_multiplier(pref[c.slice_of(e.paper)]));
  }
  // uniform preference leaves the order untouched
  EXPECT_EQ(rerank_time_preference(base, TimePreference::uniform(2), c).papers(), base.papers());
  EXPECT_THROW(rerank_time_preference(base, TimePreference::uniform(3), c), UsageError);
  auto raw = rerank_time_preference(base, pref, c, true);
  EXPECT_DOUBLE_EQ(raw.entries[0].score, 0.85 * 0.9);
}

TEST(PubPreference, PiecewiseValues) {
  EXPECT_NEAR(weight_pub_preference(2010, 2010, 0.8), 0.2097152, 1e-15);
  EXPECT_DOUBLE_EQ(weight_pub_preference(2010, 2009, 0.8), 1.0);
  EXPECT_NEAR(weight_pub_preference(2010, 1990, 0.8), std::pow(0.8, 19), 1e-15);
  EXPECT_NEAR(weight_pub_preference(2010, 1950, 0.8), std::pow(0.8, 20), 1e-15);
  EXPECT_DOUBLE_EQ(weight_pub_preference(2010, 2010, 0.8), weight_pub_preference(2010, 2002, 0.8));
  for (int gap = 1; gap < 30; ++gap)
    EXPECT_GE(weight_pub_preference(2030, 2030 - gap, 0.8), weight_pub_preference(2030, 2029 - gap, 0.8));
  EXPECT_THROW(weight_pub_preference(2010, 2011, 0.8), DataError);
  EXPECT_THROW(weight_pub_preference(2010, 2000, 1.0), UsageError);
}

TEST(Freshness, ExponentialDecay) {
  EXPECT_DOUBLE_EQ(weight_freshness(0, 10), 1.0);
  EXPECT_NEAR(weight_freshness(10, 10), std::exp(-1.0), 1e-15);
  EXPECT_THROW(weight_freshness(-1, 10), DataError);
  EXPECT_THROW(weight_freshness(1, 0), UsageError);
}

TEST(CiteRank, TwoCycleIsUniform) {
  const std::vector<Edge> e{{0, 1}, {1, 0}};
  auto r = citerank_weights(2, e);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.scores[0], 0.5, 1e-12);
  EXPECT_NEAR(r.scores[1], 0.5, 1e-12);
}

TEST(CiteRank, StarCentreDominates) {
  std::vector<Edge> e;
  for (PaperIndex i = 1; i < 6; ++i) e.emplace_back(i, 0);
  auto r = citerank_weights(6, e);
  for (PaperIndex i = 1; i < 6; ++i) EXPECT_GT(r.scores[0], r.scores[i]);
}

TEST(CiteRank, MatchesDenseLinearSolve) {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 8;
    std::set<Edge> uniq;
    while (uniq.size() < 14) {
      const auto a = static_cast<PaperIndex>(uniform_index(rng, n));
      const auto b = static_cast<PaperIndex>(uniform_index(rng, n));
      if (a != b) uniq.insert({a, b});
    }
    std::vector<Edge> e(uniq.begin(), uniq.end());
    auto r = citerank_weights(n, e, 0.85, 1e-14, 1000);
    auto want = oracle::dense_pagerank(n, e, 0.85);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(std::accumulate(r.scores.begin(), r.scores.end(), 0.0), 1.0, 1e-12);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(r.scores[i], want[i], 1e-8);

    // relabelling nodes permutes the scores
    std::vector<PaperIndex> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin(), perm.end());
    std::vector<Edge> pe;
    for (auto [a, b] : e) pe.emplace_back(perm[a], perm[b]);
    auto rp = citerank_weights(n, pe, 0.85, 1e-14, 1000);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(rp.scores[perm[i]], r.scores[i], 1e-12);
  }
}

TEST(CiteRank, RejectsBadInput) {
  EXPECT_THROW(citerank_weights(0, {}), DataError);
  const std::vector<Edge> e{{0, 5}};
  EXPECT_THROW(citerank_weights(2, e), DataError);
  EXPECT_THROW(citerank_weights(2, {}, 1.0), UsageError);
}

TEST(MinMax, NormalisesAndMapsConstantToOnes) {
  EXPECT_EQ(min_max_normalize(Vec{2, 4, 3}), (Vec{0, 1, 0.5}));
  EXPECT_EQ(min_max_normalize(Vec{7, 7}), (Vec{1, 1}));
  EXPECT_TRUE(min_max_normalize(Vec{}).empty());
}

TEST(WhinCsl, LinearCombinationAndValidation) {
  EXPECT_DOUBLE_EQ(whin_csl_score(0.5, 1.0, std::nullopt, 0.6, 0.4), 0.7);
  EXPECT_DOUBLE_EQ(whin_csl_score(0.5, 1.0, 0.25, 0.5, 0.3), 0.25 + 0.3 + 0.05);
  EXPECT_THROW(whin_csl_score(0.5, 1.0, std::nullopt, 0.6, 0.3), UsageError);
  EXPECT_THROW(whin_csl_score(0.5, 1.0, 0.2, 0.8, 0.4), UsageError);
  EXPECT_THROW(whin_csl_score(0.5, 1.0, 0.2, -0.1, 0.4), UsageError);
}

TEST(WeightScheme, ParseAndName) {
  EXPECT_EQ(WeightScheme::parse("cbf").name(), "cbf");
  EXPECT_EQ(WeightScheme::parse("none").kind, SchemeKind::kNone);
  EXPECT_EQ(WeightScheme::parse("timepref").name(), "timepref");
  EXPECT_EQ(WeightScheme::parse("timepref_raw").name(), "timepref_raw");
  EXPECT_EQ(WeightScheme::parse("citerank").name(), "citerank");
  EXPECT_EQ(WeightScheme::parse("preference:0.8").name(), "preference_0.8");
  EXPECT_EQ(WeightScheme::parse("freshness:10").name(), "freshness_10");
  EXPECT_EQ(WeightScheme::parse("whin_csl:0.6,0.4").name(), "whin_csl_0.6_0.4");
  EXPECT_NEAR(WeightScheme::parse("whin:0.7").w2, 0.3, 1e-15);
  EXPECT_THROW(WeightScheme::parse("bogus"), UsageError);
  EXPECT_THROW(WeightScheme::parse("preference:x"), UsageError);
  EXPECT_THROW(WeightScheme::parse("preference:1.5"), UsageError);
}

TEST(ApplyScheme, NoneIsIdentityAndOthersComposeAsProducts) {
  auto c = two_slice_corpus();
  auto base = list_of({{0, 0.9}, {1, 0.5}, {2, 0.85}, {3, 0.4}});
  SchemeContext ctx;
  ctx.corpus = &c;
  ctx.query_year = 2003;
  auto same = apply_weight_scheme(base, WeightScheme{}, ctx);
  EXPECT_EQ(same.entries, base.entries);

  const Vec cr{0.1, 1.0, 0.0, 0.5};
  ctx.citerank = &cr;
  auto citerank = apply_weight_scheme(base, WeightScheme::parse("citerank"), ctx);
  EXPECT_TRUE(citerank.well_formed());
  for (const auto& e : citerank.entries) {
    const Real cos = std::find_if(base.entries.begin(), base.entries.end(),
                                  [&](const ScoredPaper& s) { return s.paper == e.paper; })->score;
    EXPECT_DOUBLE_EQ(e.score, cos * cr[e.paper]);
  }
  auto fresh = apply_weight_scheme(base, WeightScheme::parse("freshness:10"), ctx);
  for (const auto& e : fresh.entries) {
    const Real cos = std::find_if(base.entries.begin(), base.entries.end(),
                                  [&](const ScoredPaper& s) { return s.paper == e.paper; })->score;
    EXPECT_DOUBLE_EQ(e.score, cos * std::exp(-(2003.0 - c.paper(e.paper).year) / 10));
  }
  EXPECT_THROW(apply_weight_scheme(base, WeightScheme::parse("timepref"), ctx), UsageError);
  EXPECT_THROW(apply_weight_scheme(base, WeightScheme::parse("whin_csl"), ctx), UsageError);
}

TEST(ApplyScheme, WhinUsesNodeCosine) {
  auto c = two_slice_corpus();
  EmbeddingTable t(Space::kNode, 2);
  t.add("a", Vec{1, 0});
  t.add("b", Vec{0, 1});
  t.add("c", Vec{1, 1});
  PaperVectors nodes(t, c);
  const Vec q{1, 0};
  auto base = list_of({{0, 0.2}, {1, 0.9}, {2, 0.5}, {3, 0.3}});
  SchemeContext ctx;
  ctx.node = &nodes;
  ctx.query_node = &q;
  auto out = apply_weight_scheme(base, WeightScheme::parse("whin_csl:0.6,0.4"), ctx);
  std::map<PaperIndex, Real> got;
  for (const auto& e : out.entries) got[e.paper] = e.score;
  EXPECT_NEAR(got[0], 0.6 * 0.2 + 0.4 * 1, 1e-15);
  EXPECT_NEAR(got[1], 0.6 * 0.9, 1e-15);
  EXPECT_NEAR(got[2], 0.6 * 0.5 + 0.4 * std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(got[3], 0.6 * 0.3, 1e-15);  // no node vector
}

TEST(CandidatePool, Policies) {
  auto c = two_slice_corpus();
  EXPECT_EQ(candidate_pool(2000, c, {}), (std::vector<PaperIndex>{0, 1}));
  EXPECT_EQ(candidate_pool(2001, c, {}, PaperIndex{2}), (std::vector<PaperIndex>{0, 1, 3}));
  EXPECT_EQ(candidate_pool(1990, c, {PoolPolicy::kAll, {}}), (std::vector<PaperIndex>{0, 1, 2, 3}));
  EXPECT_EQ(candidate_pool(1990, c, {PoolPolicy::kExplicit, {"d", "a"}}), (std::vector<PaperIndex>{3, 0}));
  EXPECT_THROW(candidate_pool(1990, c, {}), DataError);
  EXPECT_THROW(candidate_pool(1990, c, {PoolPolicy::kExplicit, {"zz"}}), DataError);
}

TEST(CbfScores, SortedWithIdTieBreakAndSkipsMissing) {
  auto c = two_slice_corpus();
  EmbeddingTable t(Space::kContent, 2);
  t.add("a", Vec{1, 0});
  t.add("b", Vec{2, 0});
  t.add("d", Vec{0, 1});
  PaperVectors content(t, c);
  const Vec q{1, 0};
  const std::vector<PaperIndex> cands{3, 1, 0, 2};
  std::size_t skipped = 0;
  auto l = cbf_scores(q, cands, content, &skipped);
  EXPECT_EQ(skipped, 1u);
  EXPECT_TRUE(l.well_formed());
  EXPECT_EQ(l.papers(), (std::vector<PaperIndex>{0, 1, 3}));
  EXPECT_DOUBLE_EQ(l.entries[0].score, 1.0);
  EXPECT_DOUBLE_EQ(l.entries[2].score, 0.0);
}

TEST(RankedList, WellFormedDetectsDisorderAndDuplicates) {
  RankedList l;
  l.entries = {{1, 0.5}, {0, 0.5}};
  EXPECT_FALSE(l.well_formed());
  l.sort();
  EXPECT_TRUE(l.well_formed());
  l.entries = {{1, 0.9}, {1, 0.5}};
  EXPECT_FALSE(l.well_formed());
  l.entries = {{0, 0.9}, {1, 0.8}, {2, 0.7}};
  l.truncate(2);
  EXPECT_EQ(l.papers(), (std::vector<PaperIndex>{0, 1}));
}
