#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "citetime/synth.hpp"
#include "test_util.hpp"

using namespace citetime;

namespace {

SynthConfig tiny() {
  SynthConfig c;
  c.topics = 2;
  c.slices = 3;
  c.papers_per_slice = 40;
  c.min_refs = 3;
  c.max_refs = 8;
  c.seed = 4;
  return c;
}

std::set<std::string> slice_words(const Corpus& c, int slice, int topic, const std::vector<int>& topic_of) {
  std::set<std::string> w;
  for (PaperIndex p = 0; p < c.size(); ++p)
    if (c.slice_of(p) == slice && topic_of[p] == topic)
      for (const auto& t : c.paper(p).abstract)
        if (t.rfind("bg", 0) != 0) w.insert(t);
  return w;
}

}  // namespace

TEST(Synth, PlantedProfileForcesEarlierSlice) {
  auto c = tiny();
  c.topics = 1;
  c.slices = 2;
  c.planted = {{Vec{1.0, 0.0}, Vec{1.0, 0.0}}};
  auto s = generate(c);
  std::size_t checked = 0;
  for (PaperIndex p = 0; p < s.corpus.size(); ++p) {
    if (s.corpus.slice_of(p) != 1) continue;
    for (const auto& r : s.corpus.paper(p).references) EXPECT_EQ(s.corpus.slice_of(r.cited), 0);
    checked += s.corpus.paper(p).references.size();
  }
  EXPECT_GT(checked, 0u);
}

TEST(Synth, ZeroDriftKeepsVocabularyFixed) {
  auto c = tiny();
  c.topics = 1;
  c.drift_rate = 0;
  c.papers_per_slice = 100;
  auto s = generate(c);
  auto v0 = slice_words(s.corpus, 0, 0, s.topic_of);
  for (int sl = 1; sl < 3; ++sl)
    for (const auto& w : slice_words(s.corpus, sl, 0, s.topic_of)) EXPECT_TRUE(v0.contains(w)) << w;
  c.drift_rate = 1;
  auto d = generate(c);
  auto a = slice_words(d.corpus, 0, 0, d.topic_of), b = slice_words(d.corpus, 1, 0, d.topic_of);
  for (const auto& w : b) EXPECT_FALSE(a.contains(w)) << w;
}

TEST(Synth, DefaultConfigReferenceHistogramsMatchPlantedProfiles) {
  SynthConfig c;
  auto s = generate(c);
  ASSERT_EQ(s.corpus.size(), 2000u);
  // counts[topic][citing slice][cited slice]
  std::vector<std::vector<Vec>> counts(5, std::vector<Vec>(5, Vec(5, 0)));
  for (PaperIndex p = 0; p < s.corpus.size(); ++p) {
    const int k = s.topic_of[p], sl = s.corpus.slice_of(p);
    for (const auto& r : s.corpus.paper(p).references)
      counts[static_cast<std::size_t>(k)][static_cast<std::size_t>(sl)]
            [static_cast<std::size_t>(s.corpus.slice_of(r.cited))] += 1;
  }
  Real worst = 0;
  for (std::size_t k = 0; k < 5; ++k)
    for (std::size_t sl = 0; sl < 5; ++sl) {
      const auto& h = counts[k][sl];
      Real total = 0;
      for (Real x : h) total += x;
      ASSERT_GT(total, 0);
      Real tv = 0;
      for (std::size_t j = 0; j < 5; ++j) tv += std::abs(h[j] / total - s.planted[k][sl][j]);
      worst = std::max(worst, tv / 2);
    }
  EXPECT_LE(worst, 0.05);
}

TEST(Synth, SameSeedGivesIdenticalFiles) {
  auto dir = citetime::testing::temp_dir();
  auto a = generate(tiny()), b = generate(tiny());
  save_corpus(a.corpus, (dir / "a.jsonl").string());
  save_corpus(b.corpus, (dir / "b.jsonl").string());
  EXPECT_EQ(citetime::testing::read_file(dir / "a.jsonl"), citetime::testing::read_file(dir / "b.jsonl"));
  auto c = tiny();
  c.seed = 5;
  save_corpus(generate(c).corpus, (dir / "c.jsonl").string());
  EXPECT_NE(citetime::testing::read_file(dir / "a.jsonl"), citetime::testing::read_file(dir / "c.jsonl"));
}

TEST(Synth, ReferencesNeverPointForwardAndSatisfyCorpusInvariants) {
  auto s = generate(tiny());
  EXPECT_EQ(s.corpus.dropped_references(), 0u);
  for (PaperIndex p = 0; p < s.corpus.size(); ++p) {
    std::set<PaperIndex> seen;
    for (const auto& r : s.corpus.paper(p).references) {
      EXPECT_LE(s.corpus.slice_of(r.cited), s.corpus.slice_of(p));
      EXPECT_LE(s.corpus.paper(r.cited).year, s.corpus.paper(p).year);
      EXPECT_EQ(s.topic_of[r.cited], s.topic_of[p]);
      EXPECT_GE(r.count, 1);
      EXPECT_LE(r.count, 30);
      EXPECT_TRUE(seen.insert(r.cited).second);
    }
  }
  // reloading the saved file yields the same corpus
  auto dir = citetime::testing::temp_dir();
  save_corpus(s.corpus, (dir / "c.jsonl").string());
  auto back = assign_slices(load_corpus((dir / "c.jsonl").string()), s.slices);
  EXPECT_EQ(back.size(), s.corpus.size());
  EXPECT_EQ(back.edge_count(), s.corpus.edge_count());
}

TEST(Synth, PlantedTruthMatchesReferencesAndProfiles) {
  auto s = generate(tiny());
  EXPECT_TRUE(planted_truth(s, {}).relevance.empty());
  std::vector<PaperIndex> q{50, 90, 110};
  auto t = planted_truth(s, q);
  for (PaperIndex p : q) {
    const auto& id = s.corpus.paper(p).id;
    EXPECT_EQ(t.relevance.at(id), reference_relevance(s.corpus, p));
    EXPECT_EQ(t.observed.at(id).probs, true_time_preference(s.corpus, p).probs);
    EXPECT_EQ(t.planted.at(id).probs, s.planted[s.topic_of[p]][s.corpus.slice_of(p)].probs);
  }
  auto dir = citetime::testing::temp_dir();
  save_planted_truth(s, q, (dir / "t.jsonl").string());
  auto text = citetime::testing::read_file(dir / "t.jsonl");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}

TEST(Synth, SliceLayoutAndValidation) {
  auto c = tiny();
  auto sl = synth_slices(c);
  ASSERT_EQ(sl.size(), 3u);
  EXPECT_FALSE(sl.intervals()[0].start.has_value());
  EXPECT_EQ(sl.intervals()[0].end, 2001);
  EXPECT_EQ(*sl.intervals()[2].start, 2004);
  c.drift_rate = 1.5;
  EXPECT_THROW(generate(c), UsageError);
  c = tiny();
  c.planted = {{Vec{0.5, 0.5, 0}, Vec{1, 0, 0}, Vec{1, 0, 0}}, {Vec{1, 0, 0}, Vec{1, 0, 0}, Vec{1, 0, 0}}};
  EXPECT_THROW(generate(c), UsageError);  // slice 0 profile cites slice 1
}
