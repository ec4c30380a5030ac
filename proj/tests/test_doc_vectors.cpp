#include <gtest/gtest.h>

#include "citetime/doc_vectors.hpp"
#include "citetime/synth.hpp"
#include "test_util.hpp"

using namespace citetime;

namespace {

SynthConfig small_synth() {
  SynthConfig c;
  c.topics = 3;
  c.slices = 2;
  c.papers_per_slice = 60;
  c.min_refs = 3;
  c.max_refs = 6;
  c.seed = 11;
  return c;
}

// Synthetic corpus plus a verbatim copy of paper 0 under a new id.
Corpus corpus_with_twin() {
  auto s = generate(small_synth());
  std::vector<PaperRecord> recs;
  for (const auto& p : s.corpus.papers()) {
    PaperRecord r{p.id, p.year, "", {}};
    for (const auto& w : p.abstract) r.abstract += w + " ";
    recs.push_back(r);
  }
  auto twin = recs[0];
  twin.id = "TWIN";
  recs.push_back(twin);
  return assign_slices(Corpus::from_records(recs), s.slices);
}

DocVectorParams params(int epochs) {
  DocVectorParams p;
  p.dim = 24;
  p.epochs = epochs;
  p.seed = 5;
  return p;
}

}  // namespace

TEST(DocVectors, OneVectorPerPaperOfConfiguredDim) {
  auto c = corpus_with_twin();
  auto m = DocVectorModel::train(c, params(5));
  EXPECT_EQ(m.documents().size(), c.size());
  EXPECT_EQ(m.documents().dim(), 24u);
  EXPECT_EQ(m.documents().space(), Space::kContent);
  EXPECT_EQ(DocVectorParams{}.dim, 100u);
}

TEST(DocVectors, IdenticalAbstractsGetNearIdenticalVectors) {
  auto c = corpus_with_twin();
  auto m = DocVectorModel::train(c, params(60));
  const auto& t = m.documents();
  auto a = t.row(*t.find("TWIN"));
  auto b = t.row(*t.find(c.paper(0).id));
  EXPECT_GT(cosine_similarity(a, b), 0.9);
}

TEST(DocVectors, SelfInferenceRecoversTrainedVector) {
  auto c = corpus_with_twin();
  auto m = DocVectorModel::train(c, params(20));
  int good = 0;
  for (PaperIndex i = 0; i < 20; ++i) {
    auto r = m.infer(c.paper(i).abstract, 3);
    EXPECT_FALSE(r.fallback);
    if (cosine_similarity(r.vector, m.documents().row(*m.documents().find(c.paper(i).id))) > 0.7) ++good;
  }
  EXPECT_EQ(good, 20);
}

TEST(DocVectors, InferenceIsDeterministicAndFallsBackOnUnknownText) {
  auto c = corpus_with_twin();
  auto m = DocVectorModel::train(c, params(3));
  auto a = m.infer(c.paper(3).abstract, 8);
  auto b = m.infer(c.paper(3).abstract, 8);
  EXPECT_EQ(a.vector, b.vector);
  const std::vector<std::string> unknown{"zzzz", "qqqq"};
  auto f = m.infer(unknown, 1);
  EXPECT_TRUE(f.fallback);
  EXPECT_EQ(f.vector, m.documents().mean());
  auto e = m.infer(std::vector<std::string>{}, 1);
  EXPECT_TRUE(e.fallback);
}

TEST(DocVectors, TrainingIsBitwiseDeterministic) {
  auto c = corpus_with_twin();
  auto a = DocVectorModel::train(c, params(3));
  auto b = DocVectorModel::train(c, params(3));
  EXPECT_TRUE(a.documents() == b.documents());
  EXPECT_TRUE(a.word_context() == b.word_context());
}

TEST(DocVectors, FirstEpochLossDecreases) {
  auto sc = small_synth();
  sc.papers_per_slice = 400;
  auto c = generate(sc).corpus;
  EmbeddingTrainReport report;
  DocVectorModel::train(c, params(1), &report);
  ASSERT_GE(report.first_epoch_chunks.size(), 4u);
  const auto& ch = report.first_epoch_chunks;
  const Real head = (ch[0] + ch[1]) / 2;
  const Real tail = (ch[ch.size() - 1] + ch[ch.size() - 2]) / 2;
  EXPECT_LT(tail, head);
}

TEST(DocVectors, EmptyAbstractIsReportedUntrained) {
  std::vector<PaperRecord> recs{{"a", 2000, "words here and there", {}}, {"b", 2000, "...", {}}};
  auto c = Corpus::from_records(recs);
  EmbeddingTrainReport report;
  DocVectorModel::train(c, params(2), &report);
  EXPECT_EQ(report.untrained, (std::vector<std::string>{"b"}));
}

TEST(DocVectors, SaveLoadRoundTrip) {
  auto dir = citetime::testing::temp_dir();
  auto c = corpus_with_twin();
  auto m = DocVectorModel::train(c, params(2));
  m.save((dir / "content").string());
  auto back = DocVectorModel::load((dir / "content").string());
  EXPECT_TRUE(back.documents() == m.documents());
  EXPECT_TRUE(back.word_context() == m.word_context());
  EXPECT_EQ(back.vocabulary_size(), m.vocabulary_size());
  EXPECT_EQ(back.infer(c.paper(1).abstract, 4).vector, m.infer(c.paper(1).abstract, 4).vector);
}
