#include <gtest/gtest.h>

#include "citetime/node_vectors.hpp"

using namespace citetime;

namespace {

// Two 5-cliques {0..4} and {5..9} joined by the bridge 4-5.
std::vector<Edge> barbell() {
  std::vector<Edge> e;
  for (PaperIndex base : {0u, 5u})
    for (PaperIndex a = 0; a < 5; ++a)
      for (PaperIndex b = a + 1; b < 5; ++b) e.emplace_back(base + b, base + a);
  e.emplace_back(5, 4);
  return e;
}

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("n" + std::to_string(i));
  return out;
}

}  // namespace

TEST(UndirectedGraph, SymmetricDeduplicatedAdjacency) {
  const std::vector<Edge> e{{0, 1}, {1, 0}, {2, 1}, {2, 2}};
  UndirectedGraph g(4, e);
  EXPECT_TRUE(g.adjacent(0, 1));
  EXPECT_TRUE(g.adjacent(1, 0));
  EXPECT_TRUE(g.adjacent(1, 2));
  EXPECT_FALSE(g.adjacent(0, 2));
  EXPECT_EQ(g.degree(1), 2u);
  EXPECT_EQ(g.degree(3), 0u);
}

TEST(Walks, StepsFollowEdgesAndParallelMatchesSerial) {
  auto e = barbell();
  UndirectedGraph g(10, e);
  WalkParams p;
  p.walks_per_node = 3;
  p.walk_length = 15;
  p.seed = 77;
  auto s = generate_walks_serial(g, p);
  auto par = generate_walks_parallel(g, p);
  EXPECT_EQ(s, par);
  EXPECT_EQ(s.size(), 30u);
  for (const auto& w : s) {
    EXPECT_EQ(w.size(), 15u);
    for (std::size_t i = 1; i < w.size(); ++i) EXPECT_TRUE(g.adjacent(w[i - 1], w[i]));
  }
}

TEST(Walks, SingleEdgeAlternates) {
  const std::vector<Edge> e{{0, 1}};
  UndirectedGraph g(2, e);
  WalkParams p;
  p.walks_per_node = 2;
  p.walk_length = 6;
  for (const auto& w : generate_walks_serial(g, p))
    for (std::size_t i = 1; i < w.size(); ++i) EXPECT_NE(w[i], w[i - 1]);
}

TEST(Walks, IsolatedNodesHaveNoWalks) {
  const std::vector<Edge> e{{0, 1}};
  UndirectedGraph g(3, e);
  WalkParams p;
  for (const auto& w : generate_walks_serial(g, p)) EXPECT_NE(w.front(), 2u);
}

TEST(Walks, LowReturnParameterBacktracksMore) {
  // on a long path, p << 1 favours stepping straight back
  std::vector<Edge> e;
  for (PaperIndex i = 0; i + 1 < 30; ++i) e.emplace_back(i + 1, i);
  UndirectedGraph g(30, e);
  auto backtracks = [&](Real p, Real q) {
    WalkParams w;
    w.p = p;
    w.q = q;
    w.seed = 3;
    long n = 0, total = 0;
    for (const auto& walk : generate_walks_serial(g, w))
      for (std::size_t i = 2; i < walk.size(); ++i) {
        n += walk[i] == walk[i - 2];
        ++total;
      }
    return double(n) / double(total);
  };
  EXPECT_GT(backtracks(0.25, 1), backtracks(4, 1));
}

TEST(NodeEmbeddings, BarbellCliquesClusterTogether) {
  NodeVectorParams p;
  p.dim = 16;
  p.walk.p = 1;
  p.walk.q = 1;
  p.walk.seed = 5;
  p.walk.walks_per_node = 20;
  p.epochs = 5;
  auto t = train_node_embeddings(ids(10), barbell(), p);
  Real within = 0, across = 0;
  int nw = 0, na = 0;
  for (std::size_t a = 0; a < 10; ++a)
    for (std::size_t b = a + 1; b < 10; ++b) {
      const Real c = cosine_similarity(t.row(a), t.row(b));
      if ((a < 5) == (b < 5)) {
        within += c;
        ++nw;
      } else {
        across += c;
        ++na;
      }
    }
  EXPECT_GT(within / nw, across / na);
}

TEST(NodeEmbeddings, DeterministicAndFlagsIsolatedNodes) {
  NodeVectorParams p;
  p.dim = 8;
  p.walk.walks_per_node = 2;
  p.epochs = 1;
  EmbeddingTrainReport r1, r2;
  auto e = barbell();
  auto names = ids(11);  // node 10 has no edges
  auto a = train_node_embeddings(names, e, p, &r1);
  auto b = train_node_embeddings(names, e, p, &r2);
  EXPECT_TRUE(a == b);
  EXPECT_EQ(a.size(), 11u);
  EXPECT_EQ(r1.untrained, (std::vector<std::string>{"n10"}));
  EXPECT_EQ(a.space(), Space::kNode);
}

TEST(NodeEmbeddings, EmptyGraphIsDataError) {
  NodeVectorParams p;
  EXPECT_THROW(train_node_embeddings(ids(3), std::vector<Edge>{}, p), DataError);
}

TEST(DropEdges, RemovesEdgesCitedByExcludedPapers) {
  const std::vector<Edge> e{{0, 1}, {1, 2}, {2, 0}};
  auto kept = drop_edges_from(e, {1});
  EXPECT_EQ(kept, (std::vector<Edge>{{0, 1}, {2, 0}}));
}
