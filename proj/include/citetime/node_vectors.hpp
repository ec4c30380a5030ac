// Citation-graph node embeddings: second-order biased random walks
// (return parameter p, in-out parameter q) feeding skip-gram with negative
// sampling.

#ifndef CITETIME_NODE_VECTORS_HPP
#define CITETIME_NODE_VECTORS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "citetime/embeddings.hpp"
#include "citetime/sgns.hpp"

namespace citetime {

using Edge = std::pair<PaperIndex, PaperIndex>;  // (citing, cited)

/// Undirected simple graph with sorted adjacency lists.
class UndirectedGraph {
 public:
  UndirectedGraph(std::size_t nodes, std::span<const Edge> edges);

  std::size_t size() const { return adj_.size(); }
  std::span<const std::uint32_t> neighbors(std::size_t v) const { return adj_[v]; }
  std::size_t degree(std::size_t v) const { return adj_[v].size(); }
  bool adjacent(std::size_t a, std::size_t b) const;
  std::size_t edge_count() const;

 private:
  std::vector<std::vector<std::uint32_t>> adj_;
};

/// Drops every edge whose citing paper is in `excluded`.
std::vector<Edge> drop_edges_from(std::span<const Edge> edges,
                                  const std::unordered_set<PaperIndex>& excluded);

struct WalkParams {
  int walks_per_node = 10;
  int walk_length = 40;
  Real p = 0.25;
  Real q = 0.25;
  std::uint64_t seed = 1;
};

using Walk = std::vector<std::uint32_t>;

/// Walks ordered round by round; within a round, start nodes follow a
/// seeded permutation of the non-isolated nodes. Each walk draws from its own
/// RNG stream, so the parallel generator matches the serial one exactly.
std::vector<Walk> generate_walks_serial(const UndirectedGraph& g, const WalkParams& params);
std::vector<Walk> generate_walks_parallel(const UndirectedGraph& g, const WalkParams& params);

struct NodeVectorParams {
  std::size_t dim = 100;
  WalkParams walk;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  Real lr_start = 0.025;
  Real lr_end = 0.0001;
};

/// Trains one vector per node; `ids[v]` names node v. Isolated nodes keep
/// their random initialisation and are listed in report->untrained.
EmbeddingTable train_node_embeddings(std::span<const std::string> ids,
                                     std::span<const Edge> edges,
                                     const NodeVectorParams& params,
                                     EmbeddingTrainReport* report = nullptr);

/// Skip-gram training on precomputed walks (exposed for tests).
EmbeddingTable train_skipgram(std::span<const std::string> ids, std::span<const Walk> walks,
                              const NodeVectorParams& params,
                              EmbeddingTrainReport* report = nullptr);

}  // namespace citetime

#endif  // CITETIME_NODE_VECTORS_HPP
