// Query profiling: the two MLP inputs for a query are its content vector and
// the average node vector of its k most similar papers from the same time
// slice.

#ifndef CITETIME_PROFILE_HPP
#define CITETIME_PROFILE_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "citetime/corpus.hpp"
#include "citetime/doc_vectors.hpp"
#include "citetime/embeddings.hpp"

namespace citetime {

struct QueryProfile {
  Vec x_content;  // scaled MLP input
  Vec x_node;     // scaled MLP input
  Vec raw_content;
  Vec raw_node;
  int query_slice = 0;
  std::vector<PaperIndex> neighbor_ids;
  bool inference_fallback = false;  // query text was entirely out of vocabulary
  bool empty_pool = false;          // no neighbour had a node vector
};

/// The k papers of `slice` with the highest cosine to `query`, descending,
/// ties by ascending index; `exclude` is never returned. Throws DataError if
/// the slice has no candidates.
std::vector<PaperIndex> nearest_neighbors(std::span<const Real> query, const Corpus& corpus,
                                          const PaperVectors& content, int slice,
                                          std::size_t k,
                                          std::optional<PaperIndex> exclude = std::nullopt);

/// Element-wise mean of the neighbours' node vectors. Neighbours without a
/// vector are skipped; if none has one the zero vector is returned and
/// `*empty` is set.
Vec pool_node_embedding(std::span<const PaperIndex> neighbors, const PaperVectors& nodes,
                        bool* empty = nullptr);

struct ProfileModels {
  const Corpus* corpus = nullptr;
  const DocVectorModel* doc = nullptr;
  const EmbeddingTable* node = nullptr;
  /// Scalers; null means unscaled (raw) features.
  const MaxAbsScaler* content_scaler = nullptr;
  const MaxAbsScaler* node_scaler = nullptr;
  std::size_t k = 100;
  /// Search neighbours with the scaled content vector instead of the raw one.
  bool scaled_search = false;
  std::uint64_t infer_seed = 1;
};

/// Profile for free text published in `year`.
QueryProfile build_profile(std::span<const std::string> abstract, int year,
                           const ProfileModels& models, const PaperVectors& content,
                           const PaperVectors& nodes);

/// Profile for a corpus paper, using its trained content vector and
/// excluding it from its own neighbour set.
QueryProfile build_profile(PaperIndex paper, const ProfileModels& models,
                           const PaperVectors& content, const PaperVectors& nodes);

}  // namespace citetime

#endif  // CITETIME_PROFILE_HPP
