// Paragraph vectors, distributed bag-of-words flavour: each document vector
// is trained to predict the words of its own abstract against sampled
// negatives. Word output vectors are kept so new texts can be embedded by
// gradient descent against the frozen word side.

#ifndef CITETIME_DOC_VECTORS_HPP
#define CITETIME_DOC_VECTORS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "citetime/corpus.hpp"
#include "citetime/embeddings.hpp"
#include "citetime/sgns.hpp"

namespace citetime {

struct DocVectorParams {
  std::size_t dim = 100;
  int epochs = 5;
  int negatives = 5;
  Real lr_start = 0.025;
  Real lr_end = 0.0001;
  int infer_epochs = 20;
  std::uint64_t seed = 1;
};

struct InferResult {
  Vec vector;
  bool fallback = false;  // every token was out of vocabulary
};

class DocVectorModel {
 public:
  DocVectorModel() = default;

  static DocVectorModel train(const Corpus& corpus, const DocVectorParams& params,
                              EmbeddingTrainReport* report = nullptr);

  const DocVectorParams& params() const { return params_; }
  const EmbeddingTable& documents() const { return docs_; }
  const EmbeddingTable& word_context() const { return words_; }
  std::size_t vocabulary_size() const { return vocab_.size(); }

  /// Embeds an unseen token sequence. Deterministic for a given seed.
  InferResult infer(std::span<const std::string> tokens, std::uint64_t seed) const;

  /// Writes <prefix>.emb, <prefix>.words.emb and <prefix>.vocab.tsv.
  void save(const std::string& prefix) const;
  static DocVectorModel load(const std::string& prefix);

 private:
  void build_sampler();

  DocVectorParams params_;
  std::vector<std::string> vocab_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, std::uint32_t> word_index_;
  EmbeddingTable docs_{Space::kContent, 0};
  EmbeddingTable words_{Space::kWordContext, 0};
  UnigramTable sampler_;
};

}  // namespace citetime

#endif  // CITETIME_DOC_VECTORS_HPP
