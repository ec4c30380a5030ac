#include "citetime/profile.hpp"

#include <algorithm>
#include <numeric>

#include "citetime/kernels.hpp"

namespace citetime {

std::vector<PaperIndex> nearest_neighbors(std::span<const Real> query, const Corpus& corpus,
                                          const PaperVectors& content, int slice,
                                          std::size_t k, std::optional<PaperIndex> exclude) {
  if (k < 1) throw UsageError("k must be >= 1");
  if (slice < 0 || static_cast<std::size_t>(slice) >= corpus.slice_count())
    throw DataError("slice " + std::to_string(slice) + " out of range");
  std::vector<PaperIndex> cand;
  for (PaperIndex p : corpus.slice_members(static_cast<std::size_t>(slice)))
    if (p != exclude && content.has(p)) cand.push_back(p);
  if (cand.empty()) throw DataError("slice " + std::to_string(slice) + " has no candidates");

  auto rows = content.rows_for(cand);
  Vec score(cand.size());
  kernels::cosine_scores_parallel(query, content.table().data(), content.dim(), rows, score);

  std::vector<std::size_t> order(cand.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t take = std::min(k, cand.size());
  auto better = [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return cand[a] < cand[b];
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    better);
  std::vector<PaperIndex> out(take);
  for (std::size_t i = 0; i < take; ++i) out[i] = cand[order[i]];
  return out;
}

Vec pool_node_embedding(std::span<const PaperIndex> neighbors, const PaperVectors& nodes,
                        bool* empty) {
  std::vector<std::int64_t> rows;
  for (PaperIndex p : neighbors)
    if (nodes.has(p)) rows.push_back(nodes.row_of(p));
  if (empty) *empty = rows.empty();
  return kernels::mean_rows_serial(nodes.table().data(), nodes.dim(), rows);
}

namespace {

QueryProfile finish_profile(Vec content_vec, int year, std::optional<PaperIndex> self,
                            const ProfileModels& models, const PaperVectors& content,
                            const PaperVectors& nodes) {
  const Corpus& corpus = *models.corpus;
  auto slice = corpus.slices().slice_of_year(year);
  if (!slice) throw DataError("query year " + std::to_string(year) + " is not covered by any slice");

  QueryProfile prof;
  prof.query_slice = *slice;
  Vec scaled = models.content_scaler ? models.content_scaler->apply(content_vec) : content_vec;
  const Vec& search = models.scaled_search ? scaled : content_vec;
  if (models.scaled_search && models.content_scaler) {
    // search against scaled corpus vectors as well
    EmbeddingTable scaled_table(Space::kContent, content.dim());
    for (PaperIndex p : corpus.slice_members(static_cast<std::size_t>(*slice)))
      if (content.has(p)) scaled_table.add(corpus.paper(p).id, models.content_scaler->apply(content.vec(p)));
    PaperVectors view(scaled_table, corpus);
    prof.neighbor_ids = nearest_neighbors(search, corpus, view, *slice, models.k, self);
  } else {
    prof.neighbor_ids = nearest_neighbors(search, corpus, content, *slice, models.k, self);
  }
  prof.raw_node = pool_node_embedding(prof.neighbor_ids, nodes, &prof.empty_pool);
  prof.x_content = std::move(scaled);
  prof.x_node = models.node_scaler ? models.node_scaler->apply(prof.raw_node) : prof.raw_node;
  prof.raw_content = std::move(content_vec);
  return prof;
}

}  // namespace

QueryProfile build_profile(std::span<const std::string> abstract, int year,
                           const ProfileModels& models, const PaperVectors& content,
                           const PaperVectors& nodes) {
  auto inferred = models.doc->infer(abstract, models.infer_seed);
  auto prof = finish_profile(std::move(inferred.vector), year, std::nullopt, models, content, nodes);
  prof.inference_fallback = inferred.fallback;
  return prof;
}

QueryProfile build_profile(PaperIndex paper, const ProfileModels& models,
                           const PaperVectors& content, const PaperVectors& nodes) {
  if (!content.has(paper))
    throw DataError("paper " + models.corpus->paper(paper).id + " has no content vector");
  auto v = content.vec(paper);
  return finish_profile(Vec(v.begin(), v.end()), models.corpus->paper(paper).year, paper, models,
                        content, nodes);
}

}  // namespace citetime
