// Candidate generation by content similarity and the score weighting
// schemes applied on top of it: time-preference re-ranking, CiteRank,
// publication-time preference, freshness and WHIN-CSL.

#ifndef CITETIME_RANKER_HPP
#define CITETIME_RANKER_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "citetime/corpus.hpp"
#include "citetime/embeddings.hpp"
#include "citetime/node_vectors.hpp"
#include "citetime/profile.hpp"
#include "citetime/time_mlp.hpp"

namespace citetime {

struct ScoredPaper {
  PaperIndex paper = 0;
  Real score = 0;
  bool operator==(const ScoredPaper&) const = default;
};

/// Descending score, ties by ascending paper index (= ascending id).
struct RankedList {
  std::string query_id;
  std::string method;
  std::vector<ScoredPaper> entries;

  void sort();
  void truncate(std::size_t top_n);
  /// Ordering is strict and ids are unique.
  bool well_formed() const;
  std::vector<PaperIndex> papers() const;
};

enum class PoolPolicy { kAll, kOnOrBeforeQueryYear, kExplicit };

struct PoolConfig {
  PoolPolicy policy = PoolPolicy::kOnOrBeforeQueryYear;
  std::vector<std::string> ids;  // for kExplicit
};

/// Candidate papers for a query; `self` is always excluded. Throws
/// DataError on an empty pool.
std::vector<PaperIndex> candidate_pool(int query_year, const Corpus& corpus,
                                       const PoolConfig& config,
                                       std::optional<PaperIndex> self = std::nullopt);

/// Cosine against every candidate, fully sorted. Candidates without a
/// content vector are skipped and counted in `*skipped`.
RankedList cbf_scores(std::span<const Real> query, std::span<const PaperIndex> candidates,
                      const PaperVectors& content, std::size_t* skipped = nullptr);

/// 1 / (1 + e^-p)
inline Real time_preference_multiplier(Real p) { return Real{1} / (Real{1} + std::exp(-p)); }

/// Multiplies each score by the sigmoid of the predicted mass on the
/// candidate's slice (or by the raw mass when `raw_weight`), then re-sorts.
RankedList rerank_time_preference(const RankedList& base, const TimePreference& pref,
                                  const Corpus& corpus, bool raw_weight = false);

/// sigma^7 for the same year, sigma^(gap-1) for gaps 1..20, sigma^20 beyond.
Real weight_pub_preference(int target_year, int candidate_year, Real sigma);

/// exp(-age / tau)
Real weight_freshness(Real age, Real tau);

struct PageRankResult {
  Vec scores;
  int iterations = 0;
  bool converged = false;
};

/// Power-iteration PageRank on the directed citation graph (rank flows from
/// citing to cited). Dangling mass is spread uniformly.
PageRankResult citerank_weights(std::size_t nodes, std::span<const Edge> edges,
                                Real damping = 0.85, Real tol = 1e-10, int max_iter = 200);

/// Min-max normalisation to [0, 1]; a constant vector maps to all ones.
Vec min_max_normalize(std::span<const Real> v);

/// w1*mu1 + w2*mu2 (two views, requires w1 + w2 = 1) or
/// w1*mu1 + w2*mu2 + (1 - w1 - w2)*mu3 (three views, requires w1 + w2 <= 1).
Real whin_csl_score(Real mu1, Real mu2, std::optional<Real> mu3, Real w1, Real w2);

enum class SchemeKind { kNone, kTimePreference, kCiteRank, kPubPreference, kFreshness, kWhinCsl };

struct WeightScheme {
  SchemeKind kind = SchemeKind::kNone;
  Real sigma = 0.8;        // pub preference
  Real tau = 10;           // freshness, years
  Real w1 = 0.6, w2 = 0.4;  // WHIN-CSL
  bool raw_time_weight = false;
  Real damping = 0.85;     // CiteRank

  void validate() const;
  std::string name() const;
  static WeightScheme parse(const std::string& text);
};

/// Inputs a scheme may need; unused members may stay null.
struct SchemeContext {
  const Corpus* corpus = nullptr;
  int query_year = 0;
  const TimePreference* preference = nullptr;
  const Vec* citerank = nullptr;  // normalised, indexed by paper
  const PaperVectors* node = nullptr;
  const Vec* query_node = nullptr;
  const PaperVectors* author = nullptr;
  const Vec* query_author = nullptr;
};

/// Applies the scheme to a CBF list (whose scores are content cosines) and
/// re-sorts. Throws UsageError when the context lacks what the scheme needs.
RankedList apply_weight_scheme(const RankedList& base, const WeightScheme& scheme,
                               const SchemeContext& ctx);

/// Everything recommend() needs. Pointers are non-owning.
struct Models {
  const Corpus* corpus = nullptr;
  const DocVectorModel* doc = nullptr;
  const PaperVectors* content = nullptr;
  const PaperVectors* nodes = nullptr;
  const MaxAbsScaler* content_scaler = nullptr;
  const MaxAbsScaler* node_scaler = nullptr;
  const MlpParams* mlp = nullptr;
  const Vec* citerank = nullptr;  // normalised CiteRank weights
  const PaperVectors* author = nullptr;
  std::size_t k = 100;
  PoolConfig pool;
  std::uint64_t seed = 1;
};

struct Query {
  std::string id;
  std::vector<std::string> tokens;
  int year = 0;
  std::optional<PaperIndex> self;  // set when the query is a corpus paper
};

/// Per-query output besides the list itself.
struct Recommendation {
  RankedList list;
  TimePreference preference;  // empty unless the scheme used the MLP
  QueryProfile profile;
};

/// pool -> CBF -> scheme -> truncate(top_n).
Recommendation recommend(const Query& query, const Models& models, const WeightScheme& scheme,
                         std::size_t top_n = 500);

/// The same pipeline for several schemes sharing one profile and CBF pass.
std::vector<Recommendation> recommend_all(const Query& query, const Models& models,
                                          std::span<const WeightScheme> schemes,
                                          std::size_t top_n = 500);

}  // namespace citetime

#endif  // CITETIME_RANKER_HPP
