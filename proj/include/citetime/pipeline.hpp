// End-to-end pipeline: configuration, the stages shared by the command-line
// tool and the experiment recipes, and the artifacts passed between them.

#ifndef CITETIME_PIPELINE_HPP
#define CITETIME_PIPELINE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "citetime/corpus.hpp"
#include "citetime/doc_vectors.hpp"
#include "citetime/embeddings.hpp"
#include "citetime/metrics.hpp"
#include "citetime/node_vectors.hpp"
#include "citetime/profile.hpp"
#include "citetime/ranker.hpp"
#include "citetime/synth.hpp"
#include "citetime/time_mlp.hpp"

namespace citetime {

struct PipelineConfig {
  std::string corpus;         // raw corpus for ingest
  std::string slices;         // slice config file
  std::string slices_preset;  // "pubmed", "dblp" or empty
  std::string out = "out";
  int min_refs = 30;  // eligible papers have more references than this
  int min_slices = 5;  // ... spread over more slices than this
  std::size_t test_size = 200;
  std::size_t k = 100;
  DocVectorParams doc;
  NodeVectorParams node;
  TrainConfig train;
  std::vector<std::string> schemes{"cbf",          "timepref",     "citerank",
                                   "preference:0.8", "freshness:10", "whin_csl:0.6,0.4"};
  bool all_years_pool = false;  // default pool: papers no newer than the query
  std::size_t top_n = 500;
  Cutoffs cutoffs;
  SynthConfig synth;
  std::vector<std::size_t> sweep_k{1, 10, 15, 20, 50, 100};
  std::uint64_t seed = 1;
  int threads = 0;  // 0: OpenMP default

  /// Overrides the fields present in a JSON object; unknown keys are a
  /// UsageError.
  void apply_json(std::string_view text);
  void load(const std::string& path);
  std::string to_json() const;
  /// FNV-1a of the canonical JSON form.
  std::uint64_t hash() const;
  void validate() const;
  std::vector<WeightScheme> parsed_schemes() const;

  /// Eligibility thresholds and embedding passes that suit the default
  /// synthetic corpus.
  static PipelineConfig synthetic();
};

/// Seeds of the stochastic stages, all derived from the pipeline seed.
std::uint64_t doc_seed(const PipelineConfig& c);
std::uint64_t walk_seed(const PipelineConfig& c);
std::uint64_t mlp_seed(const PipelineConfig& c);
std::uint64_t infer_seed(const PipelineConfig& c);

/// Citation edges the models may see: those whose citing paper is not a
/// test query.
std::vector<Edge> visible_edges(const Corpus& corpus, const Split& split);

struct Embeddings {
  DocVectorModel doc;
  EmbeddingTable node;
  EmbeddingTrainReport doc_report;
  EmbeddingTrainReport node_report;
};

Embeddings train_embeddings(const Corpus& corpus, const Split& split, const PipelineConfig& c);

struct Features {
  MaxAbsScaler content_scaler;
  MaxAbsScaler node_scaler;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::vector<TrainingExample> train;
  std::vector<TrainingExample> test;
  bool operator==(const Features&) const;
};

/// Profiles every train and test paper with `k` neighbours, fits the scalers
/// on the training profiles and scales both sets.
Features build_features(const Corpus& corpus, const Split& split, const PaperVectors& content,
                        const PaperVectors& nodes, std::size_t k, const PipelineConfig& c);

void save_features(const Features& f, const std::string& path);
Features load_features(const std::string& path);

TrainConfig train_config(const PipelineConfig& c);

/// Mean cross-entropy of the model's predictions on `data`.
Real mean_cross_entropy(const MlpParams& params, std::span<const TrainingExample> data);

/// Normalised CiteRank weights over the visible citation graph.
Vec citerank_vector(const Corpus& corpus, const Split& split, Real damping);

struct Evaluation {
  std::vector<WeightScheme> schemes;
  std::vector<std::vector<RankedList>> lists;  // [scheme][test query]
  std::map<std::string, TimePreference> predictions;
  GroundTruth truth;
  EvalReport report;
};

/// Recommends for every test query under every scheme and evaluates
/// against the queries' reference lists.
Evaluation recommend_and_evaluate(const Corpus& corpus, const Split& split, const Models& models,
                                  const std::vector<WeightScheme>& schemes,
                                  const PipelineConfig& c);

GroundTruth test_truth(const Corpus& corpus, const Split& split);

struct ExperimentResult {
  Embeddings embeddings;
  Features features;
  TrainResult model;
  Real test_cross_entropy = 0;
  Evaluation evaluation;
};

/// embed -> profile -> train -> recommend -> evaluate, in process.
ExperimentResult run_experiment(const Corpus& corpus, const Split& split,
                                const PipelineConfig& c);

struct KSweepRow {
  std::size_t k = 0;
  Real mean_cross_entropy = 0;
  Real mrr = 0;
};

/// For each k: rebuild the profiles, retrain the model and score the test
/// queries (cross-entropy of the prediction, MRR of the re-ranked list).
std::vector<KSweepRow> experiment_k_sweep(const Corpus& corpus, const Split& split,
                                          const Embeddings& emb,
                                          const std::vector<std::size_t>& ks,
                                          const PipelineConfig& c);

std::string format_k_sweep(const std::vector<KSweepRow>& rows);

struct DispersionRow {
  std::string id;
  Real std_dev = 0;  // of the true preference
  Real cross_entropy = 0;
};

struct DispersionResult {
  std::vector<DispersionRow> rows;
  Real correlation = 0;     // Pearson, std-dev vs cross-entropy
  Real low_bucket_ce = 0;   // mean over the least dispersed quarter
  Real high_bucket_ce = 0;  // mean over the most dispersed quarter
};

DispersionResult experiment_dispersion(const Features& features, const MlpParams& params);

std::string format_dispersion(const DispersionResult& result);

/// Appends "command seed config=<hash> file=<checksum> ..." to the log.
void append_log(const std::string& log_path, const std::string& command,
                const PipelineConfig& c, const std::vector<std::string>& artifacts);

/// FNV-1a over the file's bytes.
std::uint64_t file_checksum(const std::string& path);

}  // namespace citetime

#endif  // CITETIME_PIPELINE_HPP
