// Synthetic citation corpora with planted topic drift and planted
// per-topic citing-time profiles.

#ifndef CITETIME_SYNTH_HPP
#define CITETIME_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "citetime/corpus.hpp"
#include "citetime/metrics.hpp"

namespace citetime {

struct SynthConfig {
  int topics = 5;
  int slices = 5;
  int papers_per_slice = 400;
  int start_year = 2000;
  int years_per_slice = 2;
  int vocab_per_topic = 160;  // topic-specific words
  int background_vocab = 40;   // shared by every topic
  Real background_fraction = 0.2;  // share of abstract tokens drawn from the background
  Real drift_rate = 0.3;           // fraction of topic vocabulary replaced per slice
  int min_abstract = 40;
  int max_abstract = 120;
  int min_refs = 25;  // citation budget per paper
  int max_refs = 45;
  Real profile_concentration = 0.7;  // Dirichlet alpha for random planted profiles
  /// planted[topic][citing slice] = distribution over slices <= citing slice.
  /// Empty: drawn at random from the seed.
  std::vector<std::vector<Vec>> planted;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SynthCorpus {
  Corpus corpus;  // already sliced
  TimeSliceConfig slices;
  std::vector<int> topic_of;  // by paper index
  std::vector<std::vector<TimePreference>> planted;  // [topic][slice], length t
  std::size_t renormalized = 0;  // papers whose profile hit empty slices
};

SynthCorpus generate(const SynthConfig& config);

/// Slice config matching the generator's year layout.
TimeSliceConfig synth_slices(const SynthConfig& config);

struct PlantedTruth {
  GroundTruth relevance;                       // query id -> references
  std::map<std::string, TimePreference> observed;  // query id -> slice histogram
  std::map<std::string, TimePreference> planted;   // query id -> generating profile
};

PlantedTruth planted_truth(const SynthCorpus& synth, std::span<const PaperIndex> queries);

/// JSON lines: {"id", "topic", "planted": [...], "observed": [...]}.
void save_planted_truth(const SynthCorpus& synth, std::span<const PaperIndex> papers,
                        const std::string& path);

}  // namespace citetime

#endif  // CITETIME_SYNTH_HPP
