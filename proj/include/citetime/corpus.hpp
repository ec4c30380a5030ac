// Citation corpus: loading, validation, time slicing and train/test splits.

#ifndef CITETIME_CORPUS_HPP
#define CITETIME_CORPUS_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "citetime/common.hpp"

namespace citetime {

/// Lowercase, split on runs of non-alphanumeric ASCII, drop tokens shorter
/// than two characters.
std::vector<std::string> tokenize(std::string_view text);

struct Reference {
  PaperIndex cited = 0;
  int count = 1;  // citing count, >= 1
};

struct Paper {
  std::string id;
  int year = 0;
  std::vector<std::string> abstract;
  std::vector<Reference> references;  // resolved, in-corpus only
};

/// One line of a corpus file before id resolution.
struct PaperRecord {
  std::string id;
  int year = 0;
  std::string abstract;
  std::vector<std::pair<std::string, int>> references;
};

struct SliceInterval {
  std::optional<int> start;  // nullopt: open below
  int end = 0;               // inclusive

  bool contains(int year) const {
    return (!start || year >= *start) && year <= end;
  }
  std::string label() const;
};

/// Ordered, non-overlapping year intervals defining the t time slices.
class TimeSliceConfig {
 public:
  TimeSliceConfig() = default;
  explicit TimeSliceConfig(std::vector<SliceInterval> intervals);

  std::size_t size() const { return intervals_.size(); }
  const std::vector<SliceInterval>& intervals() const { return intervals_; }
  std::optional<int> slice_of_year(int year) const;

  static TimeSliceConfig from_json(std::string_view text);
  static TimeSliceConfig load(const std::string& path);
  std::string to_json() const;
  void save(const std::string& path) const;

  static TimeSliceConfig pubmed();
  static TimeSliceConfig dblp();

 private:
  std::vector<SliceInterval> intervals_;
};

/// Length-t probability vector over time slices.
struct TimePreference {
  Vec probs;

  std::size_t size() const { return probs.size(); }
  Real operator[](std::size_t i) const { return probs[i]; }
  bool valid(Real tol = 1e-9) const;
  /// Lowest index among maximal entries.
  std::size_t argmax() const;
  /// Population standard deviation of the entries.
  Real std_dev() const;
  Real entropy() const;

  static TimePreference uniform(std::size_t t);
  /// Normalised histogram. Throws DataError when every count is zero.
  static TimePreference from_counts(std::span<const long long> counts);
};

class Corpus {
 public:
  Corpus() = default;

  /// Sorts records by id, resolves references and drops dangling ones.
  /// Throws DataError on duplicate ids, duplicate cited ids within one
  /// reference list, non-positive counts or unrepresentable years.
  static Corpus from_records(std::vector<PaperRecord> records);

  std::size_t size() const { return papers_.size(); }
  bool empty() const { return papers_.empty(); }
  const Paper& paper(PaperIndex i) const { return papers_[i]; }
  const std::vector<Paper>& papers() const { return papers_; }
  std::optional<PaperIndex> find(std::string_view id) const;

  std::size_t dropped_references() const { return dropped_references_; }
  std::size_t edge_count() const;
  /// (citing, cited) pairs in ascending citing order.
  std::vector<std::pair<PaperIndex, PaperIndex>> citation_edges() const;

  bool sliced() const { return !slice_of_.empty() || papers_.empty(); }
  std::size_t slice_count() const { return slices_.size(); }
  const TimeSliceConfig& slices() const { return slices_; }
  int slice_of(PaperIndex i) const { return slice_of_.at(i); }
  const std::vector<int>& slice_assignment() const { return slice_of_; }
  /// Papers of one slice in ascending index order.
  const std::vector<PaperIndex>& slice_members(std::size_t s) const {
    return members_.at(s);
  }

  friend Corpus assign_slices(Corpus corpus, const TimeSliceConfig& config);

 private:
  std::vector<Paper> papers_;
  std::unordered_map<std::string, PaperIndex> index_;
  std::size_t dropped_references_ = 0;
  TimeSliceConfig slices_;
  std::vector<int> slice_of_;
  std::vector<std::vector<PaperIndex>> members_;
};

/// Throws DataError naming the first uncovered year.
Corpus assign_slices(Corpus corpus, const TimeSliceConfig& config);

PaperRecord parse_record(std::string_view line);
Corpus load_corpus(const std::string& path);
std::vector<PaperRecord> read_records(const std::string& path);
void save_corpus(const Corpus& corpus, const std::string& path);
std::string record_to_json(const Corpus& corpus, PaperIndex i);

struct Split {
  std::vector<PaperIndex> train;
  std::vector<PaperIndex> test;
};

/// Papers with more than `min_refs` in-corpus references spanning more
/// than `min_slices` distinct slices.
std::vector<PaperIndex> eligible_papers(const Corpus& corpus, int min_refs,
                                        int min_slices);

Split split_train_test(const Corpus& corpus, int min_refs, int min_slices,
                       std::size_t test_size, std::uint64_t seed);

/// Fraction of distinct cited papers per slice.
TimePreference true_time_preference(const Corpus& corpus, PaperIndex paper);

}  // namespace citetime

#endif  // CITETIME_CORPUS_HPP
