// Text artifacts exchanged between pipeline stages: run files, qrels,
// per-query predictions and human-readable ranked lists.

#ifndef CITETIME_FORMATS_HPP
#define CITETIME_FORMATS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "citetime/corpus.hpp"
#include "citetime/metrics.hpp"
#include "citetime/ranker.hpp"

namespace citetime {

/// Six columns per line: "qid Q0 docid rank score tag", ranks from 1.
void write_run(const std::string& path, const std::vector<RankedList>& lists,
               const Corpus& corpus, const std::string& tag);

struct RunFile {
  std::string tag;
  std::map<std::string, RankedList> lists;  // by query id, entries in rank order
};

/// Throws DataError on malformed lines or document ids missing from `corpus`.
RunFile read_run(const std::string& path, const Corpus& corpus);

Run to_run(const RunFile& file);

/// "qid 0 docid grade" per relevant document.
void write_qrels(const std::string& path, const GroundTruth& truth, const Corpus& corpus);
GroundTruth read_qrels(const std::string& path, const Corpus& corpus);

/// JSON lines {"id": ..., "preference": [...]}.
void write_preferences(const std::string& path,
                       const std::map<std::string, TimePreference>& prefs);
std::map<std::string, TimePreference> read_preferences(const std::string& path);

/// rank, id, score, slice and, when `truth` is given, the citing count
/// (0 for papers outside the reference list).
std::string format_ranked(const RankedList& list, const Corpus& corpus,
                          const Relevance* truth = nullptr, std::size_t limit = 0);

/// Two lists next to each other, one row per rank: id, year and citing
/// count (or "-") for each side.
std::string format_side_by_side(const RankedList& left, const RankedList& right,
                                const Corpus& corpus, const Relevance* truth,
                                std::size_t rows);

}  // namespace citetime

#endif  // CITETIME_FORMATS_HPP
