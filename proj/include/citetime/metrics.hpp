// Ranking evaluation: AP/MAP, NDCG, reciprocal rank, precision and recall
// at N. MAP, P@N and R@N use binary relevance (membership in the reference
// list); NDCG uses the citing count as the graded relevance.

#ifndef CITETIME_METRICS_HPP
#define CITETIME_METRICS_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "citetime/corpus.hpp"

namespace citetime {

/// cited paper -> relevance grade (>= 1)
using Relevance = std::unordered_map<PaperIndex, int>;

/// query id -> relevance
using GroundTruth = std::map<std::string, Relevance>;

/// A paper's in-corpus references graded by citing count.
Relevance reference_relevance(const Corpus& corpus, PaperIndex paper);

Real average_precision(std::span<const PaperIndex> ranking, const Relevance& truth,
                       std::optional<std::size_t> cutoff = std::nullopt);
Real ndcg(std::span<const PaperIndex> ranking, const Relevance& truth,
          std::optional<std::size_t> cutoff = std::nullopt);
Real reciprocal_rank(std::span<const PaperIndex> ranking, const Relevance& truth);
Real precision_at(std::span<const PaperIndex> ranking, const Relevance& truth, std::size_t n);
Real recall_at(std::span<const PaperIndex> ranking, const Relevance& truth, std::size_t n);

/// Macro average of per-query values, summed in the given order.
Real mean(std::span<const Real> values);

struct Cutoffs {
  std::size_t pr_at = 30;
  std::vector<std::size_t> map_at{30, 100};
  std::vector<std::size_t> ndcg_at{30, 100};
};

struct MethodScores {
  std::string method;
  std::vector<std::pair<std::string, Real>> values;  // column name -> value

  Real at(const std::string& column) const;
};

struct EvalReport {
  std::vector<std::string> columns;
  std::vector<MethodScores> rows;

  const MethodScores& row(const std::string& method) const;
  /// Two aligned blocks: untruncated metrics, then the cut-off variants.
  std::string table() const;
  /// One "method.metric value" line per cell.
  std::string key_values() const;
};

/// query id -> ranking
using Run = std::map<std::string, std::vector<PaperIndex>>;

/// Per-query metric values for one run, in ascending query-id order.
std::vector<std::pair<std::string, std::vector<Real>>> per_query_metrics(
    const Run& run, const GroundTruth& truth, const Cutoffs& cutoffs);

std::vector<std::string> metric_columns(const Cutoffs& cutoffs);

/// Every truth query must appear in every run (DataError otherwise).
EvalReport evaluate(const std::vector<std::pair<std::string, Run>>& runs,
                    const GroundTruth& truth, const Cutoffs& cutoffs = {});

}  // namespace citetime

#endif  // CITETIME_METRICS_HPP
