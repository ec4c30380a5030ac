#include "citetime/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

namespace citetime {

Relevance reference_relevance(const Corpus& corpus, PaperIndex paper) {
  Relevance rel;
  for (const auto& r : corpus.paper(paper).references) rel.emplace(r.cited, r.count);
  return rel;
}

namespace {

std::size_t depth(std::span<const PaperIndex> ranking, std::optional<std::size_t> cutoff) {
  return cutoff ? std::min(ranking.size(), *cutoff) : ranking.size();
}

Real discount(std::size_t rank) { return Real{1} / std::log2(static_cast<Real>(rank) + 1); }

}  // namespace

Real average_precision(std::span<const PaperIndex> ranking, const Relevance& truth,
                       std::optional<std::size_t> cutoff) {
  if (truth.empty()) return 0;
  const std::size_t n = depth(ranking, cutoff);
  Real sum = 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (truth.contains(ranking[i])) {
      ++hits;
      sum += static_cast<Real>(hits) / static_cast<Real>(i + 1);
    }
  }
  const std::size_t denom = cutoff ? std::min(truth.size(), *cutoff) : truth.size();
  return sum / static_cast<Real>(denom);
}

Real ndcg(std::span<const PaperIndex> ranking, const Relevance& truth,
          std::optional<std::size_t> cutoff) {
  if (truth.empty()) return 0;
  const std::size_t n = depth(ranking, cutoff);
  Real dcg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto it = truth.find(ranking[i]);
    if (it != truth.end()) dcg += it->second * discount(i + 1);
  }
  std::vector<int> grades;
  grades.reserve(truth.size());
  for (const auto& [_, g] : truth) grades.push_back(g);
  std::sort(grades.begin(), grades.end(), std::greater<>());
  const std::size_t ideal_n = cutoff ? std::min(grades.size(), *cutoff) : grades.size();
  Real idcg = 0;
  for (std::size_t i = 0; i < ideal_n; ++i) idcg += grades[i] * discount(i + 1);
  return idcg > 0 ? dcg / idcg : 0;
}

Real reciprocal_rank(std::span<const PaperIndex> ranking, const Relevance& truth) {
  for (std::size_t i = 0; i < ranking.size(); ++i)
    if (truth.contains(ranking[i])) return Real{1} / static_cast<Real>(i + 1);
  return 0;
}

Real precision_at(std::span<const PaperIndex> ranking, const Relevance& truth, std::size_t n) {
  if (n < 1) throw UsageError("precision cutoff must be >= 1");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < std::min(n, ranking.size()); ++i) hits += truth.contains(ranking[i]);
  return static_cast<Real>(hits) / static_cast<Real>(n);
}

Real recall_at(std::span<const PaperIndex> ranking, const Relevance& truth, std::size_t n) {
  if (n < 1) throw UsageError("recall cutoff must be >= 1");
  if (truth.empty()) return 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < std::min(n, ranking.size()); ++i) hits += truth.contains(ranking[i]);
  return static_cast<Real>(hits) / static_cast<Real>(truth.size());
}

Real mean(std::span<const Real> values) {
  if (values.empty()) return 0;
  Real s = 0;
  for (Real v : values) s += v;
  return s / static_cast<Real>(values.size());
}

Real MethodScores::at(const std::string& column) const {
  for (const auto& [k, v] : values)
    if (k == column) return v;
  throw UsageError("no metric column " + column);
}

const MethodScores& EvalReport::row(const std::string& method) const {
  for (const auto& r : rows)
    if (r.method == method) return r;
  throw UsageError("no method " + method + " in report");
}

std::vector<std::string> metric_columns(const Cutoffs& c) {
  std::vector<std::string> cols{"MAP", "NDCG", "MRR", "P@" + std::to_string(c.pr_at),
                                "R@" + std::to_string(c.pr_at)};
  for (auto n : c.map_at) cols.push_back("MAP@" + std::to_string(n));
  for (auto n : c.ndcg_at) cols.push_back("NDCG@" + std::to_string(n));
  return cols;
}

std::vector<std::pair<std::string, std::vector<Real>>> per_query_metrics(
    const Run& run, const GroundTruth& truth, const Cutoffs& c) {
  std::vector<std::pair<std::string, std::vector<Real>>> out;
  for (const auto& [qid, rel] : truth) {
    auto it = run.find(qid);
    if (it == run.end()) throw DataError("run is missing query " + qid);
    const auto& r = it->second;
    std::vector<Real> v{average_precision(r, rel), ndcg(r, rel), reciprocal_rank(r, rel),
                        precision_at(r, rel, c.pr_at), recall_at(r, rel, c.pr_at)};
    for (auto n : c.map_at) v.push_back(average_precision(r, rel, n));
    for (auto n : c.ndcg_at) v.push_back(ndcg(r, rel, n));
    out.emplace_back(qid, std::move(v));
  }
  return out;
}

EvalReport evaluate(const std::vector<std::pair<std::string, Run>>& runs,
                    const GroundTruth& truth, const Cutoffs& cutoffs) {
  EvalReport report;
  report.columns = metric_columns(cutoffs);
  for (const auto& [method, run] : runs) {
    std::vector<std::pair<std::string, std::vector<Real>>> per;
    try {
      per = per_query_metrics(run, truth, cutoffs);
    } catch (const DataError& e) {
      throw DataError(method + ": " + e.what());
    }
    MethodScores row{method, {}};
    for (std::size_t c = 0; c < report.columns.size(); ++c) {
      std::vector<Real> col;
      col.reserve(per.size());
      for (const auto& [_, v] : per) col.push_back(v[c]);
      row.values.emplace_back(report.columns[c], mean(col));
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string EvalReport::table() const {
  std::size_t width = 8;
  for (const auto& r : rows) width = std::max(width, r.method.size() + 2);
  std::string out;
  char buf[64];
  auto block = [&](std::size_t from, std::size_t to) {
    std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(width), "Method");
    out += buf;
    for (std::size_t c = from; c < to; ++c) {
      std::snprintf(buf, sizeof buf, "%10s", columns[c].c_str());
      out += buf;
    }
    out += '\n';
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(width), r.method.c_str());
      out += buf;
      for (std::size_t c = from; c < to; ++c) {
        std::snprintf(buf, sizeof buf, "%10.4f", r.values[c].second);
        out += buf;
      }
      out += '\n';
    }
  };
  const std::size_t split = std::min<std::size_t>(5, columns.size());
  block(0, split);
  if (split < columns.size()) {
    out += '\n';
    block(split, columns.size());
  }
  return out;
}

std::string EvalReport::key_values() const {
  std::string out;
  char buf[64];
  for (const auto& r : rows)
    for (const auto& [k, v] : r.values) {
      std::snprintf(buf, sizeof buf, " %.12f\n", v);
      out += r.method + "." + k + buf;
    }
  return out;
}

}  // namespace citetime
