#include "citetime/formats.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace citetime {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  return in;
}

PaperIndex resolve(const Corpus& corpus, const std::string& id, const std::string& where) {
  auto p = corpus.find(id);
  if (!p) throw DataError(where + ": unknown paper id " + id);
  return *p;
}

}  // namespace

void write_run(const std::string& path, const std::vector<RankedList>& lists,
               const Corpus& corpus, const std::string& tag) {
  auto out = open_out(path);
  char buf[64];
  for (const auto& list : lists) {
    std::size_t rank = 0;
    for (const auto& e : list.entries) {
      std::snprintf(buf, sizeof buf, " %zu %.17g ", ++rank, e.score);
      out << list.query_id << " Q0 " << corpus.paper(e.paper).id << buf << tag << '\n';
    }
  }
}

RunFile read_run(const std::string& path, const Corpus& corpus) {
  auto in = open_in(path);
  RunFile file;
  std::string line;
  std::size_t lineno = 0;
  std::map<std::string, std::size_t> last_rank;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    std::istringstream ls(line);
    std::string qid, q0, doc, tag;
    std::size_t rank = 0;
    Real score = 0;
    if (!(ls >> qid >> q0 >> doc >> rank >> score >> tag))
      throw DataError(where + ": expected 'qid Q0 docid rank score tag'");
    if (file.tag.empty()) file.tag = tag;
    auto& list = file.lists[qid];
    list.query_id = qid;
    list.method = tag;
    if (rank != ++last_rank[qid]) throw DataError(where + ": ranks must run 1, 2, ... per query");
    list.entries.push_back({resolve(corpus, doc, where), score});
  }
  return file;
}

Run to_run(const RunFile& file) {
  Run run;
  for (const auto& [qid, list] : file.lists) run.emplace(qid, list.papers());
  return run;
}

void write_qrels(const std::string& path, const GroundTruth& truth, const Corpus& corpus) {
  auto out = open_out(path);
  for (const auto& [qid, rel] : truth) {
    std::vector<std::pair<PaperIndex, int>> sorted(rel.begin(), rel.end());
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [p, g] : sorted) out << qid << " 0 " << corpus.paper(p).id << ' ' << g << '\n';
  }
}

GroundTruth read_qrels(const std::string& path, const Corpus& corpus) {
  auto in = open_in(path);
  GroundTruth truth;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    std::istringstream ls(line);
    std::string qid, zero, doc;
    int grade = 0;
    if (!(ls >> qid >> zero >> doc >> grade)) throw DataError(where + ": expected 'qid 0 docid grade'");
    if (grade < 1) throw DataError(where + ": grade must be >= 1");
    truth[qid][resolve(corpus, doc, where)] = grade;
  }
  return truth;
}

void write_preferences(const std::string& path,
                       const std::map<std::string, TimePreference>& prefs) {
  auto out = open_out(path);
  for (const auto& [id, p] : prefs) {
    nlohmann::json doc;
    doc["id"] = id;
    doc["preference"] = p.probs;
    out << doc.dump() << '\n';
  }
}

std::map<std::string, TimePreference> read_preferences(const std::string& path) {
  auto in = open_in(path);
  std::map<std::string, TimePreference> prefs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto doc = nlohmann::json::parse(line);
      prefs[doc.at("id").get<std::string>()] = {doc.at("preference").get<Vec>()};
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return prefs;
}

std::string format_ranked(const RankedList& list, const Corpus& corpus, const Relevance* truth,
                          std::size_t limit) {
  std::string out = truth ? "rank\tid\tscore\tslice\tciting_count\n" : "rank\tid\tscore\tslice\n";
  const std::size_t n = limit ? std::min(limit, list.entries.size()) : list.entries.size();
  char buf[96];
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = list.entries[i];
    std::snprintf(buf, sizeof buf, "%zu\t", i + 1);
    out += buf;
    out += corpus.paper(e.paper).id;
    std::snprintf(buf, sizeof buf, "\t%.6f\t%d", e.score, corpus.slice_of(e.paper));
    out += buf;
    if (truth) {
      auto it = truth->find(e.paper);
      out += '\t' + std::to_string(it == truth->end() ? 0 : it->second);
    }
    out += '\n';
  }
  return out;
}

std::string format_side_by_side(const RankedList& left, const RankedList& right,
                                const Corpus& corpus, const Relevance* truth, std::size_t rows) {
  auto cell = [&](const RankedList& l, std::size_t i) {
    if (i >= l.entries.size()) return std::string(28, ' ');
    const auto& p = corpus.paper(l.entries[i].paper);
    std::string count = "-";
    if (truth) {
      auto it = truth->find(l.entries[i].paper);
      if (it != truth->end()) count = std::to_string(it->second);
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-16s %5d %5s", p.id.c_str(), p.year, count.c_str());
    return std::string(buf);
  };
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-5s %-28s | %-28s\n", "rank", left.method.c_str(),
                right.method.c_str());
  std::string out = buf;
  const std::size_t n = std::min(rows, std::max(left.entries.size(), right.entries.size()));
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%-5zu %s | %s\n", i + 1, cell(left, i).c_str(),
                  cell(right, i).c_str());
    out += buf;
  }
  return out;
}

}  // namespace citetime
