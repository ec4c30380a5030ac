#include "citetime/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

namespace citetime {

using nlohmann::json;

namespace {

constexpr int kMinYear = 1;
constexpr int kMaxYear = 9999;

bool is_alnum(unsigned char c) { return c < 128 && std::isalnum(c); }

}  // namespace

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (cur.size() >= 2) tokens.push_back(cur);
    cur.clear();
  };
  for (unsigned char c : text) {
    if (is_alnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

// ---------------------------------------------------------------------------
// TimeSliceConfig

std::string SliceInterval::label() const {
  if (!start) return "pre-" + std::to_string(end);
  if (*start == end) return std::to_string(end);
  return std::to_string(*start) + "-" + std::to_string(end);
}

TimeSliceConfig::TimeSliceConfig(std::vector<SliceInterval> intervals)
    : intervals_(std::move(intervals)) {
  if (intervals_.size() < 2)
    throw DataError("slice config needs at least 2 intervals");
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const auto& iv = intervals_[i];
    if (i > 0 && !iv.start)
      throw DataError("only the first slice may be open below");
    if (iv.start && *iv.start > iv.end)
      throw DataError("slice " + iv.label() + " has start after end");
    if (i > 0 && *iv.start <= intervals_[i - 1].end)
      throw DataError("slices " + intervals_[i - 1].label() + " and " +
                      iv.label() + " overlap or are out of order");
  }
}

std::optional<int> TimeSliceConfig::slice_of_year(int year) const {
  for (std::size_t i = 0; i < intervals_.size(); ++i)
    if (intervals_[i].contains(year)) return static_cast<int>(i);
  return std::nullopt;
}

TimeSliceConfig TimeSliceConfig::from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("slice config: ") + e.what());
  }
  if (!doc.is_array()) throw DataError("slice config must be a JSON array");
  std::vector<SliceInterval> out;
  for (const auto& item : doc) {
    SliceInterval iv;
    if (!item.contains("end") || !item["end"].is_number_integer())
      throw DataError("slice config entry missing integer 'end'");
    iv.end = item["end"].get<int>();
    if (item.contains("start") && !item["start"].is_null())
      iv.start = item["start"].get<int>();
    out.push_back(iv);
  }
  return TimeSliceConfig(std::move(out));
}

TimeSliceConfig TimeSliceConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open slice config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string TimeSliceConfig::to_json() const {
  json doc = json::array();
  for (const auto& iv : intervals_) {
    json item;
    item["start"] = iv.start ? json(*iv.start) : json(nullptr);
    item["end"] = iv.end;
    doc.push_back(item);
  }
  return doc.dump(2) + "\n";
}

void TimeSliceConfig::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << to_json();
}

TimeSliceConfig TimeSliceConfig::pubmed() {
  return TimeSliceConfig({{std::nullopt, 1995},
                          {1996, 2000},
                          {2001, 2003},
                          {2004, 2005},
                          {2006, 2007},
                          {2008, 2009},
                          {2010, 2013}});
}

TimeSliceConfig TimeSliceConfig::dblp() {
  return TimeSliceConfig({{std::nullopt, 1995},
                          {1996, 2000},
                          {2001, 2003},
                          {2004, 2005},
                          {2006, 2007},
                          {2008, 2009},
                          {2010, 2011},
                          {2012, 2013}});
}

// ---------------------------------------------------------------------------
// TimePreference

bool TimePreference::valid(Real tol) const {
  if (probs.empty()) return false;
  Real sum = 0;
  for (Real p : probs) {
    if (!(p >= 0) || !std::isfinite(p)) return false;
    sum += p;
  }
  return std::abs(sum - 1) <= tol;
}

std::size_t TimePreference::argmax() const {
  return static_cast<std::size_t>(
      std::max_element(probs.begin(), probs.end()) - probs.begin());
}

Real TimePreference::std_dev() const {
  if (probs.empty()) return 0;
  Real mean = std::accumulate(probs.begin(), probs.end(), Real{0}) /
              static_cast<Real>(probs.size());
  Real ss = 0;
  for (Real p : probs) ss += (p - mean) * (p - mean);
  return std::sqrt(ss / static_cast<Real>(probs.size()));
}

Real TimePreference::entropy() const {
  Real h = 0;
  for (Real p : probs)
    if (p > 0) h -= p * std::log(p);
  return h;
}

TimePreference TimePreference::uniform(std::size_t t) {
  return {Vec(t, Real{1} / static_cast<Real>(t))};
}

TimePreference TimePreference::from_counts(std::span<const long long> counts) {
  long long total = 0;
  for (long long c : counts) {
    if (c < 0) throw DataError("negative slice count");
    total += c;
  }
  if (total == 0) throw DataError("no resolvable references");
  TimePreference out{Vec(counts.size())};
  for (std::size_t i = 0; i < counts.size(); ++i)
    out.probs[i] = static_cast<Real>(counts[i]) / static_cast<Real>(total);
  return out;
}

// ---------------------------------------------------------------------------
// Corpus

Corpus Corpus::from_records(std::vector<PaperRecord> records) {
  std::sort(records.begin(), records.end(),
            [](const PaperRecord& a, const PaperRecord& b) { return a.id < b.id; });
  Corpus c;
  c.papers_.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.id.empty()) throw DataError("record with empty id");
    if (i > 0 && records[i - 1].id == r.id)
      throw DataError("duplicate paper id: " + r.id);
    if (r.year < kMinYear || r.year > kMaxYear)
      throw DataError("paper " + r.id + ": year " + std::to_string(r.year) +
                      " outside representable range");
    c.index_.emplace(r.id, static_cast<PaperIndex>(i));
  }
  for (auto& r : records) {
    Paper p;
    p.id = r.id;
    p.year = r.year;
    p.abstract = tokenize(r.abstract);
    std::set<std::string_view> seen;
    for (const auto& [cited, count] : r.references) {
      if (!seen.insert(cited).second)
        throw DataError("paper " + r.id + ": duplicate reference to " + cited);
      if (count < 1)
        throw DataError("paper " + r.id + ": citing count for " + cited +
                        " must be >= 1");
      auto it = c.index_.find(cited);
      if (it == c.index_.end()) {
        ++c.dropped_references_;
        continue;
      }
      p.references.push_back({it->second, count});
    }
    std::sort(p.references.begin(), p.references.end(),
              [](const Reference& a, const Reference& b) { return a.cited < b.cited; });
    c.papers_.push_back(std::move(p));
  }
  return c;
}

std::optional<PaperIndex> Corpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Corpus::edge_count() const {
  std::size_t n = 0;
  for (const auto& p : papers_) n += p.references.size();
  return n;
}

std::vector<std::pair<PaperIndex, PaperIndex>> Corpus::citation_edges() const {
  std::vector<std::pair<PaperIndex, PaperIndex>> edges;
  edges.reserve(edge_count());
  for (PaperIndex i = 0; i < papers_.size(); ++i)
    for (const auto& r : papers_[i].references) edges.emplace_back(i, r.cited);
  return edges;
}

Corpus assign_slices(Corpus corpus, const TimeSliceConfig& config) {
  if (config.size() < 2) throw DataError("slice config needs at least 2 intervals");
  std::vector<int> slice_of(corpus.size());
  std::vector<std::vector<PaperIndex>> members(config.size());
  for (PaperIndex i = 0; i < corpus.size(); ++i) {
    int year = corpus.papers_[i].year;
    auto s = config.slice_of_year(year);
    if (!s)
      throw DataError("year " + std::to_string(year) + " (paper " +
                      corpus.papers_[i].id + ") is not covered by the slice config");
    slice_of[i] = *s;
    members[*s].push_back(i);
  }
  corpus.slices_ = config;
  corpus.slice_of_ = std::move(slice_of);
  corpus.members_ = std::move(members);
  return corpus;
}

// ---------------------------------------------------------------------------
// File I/O

namespace {

PaperRecord parse_record_json(std::string_view line) {
  json doc = json::parse(line);
  if (!doc.is_object()) throw DataError("record is not a JSON object");
  PaperRecord r;
  if (!doc.contains("id") || !doc["id"].is_string())
    throw DataError("record missing string 'id'");
  r.id = doc["id"].get<std::string>();
  if (!doc.contains("year") || !doc["year"].is_number_integer())
    throw DataError("record " + r.id + " missing integer 'year'");
  auto year = doc["year"].get<long long>();
  if (year < kMinYear || year > kMaxYear)
    throw DataError("record " + r.id + ": year " + std::to_string(year) +
                    " outside representable range");
  r.year = static_cast<int>(year);
  if (doc.contains("abstract") && !doc["abstract"].is_null())
    r.abstract = doc["abstract"].get<std::string>();
  if (doc.contains("references")) {
    for (const auto& ref : doc["references"]) {
      if (!ref.contains("id") || !ref["id"].is_string())
        throw DataError("record " + r.id + ": reference missing string 'id'");
      int count = ref.contains("count") ? ref["count"].get<int>() : 1;
      r.references.emplace_back(ref["id"].get<std::string>(), count);
    }
  }
  return r;
}

}  // namespace

PaperRecord parse_record(std::string_view line) {
  try {
    return parse_record_json(line);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed record: ") + e.what());
  }
}

std::vector<PaperRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file " + path);
  std::vector<PaperRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(parse_record(line));
    } catch (const json::exception& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return records;
}

Corpus load_corpus(const std::string& path) {
  return Corpus::from_records(read_records(path));
}

std::string record_to_json(const Corpus& corpus, PaperIndex i) {
  const Paper& p = corpus.paper(i);
  json doc;
  doc["id"] = p.id;
  doc["year"] = p.year;
  std::string text;
  for (const auto& tok : p.abstract) {
    if (!text.empty()) text.push_back(' ');
    text += tok;
  }
  doc["abstract"] = text;
  json refs = json::array();
  for (const auto& r : p.references)
    refs.push_back({{"id", corpus.paper(r.cited).id}, {"count", r.count}});
  doc["references"] = refs;
  return doc.dump();
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  for (PaperIndex i = 0; i < corpus.size(); ++i)
    out << record_to_json(corpus, i) << '\n';
}

// ---------------------------------------------------------------------------
// Splits and ground-truth preferences

std::vector<PaperIndex> eligible_papers(const Corpus& corpus, int min_refs,
                                        int min_slices) {
  if (!corpus.sliced()) throw DataError("corpus has no slice assignment");
  std::vector<PaperIndex> out;
  std::vector<char> seen(corpus.slice_count());
  for (PaperIndex i = 0; i < corpus.size(); ++i) {
    const auto& refs = corpus.paper(i).references;
    if (static_cast<long long>(refs.size()) <= min_refs) continue;
    std::fill(seen.begin(), seen.end(), 0);
    int distinct = 0;
    for (const auto& r : refs) {
      int s = corpus.slice_of(r.cited);
      if (!seen[s]) {
        seen[s] = 1;
        ++distinct;
      }
    }
    if (distinct > min_slices) out.push_back(i);
  }
  return out;
}

Split split_train_test(const Corpus& corpus, int min_refs, int min_slices,
                       std::size_t test_size, std::uint64_t seed) {
  if (min_refs < 1 || min_slices < 1)
    throw UsageError("eligibility thresholds must be >= 1");
  auto eligible = eligible_papers(corpus, min_refs, min_slices);
  if (eligible.size() < test_size)
    throw DataError("only " + std::to_string(eligible.size()) +
                    " eligible papers, fewer than test size " +
                    std::to_string(test_size));
  Rng rng(mix_seed(seed, 1));
  std::shuffle(eligible.begin(), eligible.end(), rng);
  Split split;
  split.test.assign(eligible.begin(), eligible.begin() + static_cast<long>(test_size));
  split.train.assign(eligible.begin() + static_cast<long>(test_size), eligible.end());
  std::sort(split.test.begin(), split.test.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

TimePreference true_time_preference(const Corpus& corpus, PaperIndex paper) {
  if (!corpus.sliced()) throw DataError("corpus has no slice assignment");
  std::vector<long long> counts(corpus.slice_count(), 0);
  for (const auto& r : corpus.paper(paper).references)
    ++counts[static_cast<std::size_t>(corpus.slice_of(r.cited))];
  try {
    return TimePreference::from_counts(counts);
  } catch (const DataError&) {
    throw DataError("paper " + corpus.paper(paper).id +
                    " has no resolvable references");
  }
}

}  // namespace citetime
