#include "citetime/embeddings.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "binary_io.hpp"
#include "citetime/kernels.hpp"

namespace citetime {

namespace {
constexpr char kMagic[9] = "CTEMB001";
}

const char* space_name(Space s) {
  switch (s) {
    case Space::kContent: return "content";
    case Space::kNode: return "node";
    case Space::kWordContext: return "word_context";
    case Space::kAuthor: return "author";
  }
  return "unknown";
}

std::size_t EmbeddingTable::add(const std::string& id, std::span<const Real> v) {
  if (v.size() != dim_)
    throw DataError("embedding for " + id + " has length " + std::to_string(v.size()) +
                    ", expected " + std::to_string(dim_));
  for (Real x : v)
    if (!std::isfinite(x)) throw NumericalError("embedding for " + id + " is not finite");
  auto [it, inserted] = index_.emplace(id, ids_.size());
  if (!inserted) throw DataError("duplicate embedding id " + id);
  ids_.push_back(id);
  data_.insert(data_.end(), v.begin(), v.end());
  return it->second;
}

std::optional<std::size_t> EmbeddingTable::find(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vec EmbeddingTable::mean() const {
  Vec out(dim_, 0);
  if (ids_.empty()) return out;
  for (std::size_t r = 0; r < size(); ++r) kernels::axpy(1, row(r).data(), out.data(), dim_);
  for (auto& x : out) x /= static_cast<Real>(size());
  return out;
}

void EmbeddingTable::save_binary(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out.write(kMagic, 8);
  io::put<std::uint8_t>(out, static_cast<std::uint8_t>(space_));
  io::put<std::uint8_t>(out, 0);
  io::put<std::uint16_t>(out, 0);
  io::put<std::uint32_t>(out, static_cast<std::uint32_t>(dim_));
  io::put<std::uint64_t>(out, ids_.size());
  for (std::size_t r = 0; r < size(); ++r) {
    io::put<std::uint32_t>(out, static_cast<std::uint32_t>(ids_[r].size()));
    out.write(ids_[r].data(), static_cast<std::streamsize>(ids_[r].size()));
    io::put_reals(out, row(r).data(), dim_);
  }
  if (!out) throw DataError("write failed: " + path);
}

EmbeddingTable EmbeddingTable::load_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embedding file " + path);
  io::expect_magic(in, kMagic, path);
  auto space = io::get<std::uint8_t>(in, "space tag");
  if (space > 3) throw DataError(path + ": unknown space tag");
  io::get<std::uint8_t>(in, "padding");
  io::get<std::uint16_t>(in, "padding");
  auto dim = io::get<std::uint32_t>(in, "dim");
  auto count = io::get<std::uint64_t>(in, "count");
  EmbeddingTable t(static_cast<Space>(space), dim);
  Vec buf(dim);
  for (std::uint64_t r = 0; r < count; ++r) {
    auto len = io::get<std::uint32_t>(in, "id length");
    std::string id(len, '\0');
    if (!in.read(id.data(), len)) throw DataError(path + ": truncated id");
    io::get_reals(in, buf.data(), dim, "vector");
    t.add(id, buf);
  }
  return t;
}

void EmbeddingTable::save_text(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << size() << ' ' << dim_ << '\n';
  char buf[32];
  for (std::size_t r = 0; r < size(); ++r) {
    out << ids_[r];
    for (Real x : row(r)) {
      std::snprintf(buf, sizeof buf, " %.17g", x);
      out << buf;
    }
    out << '\n';
  }
}

EmbeddingTable EmbeddingTable::load_text(const std::string& path, Space space) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file " + path);
  std::size_t count = 0, dim = 0;
  std::string header;
  std::getline(in, header);
  if (!(std::istringstream(header) >> count >> dim))
    throw DataError(path + ": bad header line");
  EmbeddingTable t(space, dim);
  std::string line;
  Vec v(dim);
  for (std::size_t r = 0; r < count; ++r) {
    if (!std::getline(in, line)) throw DataError(path + ": expected " + std::to_string(count) + " rows");
    std::istringstream ls(line);
    std::string id;
    ls >> id;
    for (std::size_t j = 0; j < dim; ++j)
      if (!(ls >> v[j])) throw DataError(path + ":" + std::to_string(r + 2) + ": short row");
    t.add(id, v);
  }
  return t;
}

PaperVectors::PaperVectors(const EmbeddingTable& table, const Corpus& corpus)
    : table_(&table), rows_(corpus.size(), -1) {
  for (PaperIndex p = 0; p < corpus.size(); ++p)
    if (auto r = table.find(corpus.paper(p).id)) rows_[p] = static_cast<std::int64_t>(*r);
}

std::vector<std::int64_t> PaperVectors::rows_for(std::span<const PaperIndex> papers) const {
  std::vector<std::int64_t> out(papers.size());
  for (std::size_t i = 0; i < papers.size(); ++i) out[i] = rows_[papers[i]];
  return out;
}

Real cosine_similarity(std::span<const Real> a, std::span<const Real> b, bool* degenerate) {
  if (a.size() != b.size())
    throw UsageError("cosine_similarity: length mismatch " + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()));
  return kernels::cosine(a.data(), b.data(), a.size(), degenerate);
}

MaxAbsScaler MaxAbsScaler::fit(std::span<const Vec> rows) {
  if (rows.empty()) throw DataError("cannot fit a scaler on an empty set");
  Vec m(rows.front().size(), 0);
  for (const auto& r : rows) {
    if (r.size() != m.size()) throw DataError("scaler fit rows have unequal lengths");
    for (std::size_t j = 0; j < m.size(); ++j) m[j] = std::max(m[j], std::abs(r[j]));
  }
  return MaxAbsScaler(std::move(m));
}

Vec MaxAbsScaler::apply(std::span<const Real> v) const {
  if (v.size() != max_abs_.size())
    throw UsageError("scaler expects length " + std::to_string(max_abs_.size()));
  Vec out(v.begin(), v.end());
  for (std::size_t j = 0; j < out.size(); ++j)
    if (max_abs_[j] > 0) out[j] /= max_abs_[j];
  return out;
}

}  // namespace citetime
