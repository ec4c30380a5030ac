// Embedding tables, cosine similarity and max-abs feature scaling.

#ifndef CITETIME_EMBEDDINGS_HPP
#define CITETIME_EMBEDDINGS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "citetime/common.hpp"
#include "citetime/corpus.hpp"

namespace citetime {

enum class Space : std::uint8_t { kContent = 0, kNode = 1, kWordContext = 2, kAuthor = 3 };

const char* space_name(Space s);

/// id -> dense vector, stored row-major.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(Space space, std::size_t dim) : space_(space), dim_(dim) {}

  Space space() const { return space_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(std::size_t row) const { return ids_[row]; }

  /// Appends a row; throws DataError on duplicate id, wrong length or
  /// non-finite entries.
  std::size_t add(const std::string& id, std::span<const Real> v);
  std::optional<std::size_t> find(const std::string& id) const;

  std::span<const Real> row(std::size_t r) const {
    return {data_.data() + r * dim_, dim_};
  }
  std::span<Real> row(std::size_t r) { return {data_.data() + r * dim_, dim_}; }
  const Real* data() const { return data_.data(); }
  Real* data() { return data_.data(); }

  /// Mean of all rows (zero vector for an empty table).
  Vec mean() const;

  void save_binary(const std::string& path) const;
  static EmbeddingTable load_binary(const std::string& path);
  void save_text(const std::string& path) const;
  static EmbeddingTable load_text(const std::string& path, Space space);

  bool operator==(const EmbeddingTable&) const = default;

 private:
  Space space_ = Space::kContent;
  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  Vec data_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// An embedding table viewed through corpus paper indices.
class PaperVectors {
 public:
  PaperVectors(const EmbeddingTable& table, const Corpus& corpus);

  const EmbeddingTable& table() const { return *table_; }
  std::size_t dim() const { return table_->dim(); }
  bool has(PaperIndex p) const { return rows_[p] >= 0; }
  std::int64_t row_of(PaperIndex p) const { return rows_[p]; }
  std::span<const Real> vec(PaperIndex p) const {
    return table_->row(static_cast<std::size_t>(rows_[p]));
  }
  /// Row indices for a list of papers (-1 where absent).
  std::vector<std::int64_t> rows_for(std::span<const PaperIndex> papers) const;

 private:
  const EmbeddingTable* table_;
  std::vector<std::int64_t> rows_;
};

/// Cosine similarity. Throws UsageError on a length mismatch; a zero vector
/// yields 0 and sets `*degenerate`.
Real cosine_similarity(std::span<const Real> a, std::span<const Real> b,
                       bool* degenerate = nullptr);

class MaxAbsScaler {
 public:
  MaxAbsScaler() = default;
  explicit MaxAbsScaler(Vec max_abs) : max_abs_(std::move(max_abs)) {}

  static MaxAbsScaler fit(std::span<const Vec> rows);
  Vec apply(std::span<const Real> v) const;
  const Vec& max_abs() const { return max_abs_; }
  std::size_t dim() const { return max_abs_.size(); }

  bool operator==(const MaxAbsScaler&) const = default;

 private:
  Vec max_abs_;
};

}  // namespace citetime

#endif  // CITETIME_EMBEDDINGS_HPP
