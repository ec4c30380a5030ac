// Skip-gram with negative sampling: the objective shared by the document
// and node embedding trainers.
//
// For an input vector v and targets (u_j, y_j) with y_j = 1 for the observed
// context and 0 for sampled negatives:
//   loss = -sum_j [ y_j log s(u_j.v) + (1 - y_j) log s(-u_j.v) ]
//   dloss/d(u_j.v) = s(u_j.v) - y_j

#ifndef CITETIME_SGNS_HPP
#define CITETIME_SGNS_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "citetime/common.hpp"

namespace citetime {

struct SgnsTarget {
  std::size_t row = 0;  // row in the output matrix
  bool positive = false;
};

inline Real sigmoid(Real x) { return Real{1} / (Real{1} + std::exp(-x)); }

/// Loss for one input vector against its targets. `outputs` is row-major
/// with `input.size()` columns.
Real sgns_loss(std::span<const Real> input, const Real* outputs,
               std::span<const SgnsTarget> targets);

/// Exact gradients of sgns_loss. `grad_outputs` holds one row per target,
/// in target order. Returns the loss.
Real sgns_gradient(std::span<const Real> input, const Real* outputs,
                   std::span<const SgnsTarget> targets, std::span<Real> grad_input,
                   std::span<Real> grad_outputs);

/// One SGD step on sgns_loss: output rows are updated in target order
/// using the pre-step input, then the input moves by -lr * grad_input.
/// `scratch` must have input.size() entries. Output rows are left untouched
/// when `update_outputs` is false (frozen-output inference).
Real sgns_step(std::span<Real> input, Real* outputs, std::span<const SgnsTarget> targets,
               Real lr, std::span<Real> scratch, bool update_outputs = true);

/// Negative sampler over a unigram distribution raised to `power`,
/// realised as a lookup table.
class UnigramTable {
 public:
  UnigramTable() = default;
  UnigramTable(std::span<const std::uint64_t> counts, Real power = 0.75,
               std::size_t table_size = 1'000'000);

  std::size_t sample(Rng& rng) const { return table_[uniform_index(rng, table_.size())]; }
  bool empty() const { return table_.empty(); }

 private:
  std::vector<std::uint32_t> table_;
};

/// Linearly decayed learning rate at `progress` in [0, 1].
inline Real decayed_lr(Real start, Real end, Real progress) {
  if (progress > 1) progress = 1;
  return (1 - progress) * start + progress * end;
}

/// Loss bookkeeping for embedding trainers.
struct EmbeddingTrainReport {
  std::vector<Real> epoch_loss;        // mean loss per target group, per epoch
  std::vector<Real> first_epoch_chunks;  // mean loss over consecutive chunks of epoch 1
  std::vector<std::string> untrained;    // ids that kept their random initialisation
};

}  // namespace citetime

#endif  // CITETIME_SGNS_HPP
