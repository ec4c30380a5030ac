// Two-branch multi-layer perceptron predicting a query's time preference.
//
//   branch i in {content, node}:
//     L1_i = ReLU(W1_i x_i + b1_i)          (70)
//     L2_i = Sigmoid(W2_i L1_i + b2_i)      (50)
//   L3 = ReLU(W3 [L2_content, L2_node] + b3)  (80)
//   P  = softmax(W4 L3)                      (t, no bias)
//
// Trained with cross-entropy against the observed slice distribution and
// Adam.

#ifndef CITETIME_TIME_MLP_HPP
#define CITETIME_TIME_MLP_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "citetime/corpus.hpp"

namespace citetime {

enum Branch : std::size_t { kContentBranch = 0, kNodeBranch = 1 };

struct MlpShape {
  std::size_t input = 100;   // m, per branch
  std::size_t slices = 7;    // t
  std::size_t hidden1 = 70;
  std::size_t hidden2 = 50;
  std::size_t hidden3 = 80;

  bool operator==(const MlpShape&) const = default;
};

/// All weights in one flat buffer so optimisers and gradient checks can
/// treat them uniformly. Matrices are row-major (rows = outputs).
class MlpParams {
 public:
  struct Block {
    const char* name;
    std::size_t offset;
    std::size_t rows;
    std::size_t cols;
    std::size_t size() const { return rows * cols; }
  };

  MlpParams() = default;
  explicit MlpParams(const MlpShape& shape);

  /// Uniform in +-sqrt(6 / (fan_in + fan_out)) per matrix, zero biases.
  static MlpParams glorot(const MlpShape& shape, std::uint64_t seed);

  const MlpShape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  std::span<Real> data() { return data_; }
  std::span<const Real> data() const { return data_; }
  const std::vector<Block>& blocks() const { return blocks_; }

  std::span<const Real> w1(Branch b) const { return view(4 * b + 0); }
  std::span<const Real> b1(Branch b) const { return view(4 * b + 1); }
  std::span<const Real> w2(Branch b) const { return view(4 * b + 2); }
  std::span<const Real> b2(Branch b) const { return view(4 * b + 3); }
  std::span<const Real> w3() const { return view(8); }
  std::span<const Real> b3() const { return view(9); }
  std::span<const Real> w4() const { return view(10); }
  std::span<Real> w1(Branch b) { return view(4 * b + 0); }
  std::span<Real> b1(Branch b) { return view(4 * b + 1); }
  std::span<Real> w2(Branch b) { return view(4 * b + 2); }
  std::span<Real> b2(Branch b) { return view(4 * b + 3); }
  std::span<Real> w3() { return view(8); }
  std::span<Real> b3() { return view(9); }
  std::span<Real> w4() { return view(10); }

  void save_binary(const std::string& path) const;
  static MlpParams load_binary(const std::string& path);
  void save_text(const std::string& path) const;

  bool operator==(const MlpParams& o) const { return shape_ == o.shape_ && data_ == o.data_; }

 private:
  std::span<const Real> view(std::size_t i) const {
    return {data_.data() + blocks_[i].offset, blocks_[i].size()};
  }
  std::span<Real> view(std::size_t i) {
    return {data_.data() + blocks_[i].offset, blocks_[i].size()};
  }

  MlpShape shape_;
  std::vector<Block> blocks_;
  Vec data_;
};

/// Intermediate values of one forward pass.
struct MlpActivations {
  std::array<Vec, 2> z1, a1, z2, a2;
  Vec concat, z3, a3, logits, output;
};

TimePreference forward(const MlpParams& params, std::span<const Real> x_content,
                       std::span<const Real> x_node, MlpActivations* acts = nullptr);

inline TimePreference predict(const MlpParams& params, std::span<const Real> x_content,
                              std::span<const Real> x_node) {
  return forward(params, x_content, x_node);
}

constexpr Real kLogClamp = 1e-12;

/// -sum_i p_i log max(phat_i, 1e-12). Throws UsageError on length mismatch.
Real cross_entropy(const TimePreference& truth, const TimePreference& pred);

/// Exact gradient of cross_entropy(truth, forward(x)) w.r.t. every
/// parameter, written into `grad` (same shape as params). Returns the loss.
Real gradients(const MlpParams& params, std::span<const Real> x_content,
               std::span<const Real> x_node, const TimePreference& truth, MlpParams& grad);

struct TrainingExample {
  Vec x_content;
  Vec x_node;
  TimePreference target;
};

/// Mean loss and mean gradient over `batch` (indices into `data`). Both
/// variants sum per-example gradients in batch order, so they agree bitwise.
Real batch_gradient_serial(const MlpParams& params, std::span<const TrainingExample> data,
                           std::span<const std::size_t> batch, MlpParams& grad);
Real batch_gradient_parallel(const MlpParams& params, std::span<const TrainingExample> data,
                             std::span<const std::size_t> batch, MlpParams& grad);

struct TrainConfig {
  Real learning_rate = 0.001;
  Real beta1 = 0.9;
  Real beta2 = 0.999;
  Real epsilon = 1e-8;
  int epochs = 50;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
  bool parallel_batches = true;

  void validate() const;
};

struct TrainResult {
  MlpParams params;
  std::vector<Real> epoch_loss;  // mean per-example loss seen during each epoch
};

/// Adam over shuffled minibatches. Throws NumericalError when the loss
/// becomes non-finite.
TrainResult train(std::span<const TrainingExample> data, const MlpShape& shape,
                  const TrainConfig& config);

/// Continue training from existing parameters.
TrainResult train_from(MlpParams init, std::span<const TrainingExample> data,
                       const TrainConfig& config);

}  // namespace citetime

#endif  // CITETIME_TIME_MLP_HPP
