#include "citetime/time_mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "binary_io.hpp"
#include "citetime/kernels.hpp"

namespace citetime {

namespace {

constexpr char kMagic[9] = "CTMLP001";

// out = W x (+ b)
void affine(std::span<const Real> w, std::span<const Real> x, const Real* b, Vec& out,
            std::size_t rows) {
  const std::size_t cols = x.size();
  out.resize(rows);
  for (std::size_t r = 0; r < rows; ++r)
    out[r] = kernels::dot(w.data() + r * cols, x.data(), cols) + (b ? b[r] : 0);
}

// acc += W^T delta
void affine_transpose(std::span<const Real> w, std::span<const Real> delta, Real* acc,
                      std::size_t cols) {
  for (std::size_t r = 0; r < delta.size(); ++r)
    if (delta[r] != 0) kernels::axpy(delta[r], w.data() + r * cols, acc, cols);
}

// gw = delta x^T
void outer(std::span<const Real> delta, std::span<const Real> x, std::span<Real> gw) {
  const std::size_t cols = x.size();
  for (std::size_t r = 0; r < delta.size(); ++r) {
    Real* row = gw.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) row[c] = delta[r] * x[c];
  }
}

Real sigmoid(Real x) { return Real{1} / (Real{1} + std::exp(-x)); }

void check_inputs(const MlpParams& params, std::span<const Real> xc, std::span<const Real> xn) {
  if (xc.size() != params.shape().input || xn.size() != params.shape().input)
    throw UsageError("MLP input length mismatch: expected " +
                     std::to_string(params.shape().input) + ", got " +
                     std::to_string(xc.size()) + "/" + std::to_string(xn.size()));
}

}  // namespace

MlpParams::MlpParams(const MlpShape& s) : shape_(s) {
  if (s.input < 1 || s.slices < 2) throw UsageError("MLP needs input >= 1 and slices >= 2");
  std::size_t off = 0;
  auto add = [&](const char* name, std::size_t rows, std::size_t cols) {
    blocks_.push_back({name, off, rows, cols});
    off += rows * cols;
  };
  add("content.W1", s.hidden1, s.input);
  add("content.b1", s.hidden1, 1);
  add("content.W2", s.hidden2, s.hidden1);
  add("content.b2", s.hidden2, 1);
  add("node.W1", s.hidden1, s.input);
  add("node.b1", s.hidden1, 1);
  add("node.W2", s.hidden2, s.hidden1);
  add("node.b2", s.hidden2, 1);
  add("W3", s.hidden3, 2 * s.hidden2);
  add("b3", s.hidden3, 1);
  add("W4", s.slices, s.hidden3);
  data_.assign(off, 0);
}

MlpParams MlpParams::glorot(const MlpShape& shape, std::uint64_t seed) {
  MlpParams p(shape);
  Rng rng(mix_seed(seed, 31));
  for (const auto& b : p.blocks_) {
    if (b.cols == 1) continue;  // bias
    const Real limit = std::sqrt(Real{6} / static_cast<Real>(b.rows + b.cols));
    for (std::size_t i = 0; i < b.size(); ++i)
      p.data_[b.offset + i] = (2 * uniform01(rng) - 1) * limit;
  }
  return p;
}

void MlpParams::save_binary(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out.write(kMagic, 8);
  for (std::size_t v : {shape_.input, shape_.slices, shape_.hidden1, shape_.hidden2, shape_.hidden3})
    io::put<std::uint32_t>(out, static_cast<std::uint32_t>(v));
  io::put<std::uint32_t>(out, 0);
  io::put_reals(out, data_.data(), data_.size());
  if (!out) throw DataError("write failed: " + path);
}

MlpParams MlpParams::load_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path + " (run `train` first)");
  io::expect_magic(in, kMagic, path);
  MlpShape s;
  s.input = io::get<std::uint32_t>(in, "m");
  s.slices = io::get<std::uint32_t>(in, "t");
  s.hidden1 = io::get<std::uint32_t>(in, "hidden1");
  s.hidden2 = io::get<std::uint32_t>(in, "hidden2");
  s.hidden3 = io::get<std::uint32_t>(in, "hidden3");
  io::get<std::uint32_t>(in, "reserved");
  MlpParams p(s);
  io::get_reals(in, p.data_.data(), p.data_.size(), "parameters");
  return p;
}

void MlpParams::save_text(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << "# m=" << shape_.input << " t=" << shape_.slices << " hidden=" << shape_.hidden1 << ','
      << shape_.hidden2 << ',' << shape_.hidden3 << '\n';
  char buf[32];
  for (const auto& b : blocks_) {
    out << b.name << ' ' << b.rows << ' ' << b.cols << '\n';
    for (std::size_t r = 0; r < b.rows; ++r) {
      for (std::size_t c = 0; c < b.cols; ++c) {
        std::snprintf(buf, sizeof buf, "%s%.17g", c ? " " : "", data_[b.offset + r * b.cols + c]);
        out << buf;
      }
      out << '\n';
    }
  }
}

TimePreference forward(const MlpParams& params, std::span<const Real> x_content,
                       std::span<const Real> x_node, MlpActivations* acts) {
  check_inputs(params, x_content, x_node);
  const auto& s = params.shape();
  MlpActivations local;
  MlpActivations& a = acts ? *acts : local;
  a.concat.assign(2 * s.hidden2, 0);
  for (Branch b : {kContentBranch, kNodeBranch}) {
    auto x = b == kContentBranch ? x_content : x_node;
    affine(params.w1(b), x, params.b1(b).data(), a.z1[b], s.hidden1);
    a.a1[b].resize(s.hidden1);
    for (std::size_t i = 0; i < s.hidden1; ++i) a.a1[b][i] = std::max(Real{0}, a.z1[b][i]);
    affine(params.w2(b), a.a1[b], params.b2(b).data(), a.z2[b], s.hidden2);
    a.a2[b].resize(s.hidden2);
    for (std::size_t i = 0; i < s.hidden2; ++i) {
      a.a2[b][i] = sigmoid(a.z2[b][i]);
      a.concat[b * s.hidden2 + i] = a.a2[b][i];
    }
  }
  affine(params.w3(), a.concat, params.b3().data(), a.z3, s.hidden3);
  a.a3.resize(s.hidden3);
  for (std::size_t i = 0; i < s.hidden3; ++i) a.a3[i] = std::max(Real{0}, a.z3[i]);
  affine(params.w4(), a.a3, nullptr, a.logits, s.slices);

  const Real mx = *std::max_element(a.logits.begin(), a.logits.end());
  a.output.resize(s.slices);
  Real z = 0;
  for (std::size_t i = 0; i < s.slices; ++i) z += a.output[i] = std::exp(a.logits[i] - mx);
  for (auto& p : a.output) p /= z;
  return {a.output};
}

Real cross_entropy(const TimePreference& truth, const TimePreference& pred) {
  if (truth.size() != pred.size())
    throw UsageError("cross_entropy: length mismatch " + std::to_string(truth.size()) + " vs " +
                     std::to_string(pred.size()));
  Real loss = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (truth[i] != 0) loss -= truth[i] * std::log(std::max(pred[i], kLogClamp));
  return loss;
}

Real gradients(const MlpParams& params, std::span<const Real> x_content,
               std::span<const Real> x_node, const TimePreference& truth, MlpParams& grad) {
  const auto& s = params.shape();
  if (truth.size() != s.slices) throw UsageError("target length does not match model slices");
  if (!(grad.shape() == s)) grad = MlpParams(s);
  MlpActivations a;
  auto pred = forward(params, x_content, x_node, &a);
  const Real loss = cross_entropy(truth, pred);

  // softmax + cross-entropy: dL/dlogit_k = phat_k * sum(p) - p_k
  const Real mass = std::accumulate(truth.probs.begin(), truth.probs.end(), Real{0});
  Vec d4(s.slices);
  for (std::size_t k = 0; k < s.slices; ++k) d4[k] = pred[k] * mass - truth[k];
  outer(d4, a.a3, grad.w4());

  Vec d3(s.hidden3, 0);
  affine_transpose(params.w4(), d4, d3.data(), s.hidden3);
  for (std::size_t i = 0; i < s.hidden3; ++i)
    if (a.z3[i] <= 0) d3[i] = 0;
  outer(d3, a.concat, grad.w3());
  std::copy(d3.begin(), d3.end(), grad.b3().begin());

  Vec dconcat(2 * s.hidden2, 0);
  affine_transpose(params.w3(), d3, dconcat.data(), 2 * s.hidden2);

  for (Branch b : {kContentBranch, kNodeBranch}) {
    auto x = b == kContentBranch ? x_content : x_node;
    Vec d2(s.hidden2);
    for (std::size_t i = 0; i < s.hidden2; ++i) {
      const Real sgm = a.a2[b][i];
      d2[i] = dconcat[b * s.hidden2 + i] * sgm * (1 - sgm);
    }
    outer(d2, a.a1[b], grad.w2(b));
    std::copy(d2.begin(), d2.end(), grad.b2(b).begin());

    Vec d1(s.hidden1, 0);
    affine_transpose(params.w2(b), d2, d1.data(), s.hidden1);
    for (std::size_t i = 0; i < s.hidden1; ++i)
      if (a.z1[b][i] <= 0) d1[i] = 0;
    outer(d1, x, grad.w1(b));
    std::copy(d1.begin(), d1.end(), grad.b1(b).begin());
  }
  return loss;
}

Real batch_gradient_serial(const MlpParams& params, std::span<const TrainingExample> data,
                           std::span<const std::size_t> batch, MlpParams& grad) {
  grad = MlpParams(params.shape());
  MlpParams one(params.shape());
  Real loss = 0;
  for (std::size_t idx : batch) {
    const auto& ex = data[idx];
    loss += gradients(params, ex.x_content, ex.x_node, ex.target, one);
    auto g = grad.data();
    auto o = one.data();
    for (std::size_t j = 0; j < g.size(); ++j) g[j] += o[j];
  }
  const Real inv = Real{1} / static_cast<Real>(batch.size());
  for (auto& g : grad.data()) g *= inv;
  return loss * inv;
}

Real batch_gradient_parallel(const MlpParams& params, std::span<const TrainingExample> data,
                             std::span<const std::size_t> batch, MlpParams& grad) {
  const std::size_t n = batch.size();
  const int threads = kernels::threads();
  // examples per round; each round is summed into grad in batch order
  const std::size_t chunk = std::min(n, static_cast<std::size_t>(4 * std::max(threads, 1)));
  std::vector<MlpParams> per(chunk, MlpParams(params.shape()));
  Vec losses(n);
  grad = MlpParams(params.shape());
  auto g = grad.data();
  const auto np = static_cast<std::ptrdiff_t>(g.size());
  for (std::size_t start = 0; start < n; start += chunk) {
    const auto m = static_cast<std::ptrdiff_t>(std::min(chunk, n - start));
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < m; ++i) {
      const auto k = start + static_cast<std::size_t>(i);
      const auto& ex = data[batch[k]];
      losses[k] = gradients(params, ex.x_content, ex.x_node, ex.target, per[static_cast<std::size_t>(i)]);
    }
    // contiguous parameter ranges per thread, examples in order within each
    const std::ptrdiff_t span = 4096;
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::ptrdiff_t lo = 0; lo < np; lo += span) {
      const auto hi = static_cast<std::size_t>(std::min(np, lo + span));
      for (std::ptrdiff_t i = 0; i < m; ++i) {
        const auto o = per[static_cast<std::size_t>(i)].data();
        for (auto j = static_cast<std::size_t>(lo); j < hi; ++j) g[j] += o[j];
      }
    }
  }
  const Real inv = Real{1} / static_cast<Real>(n);
  for (auto& x : g) x *= inv;
  Real loss = 0;
  for (Real l : losses) loss += l;
  return loss * inv;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0)) throw UsageError("learning rate must be > 0");
  if (!(beta1 > 0 && beta1 < 1) || !(beta2 > 0 && beta2 < 1))
    throw UsageError("Adam betas must lie in (0, 1)");
  if (!(epsilon > 0)) throw UsageError("Adam epsilon must be > 0");
  if (epochs < 1 || batch_size < 1) throw UsageError("epochs and batch size must be >= 1");
}

TrainResult train(std::span<const TrainingExample> data, const MlpShape& shape,
                  const TrainConfig& config) {
  return train_from(MlpParams::glorot(shape, config.seed), data, config);
}

TrainResult train_from(MlpParams init, std::span<const TrainingExample> data,
                       const TrainConfig& config) {
  config.validate();
  if (data.empty()) throw DataError("cannot train on an empty dataset");
  for (const auto& ex : data) {
    if (ex.target.size() != init.shape().slices)
      throw DataError("training target length does not match model slices");
    for (const Vec* x : {&ex.x_content, &ex.x_node})
      for (Real v : *x)
        if (!std::isfinite(v)) throw DataError("non-finite value in training inputs");
  }

  TrainResult result{std::move(init), {}};
  MlpParams& params = result.params;
  const std::size_t P = params.size();
  Vec m(P, 0), v(P, 0);
  MlpParams grad(params.shape());
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(mix_seed(config.seed, 41));
  long long step = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    Real epoch_loss = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::span<const std::size_t> batch(order.data() + start, end - start);
      const Real loss = config.parallel_batches
                            ? batch_gradient_parallel(params, data, batch, grad)
                            : batch_gradient_serial(params, data, batch, grad);
      if (!std::isfinite(loss))
        throw NumericalError("non-finite training loss at epoch " + std::to_string(epoch + 1) +
                             ", batch starting at " + std::to_string(start) +
                             " (check learning rate and input scaling)");
      epoch_loss += loss * static_cast<Real>(batch.size());

      ++step;
      const Real c1 = 1 - std::pow(config.beta1, static_cast<Real>(step));
      const Real c2 = 1 - std::pow(config.beta2, static_cast<Real>(step));
      auto w = params.data();
      auto g = grad.data();
      for (std::size_t j = 0; j < P; ++j) {
        m[j] = config.beta1 * m[j] + (1 - config.beta1) * g[j];
        v[j] = config.beta2 * v[j] + (1 - config.beta2) * g[j] * g[j];
        w[j] -= config.learning_rate * (m[j] / c1) / (std::sqrt(v[j] / c2) + config.epsilon);
      }
      if (!std::all_of(w.begin(), w.end(), [](Real x) { return std::isfinite(x); }))
        throw NumericalError("non-finite parameter after step " + std::to_string(step) +
                             " (check learning rate and input scaling)");
    }
    result.epoch_loss.push_back(epoch_loss / static_cast<Real>(data.size()));
  }
  return result;
}

}  // namespace citetime
