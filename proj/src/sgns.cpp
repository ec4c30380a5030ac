#include "citetime/sgns.hpp"

#include <cmath>

#include "citetime/kernels.hpp"

namespace citetime {

namespace {

// -log s(x) and -log s(-x) evaluated without overflow.
Real neg_log_sigmoid(Real x) { return x >= 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x)); }

Real target_loss(Real score, bool positive) {
  return positive ? neg_log_sigmoid(score) : neg_log_sigmoid(-score);
}

}  // namespace

Real sgns_loss(std::span<const Real> input, const Real* outputs,
               std::span<const SgnsTarget> targets) {
  const std::size_t dim = input.size();
  Real loss = 0;
  for (const auto& t : targets)
    loss += target_loss(kernels::dot(input.data(), outputs + t.row * dim, dim), t.positive);
  return loss;
}

Real sgns_gradient(std::span<const Real> input, const Real* outputs,
                   std::span<const SgnsTarget> targets, std::span<Real> grad_input,
                   std::span<Real> grad_outputs) {
  const std::size_t dim = input.size();
  std::fill(grad_input.begin(), grad_input.end(), Real{0});
  Real loss = 0;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const Real* u = outputs + targets[j].row * dim;
    Real score = kernels::dot(input.data(), u, dim);
    loss += target_loss(score, targets[j].positive);
    Real g = sigmoid(score) - (targets[j].positive ? 1 : 0);
    kernels::axpy(g, u, grad_input.data(), dim);
    Real* gu = grad_outputs.data() + j * dim;
    for (std::size_t i = 0; i < dim; ++i) gu[i] = g * input[i];
  }
  return loss;
}

Real sgns_step(std::span<Real> input, Real* outputs, std::span<const SgnsTarget> targets,
               Real lr, std::span<Real> scratch, bool update_outputs) {
  const std::size_t dim = input.size();
  std::fill(scratch.begin(), scratch.end(), Real{0});
  Real loss = 0;
  for (const auto& t : targets) {
    Real* u = outputs + t.row * dim;
    Real score = kernels::dot(input.data(), u, dim);
    loss += target_loss(score, t.positive);
    Real g = sigmoid(score) - (t.positive ? 1 : 0);
    kernels::axpy(g, u, scratch.data(), dim);
    if (update_outputs) kernels::axpy(-lr * g, input.data(), u, dim);
  }
  kernels::axpy(-lr, scratch.data(), input.data(), dim);
  return loss;
}

UnigramTable::UnigramTable(std::span<const std::uint64_t> counts, Real power,
                           std::size_t table_size) {
  Real total = 0;
  for (auto c : counts) total += std::pow(static_cast<Real>(c), power);
  if (counts.empty() || total <= 0) return;
  table_.resize(table_size);
  std::size_t w = 0;
  Real cum = std::pow(static_cast<Real>(counts[0]), power) / total;
  for (std::size_t a = 0; a < table_size; ++a) {
    table_[a] = static_cast<std::uint32_t>(w);
    if (static_cast<Real>(a + 1) / static_cast<Real>(table_size) > cum && w + 1 < counts.size()) {
      ++w;
      cum += std::pow(static_cast<Real>(counts[w]), power) / total;
    }
  }
}

}  // namespace citetime
