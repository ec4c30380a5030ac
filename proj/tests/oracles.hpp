// Independent reference implementations used as test oracles. They are
// written for clarity, not speed, and share no code with the library
// beyond its data types.

#ifndef CITETIME_TESTS_ORACLES_HPP
#define CITETIME_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "citetime/metrics.hpp"
#include "citetime/time_mlp.hpp"

namespace citetime::oracle {

// ---- metrics, by direct enumeration ----

inline bool relevant(const Relevance& t, PaperIndex p) { return t.count(p) > 0; }

inline Real ap(const std::vector<PaperIndex>& list, const Relevance& truth, std::size_t cutoff) {
  const std::size_t n = std::min(cutoff, list.size());
  Real total = 0;
  for (std::size_t r = 1; r <= n; ++r) {
    if (!relevant(truth, list[r - 1])) continue;
    std::size_t hits = 0;
    for (std::size_t i = 1; i <= r; ++i) hits += relevant(truth, list[i - 1]);
    total += Real(hits) / Real(r);
  }
  return total / Real(std::min(truth.size(), cutoff));
}

inline Real ndcg(const std::vector<PaperIndex>& list, const Relevance& truth, std::size_t cutoff) {
  Real dcg = 0;
  for (std::size_t r = 1; r <= std::min(cutoff, list.size()); ++r)
    if (relevant(truth, list[r - 1])) dcg += truth.at(list[r - 1]) / std::log2(Real(r) + 1);
  std::vector<int> g;
  for (const auto& kv : truth) g.push_back(kv.second);
  std::sort(g.rbegin(), g.rend());
  Real idcg = 0;
  for (std::size_t r = 1; r <= std::min(cutoff, g.size()); ++r) idcg += g[r - 1] / std::log2(Real(r) + 1);
  return dcg / idcg;
}

inline Real rr(const std::vector<PaperIndex>& list, const Relevance& truth) {
  for (std::size_t r = 1; r <= list.size(); ++r)
    if (relevant(truth, list[r - 1])) return 1 / Real(r);
  return 0;
}

inline Real precision(const std::vector<PaperIndex>& list, const Relevance& truth, std::size_t n) {
  std::set<PaperIndex> top(list.begin(), list.begin() + static_cast<long>(std::min(n, list.size())));
  std::size_t hits = 0;
  for (const auto& kv : truth) hits += top.count(kv.first);
  return Real(hits) / Real(n);
}

inline Real recall(const std::vector<PaperIndex>& list, const Relevance& truth, std::size_t n) {
  std::set<PaperIndex> top(list.begin(), list.begin() + static_cast<long>(std::min(n, list.size())));
  std::size_t hits = 0;
  for (const auto& kv : truth) hits += top.count(kv.first);
  return Real(hits) / Real(truth.size());
}

// ---- MLP forward pass, written out with Eigen matrices ----

template <typename T>
using MatT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using ColT = Eigen::Matrix<T, Eigen::Dynamic, 1>;

/// Forward pass over a flat parameter vector laid out like `p`, in scalar
/// type T (long double for finite differences). When `pattern` is given it
/// receives the sign of every ReLU pre-activation.
template <typename T>
std::vector<T> mlp_forward_flat(const MlpParams& p, const std::vector<T>& theta, const Vec& xc,
                                const Vec& xn, std::vector<bool>* pattern = nullptr) {
  const auto& blocks = p.blocks();
  auto mat = [&](std::size_t i) {
    const auto& b = blocks[i];
    return Eigen::Map<const MatT<T>>(theta.data() + b.offset, static_cast<long>(b.rows),
                                     static_cast<long>(b.cols));
  };
  auto col = [&](std::size_t i) {
    const auto& b = blocks[i];
    return Eigen::Map<const ColT<T>>(theta.data() + b.offset, static_cast<long>(b.size()));
  };
  auto input = [](const Vec& x) {
    ColT<T> v(static_cast<long>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) v(static_cast<long>(i)) = x[i];
    return v;
  };
  if (pattern) pattern->clear();
  auto relu = [&](const ColT<T>& z) {
    if (pattern)
      for (long i = 0; i < z.size(); ++i) pattern->push_back(z(i) > 0);
    return ColT<T>(z.cwiseMax(T(0)));
  };
  auto sigm = [](const ColT<T>& v) {
    return ColT<T>(v.unaryExpr([](T z) { return T(1) / (T(1) + std::exp(-z)); }));
  };
  ColT<T> l2[2];
  const Vec* x[2] = {&xc, &xn};
  for (std::size_t b = 0; b < 2; ++b) {
    ColT<T> l1 = relu(mat(4 * b) * input(*x[b]) + col(4 * b + 1));
    l2[b] = sigm(mat(4 * b + 2) * l1 + col(4 * b + 3));
  }
  ColT<T> cat(l2[0].size() + l2[1].size());
  cat << l2[0], l2[1];
  ColT<T> l3 = relu(mat(8) * cat + col(9));
  ColT<T> logits = mat(10) * l3;
  ColT<T> e = (logits.array() - logits.maxCoeff()).exp();
  e /= e.sum();
  return std::vector<T>(e.data(), e.data() + e.size());
}

inline Vec mlp_forward(const MlpParams& p, const Vec& xc, const Vec& xn) {
  const Vec theta(p.data().begin(), p.data().end());
  return mlp_forward_flat(p, theta, xc, xn);
}

template <typename T>
T mlp_loss_flat(const MlpParams& p, const std::vector<T>& theta, const Vec& xc, const Vec& xn,
                const Vec& truth, std::vector<bool>* pattern = nullptr) {
  auto out = mlp_forward_flat(p, theta, xc, xn, pattern);
  T l = 0;
  for (std::size_t i = 0; i < out.size(); ++i) l -= truth[i] * std::log(std::max(out[i], T(1e-12)));
  return l;
}

inline Real mlp_loss(const MlpParams& p, const Vec& xc, const Vec& xn, const Vec& truth) {
  const Vec theta(p.data().begin(), p.data().end());
  return mlp_loss_flat(p, theta, xc, xn, truth);
}

struct GradCheck {
  Real max_rel_err = 0;
  std::size_t checked = 0;
  std::size_t skipped = 0;  // steps that crossed a ReLU kink
};

/// Central differences of the loss against `analytic`, coordinate by
/// coordinate. Steps whose ReLU pattern differs from the base point are
/// skipped. A coordinate whose double-precision difference is off by more
/// than `recheck` is re-evaluated in long double, which separates rounding
/// noise on tiny gradients from real errors. Relative error uses
/// max(|a|, |n|, floor) as denominator.
inline GradCheck finite_difference_check(const MlpParams& params, const Vec& xc, const Vec& xn,
                                         const Vec& truth, const MlpParams& analytic,
                                         Real step = 1e-5, Real floor = 1e-7, Real recheck = 1e-6) {
  GradCheck g;
  std::vector<Real> theta(params.data().begin(), params.data().end());
  std::vector<long double> theta_l(theta.begin(), theta.end());
  std::vector<bool> base, up, down;
  mlp_loss_flat(params, theta, xc, xn, truth, &base);
  auto rel_err = [&](Real a, Real num) {
    return std::abs(a - num) / std::max({std::abs(a), std::abs(num), floor});
  };
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const Real orig = theta[i];
    theta[i] = orig + step;
    const Real lp = mlp_loss_flat(params, theta, xc, xn, truth, &up);
    theta[i] = orig - step;
    const Real lm = mlp_loss_flat(params, theta, xc, xn, truth, &down);
    theta[i] = orig;
    if (up != base || down != base) {
      ++g.skipped;
      continue;
    }
    const Real a = analytic.data()[i];
    Real rel = rel_err(a, (lp - lm) / (2 * step));
    if (rel > recheck) {
      theta_l[i] = static_cast<long double>(orig) + step;
      const long double lpl = mlp_loss_flat(params, theta_l, xc, xn, truth);
      theta_l[i] = static_cast<long double>(orig) - step;
      const long double lml = mlp_loss_flat(params, theta_l, xc, xn, truth);
      theta_l[i] = orig;
      rel = rel_err(a, static_cast<Real>((lpl - lml) / (2 * static_cast<long double>(step))));
    }
    g.max_rel_err = std::max(g.max_rel_err, rel);
    ++g.checked;
  }
  return g;
}

// ---- PageRank as a dense linear solve ----

/// Solves (I - d M) r = (1 - d)/n 1 with M the column-stochastic citation
/// matrix whose dangling columns are uniform.
inline Vec dense_pagerank(std::size_t n, const std::vector<std::pair<PaperIndex, PaperIndex>>& edges,
                          Real damping) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<long>(n), static_cast<long>(n));
  std::vector<int> out(n, 0);
  std::set<std::pair<PaperIndex, PaperIndex>> uniq(edges.begin(), edges.end());
  for (const auto& [from, to] : uniq) ++out[from];
  for (const auto& [from, to] : uniq) m(to, from) += 1.0 / out[from];
  for (std::size_t j = 0; j < n; ++j)
    if (out[j] == 0) m.col(static_cast<long>(j)).setConstant(1.0 / Real(n));
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(static_cast<long>(n), static_cast<long>(n)) - damping * m;
  Eigen::VectorXd rhs = Eigen::VectorXd::Constant(static_cast<long>(n), (1 - damping) / Real(n));
  Eigen::VectorXd r = a.fullPivLu().solve(rhs);
  return Vec(r.data(), r.data() + r.size());
}

}  // namespace citetime::oracle

#endif  // CITETIME_TESTS_ORACLES_HPP
