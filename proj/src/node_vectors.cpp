#include "citetime/node_vectors.hpp"

#include <algorithm>
#include <numeric>

#include "citetime/kernels.hpp"

namespace citetime {

UndirectedGraph::UndirectedGraph(std::size_t nodes, std::span<const Edge> edges) : adj_(nodes) {
  for (const auto& [a, b] : edges) {
    if (a >= nodes || b >= nodes) throw DataError("edge endpoint out of range");
    if (a == b) continue;
    adj_[a].push_back(b);
    adj_[b].push_back(a);
  }
  for (auto& list : adj_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
}

bool UndirectedGraph::adjacent(std::size_t a, std::size_t b) const {
  return std::binary_search(adj_[a].begin(), adj_[a].end(), static_cast<std::uint32_t>(b));
}

std::size_t UndirectedGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& l : adj_) n += l.size();
  return n / 2;
}

std::vector<Edge> drop_edges_from(std::span<const Edge> edges,
                                  const std::unordered_set<PaperIndex>& excluded) {
  std::vector<Edge> out;
  out.reserve(edges.size());
  for (const auto& e : edges)
    if (!excluded.contains(e.first)) out.push_back(e);
  return out;
}

namespace {

std::vector<std::uint32_t> start_order(const UndirectedGraph& g, const WalkParams& params,
                                       int round) {
  std::vector<std::uint32_t> order;
  for (std::uint32_t v = 0; v < g.size(); ++v)
    if (g.degree(v) > 0) order.push_back(v);
  Rng rng(mix_seed(params.seed, 0x100000ULL + static_cast<std::uint64_t>(round)));
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

Walk one_walk(const UndirectedGraph& g, const WalkParams& params, std::uint32_t start,
              int round) {
  Rng rng(mix_seed(params.seed, (static_cast<std::uint64_t>(round) << 32) | start));
  const Real inv_p = 1 / params.p, inv_q = 1 / params.q;
  const Real max_w = std::max({inv_p, Real{1}, inv_q});
  Walk walk;
  walk.reserve(static_cast<std::size_t>(params.walk_length));
  walk.push_back(start);
  while (walk.size() < static_cast<std::size_t>(params.walk_length)) {
    std::uint32_t cur = walk.back();
    auto nbrs = g.neighbors(cur);
    if (nbrs.empty()) break;
    if (walk.size() == 1) {
      walk.push_back(nbrs[uniform_index(rng, nbrs.size())]);
      continue;
    }
    std::uint32_t prev = walk[walk.size() - 2];
    // rejection sampling against the unnormalised second-order weights
    for (;;) {
      std::uint32_t x = nbrs[uniform_index(rng, nbrs.size())];
      Real w = x == prev ? inv_p : (g.adjacent(prev, x) ? Real{1} : inv_q);
      if (uniform01(rng) * max_w < w) {
        walk.push_back(x);
        break;
      }
    }
  }
  return walk;
}

void check_walk_params(const WalkParams& params) {
  if (!(params.p > 0) || !(params.q > 0)) throw UsageError("p and q must be > 0");
  if (params.walk_length < 1 || params.walks_per_node < 1)
    throw UsageError("walk length and walks per node must be >= 1");
}

}  // namespace

std::vector<Walk> generate_walks_serial(const UndirectedGraph& g, const WalkParams& params) {
  check_walk_params(params);
  std::vector<Walk> walks;
  for (int r = 0; r < params.walks_per_node; ++r)
    for (auto v : start_order(g, params, r)) walks.push_back(one_walk(g, params, v, r));
  return walks;
}

std::vector<Walk> generate_walks_parallel(const UndirectedGraph& g, const WalkParams& params) {
  check_walk_params(params);
  std::vector<Walk> walks;
  for (int r = 0; r < params.walks_per_node; ++r) {
    auto order = start_order(g, params, r);
    std::size_t base = walks.size();
    walks.resize(base + order.size());
    const auto n = static_cast<std::ptrdiff_t>(order.size());
#pragma omp parallel for schedule(dynamic, 64) num_threads(kernels::threads())
    for (std::ptrdiff_t i = 0; i < n; ++i)
      walks[base + static_cast<std::size_t>(i)] = one_walk(g, params, order[i], r);
  }
  return walks;
}

EmbeddingTable train_skipgram(std::span<const std::string> ids, std::span<const Walk> walks,
                              const NodeVectorParams& params, EmbeddingTrainReport* report) {
  if (params.dim < 2) throw UsageError("embedding dim must be >= 2");
  if (params.window < 1 || params.epochs < 1) throw UsageError("window and epochs must be >= 1");
  const std::size_t n = ids.size();
  const std::size_t dim = params.dim;

  std::vector<std::uint64_t> freq(n, 0);
  std::size_t total_tokens = 0;
  for (const auto& w : walks) {
    for (auto v : w) ++freq[v];
    total_tokens += w.size();
  }
  // the sampler indexes nodes that occur in walks; map back to node ids
  std::vector<std::uint32_t> present;
  std::vector<std::uint64_t> present_counts;
  for (std::uint32_t v = 0; v < n; ++v)
    if (freq[v] > 0) {
      present.push_back(v);
      present_counts.push_back(freq[v]);
    }
  UnigramTable sampler(present_counts);

  Rng rng(mix_seed(params.walk.seed, 0x7777));
  Vec input(n * dim), output(n * dim, 0);
  for (auto& x : input) x = (uniform01(rng) - 0.5) / static_cast<Real>(dim);

  std::vector<SgnsTarget> targets;
  Vec scratch(dim);
  const Real total_steps = static_cast<Real>(total_tokens) * params.epochs;
  const std::size_t chunk = std::max<std::size_t>(1, total_tokens / 20);
  std::size_t processed = 0;

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    Real epoch_loss = 0, chunk_loss = 0;
    std::size_t groups = 0, chunk_groups = 0, chunk_tokens = 0;
    for (const auto& walk : walks) {
      for (std::size_t i = 0; i < walk.size(); ++i) {
        Real lr = decayed_lr(params.lr_start, params.lr_end,
                             static_cast<Real>(processed) / total_steps);
        ++processed;
        const int reach = params.window - static_cast<int>(uniform_index(rng, params.window));
        std::span<Real> center(input.data() + walk[i] * dim, dim);
        const auto lo = static_cast<std::ptrdiff_t>(i) - reach;
        const auto hi = static_cast<std::ptrdiff_t>(i) + reach;
        for (auto c = std::max<std::ptrdiff_t>(0, lo);
             c <= std::min<std::ptrdiff_t>(hi, static_cast<std::ptrdiff_t>(walk.size()) - 1); ++c) {
          if (c == static_cast<std::ptrdiff_t>(i)) continue;
          std::uint32_t ctx = walk[static_cast<std::size_t>(c)];
          targets.clear();
          targets.push_back({ctx, true});
          for (int k = 0; k < params.negatives; ++k) {
            std::uint32_t neg = present[sampler.sample(rng)];
            if (neg == ctx) continue;
            targets.push_back({neg, false});
          }
          Real loss = sgns_step(center, output.data(), targets, lr, scratch);
          epoch_loss += loss;
          ++groups;
          if (epoch == 0 && report) {
            chunk_loss += loss;
            ++chunk_groups;
          }
        }
        if (epoch == 0 && report && ++chunk_tokens == chunk) {
          if (chunk_groups) report->first_epoch_chunks.push_back(chunk_loss / static_cast<Real>(chunk_groups));
          chunk_loss = 0;
          chunk_groups = 0;
          chunk_tokens = 0;
        }
      }
    }
    if (report) report->epoch_loss.push_back(groups ? epoch_loss / static_cast<Real>(groups) : 0);
  }

  EmbeddingTable table(Space::kNode, dim);
  for (std::size_t v = 0; v < n; ++v) {
    table.add(ids[v], std::span<const Real>(input.data() + v * dim, dim));
    if (freq[v] == 0 && report) report->untrained.push_back(ids[v]);
  }
  return table;
}

EmbeddingTable train_node_embeddings(std::span<const std::string> ids,
                                     std::span<const Edge> edges,
                                     const NodeVectorParams& params,
                                     EmbeddingTrainReport* report) {
  if (edges.empty()) throw DataError("cannot train node embeddings on an empty graph");
  UndirectedGraph g(ids.size(), edges);
  auto walks = generate_walks_parallel(g, params.walk);
  // single-node walks carry no context; drop them before training
  std::erase_if(walks, [](const Walk& w) { return w.size() < 2; });
  return train_skipgram(ids, walks, params, report);
}

}  // namespace citetime
