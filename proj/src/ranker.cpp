#include "citetime/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "citetime/kernels.hpp"

namespace citetime {

namespace {

bool ranks_before(const ScoredPaper& a, const ScoredPaper& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.paper < b.paper;
}

}  // namespace

void RankedList::sort() { std::sort(entries.begin(), entries.end(), ranks_before); }

void RankedList::truncate(std::size_t top_n) {
  if (entries.size() > top_n) entries.resize(top_n);
}

bool RankedList::well_formed() const {
  std::unordered_set<PaperIndex> seen;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!seen.insert(entries[i].paper).second) return false;
    if (i > 0 && !ranks_before(entries[i - 1], entries[i])) return false;
  }
  return true;
}

std::vector<PaperIndex> RankedList::papers() const {
  std::vector<PaperIndex> out(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) out[i] = entries[i].paper;
  return out;
}

std::vector<PaperIndex> candidate_pool(int query_year, const Corpus& corpus,
                                       const PoolConfig& config, std::optional<PaperIndex> self) {
  std::vector<PaperIndex> pool;
  switch (config.policy) {
    case PoolPolicy::kAll:
      for (PaperIndex p = 0; p < corpus.size(); ++p)
        if (p != self) pool.push_back(p);
      break;
    case PoolPolicy::kOnOrBeforeQueryYear:
      for (PaperIndex p = 0; p < corpus.size(); ++p)
        if (p != self && corpus.paper(p).year <= query_year) pool.push_back(p);
      break;
    case PoolPolicy::kExplicit:
      for (const auto& id : config.ids) {
        auto p = corpus.find(id);
        if (!p) throw DataError("candidate pool id " + id + " is not in the corpus");
        if (*p != self) pool.push_back(*p);
      }
      break;
  }
  if (pool.empty()) throw DataError("empty candidate pool");
  return pool;
}

RankedList cbf_scores(std::span<const Real> query, std::span<const PaperIndex> candidates,
                      const PaperVectors& content, std::size_t* skipped) {
  if (candidates.empty()) throw DataError("cbf_scores: no candidates");
  auto rows = content.rows_for(candidates);
  Vec scores(candidates.size());
  kernels::cosine_scores_parallel(query, content.table().data(), content.dim(), rows, scores);
  RankedList out;
  out.method = "cbf";
  out.entries.reserve(candidates.size());
  std::size_t miss = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (rows[i] < 0) {
      ++miss;
      continue;
    }
    out.entries.push_back({candidates[i], scores[i]});
  }
  if (skipped) *skipped = miss;
  out.sort();
  return out;
}

RankedList rerank_time_preference(const RankedList& base, const TimePreference& pref,
                                  const Corpus& corpus, bool raw_weight) {
  if (pref.size() != corpus.slice_count())
    throw UsageError("time preference length " + std::to_string(pref.size()) +
                     " does not match slice count " + std::to_string(corpus.slice_count()));
  RankedList out = base;
  out.method = raw_weight ? "timepref_raw" : "timepref";
  for (auto& e : out.entries) {
    const Real p = pref[static_cast<std::size_t>(corpus.slice_of(e.paper))];
    e.score *= raw_weight ? p : time_preference_multiplier(p);
  }
  out.sort();
  return out;
}

Real weight_pub_preference(int target_year, int candidate_year, Real sigma) {
  if (!(sigma > 0 && sigma < 1)) throw UsageError("sigma must lie in (0, 1)");
  const int gap = target_year - candidate_year;
  if (gap < 0)
    throw DataError("candidate year " + std::to_string(candidate_year) + " is after target year " +
                    std::to_string(target_year));
  if (gap == 0) return std::pow(sigma, 7);
  if (gap <= 20) return std::pow(sigma, gap - 1);
  return std::pow(sigma, 20);
}

Real weight_freshness(Real age, Real tau) {
  if (!(tau > 0)) throw UsageError("tau must be > 0");
  if (age < 0) throw DataError("negative age " + std::to_string(age));
  return std::exp(-age / tau);
}

PageRankResult citerank_weights(std::size_t nodes, std::span<const Edge> edges, Real damping,
                                Real tol, int max_iter) {
  if (nodes == 0) throw DataError("PageRank on an empty graph");
  if (!(damping > 0 && damping < 1)) throw UsageError("damping must lie in (0, 1)");
  std::vector<std::vector<std::uint32_t>> out_links(nodes);
  for (const auto& [from, to] : edges) {
    if (from >= nodes || to >= nodes) throw DataError("edge endpoint out of range");
    if (from != to) out_links[from].push_back(to);
  }
  for (auto& l : out_links) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
  }
  const Real n = static_cast<Real>(nodes);
  PageRankResult res;
  res.scores.assign(nodes, 1 / n);
  Vec next(nodes);
  for (res.iterations = 1; res.iterations <= max_iter; ++res.iterations) {
    Real dangling = 0;
    for (std::size_t v = 0; v < nodes; ++v)
      if (out_links[v].empty()) dangling += res.scores[v];
    std::fill(next.begin(), next.end(), (1 - damping) / n + damping * dangling / n);
    for (std::size_t v = 0; v < nodes; ++v) {
      if (out_links[v].empty()) continue;
      const Real share = damping * res.scores[v] / static_cast<Real>(out_links[v].size());
      for (auto w : out_links[v]) next[w] += share;
    }
    Real change = 0;
    for (std::size_t v = 0; v < nodes; ++v) change += std::abs(next[v] - res.scores[v]);
    res.scores.swap(next);
    if (change < tol) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged) res.iterations = max_iter;
  return res;
}

Vec min_max_normalize(std::span<const Real> v) {
  if (v.empty()) return {};
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const Real range = *hi - *lo;
  Vec out(v.size(), 1);
  if (range > 0)
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - *lo) / range;
  return out;
}

Real whin_csl_score(Real mu1, Real mu2, std::optional<Real> mu3, Real w1, Real w2) {
  if (w1 < 0 || w2 < 0) throw UsageError("WHIN-CSL weights must be >= 0");
  if (mu3) {
    if (w1 + w2 > 1 + 1e-12) throw UsageError("WHIN-CSL requires w1 + w2 <= 1");
    return w1 * mu1 + w2 * mu2 + (1 - w1 - w2) * *mu3;
  }
  if (std::abs(w1 + w2 - 1) > 1e-12)
    throw UsageError("two-view WHIN-CSL requires w1 + w2 = 1");
  return w1 * mu1 + w2 * mu2;
}

void WeightScheme::validate() const {
  switch (kind) {
    case SchemeKind::kPubPreference:
      if (!(sigma > 0 && sigma < 1)) throw UsageError("sigma must lie in (0, 1)");
      break;
    case SchemeKind::kFreshness:
      if (!(tau > 0)) throw UsageError("tau must be > 0");
      break;
    case SchemeKind::kWhinCsl:
      if (w1 < 0 || w2 < 0 || w1 + w2 > 1 + 1e-12)
        throw UsageError("WHIN-CSL weights must be >= 0 with w1 + w2 <= 1");
      break;
    case SchemeKind::kCiteRank:
      if (!(damping > 0 && damping < 1)) throw UsageError("damping must lie in (0, 1)");
      break;
    default:
      break;
  }
}

std::string WeightScheme::name() const {
  std::ostringstream os;
  switch (kind) {
    case SchemeKind::kNone: return "cbf";
    case SchemeKind::kTimePreference: return raw_time_weight ? "timepref_raw" : "timepref";
    case SchemeKind::kCiteRank: return "citerank";
    case SchemeKind::kPubPreference: os << "preference_" << sigma; return os.str();
    case SchemeKind::kFreshness: os << "freshness_" << tau; return os.str();
    case SchemeKind::kWhinCsl: os << "whin_csl_" << w1 << '_' << w2; return os.str();
  }
  return "unknown";
}

WeightScheme WeightScheme::parse(const std::string& text) {
  // kind[:a[,b]]
  WeightScheme s;
  auto colon = text.find(':');
  std::string kind = text.substr(0, colon);
  std::vector<Real> args;
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        args.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw UsageError("bad number '" + item + "' in scheme " + text);
      }
    }
  }
  if (kind == "cbf" || kind == "none") {
    s.kind = SchemeKind::kNone;
  } else if (kind == "timepref" || kind == "time") {
    s.kind = SchemeKind::kTimePreference;
  } else if (kind == "timepref_raw") {
    s.kind = SchemeKind::kTimePreference;
    s.raw_time_weight = true;
  } else if (kind == "citerank") {
    s.kind = SchemeKind::kCiteRank;
    if (!args.empty()) s.damping = args[0];
  } else if (kind == "preference") {
    s.kind = SchemeKind::kPubPreference;
    if (!args.empty()) s.sigma = args[0];
  } else if (kind == "freshness") {
    s.kind = SchemeKind::kFreshness;
    if (!args.empty()) s.tau = args[0];
  } else if (kind == "whin_csl" || kind == "whin") {
    s.kind = SchemeKind::kWhinCsl;
    if (args.size() >= 1) s.w1 = args[0];
    if (args.size() >= 2) s.w2 = args[1];
    else if (args.size() == 1) s.w2 = 1 - args[0];
  } else {
    throw UsageError("unknown weighting scheme '" + kind + "'");
  }
  s.validate();
  return s;
}

RankedList apply_weight_scheme(const RankedList& base, const WeightScheme& scheme,
                               const SchemeContext& ctx) {
  scheme.validate();
  auto need = [&](bool ok, const char* what) {
    if (!ok) throw UsageError(scheme.name() + " needs " + what);
  };
  RankedList out = base;
  out.method = scheme.name();
  switch (scheme.kind) {
    case SchemeKind::kNone:
      return out;
    case SchemeKind::kTimePreference:
      need(ctx.corpus && ctx.preference, "a corpus and a time preference");
      return rerank_time_preference(base, *ctx.preference, *ctx.corpus, scheme.raw_time_weight);
    case SchemeKind::kCiteRank:
      need(ctx.citerank != nullptr, "CiteRank weights");
      for (auto& e : out.entries) e.score *= (*ctx.citerank).at(e.paper);
      break;
    case SchemeKind::kPubPreference:
      need(ctx.corpus != nullptr, "a corpus");
      for (auto& e : out.entries)
        e.score *= weight_pub_preference(ctx.query_year, ctx.corpus->paper(e.paper).year, scheme.sigma);
      break;
    case SchemeKind::kFreshness:
      need(ctx.corpus != nullptr, "a corpus");
      for (auto& e : out.entries)
        e.score *= weight_freshness(ctx.query_year - ctx.corpus->paper(e.paper).year, scheme.tau);
      break;
    case SchemeKind::kWhinCsl: {
      need(ctx.node && ctx.query_node, "node vectors");
      const bool three = ctx.author && ctx.query_author;
      for (auto& e : out.entries) {
        const Real mu2 = ctx.node->has(e.paper)
                             ? cosine_similarity(*ctx.query_node, ctx.node->vec(e.paper))
                             : 0;
        std::optional<Real> mu3;
        if (three)
          mu3 = ctx.author->has(e.paper) ? cosine_similarity(*ctx.query_author, ctx.author->vec(e.paper))
                                         : 0;
        e.score = whin_csl_score(e.score, mu2, mu3, scheme.w1, scheme.w2);
      }
      break;
    }
  }
  out.sort();
  return out;
}

std::vector<Recommendation> recommend_all(const Query& query, const Models& models,
                                          std::span<const WeightScheme> schemes,
                                          std::size_t top_n) {
  if (!models.corpus || !models.content || !models.nodes)
    throw UsageError("recommend: corpus and embeddings must be loaded");
  const Corpus& corpus = *models.corpus;

  ProfileModels pm;
  pm.corpus = &corpus;
  pm.doc = models.doc;
  pm.content_scaler = models.content_scaler;
  pm.node_scaler = models.node_scaler;
  pm.k = models.k;
  pm.infer_seed = models.seed;
  QueryProfile profile = query.self ? build_profile(*query.self, pm, *models.content, *models.nodes)
                                    : build_profile(query.tokens, query.year, pm, *models.content,
                                                    *models.nodes);

  TimePreference pref;
  const bool wants_mlp = std::any_of(schemes.begin(), schemes.end(), [](const WeightScheme& s) {
    return s.kind == SchemeKind::kTimePreference;
  });
  if (wants_mlp) {
    if (!models.mlp) throw UsageError("time-preference scheme needs a trained model");
    pref = predict(*models.mlp, profile.x_content, profile.x_node);
  }

  auto pool = candidate_pool(query.year, corpus, models.pool, query.self);
  RankedList cbf = cbf_scores(profile.raw_content, pool, *models.content);
  cbf.query_id = query.id;

  Vec query_author;
  SchemeContext ctx;
  ctx.corpus = &corpus;
  ctx.query_year = query.year;
  ctx.preference = wants_mlp ? &pref : nullptr;
  ctx.citerank = models.citerank;
  ctx.node = models.nodes;
  ctx.query_node = &profile.raw_node;
  if (models.author && query.self && models.author->has(*query.self)) {
    auto v = models.author->vec(*query.self);
    query_author.assign(v.begin(), v.end());
    ctx.author = models.author;
    ctx.query_author = &query_author;
  }

  std::vector<Recommendation> out;
  out.reserve(schemes.size());
  for (const auto& scheme : schemes) {
    Recommendation rec;
    rec.list = apply_weight_scheme(cbf, scheme, ctx);
    rec.list.query_id = query.id;
    rec.list.truncate(top_n);
    if (scheme.kind == SchemeKind::kTimePreference) rec.preference = pref;
    rec.profile = profile;
    out.push_back(std::move(rec));
  }
  return out;
}

Recommendation recommend(const Query& query, const Models& models, const WeightScheme& scheme,
                         std::size_t top_n) {
  return std::move(recommend_all(query, models, std::span(&scheme, 1), top_n).front());
}

}  // namespace citetime
