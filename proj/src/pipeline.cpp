#include "citetime/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numeric>
#include <unordered_set>

#include "binary_io.hpp"
#include "citetime/kernels.hpp"
#include "json.hpp"

namespace citetime {

using nlohmann::json;

namespace {

// Copies obj[key] into dst when present and removes it from obj, so that
// whatever remains afterwards is an unknown key.
template <typename T>
void take(json& obj, const char* key, T& dst) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    dst = it->template get<T>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("config key '") + key + "': " + e.what());
  }
  obj.erase(it);
}

void reject_rest(const json& obj, const std::string& where) {
  if (!obj.empty()) throw UsageError("unknown config key '" + obj.begin().key() + "' in " + where);
}

json section(json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) return json::object();
  if (!it->is_object()) throw UsageError(std::string("config key '") + key + "' must be an object");
  json out = *it;
  obj.erase(it);
  return out;
}

}  // namespace

void PipelineConfig::apply_json(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw UsageError("config must be a JSON object");

  take(root, "corpus", corpus);
  take(root, "slices", slices);
  take(root, "slices_preset", slices_preset);
  take(root, "out", out);
  take(root, "min_refs", min_refs);
  take(root, "min_slices", min_slices);
  take(root, "test_size", test_size);
  take(root, "k", k);
  take(root, "schemes", schemes);
  take(root, "all_years_pool", all_years_pool);
  take(root, "top_n", top_n);
  take(root, "sweep_k", sweep_k);
  take(root, "seed", seed);
  take(root, "threads", threads);

  auto d = section(root, "doc");
  take(d, "dim", doc.dim);
  take(d, "epochs", doc.epochs);
  take(d, "negatives", doc.negatives);
  take(d, "lr_start", doc.lr_start);
  take(d, "lr_end", doc.lr_end);
  take(d, "infer_epochs", doc.infer_epochs);
  reject_rest(d, "doc");

  auto n = section(root, "node");
  take(n, "dim", node.dim);
  take(n, "walks_per_node", node.walk.walks_per_node);
  take(n, "walk_length", node.walk.walk_length);
  take(n, "p", node.walk.p);
  take(n, "q", node.walk.q);
  take(n, "window", node.window);
  take(n, "negatives", node.negatives);
  take(n, "epochs", node.epochs);
  take(n, "lr_start", node.lr_start);
  take(n, "lr_end", node.lr_end);
  reject_rest(n, "node");

  auto t = section(root, "train");
  take(t, "learning_rate", train.learning_rate);
  take(t, "beta1", train.beta1);
  take(t, "beta2", train.beta2);
  take(t, "epsilon", train.epsilon);
  take(t, "epochs", train.epochs);
  take(t, "batch_size", train.batch_size);
  take(t, "parallel_batches", train.parallel_batches);
  reject_rest(t, "train");

  auto cu = section(root, "cutoffs");
  take(cu, "pr_at", cutoffs.pr_at);
  take(cu, "map_at", cutoffs.map_at);
  take(cu, "ndcg_at", cutoffs.ndcg_at);
  reject_rest(cu, "cutoffs");

  auto s = section(root, "synth");
  take(s, "topics", synth.topics);
  take(s, "slices", synth.slices);
  take(s, "papers_per_slice", synth.papers_per_slice);
  take(s, "start_year", synth.start_year);
  take(s, "years_per_slice", synth.years_per_slice);
  take(s, "vocab_per_topic", synth.vocab_per_topic);
  take(s, "background_vocab", synth.background_vocab);
  take(s, "background_fraction", synth.background_fraction);
  take(s, "drift_rate", synth.drift_rate);
  take(s, "min_abstract", synth.min_abstract);
  take(s, "max_abstract", synth.max_abstract);
  take(s, "min_refs", synth.min_refs);
  take(s, "max_refs", synth.max_refs);
  take(s, "profile_concentration", synth.profile_concentration);
  take(s, "planted", synth.planted);
  reject_rest(s, "synth");

  reject_rest(root, "config");
}

void PipelineConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config file " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  apply_json(text);
}

std::string PipelineConfig::to_json() const {
  json j;
  j["corpus"] = corpus;
  j["slices"] = slices;
  j["slices_preset"] = slices_preset;
  j["out"] = out;
  j["min_refs"] = min_refs;
  j["min_slices"] = min_slices;
  j["test_size"] = test_size;
  j["k"] = k;
  j["schemes"] = schemes;
  j["all_years_pool"] = all_years_pool;
  j["top_n"] = top_n;
  j["sweep_k"] = sweep_k;
  j["seed"] = seed;
  j["threads"] = threads;
  j["doc"] = {{"dim", doc.dim},           {"epochs", doc.epochs}, {"negatives", doc.negatives},
              {"lr_start", doc.lr_start}, {"lr_end", doc.lr_end}, {"infer_epochs", doc.infer_epochs}};
  j["node"] = {{"dim", node.dim},
               {"walks_per_node", node.walk.walks_per_node},
               {"walk_length", node.walk.walk_length},
               {"p", node.walk.p},
               {"q", node.walk.q},
               {"window", node.window},
               {"negatives", node.negatives},
               {"epochs", node.epochs},
               {"lr_start", node.lr_start},
               {"lr_end", node.lr_end}};
  j["train"] = {{"learning_rate", train.learning_rate}, {"beta1", train.beta1},
                {"beta2", train.beta2},                 {"epsilon", train.epsilon},
                {"epochs", train.epochs},               {"batch_size", train.batch_size},
                {"parallel_batches", train.parallel_batches}};
  j["cutoffs"] = {{"pr_at", cutoffs.pr_at}, {"map_at", cutoffs.map_at}, {"ndcg_at", cutoffs.ndcg_at}};
  j["synth"] = {{"topics", synth.topics},
                {"slices", synth.slices},
                {"papers_per_slice", synth.papers_per_slice},
                {"start_year", synth.start_year},
                {"years_per_slice", synth.years_per_slice},
                {"vocab_per_topic", synth.vocab_per_topic},
                {"background_vocab", synth.background_vocab},
                {"background_fraction", synth.background_fraction},
                {"drift_rate", synth.drift_rate},
                {"min_abstract", synth.min_abstract},
                {"max_abstract", synth.max_abstract},
                {"min_refs", synth.min_refs},
                {"max_refs", synth.max_refs},
                {"profile_concentration", synth.profile_concentration},
                {"planted", synth.planted}};
  return j.dump(2);
}

std::uint64_t PipelineConfig::hash() const { return fnv1a64(to_json()); }

void PipelineConfig::validate() const {
  if (k < 1) throw UsageError("k must be >= 1");
  if (min_refs < 1 || min_slices < 1) throw UsageError("eligibility thresholds must be >= 1");
  if (top_n < 1) throw UsageError("top_n must be >= 1");
  if (doc.dim < 1 || node.dim < 1) throw UsageError("embedding dims must be >= 1");
  if (doc.dim != node.dim) throw UsageError("content and node dims must match (one MLP input size)");
  if (doc.epochs < 1 || doc.negatives < 1 || doc.infer_epochs < 1)
    throw UsageError("doc epochs, negatives and infer_epochs must be >= 1");
  if (node.epochs < 1 || node.negatives < 1 || node.window < 1 || node.walk.walks_per_node < 1 ||
      node.walk.walk_length < 2 || !(node.walk.p > 0) || !(node.walk.q > 0))
    throw UsageError("node walk parameters out of range");
  if (cutoffs.pr_at < 1) throw UsageError("cutoffs must be >= 1");
  for (auto v : cutoffs.map_at)
    if (v < 1) throw UsageError("cutoffs must be >= 1");
  for (auto v : cutoffs.ndcg_at)
    if (v < 1) throw UsageError("cutoffs must be >= 1");
  for (auto v : sweep_k)
    if (v < 1) throw UsageError("swept k values must be >= 1");
  if (!slices_preset.empty() && slices_preset != "pubmed" && slices_preset != "dblp")
    throw UsageError("slices_preset must be 'pubmed' or 'dblp'");
  train.validate();
  synth.validate();
  parsed_schemes();
}

std::vector<WeightScheme> PipelineConfig::parsed_schemes() const {
  if (schemes.empty()) throw UsageError("at least one scheme is required");
  std::vector<WeightScheme> out;
  for (const auto& s : schemes) {
    out.push_back(WeightScheme::parse(s));
    out.back().validate();
  }
  return out;
}

PipelineConfig PipelineConfig::synthetic() {
  PipelineConfig c;
  c.min_refs = 10;
  c.min_slices = 2;
  // 2,000 short abstracts give few updates per pass
  c.doc.epochs = 20;
  return c;
}

std::uint64_t doc_seed(const PipelineConfig& c) { return mix_seed(c.seed, 0xd0c); }
std::uint64_t walk_seed(const PipelineConfig& c) { return mix_seed(c.seed, 0x3a1c); }
std::uint64_t mlp_seed(const PipelineConfig& c) { return mix_seed(c.seed, 0x31b); }
std::uint64_t infer_seed(const PipelineConfig& c) { return mix_seed(c.seed, 0x1f3); }

std::vector<Edge> visible_edges(const Corpus& corpus, const Split& split) {
  auto edges = corpus.citation_edges();
  std::unordered_set<PaperIndex> test(split.test.begin(), split.test.end());
  return drop_edges_from(edges, test);
}

Embeddings train_embeddings(const Corpus& corpus, const Split& split, const PipelineConfig& c) {
  Embeddings e;
  DocVectorParams dp = c.doc;
  dp.seed = doc_seed(c);
  e.doc = DocVectorModel::train(corpus, dp, &e.doc_report);

  NodeVectorParams np = c.node;
  np.walk.seed = walk_seed(c);
  std::vector<std::string> ids;
  ids.reserve(corpus.size());
  for (const auto& p : corpus.papers()) ids.push_back(p.id);
  auto edges = visible_edges(corpus, split);
  e.node = train_node_embeddings(ids, edges, np, &e.node_report);
  return e;
}

bool Features::operator==(const Features& o) const {
  auto same = [](const std::vector<TrainingExample>& a, const std::vector<TrainingExample>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i].x_content != b[i].x_content || a[i].x_node != b[i].x_node ||
          a[i].target.probs != b[i].target.probs)
        return false;
    return true;
  };
  return content_scaler == o.content_scaler && node_scaler == o.node_scaler &&
         train_ids == o.train_ids && test_ids == o.test_ids && same(train, o.train) &&
         same(test, o.test);
}

Features build_features(const Corpus& corpus, const Split& split, const PaperVectors& content,
                        const PaperVectors& nodes, std::size_t k, const PipelineConfig& c) {
  ProfileModels pm;
  pm.corpus = &corpus;
  pm.k = k;
  pm.infer_seed = infer_seed(c);

  auto profile_all = [&](const std::vector<PaperIndex>& papers) {
    std::vector<QueryProfile> out(papers.size());
    const long n = static_cast<long>(papers.size());
#pragma omp parallel for schedule(dynamic, 8) num_threads(kernels::threads())
    for (long i = 0; i < n; ++i)
      out[static_cast<std::size_t>(i)] = build_profile(papers[static_cast<std::size_t>(i)], pm, content, nodes);
    return out;
  };
  auto train_prof = profile_all(split.train);
  auto test_prof = profile_all(split.test);

  Features f;
  std::vector<Vec> rc, rn;
  for (const auto& p : train_prof) {
    rc.push_back(p.raw_content);
    rn.push_back(p.raw_node);
  }
  f.content_scaler = MaxAbsScaler::fit(rc);
  f.node_scaler = MaxAbsScaler::fit(rn);

  auto examples = [&](const std::vector<PaperIndex>& papers, const std::vector<QueryProfile>& prof,
                      std::vector<std::string>& ids, std::vector<TrainingExample>& out) {
    for (std::size_t i = 0; i < papers.size(); ++i) {
      ids.push_back(corpus.paper(papers[i]).id);
      out.push_back({f.content_scaler.apply(prof[i].raw_content),
                     f.node_scaler.apply(prof[i].raw_node),
                     true_time_preference(corpus, papers[i])});
    }
  };
  examples(split.train, train_prof, f.train_ids, f.train);
  examples(split.test, test_prof, f.test_ids, f.test);
  return f;
}

namespace {

constexpr char kFeatureMagic[9] = "CTFEA001";

void put_string(std::ostream& out, const std::string& s) {
  io::put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
  auto n = io::get<std::uint32_t>(in, "string length");
  std::string s(n, '\0');
  if (!in.read(s.data(), n)) throw DataError("truncated file while reading a string");
  return s;
}

}  // namespace

void save_features(const Features& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  const std::size_t m = f.content_scaler.dim();
  const std::size_t t = f.train.empty() ? (f.test.empty() ? 0 : f.test[0].target.size())
                                        : f.train[0].target.size();
  out.write(kFeatureMagic, 8);
  io::put<std::uint32_t>(out, static_cast<std::uint32_t>(m));
  io::put<std::uint32_t>(out, static_cast<std::uint32_t>(t));
  io::put<std::uint64_t>(out, f.train.size());
  io::put<std::uint64_t>(out, f.test.size());
  io::put_reals(out, f.content_scaler.max_abs().data(), m);
  io::put_reals(out, f.node_scaler.max_abs().data(), m);
  auto write_set = [&](const std::vector<std::string>& ids, const std::vector<TrainingExample>& ex) {
    for (std::size_t i = 0; i < ex.size(); ++i) {
      put_string(out, ids[i]);
      io::put_reals(out, ex[i].x_content.data(), m);
      io::put_reals(out, ex[i].x_node.data(), m);
      io::put_reals(out, ex[i].target.probs.data(), t);
    }
  };
  write_set(f.train_ids, f.train);
  write_set(f.test_ids, f.test);
}

Features load_features(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open feature file " + path);
  io::expect_magic(in, kFeatureMagic, path);
  const std::size_t m = io::get<std::uint32_t>(in, "input size");
  const std::size_t t = io::get<std::uint32_t>(in, "slice count");
  const auto n_train = io::get<std::uint64_t>(in, "train count");
  const auto n_test = io::get<std::uint64_t>(in, "test count");
  Features f;
  Vec cs(m), ns(m);
  io::get_reals(in, cs.data(), m, "content scaler");
  io::get_reals(in, ns.data(), m, "node scaler");
  f.content_scaler = MaxAbsScaler(cs);
  f.node_scaler = MaxAbsScaler(ns);
  auto read_set = [&](std::uint64_t n, std::vector<std::string>& ids,
                      std::vector<TrainingExample>& ex) {
    for (std::uint64_t i = 0; i < n; ++i) {
      ids.push_back(get_string(in));
      TrainingExample e{Vec(m), Vec(m), {Vec(t)}};
      io::get_reals(in, e.x_content.data(), m, "features");
      io::get_reals(in, e.x_node.data(), m, "features");
      io::get_reals(in, e.target.probs.data(), t, "targets");
      ex.push_back(std::move(e));
    }
  };
  read_set(n_train, f.train_ids, f.train);
  read_set(n_test, f.test_ids, f.test);
  return f;
}

TrainConfig train_config(const PipelineConfig& c) {
  TrainConfig t = c.train;
  t.seed = mlp_seed(c);
  return t;
}

Real mean_cross_entropy(const MlpParams& params, std::span<const TrainingExample> data) {
  Vec ce(data.size());
  const long n = static_cast<long>(data.size());
#pragma omp parallel for schedule(static) num_threads(kernels::threads())
  for (long i = 0; i < n; ++i) {
    const auto& e = data[static_cast<std::size_t>(i)];
    ce[static_cast<std::size_t>(i)] = cross_entropy(e.target, predict(params, e.x_content, e.x_node));
  }
  return mean(ce);
}

Vec citerank_vector(const Corpus& corpus, const Split& split, Real damping) {
  auto edges = visible_edges(corpus, split);
  auto pr = citerank_weights(corpus.size(), edges, damping);
  return min_max_normalize(pr.scores);
}

GroundTruth test_truth(const Corpus& corpus, const Split& split) {
  GroundTruth truth;
  for (PaperIndex q : split.test) truth.emplace(corpus.paper(q).id, reference_relevance(corpus, q));
  return truth;
}

Evaluation recommend_and_evaluate(const Corpus& corpus, const Split& split, const Models& models,
                                  const std::vector<WeightScheme>& schemes,
                                  const PipelineConfig& c) {
  const std::size_t nq = split.test.size();
  std::vector<std::vector<Recommendation>> recs(nq);
  const long n = static_cast<long>(nq);
#pragma omp parallel for schedule(dynamic, 4) num_threads(kernels::threads())
  for (long i = 0; i < n; ++i) {
    const PaperIndex q = split.test[static_cast<std::size_t>(i)];
    const auto& p = corpus.paper(q);
    Query query{p.id, p.abstract, p.year, q};
    recs[static_cast<std::size_t>(i)] = recommend_all(query, models, schemes, c.top_n);
  }

  Evaluation ev;
  ev.schemes = schemes;
  ev.lists.resize(schemes.size());
  ev.truth = test_truth(corpus, split);
  std::vector<std::pair<std::string, Run>> runs;
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    Run run;
    for (std::size_t i = 0; i < nq; ++i) {
      auto& list = recs[i][s].list;
      list.method = schemes[s].name();
      run.emplace(list.query_id, list.papers());
      ev.lists[s].push_back(std::move(list));
      if (schemes[s].kind == SchemeKind::kTimePreference)
        ev.predictions.emplace(corpus.paper(split.test[i]).id, recs[i][s].preference);
    }
    runs.emplace_back(schemes[s].name(), std::move(run));
  }
  ev.report = evaluate(runs, ev.truth, c.cutoffs);
  return ev;
}

namespace {

Models make_models(const Corpus& corpus, const Embeddings& emb, const PaperVectors& content,
                   const PaperVectors& nodes, const Features& f, const MlpParams& mlp,
                   const Vec* citerank, std::size_t k, const PipelineConfig& c) {
  Models m;
  m.corpus = &corpus;
  m.doc = &emb.doc;
  m.content = &content;
  m.nodes = &nodes;
  m.content_scaler = &f.content_scaler;
  m.node_scaler = &f.node_scaler;
  m.mlp = &mlp;
  m.citerank = citerank;
  m.k = k;
  m.pool.policy = c.all_years_pool ? PoolPolicy::kAll : PoolPolicy::kOnOrBeforeQueryYear;
  m.seed = infer_seed(c);
  return m;
}

bool needs_citerank(const std::vector<WeightScheme>& schemes, Real* damping) {
  for (const auto& s : schemes)
    if (s.kind == SchemeKind::kCiteRank) {
      *damping = s.damping;
      return true;
    }
  return false;
}

}  // namespace

ExperimentResult run_experiment(const Corpus& corpus, const Split& split,
                                const PipelineConfig& c) {
  c.validate();
  const auto schemes = c.parsed_schemes();
  ExperimentResult r;
  r.embeddings = train_embeddings(corpus, split, c);
  PaperVectors content(r.embeddings.doc.documents(), corpus);
  PaperVectors nodes(r.embeddings.node, corpus);
  r.features = build_features(corpus, split, content, nodes, c.k, c);
  MlpShape shape;
  shape.input = c.doc.dim;
  shape.slices = corpus.slice_count();
  r.model = train(r.features.train, shape, train_config(c));
  r.test_cross_entropy = mean_cross_entropy(r.model.params, r.features.test);

  Real damping = 0.85;
  Vec cr;
  if (needs_citerank(schemes, &damping)) cr = citerank_vector(corpus, split, damping);
  auto models = make_models(corpus, r.embeddings, content, nodes, r.features, r.model.params,
                            cr.empty() ? nullptr : &cr, c.k, c);
  r.evaluation = recommend_and_evaluate(corpus, split, models, schemes, c);
  return r;
}

std::vector<KSweepRow> experiment_k_sweep(const Corpus& corpus, const Split& split,
                                          const Embeddings& emb,
                                          const std::vector<std::size_t>& ks,
                                          const PipelineConfig& c) {
  PaperVectors content(emb.doc.documents(), corpus);
  PaperVectors nodes(emb.node, corpus);
  MlpShape shape;
  shape.input = emb.doc.documents().dim();
  shape.slices = corpus.slice_count();
  const std::vector<WeightScheme> schemes{WeightScheme::parse("timepref")};
  std::vector<KSweepRow> rows;
  for (std::size_t k : ks) {
    if (k < 1) throw UsageError("swept k values must be >= 1");
    auto f = build_features(corpus, split, content, nodes, k, c);
    auto model = train(f.train, shape, train_config(c));
    auto models = make_models(corpus, emb, content, nodes, f, model.params, nullptr, k, c);
    auto ev = recommend_and_evaluate(corpus, split, models, schemes, c);
    rows.push_back({k, mean_cross_entropy(model.params, f.test), ev.report.rows[0].at("MRR")});
  }
  return rows;
}

std::string format_k_sweep(const std::vector<KSweepRow>& rows) {
  std::string out = "k\tmean_cross_entropy\tmrr\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu\t%.6f\t%.6f\n", r.k, r.mean_cross_entropy, r.mrr);
    out += buf;
  }
  return out;
}

DispersionResult experiment_dispersion(const Features& features, const MlpParams& params) {
  DispersionResult r;
  for (std::size_t i = 0; i < features.test.size(); ++i) {
    const auto& e = features.test[i];
    r.rows.push_back({features.test_ids[i], e.target.std_dev(),
                      cross_entropy(e.target, predict(params, e.x_content, e.x_node))});
  }
  const std::size_t n = r.rows.size();
  if (n < 2) return r;
  Real mx = 0, my = 0;
  for (const auto& row : r.rows) {
    mx += row.std_dev;
    my += row.cross_entropy;
  }
  mx /= static_cast<Real>(n);
  my /= static_cast<Real>(n);
  Real sxy = 0, sxx = 0, syy = 0;
  for (const auto& row : r.rows) {
    sxy += (row.std_dev - mx) * (row.cross_entropy - my);
    sxx += (row.std_dev - mx) * (row.std_dev - mx);
    syy += (row.cross_entropy - my) * (row.cross_entropy - my);
  }
  r.correlation = sxx > 0 && syy > 0 ? sxy / std::sqrt(sxx * syy) : 0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return r.rows[a].std_dev < r.rows[b].std_dev;
  });
  const std::size_t q = std::max<std::size_t>(1, n / 4);
  for (std::size_t i = 0; i < q; ++i) {
    r.low_bucket_ce += r.rows[order[i]].cross_entropy;
    r.high_bucket_ce += r.rows[order[n - 1 - i]].cross_entropy;
  }
  r.low_bucket_ce /= static_cast<Real>(q);
  r.high_bucket_ce /= static_cast<Real>(q);
  return r;
}

std::string format_dispersion(const DispersionResult& r) {
  std::string out = "id\tstd_dev\tcross_entropy\n";
  char buf[128];
  for (const auto& row : r.rows) {
    std::snprintf(buf, sizeof buf, "\t%.6f\t%.6f\n", row.std_dev, row.cross_entropy);
    out += row.id + buf;
  }
  std::snprintf(buf, sizeof buf,
                "# pearson %.4f (%s); mean cross-entropy least dispersed quarter %.4f, "
                "most dispersed quarter %.4f\n",
                r.correlation, r.correlation < 0 ? "negative" : "non-negative", r.low_bucket_ce,
                r.high_bucket_ce);
  out += buf;
  return out;
}

std::uint64_t file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::uint64_t h = fnv1a64("");
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0)
    h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
  return h;
}

void append_log(const std::string& log_path, const std::string& command,
                const PipelineConfig& c, const std::vector<std::string>& artifacts) {
  std::ofstream out(log_path, std::ios::app | std::ios::binary);
  if (!out) throw DataError("cannot write " + log_path);
  out << command << " seed=" << c.seed << " config=" << hex64(c.hash());
  for (const auto& a : artifacts) out << ' ' << a << '=' << hex64(file_checksum(a));
  out << '\n';
}

}  // namespace citetime
