// citetime: command-line front end for the recommendation pipeline.
//
// Every stage reads the artifacts of earlier stages from --out and writes
// its own there, then appends a line to <out>/pipeline.log.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "citetime/formats.hpp"
#include "citetime/kernels.hpp"
#include "citetime/pipeline.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace citetime;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out, corpus, slices, preset;
  std::optional<int> min_refs, min_slices, threads, mlp_epochs, doc_epochs, node_epochs, walks,
      walk_length;
  std::optional<std::size_t> test_size, k, dim, batch, top_n;
  std::optional<double> lr, p, q;
  std::optional<std::vector<std::string>> schemes;
  std::optional<std::vector<std::size_t>> sweep_k;
  std::optional<int> synth_topics, synth_slices, synth_papers;
  std::optional<double> synth_drift;
  bool all_years = false;
};

template <typename T, typename U>
void set_if(const std::optional<T>& v, U& dst) {
  if (v) dst = *v;
}

void apply(const Overrides& o, PipelineConfig& c) {
  set_if(o.seed, c.seed);
  set_if(o.out, c.out);
  set_if(o.corpus, c.corpus);
  set_if(o.slices, c.slices);
  set_if(o.preset, c.slices_preset);
  set_if(o.min_refs, c.min_refs);
  set_if(o.min_slices, c.min_slices);
  set_if(o.threads, c.threads);
  set_if(o.mlp_epochs, c.train.epochs);
  set_if(o.doc_epochs, c.doc.epochs);
  set_if(o.node_epochs, c.node.epochs);
  set_if(o.walks, c.node.walk.walks_per_node);
  set_if(o.walk_length, c.node.walk.walk_length);
  set_if(o.test_size, c.test_size);
  set_if(o.k, c.k);
  if (o.dim) c.doc.dim = c.node.dim = *o.dim;
  set_if(o.batch, c.train.batch_size);
  set_if(o.top_n, c.top_n);
  set_if(o.lr, c.train.learning_rate);
  set_if(o.p, c.node.walk.p);
  set_if(o.q, c.node.walk.q);
  set_if(o.schemes, c.schemes);
  set_if(o.sweep_k, c.sweep_k);
  set_if(o.synth_topics, c.synth.topics);
  set_if(o.synth_slices, c.synth.slices);
  set_if(o.synth_papers, c.synth.papers_per_slice);
  set_if(o.synth_drift, c.synth.drift_rate);
  if (o.all_years) c.all_years_pool = true;
}

struct Paths {
  fs::path dir;
  std::string at(const std::string& name) const { return (dir / name).string(); }
  std::string corpus() const { return at("corpus.jsonl"); }
  std::string slices() const { return at("slices.json"); }
  std::string split() const { return at("split.json"); }
  std::string qrels() const { return at("qrels.txt"); }
  std::string content() const { return at("content"); }
  std::string node() const { return at("node.emb"); }
  std::string features() const { return at("features.bin"); }
  std::string mlp() const { return at("mlp.bin"); }
  std::string log() const { return at("pipeline.log"); }
  fs::path runs() const { return dir / "runs"; }
};

const std::string& need(const std::string& path, const char* producer) {
  if (!fs::exists(path))
    throw DataError("missing " + path + "; run `citetime " + producer + "` first");
  return path;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

Corpus load_sliced(const Paths& p) {
  auto corpus = load_corpus(need(p.corpus(), "ingest"));
  return assign_slices(std::move(corpus), TimeSliceConfig::load(need(p.slices(), "slices")));
}

void save_split(const Split& s, const Corpus& corpus, const PipelineConfig& c,
                const std::string& path) {
  nlohmann::json j;
  j["min_refs"] = c.min_refs;
  j["min_slices"] = c.min_slices;
  j["seed"] = c.seed;
  auto ids = [&](const std::vector<PaperIndex>& v) {
    std::vector<std::string> out;
    for (auto i : v) out.push_back(corpus.paper(i).id);
    return out;
  };
  j["train"] = ids(s.train);
  j["test"] = ids(s.test);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << j.dump(1) << '\n';
}

Split load_split(const Paths& p, const Corpus& corpus) {
  const std::string path = need(p.split(), "slices");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  auto ids = [&](const char* key) {
    std::vector<PaperIndex> out;
    for (const auto& id : j.at(key)) {
      auto i = corpus.find(id.get<std::string>());
      if (!i) throw DataError(path + ": unknown paper id " + id.get<std::string>());
      out.push_back(*i);
    }
    return out;
  };
  return {ids("train"), ids("test")};
}

Embeddings load_embeddings(const Paths& p) {
  Embeddings e;
  need(p.content() + ".emb", "embed");
  e.doc = DocVectorModel::load(p.content());
  e.node = EmbeddingTable::load_binary(need(p.node(), "embed"));
  return e;
}

void print_slices(const Corpus& corpus) {
  for (std::size_t s = 0; s < corpus.slice_count(); ++s)
    std::printf("  slice %zu %-10s %zu papers\n", s, corpus.slices().intervals()[s].label().c_str(),
                corpus.slice_members(s).size());
}

// ---- stages ----

void cmd_ingest(const PipelineConfig& c, const Paths& p) {
  if (c.corpus.empty()) throw UsageError("ingest needs --corpus <file>");
  auto corpus = load_corpus(c.corpus);
  save_corpus(corpus, p.corpus());
  std::printf("%zu papers, %zu citation edges, %zu dangling references dropped\n", corpus.size(),
              corpus.edge_count(), corpus.dropped_references());
  append_log(p.log(), "ingest", c, {p.corpus()});
}

void cmd_slices(const PipelineConfig& c, const Paths& p) {
  auto corpus = load_corpus(need(p.corpus(), "ingest"));
  TimeSliceConfig slices;
  if (!c.slices.empty())
    slices = TimeSliceConfig::load(c.slices);
  else if (c.slices_preset == "pubmed")
    slices = TimeSliceConfig::pubmed();
  else if (c.slices_preset == "dblp")
    slices = TimeSliceConfig::dblp();
  else if (fs::exists(p.slices()))
    slices = TimeSliceConfig::load(p.slices());
  else
    throw UsageError("slices needs --slices <file> or --preset pubmed|dblp");
  corpus = assign_slices(std::move(corpus), slices);
  slices.save(p.slices());
  auto split = split_train_test(corpus, c.min_refs, c.min_slices, c.test_size, c.seed);
  save_split(split, corpus, c, p.split());
  write_qrels(p.qrels(), test_truth(corpus, split), corpus);
  print_slices(corpus);
  std::printf("%zu eligible papers: %zu train, %zu test\n", split.train.size() + split.test.size(),
              split.train.size(), split.test.size());
  append_log(p.log(), "slices", c, {p.slices(), p.split(), p.qrels()});
}

void cmd_embed(const PipelineConfig& c, const Paths& p, bool text) {
  auto corpus = load_sliced(p);
  auto split = load_split(p, corpus);
  auto e = train_embeddings(corpus, split, c);
  e.doc.save(p.content());
  e.node.save_binary(p.node());
  std::vector<std::string> artifacts{p.content() + ".emb", p.content() + ".words.emb",
                                     p.content() + ".vocab.tsv", p.node()};
  if (text) {
    e.doc.documents().save_text(p.at("content.txt"));
    e.node.save_text(p.at("node.txt"));
    artifacts.push_back(p.at("content.txt"));
    artifacts.push_back(p.at("node.txt"));
  }
  auto losses = [](const char* name, const EmbeddingTrainReport& r) {
    std::printf("%s loss per epoch:", name);
    for (Real l : r.epoch_loss) std::printf(" %.4f", l);
    std::printf("\n");
    if (!r.untrained.empty()) std::printf("  %zu ids never trained\n", r.untrained.size());
  };
  losses("content", e.doc_report);
  losses("node", e.node_report);
  append_log(p.log(), "embed", c, artifacts);
}

void cmd_profile(const PipelineConfig& c, const Paths& p) {
  auto corpus = load_sliced(p);
  auto split = load_split(p, corpus);
  auto e = load_embeddings(p);
  PaperVectors content(e.doc.documents(), corpus), nodes(e.node, corpus);
  auto f = build_features(corpus, split, content, nodes, c.k, c);
  save_features(f, p.features());
  std::printf("profiled %zu train and %zu test papers with k = %zu\n", f.train.size(),
              f.test.size(), c.k);
  append_log(p.log(), "profile", c, {p.features()});
}

void cmd_train(const PipelineConfig& c, const Paths& p, bool text) {
  auto f = load_features(need(p.features(), "profile"));
  if (f.train.empty()) throw DataError("no training examples in " + p.features());
  MlpShape shape;
  shape.input = f.content_scaler.dim();
  shape.slices = f.train[0].target.size();
  auto r = train(f.train, shape, train_config(c));
  r.params.save_binary(p.mlp());
  std::vector<std::string> artifacts{p.mlp(), p.at("train_loss.tsv")};
  {
    std::ofstream out(p.at("train_loss.tsv"), std::ios::binary);
    out << "epoch\tloss\n";
    char buf[64];
    for (std::size_t i = 0; i < r.epoch_loss.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%zu\t%.10f\n", i + 1, r.epoch_loss[i]);
      out << buf;
    }
  }
  if (text) {
    r.params.save_text(p.at("mlp.txt"));
    artifacts.push_back(p.at("mlp.txt"));
  }
  std::printf("loss: first epoch %.4f, last epoch %.4f; test cross-entropy %.4f\n",
              r.epoch_loss.front(), r.epoch_loss.back(), mean_cross_entropy(r.params, f.test));
  append_log(p.log(), "train", c, artifacts);
}

struct RecommendArgs {
  std::string query_id, text;
  std::optional<int> year;
  std::size_t rows = 20;
  bool side_by_side = false;
};

void cmd_recommend(const PipelineConfig& c, const Paths& p, const RecommendArgs& a) {
  const auto schemes = c.parsed_schemes();
  auto corpus = load_sliced(p);
  auto split = load_split(p, corpus);
  auto e = load_embeddings(p);
  auto f = load_features(need(p.features(), "profile"));
  PaperVectors content(e.doc.documents(), corpus), nodes(e.node, corpus);
  MlpParams mlp;
  bool wants_mlp = false;
  Real damping = 0;
  bool wants_cr = false;
  for (const auto& s : schemes) {
    wants_mlp |= s.kind == SchemeKind::kTimePreference;
    if (s.kind == SchemeKind::kCiteRank) {
      wants_cr = true;
      damping = s.damping;
    }
  }
  if (wants_mlp) mlp = MlpParams::load_binary(need(p.mlp(), "train"));
  Vec cr;
  if (wants_cr) cr = citerank_vector(corpus, split, damping);

  Models m;
  m.corpus = &corpus;
  m.doc = &e.doc;
  m.content = &content;
  m.nodes = &nodes;
  m.content_scaler = &f.content_scaler;
  m.node_scaler = &f.node_scaler;
  m.mlp = wants_mlp ? &mlp : nullptr;
  m.citerank = wants_cr ? &cr : nullptr;
  m.k = c.k;
  m.pool.policy = c.all_years_pool ? PoolPolicy::kAll : PoolPolicy::kOnOrBeforeQueryYear;
  m.seed = infer_seed(c);

  if (!a.query_id.empty() || !a.text.empty()) {
    Query q;
    Relevance truth;
    bool known = false;
    if (!a.query_id.empty()) {
      auto i = corpus.find(a.query_id);
      if (!i) throw DataError("unknown query id " + a.query_id);
      const auto& paper = corpus.paper(*i);
      q = {paper.id, paper.abstract, paper.year, *i};
      truth = reference_relevance(corpus, *i);
      known = true;
    } else {
      if (!a.year) throw UsageError("--text needs --year");
      q = {"query", tokenize(a.text), *a.year, std::nullopt};
    }
    auto recs = recommend_all(q, m, schemes, c.top_n);
    for (std::size_t s = 0; s < recs.size(); ++s) recs[s].list.method = schemes[s].name();
    if (a.side_by_side) {
      if (recs.size() != 2) throw UsageError("--side-by-side needs exactly two schemes");
      std::printf("%s", format_side_by_side(recs[0].list, recs[1].list, corpus,
                                            known ? &truth : nullptr, a.rows)
                            .c_str());
    } else {
      for (const auto& r : recs) {
        std::printf("# %s\n", r.list.method.c_str());
        if (!r.preference.probs.empty()) {
          std::printf("# predicted preference:");
          for (Real v : r.preference.probs) std::printf(" %.4f", v);
          std::printf("\n");
        }
        std::printf("%s", format_ranked(r.list, corpus, known ? &truth : nullptr, a.rows).c_str());
      }
    }
    return;
  }

  auto ev = recommend_and_evaluate(corpus, split, m, schemes, c);
  fs::create_directories(p.runs());
  std::vector<std::string> artifacts;
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    const auto path = (p.runs() / (schemes[s].name() + ".run")).string();
    write_run(path, ev.lists[s], corpus, schemes[s].name());
    artifacts.push_back(path);
  }
  if (!ev.predictions.empty()) {
    write_preferences(p.at("predictions.jsonl"), ev.predictions);
    artifacts.push_back(p.at("predictions.jsonl"));
  }
  std::printf("wrote %zu run files for %zu queries to %s\n", schemes.size(), split.test.size(),
              p.runs().string().c_str());
  append_log(p.log(), "recommend", c, artifacts);
}

void cmd_evaluate(const PipelineConfig& c, const Paths& p, std::vector<std::string> runs,
                  std::string qrels) {
  auto corpus = load_sliced(p);
  if (qrels.empty()) qrels = need(p.qrels(), "slices");
  auto truth = read_qrels(qrels, corpus);
  if (runs.empty()) {
    if (!fs::exists(p.runs())) throw DataError("no run files; run `citetime recommend` first");
    for (const auto& entry : fs::directory_iterator(p.runs()))
      if (entry.path().extension() == ".run") runs.push_back(entry.path().string());
    std::sort(runs.begin(), runs.end());
  }
  std::vector<std::pair<std::string, Run>> loaded;
  for (const auto& path : runs) {
    auto file = read_run(path, corpus);
    const std::string name = file.tag.empty() ? fs::path(path).stem().string() : file.tag;
    loaded.emplace_back(name, to_run(file));
  }
  auto report = evaluate(loaded, truth, c.cutoffs);
  const auto table = report.table();
  std::ofstream(p.at("report.txt"), std::ios::binary) << table;
  std::ofstream(p.at("report.kv"), std::ios::binary) << report.key_values();
  std::printf("%s", table.c_str());
  append_log(p.log(), "evaluate", c, {p.at("report.txt"), p.at("report.kv")});
}

void cmd_synth(const PipelineConfig& c, const Paths& p) {
  SynthConfig sc = c.synth;
  sc.seed = c.seed;
  auto s = generate(sc);
  save_corpus(s.corpus, p.corpus());
  s.slices.save(p.slices());
  std::vector<PaperIndex> all;
  for (PaperIndex i = 0; i < s.corpus.size(); ++i)
    if (!s.corpus.paper(i).references.empty()) all.push_back(i);
  save_planted_truth(s, all, p.at("truth.jsonl"));
  // eligibility thresholds that suit synthetic corpora, for the later stages
  std::ofstream(p.at("config.json"), std::ios::binary) << c.to_json() << '\n';
  std::printf("%zu papers, %zu citation edges, %zu slices\n", s.corpus.size(),
              s.corpus.edge_count(), s.corpus.slice_count());
  print_slices(s.corpus);
  if (s.renormalized)
    std::fprintf(stderr, "warning: %zu papers had citation mass on empty slices; renormalized\n",
                 s.renormalized);
  append_log(p.log(), "synth", c, {p.corpus(), p.slices(), p.at("truth.jsonl"), p.at("config.json")});
}

void cmd_sweep_k(const PipelineConfig& c, const Paths& p) {
  auto corpus = load_sliced(p);
  auto split = load_split(p, corpus);
  auto e = load_embeddings(p);
  auto rows = experiment_k_sweep(corpus, split, e, c.sweep_k, c);
  const auto table = format_k_sweep(rows);
  std::ofstream(p.at("sweep_k.tsv"), std::ios::binary) << table;
  std::printf("%s", table.c_str());
  append_log(p.log(), "sweep-k", c, {p.at("sweep_k.tsv")});
}

void cmd_dispersion(const PipelineConfig& c, const Paths& p) {
  auto f = load_features(need(p.features(), "profile"));
  auto mlp = MlpParams::load_binary(need(p.mlp(), "train"));
  auto r = experiment_dispersion(f, mlp);
  const auto table = format_dispersion(r);
  std::ofstream(p.at("dispersion.tsv"), std::ios::binary) << table;
  std::printf("%zu queries; pearson(std-dev, cross-entropy) = %.4f\n", r.rows.size(),
              r.correlation);
  std::printf("mean cross-entropy: least dispersed quarter %.4f, most dispersed quarter %.4f\n",
              r.low_bucket_ce, r.high_bucket_ce);
  append_log(p.log(), "dispersion", c, {p.at("dispersion.tsv")});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chronological citation recommendation: time-preference prediction and re-ranking"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", o.seed, "Pipeline seed");
  app.add_option("--out", o.out, "Artifact directory (default: out)");
  app.add_option("--threads", o.threads, "Worker threads (0: OpenMP default)");
  app.add_option("--corpus", o.corpus, "Raw corpus file (ingest)");
  app.add_option("--slices", o.slices, "Slice config file");
  app.add_option("--preset", o.preset, "Slice preset: pubmed or dblp");
  app.add_option("--min-refs", o.min_refs, "Eligible papers have more references than this");
  app.add_option("--min-slices", o.min_slices, "... spread over more slices than this");
  app.add_option("--test-size", o.test_size, "Number of test queries");
  app.add_option("-k,--neighbors", o.k, "Neighbour papers pooled for the node input");
  app.add_option("--dim", o.dim, "Embedding dimension (content and node)");
  app.add_option("--doc-epochs", o.doc_epochs, "Paragraph-vector epochs");
  app.add_option("--node-epochs", o.node_epochs, "Node skip-gram epochs");
  app.add_option("--walks", o.walks, "Walks per node");
  app.add_option("--walk-length", o.walk_length, "Walk length");
  app.add_option("--p", o.p, "Walk return parameter");
  app.add_option("--q", o.q, "Walk in-out parameter");
  app.add_option("--epochs", o.mlp_epochs, "MLP training epochs");
  app.add_option("--batch", o.batch, "MLP batch size");
  app.add_option("--lr", o.lr, "MLP learning rate");
  app.add_option("--schemes", o.schemes,
                 "Weighting schemes: cbf, timepref, timepref_raw, citerank[:d], "
                 "preference[:sigma], freshness[:tau], whin_csl[:w1[,w2]]");
  app.add_option("--top-n", o.top_n, "Recommended list length");
  app.add_flag("--all-years", o.all_years, "Candidate pool includes papers newer than the query");
  app.add_option("--sweep-k", o.sweep_k, "k values for sweep-k");
  app.add_option("--topics", o.synth_topics, "synth: topics");
  app.add_option("--synth-slices", o.synth_slices, "synth: slices");
  app.add_option("--papers-per-slice", o.synth_papers, "synth: papers per slice");
  app.add_option("--drift", o.synth_drift, "synth: vocabulary drift rate per slice");

  auto* ingest = app.add_subcommand("ingest", "Validate a corpus file and copy it into --out");
  auto* slices = app.add_subcommand("slices", "Assign time slices and split train/test");
  auto* embed = app.add_subcommand("embed", "Train content and node embeddings");
  bool embed_text = false;
  embed->add_flag("--text", embed_text, "Also export plain-text embedding tables");
  auto* profile = app.add_subcommand("profile", "Build scaled MLP inputs for train and test papers");
  auto* trainc = app.add_subcommand("train", "Train the time-preference MLP");
  bool mlp_text = false;
  trainc->add_flag("--text", mlp_text, "Also write a text dump of the parameters");
  auto* recommend = app.add_subcommand("recommend", "Recommend for the test queries or one query");
  RecommendArgs ra;
  recommend->add_option("--query-id", ra.query_id, "Recommend for one corpus paper");
  recommend->add_option("--text", ra.text, "Recommend for free text");
  recommend->add_option("--year", ra.year, "Publication year of --text");
  recommend->add_option("--rows", ra.rows, "Rows to print for a single query");
  recommend->add_flag("--side-by-side", ra.side_by_side, "Print two schemes next to each other");
  auto* evaluatec = app.add_subcommand("evaluate", "Score run files against the reference lists");
  std::vector<std::string> run_files;
  std::string qrels;
  evaluatec->add_option("--run", run_files, "Run files (default: every run in <out>/runs)");
  evaluatec->add_option("--qrels", qrels, "Relevance file (default: <out>/qrels.txt)");
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with planted drift");
  auto* sweep = app.add_subcommand("sweep-k", "Cross-entropy and MRR against the neighbour count");
  auto* dispersion = app.add_subcommand("dispersion", "Cross-entropy against preference dispersion");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    PipelineConfig c;
    if (app.got_subcommand(synth)) c = PipelineConfig::synthetic();
    if (!config_path.empty()) c.load(config_path);
    apply(o, c);
    c.validate();
    if (c.threads > 0) kernels::set_threads(c.threads);
    Paths p{c.out};
    fs::create_directories(p.dir);

    if (app.got_subcommand(ingest)) cmd_ingest(c, p);
    else if (app.got_subcommand(slices)) cmd_slices(c, p);
    else if (app.got_subcommand(embed)) cmd_embed(c, p, embed_text);
    else if (app.got_subcommand(profile)) cmd_profile(c, p);
    else if (app.got_subcommand(trainc)) cmd_train(c, p, mlp_text);
    else if (app.got_subcommand(recommend)) cmd_recommend(c, p, ra);
    else if (app.got_subcommand(evaluatec)) cmd_evaluate(c, p, run_files, qrels);
    else if (app.got_subcommand(synth)) cmd_synth(c, p);
    else if (app.got_subcommand(sweep)) cmd_sweep_k(c, p);
    else if (app.got_subcommand(dispersion)) cmd_dispersion(c, p);
    return 0;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  }
}
