#include "citetime/doc_vectors.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace citetime {

namespace {

void random_init(std::span<Real> v, Rng& rng) {
  const Real dim = static_cast<Real>(v.size());
  for (auto& x : v) x = (uniform01(rng) - 0.5) / dim;
}

std::uint64_t token_hash(std::span<const std::string> tokens) {
  std::uint64_t h = fnv1a64("");
  for (const auto& t : tokens) {
    h = fnv1a64(t, h);
    h = fnv1a64(" ", h);
  }
  return h;
}

// Builds the positive target plus negatives; a negative equal to the
// positive word is skipped.
void fill_targets(std::vector<SgnsTarget>& targets, std::uint32_t word, int negatives,
                  const UnigramTable& sampler, Rng& rng) {
  targets.clear();
  targets.push_back({word, true});
  for (int n = 0; n < negatives; ++n) {
    auto neg = sampler.sample(rng);
    if (neg == word) continue;
    targets.push_back({neg, false});
  }
}

}  // namespace

void DocVectorModel::build_sampler() {
  word_index_.clear();
  for (std::uint32_t i = 0; i < vocab_.size(); ++i) word_index_.emplace(vocab_[i], i);
  sampler_ = UnigramTable(counts_);
}

DocVectorModel DocVectorModel::train(const Corpus& corpus, const DocVectorParams& params,
                                     EmbeddingTrainReport* report) {
  if (corpus.empty()) throw DataError("cannot train document vectors on an empty corpus");
  if (params.dim < 2) throw UsageError("embedding dim must be >= 2");
  if (params.epochs < 1) throw UsageError("epochs must be >= 1");

  DocVectorModel model;
  model.params_ = params;

  std::map<std::string, std::uint64_t> freq;
  for (const auto& p : corpus.papers())
    for (const auto& tok : p.abstract) ++freq[tok];
  std::vector<std::pair<std::string, std::uint64_t>> sorted(freq.begin(), freq.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (auto& [w, c] : sorted) {
    model.vocab_.push_back(w);
    model.counts_.push_back(c);
  }
  model.build_sampler();

  const std::size_t dim = params.dim;
  Rng rng(mix_seed(params.seed, 11));
  model.docs_ = EmbeddingTable(Space::kContent, dim);
  Vec init(dim);
  for (const auto& p : corpus.papers()) {
    random_init(init, rng);
    model.docs_.add(p.id, init);
  }
  model.words_ = EmbeddingTable(Space::kWordContext, dim);
  Vec zero(dim, 0);
  for (const auto& w : model.vocab_) model.words_.add(w, zero);

  std::vector<std::vector<std::uint32_t>> doc_words(corpus.size());
  std::size_t total_tokens = 0;
  for (PaperIndex i = 0; i < corpus.size(); ++i) {
    for (const auto& tok : corpus.paper(i).abstract)
      doc_words[i].push_back(model.word_index_.at(tok));
    total_tokens += doc_words[i].size();
    if (doc_words[i].empty() && report) report->untrained.push_back(corpus.paper(i).id);
  }

  std::vector<PaperIndex> order(corpus.size());
  std::iota(order.begin(), order.end(), PaperIndex{0});
  std::vector<SgnsTarget> targets;
  Vec scratch(dim);
  const Real total_steps = static_cast<Real>(total_tokens) * params.epochs;
  const std::size_t chunk = std::max<std::size_t>(1, total_tokens / 20);
  std::size_t processed = 0;

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    Real epoch_loss = 0, chunk_loss = 0;
    std::size_t in_chunk = 0;
    for (PaperIndex d : order) {
      auto doc = model.docs_.row(d);
      for (std::uint32_t w : doc_words[d]) {
        Real lr = decayed_lr(params.lr_start, params.lr_end,
                             static_cast<Real>(processed) / total_steps);
        fill_targets(targets, w, params.negatives, model.sampler_, rng);
        Real loss = sgns_step(doc, model.words_.data(), targets, lr, scratch);
        ++processed;
        epoch_loss += loss;
        if (epoch == 0 && report) {
          chunk_loss += loss;
          if (++in_chunk == chunk) {
            report->first_epoch_chunks.push_back(chunk_loss / static_cast<Real>(chunk));
            chunk_loss = 0;
            in_chunk = 0;
          }
        }
      }
    }
    if (report)
      report->epoch_loss.push_back(total_tokens ? epoch_loss / static_cast<Real>(total_tokens) : 0);
  }
  return model;
}

InferResult DocVectorModel::infer(std::span<const std::string> tokens, std::uint64_t seed) const {
  std::vector<std::uint32_t> words;
  for (const auto& t : tokens) {
    auto it = word_index_.find(t);
    if (it != word_index_.end()) words.push_back(it->second);
  }
  if (words.empty()) return {docs_.mean(), true};

  const std::size_t dim = params_.dim;
  Rng rng(mix_seed(seed ^ token_hash(tokens), 13));
  Vec v(dim);
  random_init(v, rng);
  Vec scratch(dim);
  std::vector<SgnsTarget> targets;
  const Real total = static_cast<Real>(words.size()) * params_.infer_epochs;
  std::size_t processed = 0;
  for (int e = 0; e < params_.infer_epochs; ++e) {
    for (std::uint32_t w : words) {
      Real lr = decayed_lr(params_.lr_start, params_.lr_end, static_cast<Real>(processed) / total);
      fill_targets(targets, w, params_.negatives, sampler_, rng);
      // output rows are frozen, so the const_cast never writes
      sgns_step(v, const_cast<Real*>(words_.data()), targets, lr, scratch, false);
      ++processed;
    }
  }
  return {std::move(v), false};
}

void DocVectorModel::save(const std::string& prefix) const {
  docs_.save_binary(prefix + ".emb");
  words_.save_binary(prefix + ".words.emb");
  std::ofstream out(prefix + ".vocab.tsv", std::ios::binary);
  if (!out) throw DataError("cannot write " + prefix + ".vocab.tsv");
  out.precision(17);
  out << "# dim=" << params_.dim << " epochs=" << params_.epochs
      << " negatives=" << params_.negatives << " lr_start=" << params_.lr_start
      << " lr_end=" << params_.lr_end << " infer_epochs=" << params_.infer_epochs
      << " seed=" << params_.seed << '\n';
  for (std::size_t i = 0; i < vocab_.size(); ++i) out << vocab_[i] << '\t' << counts_[i] << '\n';
}

DocVectorModel DocVectorModel::load(const std::string& prefix) {
  DocVectorModel m;
  m.docs_ = EmbeddingTable::load_binary(prefix + ".emb");
  m.words_ = EmbeddingTable::load_binary(prefix + ".words.emb");
  std::ifstream in(prefix + ".vocab.tsv");
  if (!in) throw DataError("cannot open " + prefix + ".vocab.tsv (run `embed` first)");
  std::string line;
  std::getline(in, line);
  std::istringstream hs(line);
  std::string tok;
  while (hs >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "dim") m.params_.dim = std::stoul(val);
    else if (key == "epochs") m.params_.epochs = std::stoi(val);
    else if (key == "negatives") m.params_.negatives = std::stoi(val);
    else if (key == "lr_start") m.params_.lr_start = std::stod(val);
    else if (key == "lr_end") m.params_.lr_end = std::stod(val);
    else if (key == "infer_epochs") m.params_.infer_epochs = std::stoi(val);
    else if (key == "seed") m.params_.seed = std::stoull(val);
  }
  while (std::getline(in, line)) {
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError(prefix + ".vocab.tsv: malformed line");
    m.vocab_.push_back(line.substr(0, tab));
    m.counts_.push_back(std::stoull(line.substr(tab + 1)));
  }
  if (m.vocab_.size() != m.words_.size() || m.docs_.dim() != m.params_.dim)
    throw DataError(prefix + ": vocabulary and word table disagree");
  m.build_sampler();
  return m;
}

}  // namespace citetime
