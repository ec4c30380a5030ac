#include "citetime/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include "json.hpp"

namespace citetime {

void SynthConfig::validate() const {
  if (topics < 1 || slices < 2 || papers_per_slice < 1 || years_per_slice < 1 ||
      vocab_per_topic < 1 || background_vocab < 1 || min_abstract < 1 ||
      max_abstract < min_abstract || min_refs < 1 || max_refs < min_refs)
    throw UsageError("synth: all counts must be >= 1 and ranges ordered");
  if (!(drift_rate >= 0 && drift_rate <= 1)) throw UsageError("synth: drift rate must lie in [0, 1]");
  if (!(background_fraction >= 0 && background_fraction <= 1))
    throw UsageError("synth: background fraction must lie in [0, 1]");
  if (!(profile_concentration > 0)) throw UsageError("synth: concentration must be > 0");
  if (!planted.empty()) {
    if (planted.size() != static_cast<std::size_t>(topics))
      throw UsageError("synth: planted profiles need one entry per topic");
    for (const auto& per_topic : planted) {
      if (per_topic.size() != static_cast<std::size_t>(slices))
        throw UsageError("synth: planted profiles need one entry per slice");
      for (std::size_t s = 0; s < per_topic.size(); ++s) {
        TimePreference tp{per_topic[s]};
        if (per_topic[s].size() != static_cast<std::size_t>(slices) || !tp.valid())
          throw UsageError("synth: planted profile is not a distribution over slices");
        for (std::size_t j = s + 1; j < per_topic[s].size(); ++j)
          if (per_topic[s][j] != 0) throw UsageError("synth: planted profile cites a later slice");
      }
    }
  }
}

TimeSliceConfig synth_slices(const SynthConfig& c) {
  std::vector<SliceInterval> iv;
  for (int s = 0; s < c.slices; ++s) {
    const int lo = c.start_year + s * c.years_per_slice;
    const int hi = lo + c.years_per_slice - 1;
    iv.push_back({s == 0 ? std::nullopt : std::optional<int>(lo), hi});
  }
  return TimeSliceConfig(std::move(iv));
}

namespace {

std::string word(int topic, int id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "t%dw%d", topic, id);
  return buf;
}

std::vector<std::vector<TimePreference>> draw_profiles(const SynthConfig& c, Rng& rng) {
  std::vector<std::vector<TimePreference>> out(static_cast<std::size_t>(c.topics));
  std::gamma_distribution<Real> gamma(c.profile_concentration, 1.0);
  for (int k = 0; k < c.topics; ++k) {
    for (int s = 0; s < c.slices; ++s) {
      Vec p(static_cast<std::size_t>(c.slices), 0);
      if (!c.planted.empty()) {
        p = c.planted[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)];
      } else {
        Real total = 0;
        for (int j = 0; j <= s; ++j) total += p[static_cast<std::size_t>(j)] = gamma(rng) + 1e-9;
        for (auto& x : p) x /= total;
      }
      out[static_cast<std::size_t>(k)].push_back({std::move(p)});
    }
  }
  return out;
}

}  // namespace

SynthCorpus generate(const SynthConfig& c) {
  c.validate();
  Rng rng(mix_seed(c.seed, 51));
  SynthCorpus out;
  out.slices = synth_slices(c);
  out.planted = draw_profiles(c, rng);

  // topic vocabularies per slice; each slice replaces a drift fraction
  std::vector<std::vector<std::vector<std::string>>> vocab(static_cast<std::size_t>(c.topics));
  const int replace = static_cast<int>(std::lround(c.drift_rate * c.vocab_per_topic));
  for (int k = 0; k < c.topics; ++k) {
    std::vector<std::string> cur;
    int next = 0;
    for (int j = 0; j < c.vocab_per_topic; ++j) cur.push_back(word(k, next++));
    for (int s = 0; s < c.slices; ++s) {
      if (s > 0) {
        std::vector<std::size_t> pos(cur.size());
        std::iota(pos.begin(), pos.end(), std::size_t{0});
        std::shuffle(pos.begin(), pos.end(), rng);
        for (int r = 0; r < replace; ++r) cur[pos[static_cast<std::size_t>(r)]] = word(k, next++);
      }
      vocab[static_cast<std::size_t>(k)].push_back(cur);
    }
  }
  std::vector<std::string> background;
  for (int j = 0; j < c.background_vocab; ++j) background.push_back("bg" + std::to_string(j));

  struct Draft {
    int slice, year, topic;
  };
  std::vector<Draft> drafts;
  for (int s = 0; s < c.slices; ++s) {
    std::vector<Draft> in_slice;
    for (int i = 0; i < c.papers_per_slice; ++i) {
      const int year = c.start_year + s * c.years_per_slice +
                       static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(c.years_per_slice)));
      in_slice.push_back({s, year, i % c.topics});
    }
    std::stable_sort(in_slice.begin(), in_slice.end(),
                     [](const Draft& a, const Draft& b) { return a.year < b.year; });
    drafts.insert(drafts.end(), in_slice.begin(), in_slice.end());
  }

  const std::size_t n = drafts.size();
  auto id_of = [](std::size_t i) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "P%06zu", i);
    return std::string(buf);
  };

  // members[topic][slice] = paper indices in ascending year order
  std::vector<std::vector<std::vector<std::size_t>>> members(
      static_cast<std::size_t>(c.topics),
      std::vector<std::vector<std::size_t>>(static_cast<std::size_t>(c.slices)));
  for (std::size_t i = 0; i < n; ++i)
    members[static_cast<std::size_t>(drafts[i].topic)][static_cast<std::size_t>(drafts[i].slice)].push_back(i);

  std::vector<PaperRecord> records;
  records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& d = drafts[i];
    PaperRecord rec;
    rec.id = id_of(i);
    rec.year = d.year;

    const auto& topic_words = vocab[static_cast<std::size_t>(d.topic)][static_cast<std::size_t>(d.slice)];
    const int len = c.min_abstract +
                    static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(c.max_abstract - c.min_abstract + 1)));
    for (int w = 0; w < len; ++w) {
      if (w) rec.abstract.push_back(' ');
      if (uniform01(rng) < c.background_fraction)
        rec.abstract += background[uniform_index(rng, background.size())];
      else
        rec.abstract += topic_words[uniform_index(rng, topic_words.size())];
    }

    // citable: same topic, earlier slices, or the own slice up to the own year
    const auto& pools = members[static_cast<std::size_t>(d.topic)];
    std::vector<std::vector<std::size_t>> avail(pools.begin(), pools.begin() + d.slice);
    avail.emplace_back();
    for (std::size_t j : pools[static_cast<std::size_t>(d.slice)])
      if (j != i && drafts[j].year <= d.year) avail.back().push_back(j);
    Vec weight = out.planted[static_cast<std::size_t>(d.topic)][static_cast<std::size_t>(d.slice)].probs;
    weight.resize(static_cast<std::size_t>(d.slice) + 1);
    bool renorm = false;
    for (std::size_t j = 0; j < avail.size(); ++j)
      if (avail[j].empty() && weight[j] > 0) {
        weight[j] = 0;
        renorm = true;
      }
    const int budget = c.min_refs + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(c.max_refs - c.min_refs + 1)));
    for (int r = 0; r < budget; ++r) {
      Real total = std::accumulate(weight.begin(), weight.end(), Real{0});
      if (total <= 0) break;
      Real u = uniform01(rng) * total;
      std::size_t j = 0;
      while (j + 1 < weight.size() && (u >= weight[j] || weight[j] == 0)) {
        u -= weight[j];
        ++j;
      }
      auto& pool = avail[j];
      const std::size_t pick = uniform_index(rng, pool.size());
      const std::size_t cited = pool[pick];
      pool[pick] = pool.back();
      pool.pop_back();
      if (pool.empty()) {
        if (r + 1 < budget) renorm = renorm || weight[j] > 0;
        weight[j] = 0;
      }
      // 1 + Geometric(0.5), capped at 30
      int count = 1;
      while (count < 30 && uniform01(rng) < 0.5) ++count;
      rec.references.emplace_back(id_of(cited), count);
    }
    if (renorm) ++out.renormalized;
    out.topic_of.push_back(d.topic);
    records.push_back(std::move(rec));
  }
  out.corpus = assign_slices(Corpus::from_records(std::move(records)), out.slices);
  return out;
}

PlantedTruth planted_truth(const SynthCorpus& synth, std::span<const PaperIndex> queries) {
  PlantedTruth t;
  for (PaperIndex q : queries) {
    const auto& id = synth.corpus.paper(q).id;
    t.relevance.emplace(id, reference_relevance(synth.corpus, q));
    t.observed.emplace(id, true_time_preference(synth.corpus, q));
    t.planted.emplace(id, synth.planted[static_cast<std::size_t>(synth.topic_of[q])]
                                       [static_cast<std::size_t>(synth.corpus.slice_of(q))]);
  }
  return t;
}

void save_planted_truth(const SynthCorpus& synth, std::span<const PaperIndex> papers,
                        const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  for (PaperIndex p : papers) {
    nlohmann::json doc;
    doc["id"] = synth.corpus.paper(p).id;
    doc["topic"] = synth.topic_of[p];
    doc["planted"] = synth.planted[static_cast<std::size_t>(synth.topic_of[p])]
                                  [static_cast<std::size_t>(synth.corpus.slice_of(p))].probs;
    if (!synth.corpus.paper(p).references.empty())
      doc["observed"] = true_time_preference(synth.corpus, p).probs;
    out << doc.dump() << '\n';
  }
}

}  // namespace citetime
