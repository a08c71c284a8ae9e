#include "fstag/corpus_gen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iterator>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fstag/error.hpp"

namespace fstag {

namespace {

// All sampling goes through this wrapper: mt19937_64 output is fully
// specified by the standard, and the derived draws below avoid
// std::uniform_*_distribution, whose results vary across library
// implementations. Same seed, same stream, everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t below(std::uint64_t n) { return gen_() % n; }

  // Uniform double in [0, 1) with 53 random bits.
  double unit() {
    return static_cast<double>(gen_() >> 11) * (1.0 / 9007199254740992.0);
  }

  // Index into a cumulative-weight vector.
  std::size_t weighted(const std::vector<double>& cumulative) {
    const double x = unit() * cumulative.back();
    const auto it =
        std::lower_bound(cumulative.begin(), cumulative.end(), x);
    return std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative.begin()),
        cumulative.size() - 1);
  }

 private:
  std::mt19937_64 gen_;
};

enum Tag : int {
  kAdj,
  kAdv,
  kAux,
  kDet,
  kNoun,
  kNum,
  kPrep,
  kPron,
  kPunct,
  kVerb,
  kTagCount
};

constexpr const char* kTagNames[kTagCount] = {
    "ADJ", "ADV", "AUX", "DET", "NOUN",
    "NUM", "PREP", "PRON", "PUNCT", "VERB"};

std::vector<double> cumulative_of(const std::vector<double>& weights) {
  std::vector<double> cum(weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    total += weights[i];
    cum[i] = total;
  }
  return cum;
}

std::vector<double> zipf_cumulative(std::size_t n, double exponent) {
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i)
    weights[i] = 1.0 / std::pow(static_cast<double>(i + 1), exponent);
  return cumulative_of(weights);
}

std::string make_base(Rng& rng, int syllables) {
  static constexpr const char* kSyllables[] = {
      "ba", "be", "bo", "da", "de", "du", "ga", "go", "ka", "ke",
      "ki", "la", "le", "lo", "ma", "me", "mi", "mo", "na", "ne",
      "no", "pa", "pe", "po", "ra", "re", "ri", "ro", "sa", "se",
      "so", "ta", "te", "ti", "to", "va", "ve", "vo", "za", "zu"};
  std::string word;
  for (int i = 0; i < syllables; ++i)
    word += kSyllables[rng.below(std::size(kSyllables))];
  return word;
}

std::string fresh_word(Rng& rng, std::set<std::string>& used, int min_syllables,
                       int max_syllables, const std::vector<std::string>& suffixes,
                       double suffix_prob) {
  for (;;) {
    const auto syllables =
        min_syllables + static_cast<int>(rng.below(
                            static_cast<std::uint64_t>(max_syllables) -
                            static_cast<std::uint64_t>(min_syllables) + 1));
    std::string word = make_base(rng, syllables);
    if (!suffixes.empty() && rng.unit() < suffix_prob)
      word += suffixes[rng.below(suffixes.size())];
    if (used.insert(word).second) return word;
  }
}

struct AmbiguousWord {
  std::string word;
  // Per-tag sampling weight within each constituent tag's pool.
  double weight = 0.0;
};

struct TagPool {
  std::vector<std::string> words;  // unambiguous, Zipf rank order
  std::vector<double> word_cum;
  std::vector<AmbiguousWord> ambiguous;
  std::vector<double> ambiguous_cum;
  double ambiguous_share = 0.0;
};

struct LanguageModel {
  std::array<TagPool, kTagCount> pools;
  std::vector<double> start_cum;
  std::array<std::vector<double>, kTagCount> trans_cum;
};

void add_ambiguous_group(Rng& rng, std::set<std::string>& used,
                         LanguageModel& model,
                         const std::vector<int>& member_tags,
                         std::size_t count) {
  for (std::size_t j = 0; j < count; ++j) {
    const std::string word = fresh_word(rng, used, 2, 3, {}, 0.0);
    std::vector<double> weights(member_tags.size());
    if (member_tags.size() == 2) {
      // Cycle through heavy / even / light skews with a little jitter so
      // clustering sees several distinct probability vectors per shape.
      static constexpr double kBuckets[3] = {0.8, 0.5, 0.2};
      double u = kBuckets[j % 3] + (rng.unit() - 0.5) * 0.1;
      u = std::clamp(u, 0.05, 0.95);
      weights[0] = u;
      weights[1] = 1.0 - u;
    } else {
      double total = 0.0;
      for (auto& w : weights) {
        w = 0.1 + rng.unit();
        total += w;
      }
      for (auto& w : weights) w /= total;
    }
    for (std::size_t k = 0; k < member_tags.size(); ++k)
      model.pools[static_cast<std::size_t>(member_tags[k])].ambiguous.push_back(
          {word, weights[k]});
  }
}

LanguageModel build_language_model(Rng& rng) {
  LanguageModel model;

  std::vector<double> start(kTagCount, 0.0);
  start[kDet] = 0.30;
  start[kPron] = 0.16;
  start[kNoun] = 0.20;
  start[kAdv] = 0.08;
  start[kAdj] = 0.05;
  start[kPrep] = 0.07;
  start[kNum] = 0.05;
  start[kAux] = 0.04;
  start[kVerb] = 0.05;
  model.start_cum = cumulative_of(start);

  std::array<std::array<double, kTagCount>, kTagCount> trans{};
  const auto row = [&](int from, std::initializer_list<std::pair<int, double>>
                                     entries) {
    for (const auto& [to, p] : entries) trans[static_cast<std::size_t>(from)]
                                             [static_cast<std::size_t>(to)] = p;
  };
  row(kDet, {{kNoun, 0.58}, {kAdj, 0.30}, {kNum, 0.08}, {kAdv, 0.04}});
  row(kAdj, {{kNoun, 0.62}, {kAdj, 0.14}, {kPrep, 0.09}, {kPunct, 0.08},
             {kVerb, 0.07}});
  row(kNoun, {{kVerb, 0.28}, {kAux, 0.14}, {kPrep, 0.20}, {kPunct, 0.21},
              {kNoun, 0.11}, {kAdv, 0.06}});
  row(kVerb, {{kDet, 0.34}, {kPrep, 0.16}, {kPron, 0.09}, {kNoun, 0.11},
              {kAdv, 0.12}, {kPunct, 0.13}, {kAdj, 0.05}});
  row(kAux, {{kVerb, 0.58}, {kAdv, 0.16}, {kDet, 0.11}, {kPron, 0.05},
             {kAdj, 0.10}});
  row(kAdv, {{kVerb, 0.34}, {kAdj, 0.24}, {kAdv, 0.09}, {kPunct, 0.17},
             {kPrep, 0.16}});
  row(kPrep, {{kDet, 0.46}, {kNoun, 0.34}, {kNum, 0.10}, {kPron, 0.10}});
  row(kPron, {{kVerb, 0.52}, {kAux, 0.28}, {kAdv, 0.10}, {kPunct, 0.10}});
  row(kNum, {{kNoun, 0.68}, {kPunct, 0.16}, {kPrep, 0.16}});
  row(kPunct, {{kDet, 0.30}, {kPron, 0.20}, {kNoun, 0.20}, {kAdv, 0.10},
               {kPrep, 0.10}, {kVerb, 0.10}});
  for (int t = 0; t < kTagCount; ++t)
    model.trans_cum[static_cast<std::size_t>(t)] = cumulative_of(
        {trans[static_cast<std::size_t>(t)].begin(),
         trans[static_cast<std::size_t>(t)].end()});

  std::set<std::string> used;
  const auto fill_pool = [&](int tag, std::size_t size, int min_syllables,
                             int max_syllables,
                             std::vector<std::string> suffixes,
                             double suffix_prob, double zipf_exponent) {
    TagPool& pool = model.pools[static_cast<std::size_t>(tag)];
    pool.words.reserve(size);
    for (std::size_t i = 0; i < size; ++i)
      pool.words.push_back(fresh_word(rng, used, min_syllables, max_syllables,
                                      suffixes, suffix_prob));
    pool.word_cum = zipf_cumulative(size, zipf_exponent);
  };

  fill_pool(kNoun, 1400, 2, 3, {"tion", "ness", "ment", "ia"}, 0.8, 1.08);
  fill_pool(kVerb, 900, 2, 3, {"ize", "ate", "ify"}, 0.8, 1.08);
  fill_pool(kAdj, 700, 2, 3, {"ous", "ful", "ive", "al"}, 0.8, 1.08);
  fill_pool(kAdv, 400, 2, 3, {"ly"}, 0.9, 1.05);
  fill_pool(kDet, 12, 1, 2, {}, 0.0, 0.9);
  fill_pool(kPrep, 25, 1, 2, {}, 0.0, 0.95);
  fill_pool(kPron, 18, 1, 2, {}, 0.0, 0.9);
  fill_pool(kAux, 14, 1, 2, {}, 0.0, 0.9);

  // Numerals: digit strings, so the guesser picks up digit suffixes.
  {
    TagPool& pool = model.pools[kNum];
    std::set<std::string> seen;
    while (pool.words.size() < 80) {
      const auto digits = 1 + rng.below(4);
      std::string num;
      num += static_cast<char>('1' + rng.below(9));
      for (std::uint64_t d = 1; d < digits; ++d)
        num += static_cast<char>('0' + rng.below(10));
      if (seen.insert(num).second) pool.words.push_back(num);
    }
    pool.word_cum = zipf_cumulative(pool.words.size(), 1.0);
  }

  {
    TagPool& pool = model.pools[kPunct];
    pool.words = {",", ";", "-"};
    pool.word_cum = cumulative_of({0.75, 0.15, 0.10});
  }

  add_ambiguous_group(rng, used, model, {kNoun, kVerb}, 130);
  add_ambiguous_group(rng, used, model, {kAdj, kNoun}, 90);
  add_ambiguous_group(rng, used, model, {kAdj, kVerb}, 40);
  add_ambiguous_group(rng, used, model, {kAux, kVerb}, 10);
  add_ambiguous_group(rng, used, model, {kDet, kPron}, 6);
  add_ambiguous_group(rng, used, model, {kAdj, kAdv}, 30);
  add_ambiguous_group(rng, used, model, {kAdj, kNoun, kVerb}, 15);

  const auto set_share = [&](int tag, double share) {
    model.pools[static_cast<std::size_t>(tag)].ambiguous_share = share;
  };
  set_share(kNoun, 0.22);
  set_share(kVerb, 0.30);
  set_share(kAdj, 0.30);
  set_share(kAdv, 0.12);
  set_share(kAux, 0.15);
  set_share(kDet, 0.10);
  set_share(kPron, 0.12);

  for (auto& pool : model.pools) {
    if (pool.ambiguous.empty()) continue;
    std::vector<double> weights(pool.ambiguous.size());
    for (std::size_t i = 0; i < pool.ambiguous.size(); ++i)
      weights[i] = pool.ambiguous[i].weight /
                   std::pow(static_cast<double>(i + 1), 0.9);
    pool.ambiguous_cum = cumulative_of(weights);
  }
  return model;
}

const std::string& pick_word(Rng& rng, const TagPool& pool) {
  if (!pool.ambiguous.empty() && rng.unit() < pool.ambiguous_share)
    return pool.ambiguous[rng.weighted(pool.ambiguous_cum)].word;
  return pool.words[rng.weighted(pool.word_cum)];
}

Sentence make_sentence(Rng& rng, const LanguageModel& model) {
  const auto length = 6 + rng.below(16);  // tokens, final period included
  Sentence sent;
  sent.reserve(length);
  int tag = -1;
  for (std::uint64_t i = 0; i + 1 < length; ++i) {
    tag = tag < 0 ? static_cast<int>(rng.weighted(model.start_cum))
                  : static_cast<int>(rng.weighted(
                        model.trans_cum[static_cast<std::size_t>(tag)]));
    TaggedToken tok;
    tok.word = pick_word(rng, model.pools[static_cast<std::size_t>(tag)]);
    tok.tag = kTagNames[tag];
    sent.push_back(std::move(tok));
  }
  TaggedToken period;
  period.word = ".";
  period.tag = kTagNames[kPunct];
  sent.push_back(std::move(period));
  return sent;
}

void fill_corpus(Rng& rng, const LanguageModel& model, std::size_t min_tokens,
                 TaggedCorpus& corpus) {
  std::size_t tokens = 0;
  while (tokens < min_tokens) {
    auto sent = make_sentence(rng, model);
    tokens += sent.size();
    corpus.sentences.push_back(std::move(sent));
  }
  std::set<std::string> seen;
  for (const auto& sent : corpus.sentences)
    for (const auto& tok : sent)
      if (seen.insert(tok.tag).second) corpus.tagset.push_back(tok.tag);
}

}  // namespace

SyntheticSplit generate_synthetic_split(const SyntheticCorpusConfig& config) {
  if (config.train_tokens == 0 || config.test_tokens == 0)
    throw ContractError("token targets must be positive");
  Rng rng(config.seed);
  const auto model = build_language_model(rng);
  SyntheticSplit split;
  fill_corpus(rng, model, config.train_tokens, split.train);
  fill_corpus(rng, model, config.test_tokens, split.test);
  return split;
}

}  // namespace fstag
