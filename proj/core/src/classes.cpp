#include "fstag/classes.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>

#include "fstag/error.hpp"

namespace fstag {

namespace {

int find_tag(const std::vector<std::string>& tags, const std::string& tag) {
  const auto it = std::lower_bound(tags.begin(), tags.end(), tag);
  if (it == tags.end() || *it != tag) return -1;
  return static_cast<int>(it - tags.begin());
}

}  // namespace

int AmbiguityClass::index_of(const std::string& tag) const {
  return find_tag(tags, tag);
}

double AmbiguityClass::prob_of(const std::string& tag) const {
  const int id = index_of(tag);
  if (id < 0)
    throw ContractError("tag " + tag + " not in class " + symbol);
  return probs[id];
}

int ReducedAmbiguityClass::index_of(const std::string& tag) const {
  return find_tag(tags, tag);
}

double ReducedAmbiguityClass::prob_of(const std::string& tag) const {
  const int id = index_of(tag);
  if (id < 0)
    throw ContractError("tag " + tag + " not in reduced class " + symbol);
  return probs[id];
}

void ClassInventory::add(AmbiguityClass cls) {
  if (by_symbol_.count(cls.symbol))
    throw DataError("duplicate class symbol: " + cls.symbol);
  by_symbol_[cls.symbol] = static_cast<int>(classes.size());
  classes.push_back(std::move(cls));
}

const AmbiguityClass* ClassInventory::find(const std::string& symbol) const {
  const auto it = by_symbol_.find(symbol);
  return it == by_symbol_.end() ? nullptr : &classes[it->second];
}

void ReducedInventory::add(ReducedAmbiguityClass cls) {
  if (by_symbol_.count(cls.symbol))
    throw DataError("duplicate reduced class symbol: " + cls.symbol);
  by_symbol_[cls.symbol] = static_cast<int>(classes.size());
  by_tags_[cls.tags].push_back(static_cast<int>(classes.size()));
  classes.push_back(std::move(cls));
}

const ReducedAmbiguityClass* ReducedInventory::find(
    const std::string& symbol) const {
  const auto it = by_symbol_.find(symbol);
  return it == by_symbol_.end() ? nullptr : &classes[it->second];
}

std::span<const int> ReducedInventory::variants_of(
    const std::vector<std::string>& tags) const {
  const auto it = by_tags_.find(tags);
  if (it == by_tags_.end()) return {};
  return it->second;
}

const std::string* ClassLexicon::find(const std::string& word) const {
  const auto it = word_to_symbol.find(word);
  return it == word_to_symbol.end() ? nullptr : &it->second;
}

const std::string* SuffixGuesser::guess(const std::string& word) const {
  const int longest = std::min<int>(max_len, static_cast<int>(word.size()));
  for (int len = longest; len >= 1; --len) {
    const auto it = suffix_to_symbol.find(word.substr(word.size() - len));
    if (it != suffix_to_symbol.end()) return &it->second;
  }
  return nullptr;
}

std::string class_symbol_for(const std::vector<std::string>& tags) {
  std::string sym = "[";
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (i) sym += ' ';
    sym += tags[i];
  }
  sym += ']';
  return sym;
}

std::pair<ClassInventory, ClassLexicon> build_class_inventory(
    const TaggedCorpus& corpus) {
  // Tag set per word type, then token counts per (tag set, tag).
  std::map<std::string, std::set<std::string>> word_tags;
  for (const auto& sent : corpus.sentences)
    for (const auto& tok : sent) word_tags[tok.word].insert(tok.tag);

  std::map<std::vector<std::string>, std::map<std::string, double>> class_counts;
  for (const auto& sent : corpus.sentences)
    for (const auto& tok : sent) {
      const auto& tags = word_tags.at(tok.word);
      std::vector<std::string> key(tags.begin(), tags.end());
      class_counts[std::move(key)][tok.tag] += 1.0;
    }

  ClassInventory inventory;
  for (const auto& [tags, counts] : class_counts) {
    AmbiguityClass cls;
    cls.tags = tags;
    cls.probs.reserve(tags.size());
    double total = 0.0;
    for (const auto& [tag, c] : counts) total += c;
    for (const auto& tag : tags) {
      const auto it = counts.find(tag);
      cls.probs.push_back(it == counts.end() ? 0.0 : it->second / total);
    }
    cls.symbol = class_symbol_for(cls.tags);
    inventory.add(std::move(cls));
  }

  ClassLexicon lexicon;
  for (const auto& [word, tags] : word_tags) {
    std::vector<std::string> key(tags.begin(), tags.end());
    lexicon.word_to_symbol[word] = class_symbol_for(key);
  }
  return {std::move(inventory), std::move(lexicon)};
}

std::vector<Subclass> enumerate_subclasses(const AmbiguityClass& cls,
                                           int max_tags) {
  const int n = static_cast<int>(cls.tags.size());
  if (n > max_tags) {
    std::ostringstream msg;
    msg << "class " << cls.symbol << " has " << n
        << " tags, above the subclass-enumeration limit of " << max_tags
        << "; split the class or raise the limit";
    throw ContractError(msg.str());
  }
  std::vector<Subclass> subclasses;
  subclasses.reserve((1u << n) - 1);
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    Subclass sub;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) {
        sub.tags.push_back(cls.tags[i]);
        sub.raw_probs.push_back(cls.probs[i]);
      }
    subclasses.push_back(std::move(sub));
  }
  return subclasses;
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size() || u.empty())
    throw ContractError("cosine: vectors must be non-empty and equal-length");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw ContractError("cosine: zero vector");
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

namespace {

struct Cluster {
  std::vector<std::vector<double>> members;
  std::vector<double> centroid;

  void recompute_centroid() {
    centroid.assign(members.front().size(), 0.0);
    for (const auto& m : members)
      for (std::size_t i = 0; i < m.size(); ++i) centroid[i] += m[i];
    for (auto& c : centroid) c /= static_cast<double>(members.size());
  }
};

std::vector<Cluster> agglomerate(const std::vector<std::vector<double>>& vectors,
                                 double theta) {
  std::vector<Cluster> clusters;
  clusters.reserve(vectors.size());
  for (const auto& v : vectors) {
    Cluster c;
    c.members.push_back(v);
    c.centroid = v;
    clusters.push_back(std::move(c));
  }
  while (clusters.size() > 1) {
    double best = -1.0;
    std::size_t bi = 0, bj = 0;
    // Strict > keeps the lexicographically earliest pair on ties.
    for (std::size_t i = 0; i + 1 < clusters.size(); ++i)
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        const double sim = cosine(clusters[i].centroid, clusters[j].centroid);
        if (sim > best) {
          best = sim;
          bi = i;
          bj = j;
        }
      }
    if (best < theta) break;
    auto& dst = clusters[bi].members;
    auto& src = clusters[bj].members;
    dst.insert(dst.end(), std::make_move_iterator(src.begin()),
               std::make_move_iterator(src.end()));
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
    clusters[bi].recompute_centroid();
  }
  return clusters;
}

}  // namespace

ReducedInventory cluster_subclasses(const std::vector<Subclass>& subclasses,
                                    double theta) {
  if (!(theta > 0.0))
    throw ContractError("cluster_subclasses: theta must be positive");

  // Group by tag list; exact duplicate vectors collapse to one member.
  std::map<std::vector<std::string>, std::set<std::vector<double>>> groups;
  for (const auto& sub : subclasses) groups[sub.tags].insert(sub.raw_probs);

  ReducedInventory inventory;
  for (const auto& [tags, vector_set] : groups) {
    const std::vector<std::vector<double>> vectors(vector_set.begin(),
                                                   vector_set.end());
    auto clusters = agglomerate(vectors, theta);

    std::vector<std::vector<double>> normalized;
    normalized.reserve(clusters.size());
    for (const auto& c : clusters) {
      std::vector<double> p = c.centroid;
      double total = 0.0;
      for (double x : p) total += x;
      for (double& x : p) x /= total;
      normalized.push_back(std::move(p));
    }
    // Variant 1 is the cluster with the highest first-tag probability.
    std::vector<std::size_t> order(normalized.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return normalized[a] > normalized[b];
                     });
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
      ReducedAmbiguityClass r;
      r.tags = tags;
      r.probs = normalized[order[rank]];
      r.variant = static_cast<int>(rank) + 1;
      r.symbol = class_symbol_for(tags) + "_R_" + std::to_string(r.variant);
      inventory.add(std::move(r));
    }
  }
  return inventory;
}

UnknownClassResult unknown_word_class(
    const std::map<std::string, double>& hapax_distribution,
    const CorpusStats& stats, int m) {
  if (m < 1) throw ContractError("unknown_word_class: m must be >= 1");

  std::vector<std::pair<std::string, double>> ranked;
  UnknownClassResult result;
  if (!hapax_distribution.empty()) {
    ranked.assign(hapax_distribution.begin(), hapax_distribution.end());
  } else {
    result.from_global_tags = true;
    for (std::size_t i = 0; i < stats.tags.size(); ++i)
      ranked.emplace_back(stats.tags[i], stats.p_tag[i]);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > static_cast<std::size_t>(m)) ranked.resize(m);

  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double total = 0.0;
  for (const auto& [tag, p] : ranked) total += p;

  AmbiguityClass& cls = result.cls;
  for (const auto& [tag, p] : ranked) {
    cls.tags.push_back(tag);
    cls.probs.push_back(p / total);
  }
  cls.symbol = kUnknownClassSymbol;
  return result;
}

SuffixGuesser build_guesser(const TaggedCorpus& corpus,
                            const ClassLexicon& lexicon, int max_suffix_len,
                            int min_suffix_count) {
  (void)corpus;  // word types come from the lexicon built over it
  SuffixGuesser guesser;
  guesser.max_len = max_suffix_len;
  if (max_suffix_len <= 0) return guesser;

  std::map<std::string, std::map<std::string, int>> suffix_counts;
  for (const auto& [word, symbol] : lexicon.word_to_symbol) {
    const int longest =
        std::min<int>(max_suffix_len, static_cast<int>(word.size()));
    for (int len = 1; len <= longest; ++len)
      ++suffix_counts[word.substr(word.size() - len)][symbol];
  }

  for (const auto& [suffix, counts] : suffix_counts) {
    int total = 0;
    for (const auto& [symbol, c] : counts) total += c;
    if (total < min_suffix_count) continue;
    // Majority class; map order resolves ties to the first symbol.
    const std::string* best_symbol = nullptr;
    int best_count = 0;
    for (const auto& [symbol, c] : counts)
      if (c > best_count) {
        best_count = c;
        best_symbol = &symbol;
      }
    guesser.suffix_to_symbol[suffix] = *best_symbol;
  }
  return guesser;
}

std::string lookup_class(const std::string& word, const ClassLexicon& lexicon,
                         const SuffixGuesser& guesser,
                         const AmbiguityClass& unknown) {
  if (const std::string* sym = lexicon.find(word)) return *sym;
  std::string lowered = word;
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lowered != word)
    if (const std::string* sym = lexicon.find(lowered)) return *sym;
  if (const std::string* sym = guesser.guess(word)) return *sym;
  return unknown.symbol;
}

ReestimateResult reestimate_reduced_vectors(const TaggedCorpus& annotated,
                                            const ReducedInventory& inventory,
                                            double floor) {
  std::map<std::string, std::vector<double>> counts;
  for (const auto& sent : annotated.sentences)
    for (const auto& tok : sent) {
      const ReducedAmbiguityClass* r = inventory.find(tok.reduced_sym);
      if (r == nullptr)
        throw DataError("token annotated with reduced class " +
                        tok.reduced_sym + " absent from the inventory");
      auto [it, inserted] =
          counts.try_emplace(tok.reduced_sym,
                             std::vector<double>(r->tags.size(), 0.0));
      const int id = r->index_of(tok.tag);
      // Gold tags outside the reduced tag list are T1 narrowing errors;
      // they carry no evidence expressible in this vector.
      if (id >= 0) it->second[id] += 1.0;
    }

  ReestimateResult result;
  for (const auto& cls : inventory.classes) {
    ReducedAmbiguityClass updated = cls;
    const auto it = counts.find(cls.symbol);
    double total = 0.0;
    if (it != counts.end())
      for (double c : it->second) total += c;
    if (total > 0.0) {
      const std::size_t n = cls.tags.size();
      const double scale = 1.0 - static_cast<double>(n) * floor;
      for (std::size_t i = 0; i < n; ++i)
        updated.probs[i] = floor + scale * (it->second[i] / total);
    } else {
      result.unobserved.push_back(cls.symbol);
    }
    result.inventory.add(std::move(updated));
  }
  return result;
}

}  // namespace fstag
