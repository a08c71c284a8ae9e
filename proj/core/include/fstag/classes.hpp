#ifndef FSTAG_CLASSES_HPP_
#define FSTAG_CLASSES_HPP_

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fstag/corpus.hpp"

namespace fstag {

// Classes with more tags than this are rejected by
// enumerate_subclasses (2^12 - 1 = 4095 subsets).
inline constexpr int kMaxSubclassTags = 12;

// Symbol assigned to the class of words unseen in both lexicon and
// guesser. Deliberately outside the "[...]" namespace of derived class
// symbols so it can never collide with one.
inline constexpr const char* kUnknownClassSymbol = "<UNKNOWN>";

// A set of tags a group of words can occur with, plus the conditional
// probability of each tag given the class.
struct AmbiguityClass {
  std::vector<std::string> tags;  // unique, lexicographically sorted
  std::vector<double> probs;      // aligned with tags, sums to 1
  std::string symbol;             // "[T1 T2 ...]", or a reserved symbol

  int index_of(const std::string& tag) const;  // -1 when absent
  double prob_of(const std::string& tag) const;  // throws ContractError
};

// A subset of a parent class's tags carrying the parent's un-normalized
// probability entries.
struct Subclass {
  std::vector<std::string> tags;
  std::vector<double> raw_probs;
};

// A cluster of same-tag-list subclasses: the tag list plus the
// re-normalized centroid. `variant` distinguishes clusters that share a
// tag list.
struct ReducedAmbiguityClass {
  std::vector<std::string> tags;
  std::vector<double> probs;
  int variant = 1;
  std::string symbol;  // "[T1 T2 ...]_R_k"

  int index_of(const std::string& tag) const;
  double prob_of(const std::string& tag) const;
};

struct ClassInventory {
  std::vector<AmbiguityClass> classes;

  void add(AmbiguityClass cls);
  const AmbiguityClass* find(const std::string& symbol) const;
  std::size_t size() const { return classes.size(); }

 private:
  std::map<std::string, int> by_symbol_;
};

struct ReducedInventory {
  std::vector<ReducedAmbiguityClass> classes;

  void add(ReducedAmbiguityClass cls);
  const ReducedAmbiguityClass* find(const std::string& symbol) const;
  // Indices of the variants sharing `tags`, in variant order; empty
  // when the tag list is unknown.
  std::span<const int> variants_of(const std::vector<std::string>& tags) const;
  std::size_t size() const { return classes.size(); }

 private:
  std::map<std::string, int> by_symbol_;
  std::map<std::vector<std::string>, std::vector<int>> by_tags_;
};

// word -> class symbol. Lookup policy (exact, then ASCII-lowercased) is
// applied by lookup_class, not stored here.
struct ClassLexicon {
  std::map<std::string, std::string> word_to_symbol;

  const std::string* find(const std::string& word) const;
};

// Longest-suffix majority-class table for out-of-lexicon words.
struct SuffixGuesser {
  int max_len = 4;
  std::map<std::string, std::string> suffix_to_symbol;

  // Longest matching suffix, or nullptr when nothing matches.
  const std::string* guess(const std::string& word) const;
};

// Canonical symbol for a tag list: "[" + tags joined by one space + "]".
std::string class_symbol_for(const std::vector<std::string>& tags);

// Groups word types by the set of tags they occur with; one class per
// distinct tag set, with probs = relative tag frequencies over all
// tokens of the class. The lexicon maps every word type to its class
// symbol. Inventory is sorted by symbol.
std::pair<ClassInventory, ClassLexicon> build_class_inventory(
    const TaggedCorpus& corpus);

// All 2^n - 1 non-empty tag subsets of `cls`, raw_probs copied from the
// parent entries. Subsets are emitted in bitmask order over the
// canonical tag order. Throws ContractError when the class has more
// than max_tags tags.
std::vector<Subclass> enumerate_subclasses(const AmbiguityClass& cls,
                                           int max_tags = kMaxSubclassTags);

// u.v / (|u||v|). Throws ContractError on a zero vector or length
// mismatch.
double cosine(std::span<const double> u, std::span<const double> v);

// Agglomerative clustering of the subclasses within each tag-list
// group: repeatedly merge the pair of clusters whose centroids
// (unweighted mean over distinct member vectors) are most cosine-similar,
// while that similarity is >= theta. Each final cluster becomes one
// ReducedAmbiguityClass with probs = the re-normalized centroid.
// Variants are numbered per group in descending order of the first
// tag's probability.
ReducedInventory cluster_subclasses(const std::vector<Subclass>& subclasses,
                                    double theta);

struct UnknownClassResult {
  AmbiguityClass cls;           // symbol = kUnknownClassSymbol
  bool from_global_tags = false;  // true when no hapaxes existed
};

// Class for unknown words: the m most frequent tags among hapax tokens
// with re-normalized hapax frequencies. Falls back to the m globally
// most frequent tags (per stats.p_tag) when the corpus has no hapaxes.
UnknownClassResult unknown_word_class(
    const std::map<std::string, double>& hapax_distribution,
    const CorpusStats& stats, int m);

// For every suffix of length 1..max_suffix_len shared by at least
// min_suffix_count word types, records the majority class symbol among
// those types (ties to the lexicographically first symbol).
SuffixGuesser build_guesser(const TaggedCorpus& corpus,
                            const ClassLexicon& lexicon, int max_suffix_len,
                            int min_suffix_count = 3);

// Total lookup: exact lexicon match, else ASCII-lowercase lexicon
// match, else guesser, else the unknown class symbol.
std::string lookup_class(const std::string& word, const ClassLexicon& lexicon,
                         const SuffixGuesser& guesser,
                         const AmbiguityClass& unknown);

struct ReestimateResult {
  ReducedInventory inventory;
  // Symbols never emitted by T1 on the corpus; their vectors were kept.
  std::vector<std::string> unobserved;
};

// Replaces each reduced class's probs with the floored relative
// frequencies of gold tags among tokens annotated with that class.
// Tokens whose reduced_sym is missing from the inventory raise
// DataError.
ReestimateResult reestimate_reduced_vectors(const TaggedCorpus& annotated,
                                            const ReducedInventory& inventory,
                                            double floor);

}  // namespace fstag

#endif  // FSTAG_CLASSES_HPP_
