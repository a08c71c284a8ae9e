#ifndef FSTAG_CORPUS_HPP_
#define FSTAG_CORPUS_HPP_

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace fstag {

// One token of a hand-tagged corpus. class_sym and reduced_sym start
// empty and are filled by the training pipeline (class annotation,
// then T1 annotation).
struct TaggedToken {
  std::string word;
  std::string tag;
  std::string class_sym;
  std::string reduced_sym;
};

using Sentence = std::vector<TaggedToken>;

struct TaggedCorpus {
  std::vector<Sentence> sentences;
  // Observed tags in first-seen order.
  std::vector<std::string> tagset;

  std::size_t token_count() const;
};

// Reads the two-column corpus format: one `word<TAB>tag` pair per line,
// blank line between sentences, UTF-8, tags free of whitespace.
// Throws DataError on I/O failure, on a line with a column count other
// than two (the message names the line number), and on an empty corpus.
TaggedCorpus load_corpus(const std::string& path);

// Same parser over an already-open stream; `source_name` is used in
// error messages.
TaggedCorpus parse_corpus(std::istream& in, const std::string& source_name);

// Writes the same two-column format back out (no class annotations).
void write_corpus_file(const TaggedCorpus& corpus, const std::string& path);

// Relative-frequency estimates of the tag distributions a trained model
// consumes. All distributions are floored and re-normalized: a raw
// estimate p becomes floor + (1 - n*floor) * p over the n-way event
// space, so zero-count events hold exactly `floor` and every
// distribution still sums to one. Conditions that were never observed
// (e.g. a tag that never precedes anything) get the uniform
// distribution.
class CorpusStats {
 public:
  // Canonical (lexicographically sorted) tag order; all tables are
  // indexed in this order.
  std::vector<std::string> tags;
  double floor = 1e-6;

  std::vector<double> p_tag;    // unigram P(t)
  std::vector<double> p_bos;    // P(t | sentence-initial)
  std::vector<double> p_eos;    // P(t | sentence-final)
  std::vector<double> p_prev;   // [prev * T + t] = P(t | preceding tag = prev)
  std::vector<double> p_next;   // [next * T + t] = P(t | following tag = next)

  int index_of(const std::string& tag) const;  // -1 when unknown

  // String-keyed accessors; each throws ContractError on a tag outside
  // the tagset.
  double tag_prob(const std::string& t) const;
  double tag_prob_initial(const std::string& t) const;
  double tag_prob_final(const std::string& t) const;
  double tag_prob_given_prev(const std::string& t, const std::string& prev) const;
  double tag_prob_given_next(const std::string& t, const std::string& next) const;

  std::size_t tag_count() const { return tags.size(); }

  // Rebuilds the symbol index after the tag list was filled in by hand
  // (tests, deserialization).
  void reindex();

 private:
  std::map<std::string, int> index_;
  int require(const std::string& tag) const;
};

// Estimates all five distributions from the corpus. Bigram counts use
// within-sentence adjacent pairs only; sentence-boundary transitions are
// carried by p_bos / p_eos.
// Requires a non-empty corpus and 0 < floor < 1/|tagset|.
CorpusStats compute_stats(const TaggedCorpus& corpus, double floor = 1e-6);

// Distribution of tags over tokens whose surface form occurs exactly
// once in the corpus. Empty map when there are no hapaxes.
std::map<std::string, double> hapax_tag_distribution(const TaggedCorpus& corpus);

}  // namespace fstag

#endif  // FSTAG_CORPUS_HPP_
