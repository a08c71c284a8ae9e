#ifndef FSTAG_HMM_HPP_
#define FSTAG_HMM_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fstag/corpus.hpp"
#include "fstag/transducer.hpp"

namespace fstag {

// Class-based bigram HMM used as the search baseline: hidden states are
// tags, observations are ambiguity-class symbols. All rows are floored
// the same way as CorpusStats, so every probability is strictly
// positive and log-space decoding never sees -inf.
struct HmmModel {
  // Canonical (lexicographically sorted) tag order.
  std::vector<std::string> tags;
  // Observation alphabet; ids index the emission columns.
  SymbolTable class_symbols;
  double floor = 1e-6;

  // Transition matrix with T+1 rows and T+1 columns. Row 0 conditions
  // on the sentence start, row 1+i on tags[i]; column j < T is tags[j]
  // and column T is the sentence end. Every row sums to one.
  std::vector<double> trans;
  // Emission matrix, T rows by |class_symbols| columns: P(class | tag).
  std::vector<double> emit;

  // Log copies of the tables, filled in by finalize(); the decoder
  // reads only these.
  std::vector<double> log_trans;
  std::vector<double> log_emit;

  std::size_t tag_count() const { return tags.size(); }

  // P(tag t | previous tag prev); prev == -1 means sentence start,
  // t == tag_count() means sentence end.
  double transition(int prev, int t) const;
  double emission(int t, int cls) const;

  // Recomputes the log tables from trans/emit. Must be called after the
  // probability tables change (training, deserialization).
  void finalize();

  int tag_index(const std::string& tag) const;  // -1 when unknown
};

// Estimates the HMM from a corpus whose tokens carry class_sym
// annotations. `class_symbols` fixes the observation alphabet: symbols
// never observed (e.g. the unknown-word class on a fully known corpus)
// still receive floor emission mass. A token class outside the alphabet
// raises DataError. Requires 0 < floor < 1/(|tags|+1) and
// floor < 1/|class_symbols|.
HmmModel train_hmm(const TaggedCorpus& corpus,
                   const std::vector<std::string>& class_symbols,
                   double floor = 1e-6);

// Most probable tag-id sequence for a class-id sequence, in log space.
// Score comparisons use strict improvement over tags in canonical
// order, so among equally probable sequences the decoder returns the
// one whose tags are lexicographically smallest when compared from the
// last position backwards.
std::vector<std::int32_t> viterbi(const HmmModel& m,
                                  std::span<const std::int32_t> classes);

// String wrapper around viterbi; throws DataError on a class symbol
// outside the model's alphabet.
std::vector<std::string> viterbi_tags(const HmmModel& m,
                                      const std::vector<std::string>& classes);

// Deterministic text serialization (round-trippable doubles).
void write_hmm_file(const HmmModel& m, const std::string& path);
HmmModel read_hmm_file(const std::string& path);

}  // namespace fstag

#endif  // FSTAG_HMM_HPP_
