#ifndef FSTAG_CORPUS_GEN_HPP_
#define FSTAG_CORPUS_GEN_HPP_

#include <cstdint>
#include <cstddef>

#include "fstag/corpus.hpp"

namespace fstag {

// Parameters of the synthetic corpus generator backing the demo
// walkthrough and the scaled-down relative experiments.
struct SyntheticCorpusConfig {
  std::uint64_t seed = 1;
  std::size_t train_tokens = 20000;
  std::size_t test_tokens = 20000;
};

struct SyntheticSplit {
  TaggedCorpus train;
  TaggedCorpus test;
};

// Deterministically generates two disjoint corpora from one underlying
// language model: a bigram Markov chain over ten tags, Zipf-distributed
// per-tag vocabularies with tag-typical suffixes, a controlled share of
// two- and three-tag ambiguous words with varied tag skews, and a long
// rare-word tail (hapaxes in train, unseen words in test). The same
// seed always produces byte-identical corpora; train and test share the
// vocabulary model but no sentences.
SyntheticSplit generate_synthetic_split(const SyntheticCorpusConfig& config);

}  // namespace fstag

#endif  // FSTAG_CORPUS_GEN_HPP_
