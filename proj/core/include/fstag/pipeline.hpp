#ifndef FSTAG_PIPELINE_HPP_
#define FSTAG_PIPELINE_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fstag/classes.hpp"
#include "fstag/corpus.hpp"
#include "fstag/hmm.hpp"
#include "fstag/transducer.hpp"

namespace fstag {

struct Hyperparams {
  double tau = 0.1;    // pair-list reduction ratio threshold
  double theta = 0.98;  // clustering cosine-similarity threshold
  int m = 3;           // tags kept in the unknown-word class
  int suffix_len = 4;  // longest suffix the guesser records
  int min_suffix_count = 3;  // word types required to keep a suffix
  double floor = 1e-6;  // probability floor for all estimates
};

// Everything needed to tag: the minimized cascade, the word front end
// shared by the FST and HMM taggers, the statistics and inventories the
// machines were built from, and training metadata.
struct ModelBundle {
  Hyperparams params;
  CorpusStats stats;
  ClassInventory classes;   // includes the unknown-word class (last)
  ReducedInventory reduced;  // re-estimated vectors
  ClassLexicon lexicon;
  SuffixGuesser guesser;
  AmbiguityClass unknown;
  bool unknown_from_global = false;
  SequentialTransducer t1;  // minimized, left-to-right
  SequentialTransducer t2;  // minimized, right-to-left
  HmmModel hmm;             // baseline sharing the same front end
  std::uint64_t corpus_checksum = 0;
  std::string corpus_name;

  // Checks the cross-component invariants: T1's input alphabet covers
  // every lexicon/guesser/unknown class symbol, and T2's input alphabet
  // equals T1's output alphabet. Throws ContractError on violation.
  void check_consistency() const;
};

struct TrainResult {
  ModelBundle bundle;
  // Pre-minimization machines, kept for equivalence checks against the
  // arc-by-arc construction procedure.
  SequentialTransducer t1_raw;
  SequentialTransducer t2_raw;
  // Reduced inventory as clustered, before corpus re-estimation.
  ReducedInventory reduced_clustered;
  // Reduced classes never emitted by T1 on the training corpus.
  std::vector<std::string> reduced_unobserved;
  std::size_t corpus_tokens = 0;
  std::size_t corpus_sentences = 0;
};

// Runs the full training stack in order: statistics, class inventory and
// annotation, unknown-word class, subclass enumeration, clustering, T1,
// reduced-class annotation, vector re-estimation, T2, minimization, HMM
// baseline. Any stage failure is rethrown with the stage name prefixed.
// The tag-context statistics after re-estimation are the input statistics
// unchanged: they condition on gold tags only, which the reduced-class
// annotation does not touch.
TrainResult train(const TaggedCorpus& corpus, const Hyperparams& params);

// Convenience wrapper: loads the corpus, records its checksum and name
// in the bundle.
TrainResult train_file(const std::string& corpus_path,
                       const Hyperparams& params);

// The runtime tagging cascade. Holds a pointer to the bundle, which
// must outlive the tagger; one tagger may be shared by any number of
// threads (read-only). Construction compiles both machines into dense
// state-by-input transition tables, so decoding is two table walks per
// sentence; the realized function is exactly the machines'.
class Tagger {
 public:
  explicit Tagger(const ModelBundle& bundle);

  // Full path: words -> class symbols -> reduced classes -> tags.
  std::vector<std::string> tag_sentence(
      const std::vector<std::string>& words) const;

  // Front end only: words -> T1 input ids via lexicon, lowercase
  // fallback, guesser, unknown class.
  std::vector<std::int32_t> class_ids(
      const std::vector<std::string>& words) const;

  // Disambiguation only: T1 input ids -> tag ids through both machines.
  std::vector<std::int32_t> decode(
      std::span<const std::int32_t> class_ids) const;

  const std::string& tag_name(std::int32_t id) const;
  const std::string& class_symbol(std::int32_t id) const;

 private:
  // One (output, destination) cell per (state, input); dst < 0 marks a
  // missing arc, which only a hand-built or corrupt machine can have.
  struct Cell {
    std::int32_t output = -1;
    std::int32_t dst = -1;
  };

  const ModelBundle* bundle_;
  std::vector<Cell> t1_table_;
  std::vector<Cell> t2_table_;
  std::int32_t t1_inputs_ = 0;
  std::int32_t t2_inputs_ = 0;
};

// Tags sentences concurrently with `workers` threads (values < 2 mean
// sequential); output order matches input order regardless of the
// worker count.
std::vector<std::vector<std::string>> tag_sentences(
    const Tagger& tagger,
    const std::vector<std::vector<std::string>>& sentences, int workers);

struct EvalReport {
  std::size_t token_count = 0;
  std::size_t sentence_count = 0;
  std::size_t correct_count = 0;
  double accuracy = 0.0;  // percent
  // (gold tag, predicted tag) -> count, off-diagonal entries only.
  std::map<std::pair<std::string, std::string>, std::size_t> confusion;
  double words_per_sec = 0.0;  // median over the timed runs
  double wall_time_sec = 0.0;  // total time across all timed runs
  int timed_runs = 0;
};

// Token-level accuracy of the cascade against gold tags, with tagging
// throughput measured as the median of `timing_runs` >= 3 timed passes.
EvalReport evaluate(const ModelBundle& bundle, const TaggedCorpus& gold,
                    int timing_runs = 3);

struct BenchReport {
  std::size_t token_count = 0;  // tokens per timed pass
  int timed_runs = 0;
  double fst_tokens_per_sec = 0.0;   // decode only, median
  double hmm_tokens_per_sec = 0.0;   // decode only, median
  double lookup_tokens_per_sec = 0.0;  // lexicon front end, median
  double speed_ratio = 0.0;          // fst / hmm
  double fst_accuracy = 0.0;         // percent, on the gold corpus
  double hmm_accuracy = 0.0;         // percent
};

// Decode-only throughput comparison over the same token stream. The
// word -> class front end runs once outside the timed region and is
// timed separately; the corpus is repeated until each pass covers at
// least `min_tokens` tokens.
BenchReport run_bench(const ModelBundle& bundle, const HmmModel& hmm,
                      const TaggedCorpus& corpus,
                      std::size_t min_tokens = 100000, int runs = 3);

// Bundle directory layout: manifest.txt, stats.txt, classes.txt,
// reduced.txt, lexicon.txt, guesser.txt, t1.fst, t2.fst, t1.txt,
// t2.txt, hmm.txt. Writing is deterministic byte-for-byte given an
// identical bundle.
void save_bundle(const ModelBundle& bundle, const std::string& dir);
ModelBundle load_bundle(const std::string& dir);

// FNV-1a 64-bit hash, used to fingerprint training corpora.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);
std::uint64_t checksum_file(const std::string& path);

}  // namespace fstag

#endif  // FSTAG_PIPELINE_HPP_
