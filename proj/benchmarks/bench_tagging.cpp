// Microbenchmarks for the three runtime stages: FST cascade decoding,
// HMM Viterbi decoding, and the word -> class front end. Run manually;
// the relative numbers mirror the `bench` CLI subcommand.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "fstag/corpus_gen.hpp"
#include "fstag/hmm.hpp"
#include "fstag/pipeline.hpp"

namespace {

struct Workload {
  fstag::ModelBundle bundle;
  std::vector<std::vector<std::string>> words;
  std::vector<std::vector<std::int32_t>> fst_ids;
  std::vector<std::vector<std::int32_t>> hmm_ids;
  std::size_t tokens = 0;
};

const Workload& workload() {
  static const Workload instance = [] {
    Workload w;
    fstag::SyntheticCorpusConfig config;
    config.seed = 7;
    config.train_tokens = 20000;
    config.test_tokens = 5000;
    const auto split = fstag::generate_synthetic_split(config);
    w.bundle = fstag::train(split.train, fstag::Hyperparams{}).bundle;

    const fstag::Tagger tagger(w.bundle);
    for (const auto& sent : split.test.sentences) {
      std::vector<std::string> words;
      words.reserve(sent.size());
      for (const auto& tok : sent) words.push_back(tok.word);
      auto ids = tagger.class_ids(words);
      std::vector<std::int32_t> hmm_ids(ids.size());
      for (std::size_t i = 0; i < ids.size(); ++i)
        hmm_ids[i] = w.bundle.hmm.class_symbols.find(
            w.bundle.t1.input_alphabet.name(ids[i]));
      w.tokens += ids.size();
      w.words.push_back(std::move(words));
      w.fst_ids.push_back(std::move(ids));
      w.hmm_ids.push_back(std::move(hmm_ids));
    }
    return w;
  }();
  return instance;
}

void BM_FstDecode(benchmark::State& state) {
  const auto& w = workload();
  const fstag::Tagger tagger(w.bundle);
  for (auto _ : state)
    for (const auto& ids : w.fst_ids) {
      auto path = tagger.decode(ids);
      benchmark::DoNotOptimize(path);
    }
  state.SetItemsProcessed(static_cast<std::int64_t>(w.tokens) *
                          state.iterations());
}
BENCHMARK(BM_FstDecode);

void BM_HmmDecode(benchmark::State& state) {
  const auto& w = workload();
  for (auto _ : state)
    for (const auto& ids : w.hmm_ids) {
      auto path = fstag::viterbi(w.bundle.hmm, ids);
      benchmark::DoNotOptimize(path);
    }
  state.SetItemsProcessed(static_cast<std::int64_t>(w.tokens) *
                          state.iterations());
}
BENCHMARK(BM_HmmDecode);

void BM_LexiconLookup(benchmark::State& state) {
  const auto& w = workload();
  const fstag::Tagger tagger(w.bundle);
  for (auto _ : state)
    for (const auto& words : w.words) {
      auto ids = tagger.class_ids(words);
      benchmark::DoNotOptimize(ids);
    }
  state.SetItemsProcessed(static_cast<std::int64_t>(w.tokens) *
                          state.iterations());
}
BENCHMARK(BM_LexiconLookup);

}  // namespace

BENCHMARK_MAIN();
