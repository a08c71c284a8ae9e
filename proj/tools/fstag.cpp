// Command-line front end: train, tag, eval, bench, gencorpus.
// Exit codes: 0 success, 1 usage error, 2 data/model error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fstag/corpus.hpp"
#include "fstag/corpus_gen.hpp"
#include "fstag/error.hpp"
#include "fstag/hmm.hpp"
#include "fstag/pipeline.hpp"

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt0(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.0f", v);
  return buf;
}

void print_row(const std::string& label, const std::string& value) {
  std::cout << "  " << label;
  for (std::size_t i = label.size(); i < 22; ++i) std::cout << ' ';
  std::cout << value << '\n';
}

void print_header(const std::string& title) {
  std::cout << title << '\n' << std::string(title.size(), '-') << '\n';
}

struct TrainArgs {
  std::string corpus;
  std::string out;
  fstag::Hyperparams params;
};

int run_train(const TrainArgs& args) {
  const auto result = fstag::train_file(args.corpus, args.params);
  fstag::save_bundle(result.bundle, args.out);
  const auto& bundle = result.bundle;

  char checksum[17];
  std::snprintf(checksum, sizeof checksum, "%016llx",
                static_cast<unsigned long long>(bundle.corpus_checksum));

  print_header("Training summary");
  print_row("corpus", bundle.corpus_name);
  print_row("tokens", std::to_string(result.corpus_tokens));
  print_row("sentences", std::to_string(result.corpus_sentences));
  print_row("tags", std::to_string(bundle.stats.tags.size()));
  print_row("ambiguity classes", std::to_string(bundle.classes.size()) +
                                     " (including the unknown-word class)");
  print_row("reduced classes",
            std::to_string(bundle.reduced.size()) + " (" +
                std::to_string(result.reduced_unobserved.size()) +
                " unseen in training)");
  print_row("lexicon entries",
            std::to_string(bundle.lexicon.word_to_symbol.size()));
  print_row("guesser suffixes",
            std::to_string(bundle.guesser.suffix_to_symbol.size()));
  print_row("T1 (minimized)",
            std::to_string(bundle.t1.num_states()) + " states, " +
                std::to_string(bundle.t1.num_arcs()) + " arcs (raw: " +
                std::to_string(result.t1_raw.num_states()) + " states, " +
                std::to_string(result.t1_raw.num_arcs()) + " arcs)");
  print_row("T2 (minimized)",
            std::to_string(bundle.t2.num_states()) + " states, " +
                std::to_string(bundle.t2.num_arcs()) + " arcs (raw: " +
                std::to_string(result.t2_raw.num_states()) + " states, " +
                std::to_string(result.t2_raw.num_arcs()) + " arcs)");
  print_row("bundle", args.out);
  std::cout << '\n';

  std::cout << "corpus_file=" << bundle.corpus_name << '\n'
            << "corpus_checksum=" << checksum << '\n'
            << "corpus_tokens=" << result.corpus_tokens << '\n'
            << "corpus_sentences=" << result.corpus_sentences << '\n'
            << "tag_count=" << bundle.stats.tags.size() << '\n'
            << "class_count=" << bundle.classes.size() << '\n'
            << "reduced_count=" << bundle.reduced.size() << '\n'
            << "reduced_unobserved=" << result.reduced_unobserved.size() << '\n'
            << "lexicon_entries=" << bundle.lexicon.word_to_symbol.size() << '\n'
            << "guesser_suffixes=" << bundle.guesser.suffix_to_symbol.size()
            << '\n'
            << "t1_states=" << bundle.t1.num_states() << '\n'
            << "t1_arcs=" << bundle.t1.num_arcs() << '\n'
            << "t1_raw_states=" << result.t1_raw.num_states() << '\n'
            << "t1_raw_arcs=" << result.t1_raw.num_arcs() << '\n'
            << "t2_states=" << bundle.t2.num_states() << '\n'
            << "t2_arcs=" << bundle.t2.num_arcs() << '\n'
            << "t2_raw_states=" << result.t2_raw.num_states() << '\n'
            << "t2_raw_arcs=" << result.t2_raw.num_arcs() << '\n'
            << "tau=" << fmt(args.params.tau) << '\n'
            << "theta=" << fmt(args.params.theta) << '\n'
            << "m=" << args.params.m << '\n'
            << "suffix_len=" << args.params.suffix_len << '\n'
            << "floor=" << fmt(args.params.floor) << '\n'
            << "out_dir=" << args.out << '\n';
  return 0;
}

int run_tag(const std::string& model_dir, const std::string& input_path,
            int workers) {
  const auto bundle = fstag::load_bundle(model_dir);
  const fstag::Tagger tagger(bundle);

  std::ifstream in(input_path, std::ios::binary);
  if (!in) throw fstag::DataError("cannot open input file: " + input_path);
  std::vector<std::vector<std::string>> sentences;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream words(line);
    std::vector<std::string> sentence;
    std::string word;
    while (words >> word) sentence.push_back(std::move(word));
    if (!sentence.empty()) sentences.push_back(std::move(sentence));
  }

  const auto tagged = fstag::tag_sentences(tagger, sentences, workers);

  std::ios::sync_with_stdio(false);
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    if (s > 0) std::cout << '\n';
    for (std::size_t i = 0; i < sentences[s].size(); ++i)
      std::cout << sentences[s][i] << '\t' << tagged[s][i] << '\n';
  }
  return 0;
}

int run_eval(const std::string& model_dir, const std::string& gold_path) {
  const auto bundle = fstag::load_bundle(model_dir);
  if (fstag::checksum_file(gold_path) == bundle.corpus_checksum)
    std::cerr << "warning: gold corpus has the same checksum as the "
                 "training corpus; accuracy will be optimistic\n";
  const auto gold = fstag::load_corpus(gold_path);
  const auto report = fstag::evaluate(bundle, gold);

  print_header("Evaluation");
  print_row("gold file", gold_path);
  print_row("sentences", std::to_string(report.sentence_count));
  print_row("tokens", std::to_string(report.token_count));
  print_row("correct", std::to_string(report.correct_count));
  print_row("accuracy", fmt2(report.accuracy) + "%");
  print_row("throughput", fmt0(report.words_per_sec) + " words/sec (median of " +
                              std::to_string(report.timed_runs) + " runs)");
  print_row("total tag time", fmt2(report.wall_time_sec) + " s");
  std::cout << '\n';

  std::vector<std::pair<std::pair<std::string, std::string>, std::size_t>>
      confusions(report.confusion.begin(), report.confusion.end());
  std::sort(confusions.begin(), confusions.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });
  print_header("Top confusions (gold -> predicted)");
  if (confusions.empty()) {
    std::cout << "  none\n";
  } else {
    const auto shown = std::min<std::size_t>(confusions.size(), 10);
    for (std::size_t i = 0; i < shown; ++i)
      print_row(confusions[i].first.first + " -> " + confusions[i].first.second,
                std::to_string(confusions[i].second));
  }
  std::cout << '\n';

  std::cout << "gold_file=" << gold_path << '\n'
            << "tokens=" << report.token_count << '\n'
            << "sentences=" << report.sentence_count << '\n'
            << "correct=" << report.correct_count << '\n'
            << "accuracy=" << fmt(report.accuracy) << '\n'
            << "words_per_sec=" << fmt(report.words_per_sec) << '\n'
            << "wall_time_sec=" << fmt(report.wall_time_sec) << '\n'
            << "timed_runs=" << report.timed_runs << '\n';
  return 0;
}

int run_bench(const std::string& model_dir, const std::string& hmm_dir,
              const std::string& corpus_path) {
  const auto bundle = fstag::load_bundle(model_dir);
  const auto hmm_path =
      (std::filesystem::path(hmm_dir) / "hmm.txt").string();
  const auto hmm = fstag::read_hmm_file(hmm_path);
  const auto corpus = fstag::load_corpus(corpus_path);
  const auto report = fstag::run_bench(bundle, hmm, corpus);

  print_header("Benchmark (decode only)");
  print_row("corpus", corpus_path);
  print_row("tokens per pass", std::to_string(report.token_count));
  print_row("timed runs", std::to_string(report.timed_runs) + " (median reported)");
  print_row("FST cascade", fmt0(report.fst_tokens_per_sec) + " tokens/sec");
  print_row("HMM Viterbi", fmt0(report.hmm_tokens_per_sec) + " tokens/sec");
  print_row("speed ratio", fmt2(report.speed_ratio) + "x");
  print_row("lexicon lookup", fmt0(report.lookup_tokens_per_sec) +
                                  " tokens/sec (front end, timed separately)");
  print_row("FST accuracy", fmt2(report.fst_accuracy) + "%");
  print_row("HMM accuracy", fmt2(report.hmm_accuracy) + "%");
  std::cout << '\n';

  std::cout << "corpus_file=" << corpus_path << '\n'
            << "tokens_per_pass=" << report.token_count << '\n'
            << "timed_runs=" << report.timed_runs << '\n'
            << "fst_tokens_per_sec=" << fmt(report.fst_tokens_per_sec) << '\n'
            << "hmm_tokens_per_sec=" << fmt(report.hmm_tokens_per_sec) << '\n'
            << "lookup_tokens_per_sec=" << fmt(report.lookup_tokens_per_sec)
            << '\n'
            << "speed_ratio=" << fmt(report.speed_ratio) << '\n'
            << "fst_accuracy=" << fmt(report.fst_accuracy) << '\n'
            << "hmm_accuracy=" << fmt(report.hmm_accuracy) << '\n';
  return 0;
}

struct GenArgs {
  std::string train_path;
  std::string test_path;
  fstag::SyntheticCorpusConfig config;
};

int run_gencorpus(const GenArgs& args) {
  const auto split = fstag::generate_synthetic_split(args.config);
  fstag::write_corpus_file(split.train, args.train_path);
  fstag::write_corpus_file(split.test, args.test_path);

  print_header("Synthetic corpus");
  print_row("train", args.train_path + " (" +
                         std::to_string(split.train.token_count()) +
                         " tokens, " +
                         std::to_string(split.train.sentences.size()) +
                         " sentences)");
  print_row("test", args.test_path + " (" +
                        std::to_string(split.test.token_count()) + " tokens, " +
                        std::to_string(split.test.sentences.size()) +
                        " sentences)");
  print_row("seed", std::to_string(args.config.seed));
  std::cout << '\n';

  std::cout << "train_file=" << args.train_path << '\n'
            << "train_tokens=" << split.train.token_count() << '\n'
            << "train_sentences=" << split.train.sentences.size() << '\n'
            << "test_file=" << args.test_path << '\n'
            << "test_tokens=" << split.test.token_count() << '\n'
            << "test_sentences=" << split.test.sentences.size() << '\n'
            << "seed=" << args.config.seed << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-state part-of-speech tagger: a two-transducer "
               "cascade trained from a tagged corpus, with an HMM baseline"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd =
      app.add_subcommand("train", "Train a model bundle from a tagged corpus");
  train_cmd->add_option("--corpus", train_args.corpus, "Tagged corpus file")
      ->required();
  train_cmd->add_option("--out", train_args.out, "Bundle output directory")
      ->required();
  train_cmd->add_option("--tau", train_args.params.tau,
                        "Pair-list reduction threshold (0, 1]");
  train_cmd->add_option("--theta", train_args.params.theta,
                        "Clustering cosine-similarity threshold");
  train_cmd->add_option("--m", train_args.params.m,
                        "Tags kept in the unknown-word class");
  train_cmd->add_option("--suffix-len", train_args.params.suffix_len,
                        "Longest suffix the guesser records");
  train_cmd->add_option("--floor", train_args.params.floor,
                        "Probability floor for all estimates");

  std::string tag_model, tag_input;
  int tag_workers = 1;
  auto* tag_cmd = app.add_subcommand(
      "tag", "Tag pre-tokenized text (one sentence per line)");
  tag_cmd->add_option("--model", tag_model, "Model bundle directory")
      ->required();
  tag_cmd->add_option("--input", tag_input, "Input text file")->required();
  tag_cmd->add_option("--workers", tag_workers,
                      "Worker threads (output order is unaffected)");

  std::string eval_model, eval_gold;
  auto* eval_cmd =
      app.add_subcommand("eval", "Score the tagger against a gold corpus");
  eval_cmd->add_option("--model", eval_model, "Model bundle directory")
      ->required();
  eval_cmd->add_option("--gold", eval_gold, "Gold tagged corpus")->required();

  std::string bench_model, bench_hmm, bench_corpus;
  auto* bench_cmd = app.add_subcommand(
      "bench", "Compare FST and HMM decode throughput and accuracy");
  bench_cmd->add_option("--model", bench_model, "Model bundle directory")
      ->required();
  bench_cmd->add_option("--hmm", bench_hmm,
                        "Bundle directory providing hmm.txt")
      ->required();
  bench_cmd->add_option("--corpus", bench_corpus, "Tagged corpus file")
      ->required();

  GenArgs gen_args;
  auto* gen_cmd = app.add_subcommand(
      "gencorpus", "Write a deterministic synthetic train/test corpus pair");
  gen_cmd->add_option("--train", gen_args.train_path, "Train corpus output")
      ->required();
  gen_cmd->add_option("--test", gen_args.test_path, "Test corpus output")
      ->required();
  gen_cmd->add_option("--train-tokens", gen_args.config.train_tokens,
                      "Minimum train tokens");
  gen_cmd->add_option("--test-tokens", gen_args.config.test_tokens,
                      "Minimum test tokens");
  gen_cmd->add_option("--seed", gen_args.config.seed, "Generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  // Flag-range problems are usage errors; corpus- or model-dependent
  // failures below are data errors.
  const auto usage_error = [](const std::string& message) {
    std::cerr << "fstag: " << message << '\n';
    return 1;
  };
  if (train_cmd->parsed()) {
    const auto& p = train_args.params;
    if (!(p.tau > 0.0 && p.tau <= 1.0))
      return usage_error("--tau must lie in (0, 1]");
    if (!(p.theta > 0.0)) return usage_error("--theta must be positive");
    if (p.m < 1) return usage_error("--m must be at least 1");
    if (p.suffix_len < 0)
      return usage_error("--suffix-len must be non-negative");
    if (!(p.floor > 0.0 && p.floor < 1.0))
      return usage_error("--floor must lie in (0, 1)");
  }
  if (tag_cmd->parsed() && tag_workers < 1)
    return usage_error("--workers must be at least 1");
  if (gen_cmd->parsed() &&
      (gen_args.config.train_tokens == 0 || gen_args.config.test_tokens == 0))
    return usage_error("token targets must be positive");

  try {
    if (train_cmd->parsed()) return run_train(train_args);
    if (tag_cmd->parsed()) return run_tag(tag_model, tag_input, tag_workers);
    if (eval_cmd->parsed()) return run_eval(eval_model, eval_gold);
    if (bench_cmd->parsed())
      return run_bench(bench_model, bench_hmm, bench_corpus);
    if (gen_cmd->parsed()) return run_gencorpus(gen_args);
  } catch (const fstag::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
