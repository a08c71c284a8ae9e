#include "fstag/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "fstag/context.hpp"
#include "fstag/error.hpp"
#include "textio.hpp"

namespace fstag {

namespace {

// Reruns a training stage, tagging any failure with the stage name so
// aborts are attributable.
template <typename Fn>
auto run_stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ContractError& e) {
    throw ContractError(std::string("training stage \"") + name +
                        "\": " + e.what());
  } catch (const DataError& e) {
    throw DataError(std::string("training stage \"") + name +
                    "\": " + e.what());
  }
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  if (n == 0) return 0.0;
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  const auto elapsed = std::chrono::steady_clock::now() - start;
  const double secs =
      std::chrono::duration_cast<std::chrono::duration<double>>(elapsed)
          .count();
  return std::max(secs, 1e-9);
}

// Keeps timed loops observable so the optimizer cannot delete them.
volatile std::uint64_t timing_sink = 0;

}  // namespace

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (const auto b : bytes) {
    hash ^= b;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::uint64_t checksum_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file for checksumming: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return fnv1a64(bytes);
}

void ModelBundle::check_consistency() const {
  const auto& input = t1.input_alphabet;
  for (const auto& [word, sym] : lexicon.word_to_symbol)
    if (input.find(sym) < 0)
      throw ContractError("lexicon class " + sym + " (word \"" + word +
                          "\") is missing from the first machine's alphabet");
  for (const auto& [suffix, sym] : guesser.suffix_to_symbol)
    if (input.find(sym) < 0)
      throw ContractError("guesser class " + sym + " (suffix \"" + suffix +
                          "\") is missing from the first machine's alphabet");
  if (input.find(unknown.symbol) < 0)
    throw ContractError("unknown-word class symbol is missing from the "
                        "first machine's alphabet");
  if (!(t2.input_alphabet == t1.output_alphabet))
    throw ContractError("second machine's input alphabet differs from the "
                        "first machine's output alphabet");
  if (t1.direction != Direction::kLeftToRight)
    throw ContractError("first machine is not left-to-right");
  if (t2.direction != Direction::kRightToLeft)
    throw ContractError("second machine is not right-to-left");
}

TrainResult train(const TaggedCorpus& corpus_in, const Hyperparams& params) {
  if (!(params.tau > 0.0 && params.tau <= 1.0))
    throw ContractError("tau must lie in (0, 1]");
  if (!(params.theta > 0.0))
    throw ContractError("theta must be positive");
  if (params.m < 1) throw ContractError("m must be at least 1");
  if (params.suffix_len < 0)
    throw ContractError("suffix length must be non-negative");
  if (params.min_suffix_count < 1)
    throw ContractError("min suffix count must be at least 1");

  TaggedCorpus corpus = corpus_in;

  auto stats = run_stage("statistics",
                         [&] { return compute_stats(corpus, params.floor); });

  auto inventory_pair = run_stage(
      "class inventory", [&] { return build_class_inventory(corpus); });
  ClassInventory& classes = inventory_pair.first;
  ClassLexicon& lexicon = inventory_pair.second;

  run_stage("class annotation", [&] {
    for (auto& sent : corpus.sentences)
      for (auto& tok : sent) {
        const std::string* sym = lexicon.find(tok.word);
        if (sym == nullptr)
          throw ContractError("training word \"" + tok.word +
                              "\" is missing from its own lexicon");
        tok.class_sym = *sym;
      }
  });

  // The unknown-word class joins the inventory so it takes part in
  // subclass enumeration and gets its own T1 arcs.
  auto unknown_res = run_stage("unknown-word class", [&] {
    return unknown_word_class(hapax_tag_distribution(corpus), stats, params.m);
  });
  classes.add(unknown_res.cls);

  auto subclasses = run_stage("subclass enumeration", [&] {
    std::vector<Subclass> all;
    for (const auto& cls : classes.classes) {
      auto subs = enumerate_subclasses(cls);
      all.insert(all.end(), std::make_move_iterator(subs.begin()),
                 std::make_move_iterator(subs.end()));
    }
    return all;
  });

  auto reduced_clustered = run_stage(
      "clustering", [&] { return cluster_subclasses(subclasses, params.theta); });

  auto t1_raw = run_stage("first machine construction", [&] {
    return build_t1(classes, reduced_clustered, stats, params.tau);
  });

  run_stage("reduced-class annotation", [&] {
    for (auto& sent : corpus.sentences) {
      std::vector<std::string> syms;
      syms.reserve(sent.size());
      for (const auto& tok : sent) syms.push_back(tok.class_sym);
      const auto reduced_syms = apply_ltr(t1_raw, syms);
      for (std::size_t i = 0; i < sent.size(); ++i)
        sent[i].reduced_sym = reduced_syms[i];
    }
  });

  auto reest = run_stage("vector re-estimation", [&] {
    return reestimate_reduced_vectors(corpus, reduced_clustered, params.floor);
  });

  // Tag-context statistics would be re-estimated here, but they
  // condition on gold tags only and the annotation passes changed no
  // gold tag, so the estimates from the first pass are already exact.

  auto t2_raw = run_stage("second machine construction", [&] {
    return build_t2(t1_raw.output_alphabet.symbols(), reest.inventory,
                    stats.tags, stats);
  });

  TrainResult result;
  ModelBundle& bundle = result.bundle;
  bundle.t1 = run_stage("first machine minimization",
                        [&] { return minimize(t1_raw); });
  bundle.t2 = run_stage("second machine minimization",
                        [&] { return minimize(t2_raw); });

  bundle.guesser = run_stage("guesser", [&] {
    return build_guesser(corpus, lexicon, params.suffix_len,
                         params.min_suffix_count);
  });

  bundle.hmm = run_stage("baseline estimation", [&] {
    std::vector<std::string> symbols;
    symbols.reserve(classes.size());
    for (const auto& cls : classes.classes) symbols.push_back(cls.symbol);
    return train_hmm(corpus, symbols, params.floor);
  });

  bundle.params = params;
  bundle.stats = std::move(stats);
  bundle.classes = std::move(classes);
  bundle.reduced = std::move(reest.inventory);
  bundle.lexicon = std::move(lexicon);
  bundle.unknown = std::move(unknown_res.cls);
  bundle.unknown_from_global = unknown_res.from_global_tags;
  bundle.check_consistency();

  result.t1_raw = std::move(t1_raw);
  result.t2_raw = std::move(t2_raw);
  result.reduced_clustered = std::move(reduced_clustered);
  result.reduced_unobserved = std::move(reest.unobserved);
  result.corpus_tokens = corpus.token_count();
  result.corpus_sentences = corpus.sentences.size();
  return result;
}

TrainResult train_file(const std::string& corpus_path,
                       const Hyperparams& params) {
  const auto corpus = load_corpus(corpus_path);
  auto result = train(corpus, params);
  result.bundle.corpus_checksum = checksum_file(corpus_path);
  result.bundle.corpus_name =
      std::filesystem::path(corpus_path).filename().string();
  return result;
}

Tagger::Tagger(const ModelBundle& bundle) : bundle_(&bundle) {
  bundle.check_consistency();
  const auto compile = [](const SequentialTransducer& t,
                          std::vector<Cell>& table, std::int32_t& inputs) {
    inputs = t.input_alphabet.size();
    table.assign(static_cast<std::size_t>(t.num_states()) *
                     static_cast<std::size_t>(inputs),
                 Cell{});
    for (std::int32_t s = 0; s < t.num_states(); ++s)
      for (const auto& arc : t.arcs_from(s))
        table[static_cast<std::size_t>(s) * static_cast<std::size_t>(inputs) +
              static_cast<std::size_t>(arc.input)] = {arc.output, arc.dst};
  };
  compile(bundle.t1, t1_table_, t1_inputs_);
  compile(bundle.t2, t2_table_, t2_inputs_);
}

std::vector<std::int32_t> Tagger::class_ids(
    const std::vector<std::string>& words) const {
  std::vector<std::int32_t> ids(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto sym = lookup_class(words[i], bundle_->lexicon, bundle_->guesser,
                                  bundle_->unknown);
    const auto id = bundle_->t1.input_alphabet.find(sym);
    if (id < 0)
      throw ContractError("class symbol " + sym +
                          " is missing from the first machine's alphabet");
    ids[i] = id;
  }
  return ids;
}

std::vector<std::int32_t> Tagger::decode(
    std::span<const std::int32_t> class_ids) const {
  std::vector<std::int32_t> out(class_ids.size());
  std::int32_t state = bundle_->t1.initial;
  for (std::size_t i = 0; i < class_ids.size(); ++i) {
    const auto id = class_ids[i];
    if (id < 0 || id >= t1_inputs_)
      throw DataError("class id " + std::to_string(id) + " at position " +
                      std::to_string(i) +
                      " is outside the first machine's alphabet");
    const Cell cell =
        t1_table_[static_cast<std::size_t>(state) *
                      static_cast<std::size_t>(t1_inputs_) +
                  static_cast<std::size_t>(id)];
    if (cell.dst < 0)
      throw DataError("no arc from state " + std::to_string(state) +
                      " on symbol " + bundle_->t1.input_alphabet.name(id) +
                      " at position " + std::to_string(i));
    out[i] = cell.output;
    state = cell.dst;
  }
  // The second machine consumes the first machine's output symbols; the
  // bundle invariant makes the two alphabets identical, so the reduced
  // ids in `out` index its table directly, rewritten in place right to
  // left.
  state = bundle_->t2.initial;
  for (std::size_t i = class_ids.size(); i-- > 0;) {
    const Cell cell =
        t2_table_[static_cast<std::size_t>(state) *
                      static_cast<std::size_t>(t2_inputs_) +
                  static_cast<std::size_t>(out[i])];
    if (cell.dst < 0)
      throw DataError("no arc from state " + std::to_string(state) +
                      " on symbol " + bundle_->t2.input_alphabet.name(out[i]) +
                      " at position " + std::to_string(i));
    out[i] = cell.output;
    state = cell.dst;
  }
  return out;
}

std::vector<std::string> Tagger::tag_sentence(
    const std::vector<std::string>& words) const {
  const auto tags = decode(class_ids(words));
  std::vector<std::string> out(tags.size());
  for (std::size_t i = 0; i < tags.size(); ++i)
    out[i] = bundle_->t2.output_alphabet.name(tags[i]);
  return out;
}

const std::string& Tagger::tag_name(std::int32_t id) const {
  return bundle_->t2.output_alphabet.name(id);
}

const std::string& Tagger::class_symbol(std::int32_t id) const {
  return bundle_->t1.input_alphabet.name(id);
}

std::vector<std::vector<std::string>> tag_sentences(
    const Tagger& tagger,
    const std::vector<std::vector<std::string>>& sentences, int workers) {
  std::vector<std::vector<std::string>> out(sentences.size());
  const auto thread_count =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)),
                            sentences.size());
  if (thread_count < 2) {
    for (std::size_t i = 0; i < sentences.size(); ++i)
      out[i] = tagger.tag_sentence(sentences[i]);
    return out;
  }

  std::atomic<std::size_t> cursor{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto work = [&] {
    try {
      for (;;) {
        const auto i = cursor.fetch_add(1);
        if (i >= sentences.size()) return;
        out[i] = tagger.tag_sentence(sentences[i]);
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(thread_count);
  for (std::size_t i = 0; i < thread_count; ++i) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

namespace {

std::vector<std::vector<std::string>> word_lists_of(const TaggedCorpus& corpus) {
  std::vector<std::vector<std::string>> lists;
  lists.reserve(corpus.sentences.size());
  for (const auto& sent : corpus.sentences) {
    std::vector<std::string> words;
    words.reserve(sent.size());
    for (const auto& tok : sent) words.push_back(tok.word);
    lists.push_back(std::move(words));
  }
  return lists;
}

}  // namespace

EvalReport evaluate(const ModelBundle& bundle, const TaggedCorpus& gold,
                    int timing_runs) {
  timing_runs = std::max(timing_runs, 3);
  const Tagger tagger(bundle);
  const auto word_lists = word_lists_of(gold);

  EvalReport report;
  report.sentence_count = gold.sentences.size();
  for (std::size_t s = 0; s < gold.sentences.size(); ++s) {
    const auto predicted = tagger.tag_sentence(word_lists[s]);
    const auto& sent = gold.sentences[s];
    if (predicted.size() != sent.size())
      throw ContractError("prediction length diverged from the gold sentence");
    for (std::size_t i = 0; i < sent.size(); ++i) {
      ++report.token_count;
      if (predicted[i] == sent[i].tag)
        ++report.correct_count;
      else
        ++report.confusion[{sent[i].tag, predicted[i]}];
    }
  }
  report.accuracy = report.token_count == 0
                        ? 0.0
                        : 100.0 * static_cast<double>(report.correct_count) /
                              static_cast<double>(report.token_count);

  std::uint64_t sink = 0;
  std::vector<double> rates;
  for (int run = 0; run < timing_runs; ++run) {
    const auto start = std::chrono::steady_clock::now();
    for (const auto& words : word_lists) {
      const auto tags = tagger.tag_sentence(words);
      sink += tags.size();
    }
    const double secs = seconds_since(start);
    report.wall_time_sec += secs;
    rates.push_back(static_cast<double>(report.token_count) / secs);
  }
  timing_sink = sink;
  report.words_per_sec = median(rates);
  report.timed_runs = timing_runs;
  return report;
}

BenchReport run_bench(const ModelBundle& bundle, const HmmModel& hmm,
                      const TaggedCorpus& corpus, std::size_t min_tokens,
                      int runs) {
  runs = std::max(runs, 3);
  const Tagger tagger(bundle);
  const auto tokens = corpus.token_count();
  if (tokens == 0) throw DataError("benchmark corpus has no tokens");
  const std::size_t repeats = (min_tokens + tokens - 1) / tokens;

  // Word -> class front end runs once, outside all decode timing.
  const auto word_lists = word_lists_of(corpus);
  std::vector<std::vector<std::int32_t>> fst_ids;
  fst_ids.reserve(word_lists.size());
  for (const auto& words : word_lists) fst_ids.push_back(tagger.class_ids(words));

  // The HMM may order its observation alphabet differently; translate
  // ids once.
  const auto& alphabet = bundle.t1.input_alphabet;
  std::vector<std::int32_t> to_hmm(static_cast<std::size_t>(alphabet.size()));
  for (std::int32_t id = 0; id < alphabet.size(); ++id) {
    to_hmm[static_cast<std::size_t>(id)] =
        hmm.class_symbols.find(alphabet.name(id));
    if (to_hmm[static_cast<std::size_t>(id)] < 0)
      throw DataError("HMM observation alphabet lacks class symbol " +
                      alphabet.name(id));
  }
  std::vector<std::vector<std::int32_t>> hmm_ids;
  hmm_ids.reserve(fst_ids.size());
  for (const auto& ids : fst_ids) {
    std::vector<std::int32_t> mapped(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i)
      mapped[i] = to_hmm[static_cast<std::size_t>(ids[i])];
    hmm_ids.push_back(std::move(mapped));
  }

  BenchReport report;
  report.token_count = tokens * repeats;
  report.timed_runs = runs;

  // Accuracies, one untimed pass each.
  std::size_t fst_correct = 0, hmm_correct = 0;
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    const auto& sent = corpus.sentences[s];
    const auto fst_path = tagger.decode(fst_ids[s]);
    const auto hmm_path = viterbi(hmm, hmm_ids[s]);
    for (std::size_t i = 0; i < sent.size(); ++i) {
      if (tagger.tag_name(fst_path[i]) == sent[i].tag) ++fst_correct;
      if (hmm.tags[static_cast<std::size_t>(hmm_path[i])] == sent[i].tag)
        ++hmm_correct;
    }
  }
  report.fst_accuracy =
      100.0 * static_cast<double>(fst_correct) / static_cast<double>(tokens);
  report.hmm_accuracy =
      100.0 * static_cast<double>(hmm_correct) / static_cast<double>(tokens);

  const auto pass_tokens = static_cast<double>(report.token_count);
  std::uint64_t sink = 0;

  std::vector<double> fst_rates;
  for (int run = 0; run < runs; ++run) {
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t rep = 0; rep < repeats; ++rep)
      for (const auto& ids : fst_ids) {
        const auto path = tagger.decode(ids);
        sink += path.empty() ? 0 : static_cast<std::uint64_t>(path.back());
      }
    fst_rates.push_back(pass_tokens / seconds_since(start));
  }

  std::vector<double> hmm_rates;
  for (int run = 0; run < runs; ++run) {
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t rep = 0; rep < repeats; ++rep)
      for (const auto& ids : hmm_ids) {
        const auto path = viterbi(hmm, ids);
        sink += path.empty() ? 0 : static_cast<std::uint64_t>(path.back());
      }
    hmm_rates.push_back(pass_tokens / seconds_since(start));
  }

  std::vector<double> lookup_rates;
  for (int run = 0; run < runs; ++run) {
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t rep = 0; rep < repeats; ++rep)
      for (const auto& words : word_lists) {
        const auto ids = tagger.class_ids(words);
        sink += ids.empty() ? 0 : static_cast<std::uint64_t>(ids.back());
      }
    lookup_rates.push_back(pass_tokens / seconds_since(start));
  }
  timing_sink = sink;

  report.fst_tokens_per_sec = median(fst_rates);
  report.hmm_tokens_per_sec = median(hmm_rates);
  report.lookup_tokens_per_sec = median(lookup_rates);
  report.speed_ratio = report.fst_tokens_per_sec / report.hmm_tokens_per_sec;
  return report;
}

namespace {

namespace fs = std::filesystem;

std::ofstream open_for_write(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write bundle file: " + path.string());
  return out;
}

std::ifstream open_for_read(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open bundle file: " + path.string());
  return in;
}

void finish_write(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw DataError("short write to bundle file: " + path.string());
}

std::string inventory_line(const std::string& symbol,
                           const std::vector<std::string>& tags,
                           const std::vector<double>& probs) {
  std::string line = symbol;
  line += '\t';
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (i > 0) line += ',';
    line += tags[i];
    line += ':';
    line += textio::format_double(probs[i]);
  }
  return line;
}

// Parses "tag:prob,tag:prob,..." into two aligned vectors.
std::pair<std::vector<std::string>, std::vector<double>> parse_entries(
    const std::string& text, const std::string& where) {
  std::vector<std::string> tags;
  std::vector<double> probs;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(start, comma - start);
    const auto colon = item.rfind(':');
    if (colon == std::string::npos || colon == 0)
      throw CorruptModelError(where + ": malformed tag:prob entry \"" + item +
                              "\"");
    tags.push_back(item.substr(0, colon));
    probs.push_back(textio::parse_double(item.substr(colon + 1), where));
    start = comma + 1;
  }
  if (tags.empty()) throw CorruptModelError(where + ": empty entry list");
  return {std::move(tags), std::move(probs)};
}

void check_entry_invariants(const std::vector<std::string>& tags,
                            const std::vector<double>& probs,
                            const std::string& where) {
  if (!std::is_sorted(tags.begin(), tags.end()) ||
      std::adjacent_find(tags.begin(), tags.end()) != tags.end())
    throw CorruptModelError(where + ": tag list is not sorted and unique");
  double total = 0.0;
  for (const auto p : probs) {
    if (p <= 0.0) throw CorruptModelError(where + ": non-positive probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw CorruptModelError(where + ": probabilities sum to " +
                            textio::format_double(total) + ", not 1");
}

void write_manifest(const ModelBundle& bundle, const fs::path& path) {
  auto out = open_for_write(path);
  char checksum[17];
  std::snprintf(checksum, sizeof checksum, "%016llx",
                static_cast<unsigned long long>(bundle.corpus_checksum));
  out << "format=fstag-bundle 1\n";
  out << "tau=" << textio::format_double(bundle.params.tau) << '\n';
  out << "theta=" << textio::format_double(bundle.params.theta) << '\n';
  out << "m=" << bundle.params.m << '\n';
  out << "suffix_len=" << bundle.params.suffix_len << '\n';
  out << "min_suffix_count=" << bundle.params.min_suffix_count << '\n';
  out << "floor=" << textio::format_double(bundle.params.floor) << '\n';
  out << "tags=" << bundle.stats.tags.size() << '\n';
  out << "classes=" << bundle.classes.size() << '\n';
  out << "reduced=" << bundle.reduced.size() << '\n';
  out << "unknown_symbol=" << bundle.unknown.symbol << '\n';
  out << "unknown_from_global=" << (bundle.unknown_from_global ? 1 : 0) << '\n';
  out << "corpus_checksum=" << checksum << '\n';
  out << "corpus_name=" << bundle.corpus_name << '\n';
  finish_write(out, path);
}

std::map<std::string, std::string> read_manifest(const fs::path& path) {
  auto in = open_for_read(path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw CorruptModelError(path.string() + ":" + std::to_string(line_no) +
                              ": manifest line without '='");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

const std::string& manifest_value(const std::map<std::string, std::string>& kv,
                                  const std::string& key,
                                  const fs::path& path) {
  const auto it = kv.find(key);
  if (it == kv.end())
    throw CorruptModelError(path.string() + ": manifest lacks key \"" + key +
                            "\"");
  return it->second;
}

void write_stats(const CorpusStats& stats, const fs::path& path) {
  auto out = open_for_write(path);
  const auto n = stats.tags.size();
  out << "fstag-stats 1\n";
  out << "floor\t" << textio::format_double(stats.floor) << '\n';
  out << "tags\t" << n << '\n';
  for (const auto& tag : stats.tags) out << tag << '\n';
  out << "tag\t" << textio::join_row(stats.p_tag.data(), n) << '\n';
  out << "bos\t" << textio::join_row(stats.p_bos.data(), n) << '\n';
  out << "eos\t" << textio::join_row(stats.p_eos.data(), n) << '\n';
  for (std::size_t r = 0; r < n; ++r)
    out << "prev\t" << stats.tags[r] << '\t'
        << textio::join_row(stats.p_prev.data() + r * n, n) << '\n';
  for (std::size_t r = 0; r < n; ++r)
    out << "next\t" << stats.tags[r] << '\t'
        << textio::join_row(stats.p_next.data() + r * n, n) << '\n';
  finish_write(out, path);
}

CorpusStats read_stats(const fs::path& path) {
  auto in = open_for_read(path);
  textio::LineReader reader(in, path.string());
  if (reader.next("format header") != "fstag-stats 1")
    throw CorruptModelError(reader.where() +
                            ": not a statistics file (bad header)");
  CorpusStats stats;
  stats.floor = textio::parse_double(
      textio::expect_kv(reader.next("floor"), "floor", reader.where()),
      reader.where());
  const auto n = textio::parse_size(
      textio::expect_kv(reader.next("tag count"), "tags", reader.where()),
      reader.where());
  if (n == 0) throw CorruptModelError(reader.where() + ": empty tagset");
  for (std::size_t i = 0; i < n; ++i) stats.tags.push_back(reader.next("tag"));
  if (!std::is_sorted(stats.tags.begin(), stats.tags.end()))
    throw CorruptModelError(path.string() +
                            ": tag list is not in canonical order");

  const auto read_vector = [&](const char* key) {
    const auto value =
        textio::expect_kv(reader.next(key), key, reader.where());
    return textio::parse_row(value, n, reader.where());
  };
  stats.p_tag = read_vector("tag");
  stats.p_bos = read_vector("bos");
  stats.p_eos = read_vector("eos");

  const auto read_matrix = [&](const char* key, std::vector<double>& table) {
    table.resize(n * n);
    for (std::size_t r = 0; r < n; ++r) {
      const auto fields =
          textio::split_tabs(reader.next(key), 3, reader.where());
      if (fields[0] != key || fields[1] != stats.tags[r])
        throw CorruptModelError(reader.where() + ": expected \"" +
                                std::string(key) + "\" row for tag " +
                                stats.tags[r]);
      const auto row = textio::parse_row(fields[2], n, reader.where());
      std::copy(row.begin(), row.end(), table.begin() + r * n);
    }
  };
  read_matrix("prev", stats.p_prev);
  read_matrix("next", stats.p_next);
  stats.reindex();
  return stats;
}

void write_classes(const ClassInventory& inventory, const fs::path& path) {
  auto out = open_for_write(path);
  out << "fstag-classes 1\n";
  for (const auto& cls : inventory.classes)
    out << inventory_line(cls.symbol, cls.tags, cls.probs) << '\n';
  finish_write(out, path);
}

ClassInventory read_classes(const fs::path& path) {
  auto in = open_for_read(path);
  textio::LineReader reader(in, path.string());
  if (reader.next("format header") != "fstag-classes 1")
    throw CorruptModelError(reader.where() +
                            ": not a class inventory file (bad header)");
  ClassInventory inventory;
  while (!reader.done()) {
    const auto fields =
        textio::split_tabs(reader.next("class entry"), 2, reader.where());
    auto [tags, probs] = parse_entries(fields[1], reader.where());
    check_entry_invariants(tags, probs, reader.where());
    AmbiguityClass cls;
    cls.symbol = fields[0];
    cls.tags = std::move(tags);
    cls.probs = std::move(probs);
    inventory.add(std::move(cls));
  }
  return inventory;
}

void write_reduced(const ReducedInventory& inventory, const fs::path& path) {
  auto out = open_for_write(path);
  out << "fstag-reduced 1\n";
  for (const auto& cls : inventory.classes)
    out << inventory_line(cls.symbol, cls.tags, cls.probs) << '\n';
  finish_write(out, path);
}

ReducedInventory read_reduced(const fs::path& path) {
  auto in = open_for_read(path);
  textio::LineReader reader(in, path.string());
  if (reader.next("format header") != "fstag-reduced 1")
    throw CorruptModelError(reader.where() +
                            ": not a reduced inventory file (bad header)");
  ReducedInventory inventory;
  while (!reader.done()) {
    const auto fields =
        textio::split_tabs(reader.next("reduced entry"), 2, reader.where());
    auto [tags, probs] = parse_entries(fields[1], reader.where());
    check_entry_invariants(tags, probs, reader.where());
    const auto& symbol = fields[0];
    const auto marker = symbol.rfind("_R_");
    if (marker == std::string::npos)
      throw CorruptModelError(reader.where() +
                              ": reduced symbol lacks a variant marker");
    char* end = nullptr;
    const auto variant_str = symbol.substr(marker + 3);
    const auto variant = std::strtol(variant_str.c_str(), &end, 10);
    if (end == variant_str.c_str() || *end != '\0' || variant < 1)
      throw CorruptModelError(reader.where() +
                              ": malformed variant number in " + symbol);
    ReducedAmbiguityClass cls;
    cls.symbol = symbol;
    cls.tags = std::move(tags);
    cls.probs = std::move(probs);
    cls.variant = static_cast<int>(variant);
    inventory.add(std::move(cls));
  }
  return inventory;
}

void write_lexicon(const ClassLexicon& lexicon, const fs::path& path) {
  auto out = open_for_write(path);
  out << "fstag-lexicon 1\n";
  for (const auto& [word, symbol] : lexicon.word_to_symbol)
    out << word << '\t' << symbol << '\n';
  finish_write(out, path);
}

ClassLexicon read_lexicon(const fs::path& path) {
  auto in = open_for_read(path);
  textio::LineReader reader(in, path.string());
  if (reader.next("format header") != "fstag-lexicon 1")
    throw CorruptModelError(reader.where() +
                            ": not a lexicon file (bad header)");
  ClassLexicon lexicon;
  while (!reader.done()) {
    const auto fields =
        textio::split_tabs(reader.next("lexicon entry"), 2, reader.where());
    if (!lexicon.word_to_symbol.emplace(fields[0], fields[1]).second)
      throw CorruptModelError(reader.where() + ": duplicate lexicon word \"" +
                              fields[0] + "\"");
  }
  return lexicon;
}

void write_guesser(const SuffixGuesser& guesser, const fs::path& path) {
  auto out = open_for_write(path);
  out << "fstag-guesser 1\n";
  out << "max_len\t" << guesser.max_len << '\n';
  for (const auto& [suffix, symbol] : guesser.suffix_to_symbol)
    out << suffix << '\t' << symbol << '\n';
  finish_write(out, path);
}

SuffixGuesser read_guesser(const fs::path& path) {
  auto in = open_for_read(path);
  textio::LineReader reader(in, path.string());
  if (reader.next("format header") != "fstag-guesser 1")
    throw CorruptModelError(reader.where() +
                            ": not a guesser file (bad header)");
  SuffixGuesser guesser;
  guesser.max_len = static_cast<int>(textio::parse_size(
      textio::expect_kv(reader.next("max_len"), "max_len", reader.where()),
      reader.where()));
  while (!reader.done()) {
    const auto fields =
        textio::split_tabs(reader.next("guesser entry"), 2, reader.where());
    if (!guesser.suffix_to_symbol.emplace(fields[0], fields[1]).second)
      throw CorruptModelError(reader.where() + ": duplicate suffix \"" +
                              fields[0] + "\"");
  }
  return guesser;
}

}  // namespace

void save_bundle(const ModelBundle& bundle, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw DataError("cannot create bundle directory " + dir + ": " +
                    ec.message());
  const fs::path base(dir);
  write_manifest(bundle, base / "manifest.txt");
  write_stats(bundle.stats, base / "stats.txt");
  write_classes(bundle.classes, base / "classes.txt");
  write_reduced(bundle.reduced, base / "reduced.txt");
  write_lexicon(bundle.lexicon, base / "lexicon.txt");
  write_guesser(bundle.guesser, base / "guesser.txt");
  write_transducer_file(bundle.t1, (base / "t1.fst").string());
  write_transducer_file(bundle.t2, (base / "t2.fst").string());
  {
    auto out = open_for_write(base / "t1.txt");
    write_text_dump(out, bundle.t1);
    finish_write(out, base / "t1.txt");
  }
  {
    auto out = open_for_write(base / "t2.txt");
    write_text_dump(out, bundle.t2);
    finish_write(out, base / "t2.txt");
  }
  write_hmm_file(bundle.hmm, (base / "hmm.txt").string());
}

ModelBundle load_bundle(const std::string& dir) {
  const fs::path base(dir);
  const auto manifest = read_manifest(base / "manifest.txt");
  const auto manifest_path = base / "manifest.txt";
  if (manifest_value(manifest, "format", manifest_path) != "fstag-bundle 1")
    throw FormatVersionError(manifest_path.string() +
                             ": unsupported bundle format");

  ModelBundle bundle;
  const auto num = [&](const char* key) {
    return textio::parse_double(manifest_value(manifest, key, manifest_path),
                                manifest_path.string() + " key " + key);
  };
  bundle.params.tau = num("tau");
  bundle.params.theta = num("theta");
  bundle.params.m = static_cast<int>(num("m"));
  bundle.params.suffix_len = static_cast<int>(num("suffix_len"));
  bundle.params.min_suffix_count = static_cast<int>(num("min_suffix_count"));
  bundle.params.floor = num("floor");
  bundle.unknown_from_global =
      manifest_value(manifest, "unknown_from_global", manifest_path) == "1";
  bundle.corpus_name = manifest_value(manifest, "corpus_name", manifest_path);
  {
    const auto& hex = manifest_value(manifest, "corpus_checksum", manifest_path);
    char* end = nullptr;
    bundle.corpus_checksum = std::strtoull(hex.c_str(), &end, 16);
    if (end == hex.c_str() || *end != '\0')
      throw CorruptModelError(manifest_path.string() +
                              ": malformed corpus checksum");
  }

  bundle.stats = read_stats(base / "stats.txt");
  bundle.classes = read_classes(base / "classes.txt");
  bundle.reduced = read_reduced(base / "reduced.txt");
  bundle.lexicon = read_lexicon(base / "lexicon.txt");
  bundle.guesser = read_guesser(base / "guesser.txt");
  bundle.t1 = read_transducer_file((base / "t1.fst").string());
  bundle.t2 = read_transducer_file((base / "t2.fst").string());
  bundle.hmm = read_hmm_file((base / "hmm.txt").string());

  const auto& unknown_symbol =
      manifest_value(manifest, "unknown_symbol", manifest_path);
  const AmbiguityClass* unknown = bundle.classes.find(unknown_symbol);
  if (unknown == nullptr)
    throw CorruptModelError(dir + ": unknown-word class " + unknown_symbol +
                            " is missing from the class inventory");
  bundle.unknown = *unknown;

  const auto check_count = [&](const char* key, std::size_t actual) {
    const auto expected = textio::parse_size(
        manifest_value(manifest, key, manifest_path),
        manifest_path.string() + " key " + key);
    if (expected != actual)
      throw CorruptModelError(dir + ": manifest declares " +
                              std::to_string(expected) + " " + key +
                              " but the bundle holds " +
                              std::to_string(actual));
  };
  check_count("tags", bundle.stats.tags.size());
  check_count("classes", bundle.classes.size());
  check_count("reduced", bundle.reduced.size());

  try {
    bundle.check_consistency();
  } catch (const ContractError& e) {
    throw CorruptModelError(dir + ": " + e.what());
  }
  return bundle;
}

}  // namespace fstag
