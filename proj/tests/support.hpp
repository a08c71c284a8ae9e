#ifndef FSTAG_TESTS_SUPPORT_HPP_
#define FSTAG_TESTS_SUPPORT_HPP_

// Shared test fixtures: inline corpus literals, scratch-file helpers,
// small model builders, and reference implementations used as oracles
// against the library.

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fstag/classes.hpp"
#include "fstag/corpus.hpp"
#include "fstag/hmm.hpp"

namespace fstag::test {

// Builds a corpus from a compact literal: tokens are "word/TAG"
// separated by spaces, sentences separated by a lone "|".
inline TaggedCorpus corpus_from(const std::string& text) {
  TaggedCorpus corpus;
  Sentence current;
  std::vector<std::string> seen;
  std::istringstream in(text);
  std::string item;
  while (in >> item) {
    if (item == "|") {
      if (!current.empty()) corpus.sentences.push_back(std::move(current));
      current.clear();
      continue;
    }
    const auto slash = item.rfind('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == item.size())
      throw std::runtime_error("bad corpus literal token: " + item);
    TaggedToken tok;
    tok.word = item.substr(0, slash);
    tok.tag = item.substr(slash + 1);
    if (std::find(seen.begin(), seen.end(), tok.tag) == seen.end()) {
      seen.push_back(tok.tag);
      corpus.tagset.push_back(tok.tag);
    }
    current.push_back(std::move(tok));
  }
  if (!current.empty()) corpus.sentences.push_back(std::move(current));
  return corpus;
}

// Per-process scratch directory, so parallel ctest invocations of the
// same binary never collide on file names.
inline std::filesystem::path scratch_dir() {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("fstag-tests-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

// Writes `contents` to `name` under the scratch directory and returns
// the full path.
inline std::string write_file(const std::string& name,
                              const std::string& contents) {
  const auto path = scratch_dir() / name;
  std::ofstream out(path, std::ios::binary);
  out << contents;
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return path.string();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// The smoothing rule spelled out once more, so expectations in stats
// tests do not lean on the library's own arithmetic.
inline double floored(double count, double total, std::size_t n,
                      double floor) {
  if (total <= 0.0) return 1.0 / static_cast<double>(n);
  return floor + (1.0 - static_cast<double>(n) * floor) * (count / total);
}

inline AmbiguityClass make_class(std::vector<std::string> tags,
                                 std::vector<double> probs) {
  AmbiguityClass cls;
  cls.symbol = class_symbol_for(tags);
  cls.tags = std::move(tags);
  cls.probs = std::move(probs);
  return cls;
}

inline ReducedAmbiguityClass make_reduced(std::vector<std::string> tags,
                                          std::vector<double> probs,
                                          int variant) {
  ReducedAmbiguityClass r;
  r.symbol = class_symbol_for(tags) + "_R_" + std::to_string(variant);
  r.tags = std::move(tags);
  r.probs = std::move(probs);
  r.variant = variant;
  return r;
}

// Statistics in which every distribution is uniform. Under Eqs. of the
// form p(t|ctx) * p(t|class) / p(t) the uniform terms cancel, so scores
// collapse to the class vector; tests use this to force known argmaxes.
inline CorpusStats uniform_stats(std::vector<std::string> tags) {
  CorpusStats stats;
  std::sort(tags.begin(), tags.end());
  stats.tags = std::move(tags);
  stats.reindex();
  const std::size_t n = stats.tags.size();
  stats.floor = 1e-6;
  const double u = 1.0 / static_cast<double>(n);
  stats.p_tag.assign(n, u);
  stats.p_bos.assign(n, u);
  stats.p_eos.assign(n, u);
  stats.p_prev.assign(n * n, u);
  stats.p_next.assign(n * n, u);
  return stats;
}

// True when `a` precedes `b` in the order the decoder's tie rule
// guarantees: compare positions from the last one backwards.
inline bool reverse_lex_less(const std::vector<std::int32_t>& a,
                             const std::vector<std::int32_t>& b) {
  for (std::size_t i = a.size(); i-- > 0;)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

// Reference decoder: scores every tag sequence explicitly and keeps the
// best, breaking exact ties toward the reverse-lexicographically
// smallest sequence. Log terms are accumulated left to right in the
// same order as the dynamic program, so exact ties stay exact.
inline std::vector<std::int32_t> reference_viterbi(
    const HmmModel& m, std::span<const std::int32_t> classes) {
  if (classes.empty()) return {};
  const std::size_t t_count = m.tags.size();
  const std::size_t c_count = static_cast<std::size_t>(m.class_symbols.size());
  const std::size_t cols = t_count + 1;
  const std::size_t len = classes.size();

  std::vector<std::int32_t> seq(len, 0), best_seq;
  double best_score = -std::numeric_limits<double>::infinity();
  bool have_best = false;
  while (true) {
    double score =
        m.log_trans[static_cast<std::size_t>(seq[0])] +
        m.log_emit[static_cast<std::size_t>(seq[0]) * c_count +
                   static_cast<std::size_t>(classes[0])];
    for (std::size_t i = 1; i < len; ++i)
      score = score +
              m.log_trans[(static_cast<std::size_t>(seq[i - 1]) + 1) * cols +
                          static_cast<std::size_t>(seq[i])] +
              m.log_emit[static_cast<std::size_t>(seq[i]) * c_count +
                         static_cast<std::size_t>(classes[i])];
    score = score +
            m.log_trans[(static_cast<std::size_t>(seq[len - 1]) + 1) * cols +
                        t_count];
    if (!have_best || score > best_score ||
        (score == best_score && reverse_lex_less(seq, best_seq))) {
      have_best = true;
      best_score = score;
      best_seq = seq;
    }
    // Odometer step over tag indices.
    std::size_t pos = 0;
    while (pos < len) {
      if (static_cast<std::size_t>(++seq[pos]) < t_count) break;
      seq[pos] = 0;
      ++pos;
    }
    if (pos == len) break;
  }
  return best_seq;
}

// Deterministic pseudo-random helper over the standard engine; the
// modulo bias is irrelevant for test-case generation.
struct TestRng {
  std::mt19937_64 gen;

  explicit TestRng(std::uint64_t seed) : gen(seed) {}
  std::uint64_t below(std::uint64_t n) { return gen() % n; }
  double unit() {
    return static_cast<double>(gen() >> 11) *
           (1.0 / 9007199254740992.0);
  }
};

}  // namespace fstag::test

#endif  // FSTAG_TESTS_SUPPORT_HPP_
