// Class-based bigram HMM baseline: counted and floored tables, the
// log-space Viterbi decoder checked against an exhaustive reference,
// and the text serialization.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "doctest.h"
#include "fstag/error.hpp"
#include "fstag/hmm.hpp"
#include "support.hpp"

using namespace fstag;
using test::corpus_from;
using test::floored;

namespace {

// Annotates every token with its own word as the ambiguity class, the
// simplest observation scheme for hand-counted expectations.
TaggedCorpus with_word_classes(TaggedCorpus corpus) {
  for (auto& sent : corpus.sentences)
    for (auto& tok : sent) tok.class_sym = tok.word;
  return corpus;
}

// Hand-buildable random model over tags A..D and classes c0..c2, with
// floored rows derived from small integer counts.
HmmModel random_model(test::TestRng& rng) {
  HmmModel m;
  const std::size_t t_count = 1 + rng.below(4);
  const std::size_t c_count = 1 + rng.below(3);
  static const std::vector<std::string> names{"A", "B", "C", "D"};
  for (std::size_t i = 0; i < t_count; ++i) m.tags.push_back(names[i]);
  for (std::size_t j = 0; j < c_count; ++j)
    m.class_symbols.add("c" + std::to_string(j));
  m.floor = 1e-6;

  const auto fill_row = [&](std::vector<double>& table, std::size_t n) {
    std::vector<double> counts(n);
    double total = 0.0;
    for (auto& c : counts) {
      c = static_cast<double>(rng.below(10));
      total += c;
    }
    for (std::size_t i = 0; i < n; ++i)
      table.push_back(floored(counts[i], total, n, m.floor));
  };
  const std::size_t cols = t_count + 1;
  for (std::size_t r = 0; r <= t_count; ++r) fill_row(m.trans, cols);
  for (std::size_t r = 0; r < t_count; ++r) fill_row(m.emit, c_count);
  m.finalize();
  return m;
}

// Checks decoder output against the exhaustive reference on every
// class sequence up to max_len.
void check_against_reference(const HmmModel& m, std::size_t max_len) {
  const std::size_t c_count =
      static_cast<std::size_t>(m.class_symbols.size());
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<std::int32_t> classes(len, 0);
    while (true) {
      const auto got = viterbi(m, classes);
      const auto want = test::reference_viterbi(m, classes);
      REQUIRE(got == want);
      std::size_t pos = 0;
      while (pos < len) {
        if (static_cast<std::size_t>(++classes[pos]) < c_count) break;
        classes[pos] = 0;
        ++pos;
      }
      if (pos == len) break;
    }
  }
}

}  // namespace

TEST_CASE("train_hmm counts transitions and emissions with flooring") {
  const auto corpus = with_word_classes(corpus_from("a/X b/Y | a/X a/X"));
  const double f = 1e-6;
  const auto m = train_hmm(corpus, {"a", "b"}, f);

  CHECK(m.tags == std::vector<std::string>{"X", "Y"});
  CHECK(m.tag_index("X") == 0);
  CHECK(m.tag_index("Y") == 1);
  CHECK(m.tag_index("Z") == -1);
  CHECK(m.floor == f);

  // Start row: both sentences open with X.
  CHECK(m.transition(-1, 0) == floored(2, 2, 3, f));
  CHECK(m.transition(-1, 1) == floored(0, 2, 3, f));
  CHECK(m.transition(-1, 2) == floored(0, 2, 3, f));
  // From X: one X->Y, one X->X, one X->end; exactly a third each.
  CHECK(m.transition(0, 0) == floored(1, 3, 3, f));
  CHECK(m.transition(0, 1) == floored(1, 3, 3, f));
  CHECK(m.transition(0, 2) == floored(1, 3, 3, f));
  CHECK(m.transition(0, 0) == doctest::Approx(1.0 / 3.0));
  // From Y: only Y->end.
  CHECK(m.transition(1, 0) == floored(0, 1, 3, f));
  CHECK(m.transition(1, 2) == floored(1, 1, 3, f));

  // X always realizes class a, Y class b.
  CHECK(m.emission(0, 0) == floored(3, 3, 2, f));
  CHECK(m.emission(0, 1) == floored(0, 3, 2, f));
  CHECK(m.emission(1, 0) == floored(0, 1, 2, f));
  CHECK(m.emission(1, 1) == floored(1, 1, 2, f));

  // Rows are normalized.
  const std::size_t cols = m.tag_count() + 1;
  for (std::size_t r = 0; r < cols; ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < cols; ++c) sum += m.trans[r * cols + c];
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (std::size_t r = 0; r < m.tag_count(); ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < 2; ++c) sum += m.emit[r * 2 + c];
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("train_hmm sorts the tagset into canonical order") {
  const auto corpus = with_word_classes(corpus_from("b/Y a/X"));
  const auto m = train_hmm(corpus, {"a", "b"});
  CHECK(m.tags == std::vector<std::string>{"X", "Y"});
}

TEST_CASE("unobserved alphabet symbols keep floor emission mass") {
  const auto corpus = with_word_classes(corpus_from("a/X b/Y | a/X a/X"));
  const double f = 1e-6;
  const auto m = train_hmm(corpus, {"a", "b", "<UNKNOWN>"}, f);
  CHECK(m.class_symbols.find("<UNKNOWN>") == 2);
  CHECK(m.emission(0, 2) == f);
  CHECK(m.emission(1, 2) == f);
}

TEST_CASE("finalize fills log copies of both tables") {
  const auto corpus = with_word_classes(corpus_from("a/X b/Y"));
  const auto m = train_hmm(corpus, {"a", "b"});
  REQUIRE(m.log_trans.size() == m.trans.size());
  REQUIRE(m.log_emit.size() == m.emit.size());
  for (std::size_t i = 0; i < m.trans.size(); ++i)
    CHECK(m.log_trans[i] == std::log(m.trans[i]));
  for (std::size_t i = 0; i < m.emit.size(); ++i)
    CHECK(m.log_emit[i] == std::log(m.emit[i]));
}

TEST_CASE("train_hmm rejects invalid input") {
  const auto corpus = with_word_classes(corpus_from("a/X b/Y"));
  // Token class outside the fixed observation alphabet.
  CHECK_THROWS_AS(train_hmm(corpus, {"a"}), DataError);
  // Duplicate alphabet symbol.
  CHECK_THROWS_AS(train_hmm(corpus, {"a", "b", "a"}), ContractError);
  // Floor outside (0, 1/(|tags|+1)) or above 1/|classes|.
  CHECK_THROWS_AS(train_hmm(corpus, {"a", "b"}, 0.0), ContractError);
  CHECK_THROWS_AS(train_hmm(corpus, {"a", "b"}, -1e-6), ContractError);
  CHECK_THROWS_AS(train_hmm(corpus, {"a", "b"}, 0.4), ContractError);
  // No sentences at all.
  CHECK_THROWS_AS(train_hmm(TaggedCorpus{}, {"a"}), DataError);
}

TEST_CASE("viterbi follows forced paths when classes pin the tag") {
  const auto corpus = with_word_classes(
      corpus_from("the/DET cat/NOUN runs/VERB | the/DET dog/NOUN naps/VERB"));
  const auto m =
      train_hmm(corpus, {"the", "cat", "runs", "dog", "naps"});
  CHECK(viterbi_tags(m, {"the", "cat", "runs"}) ==
        std::vector<std::string>{"DET", "NOUN", "VERB"});
  CHECK(viterbi_tags(m, {"the", "dog", "naps"}) ==
        std::vector<std::string>{"DET", "NOUN", "VERB"});
  // A mid-sentence fragment still decodes from the bigram weights: the
  // gold path pays one floored start probability, every rival at least
  // two floored factors.
  CHECK(viterbi_tags(m, {"cat", "runs"}) ==
        std::vector<std::string>{"NOUN", "VERB"});
  CHECK(viterbi_tags(m, {"naps"}) == std::vector<std::string>{"VERB"});
}

TEST_CASE("viterbi handles edge inputs") {
  const auto corpus = with_word_classes(corpus_from("a/X b/Y"));
  const auto m = train_hmm(corpus, {"a", "b"});
  CHECK(viterbi(m, {}).empty());
  CHECK(viterbi_tags(m, {}).empty());
  CHECK_THROWS_AS(viterbi(m, std::vector<std::int32_t>{2}), ContractError);
  CHECK_THROWS_AS(viterbi(m, std::vector<std::int32_t>{-1}), ContractError);
  try {
    viterbi_tags(m, {"a", "zzz"});
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("zzz") != std::string::npos);
    CHECK(msg.find("position 1") != std::string::npos);
  }
}

TEST_CASE("viterbi matches the exhaustive reference on random models") {
  test::TestRng rng(21);
  for (int round = 0; round < 10; ++round)
    check_against_reference(random_model(rng), 4);
}

TEST_CASE("viterbi matches the exhaustive reference on a trained model") {
  const auto corpus = with_word_classes(corpus_from(
      "a/X b/Y a/X | b/X a/Y | a/X a/X b/Y a/Y | b/Y b/Y a/X"));
  const auto m = train_hmm(corpus, {"a", "b"});
  check_against_reference(m, 5);
}

TEST_CASE("exact ties resolve toward the reverse-lexicographic minimum") {
  // Every table row is bitwise identical, so all tag sequences of a
  // given length score bitwise the same and the tie-break is fully
  // exercised: the winner must be all-A (index 0 everywhere).
  HmmModel m;
  m.tags = {"A", "B", "C"};
  m.class_symbols.add("c0");
  m.floor = 1e-6;
  const std::size_t cols = 4;
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < cols; ++c) m.trans.push_back(0.25);
  for (std::size_t r = 0; r < 3; ++r) m.emit.push_back(1.0);
  m.finalize();

  for (std::size_t len = 1; len <= 4; ++len) {
    const std::vector<std::int32_t> classes(len, 0);
    const auto path = viterbi(m, classes);
    CHECK(path == std::vector<std::int32_t>(len, 0));
    CHECK(path == test::reference_viterbi(m, classes));
  }
}

TEST_CASE("HMM files round-trip every table bitwise") {
  const auto corpus = with_word_classes(corpus_from(
      "a/X b/Y a/X | b/X a/Y | a/X a/X b/Y"));
  const auto m = train_hmm(corpus, {"a", "b", "<UNKNOWN>"}, 2e-6);
  const auto path = (test::scratch_dir() / "model.hmm").string();
  write_hmm_file(m, path);

  const auto back = read_hmm_file(path);
  CHECK(back.tags == m.tags);
  CHECK(back.class_symbols == m.class_symbols);
  CHECK(back.floor == m.floor);
  CHECK(back.trans == m.trans);
  CHECK(back.emit == m.emit);
  REQUIRE(back.log_trans.size() == m.log_trans.size());
  for (std::size_t i = 0; i < back.log_trans.size(); ++i)
    CHECK(back.log_trans[i] == m.log_trans[i]);

  // Serialization is deterministic.
  const auto again = (test::scratch_dir() / "model2.hmm").string();
  write_hmm_file(back, again);
  CHECK(test::read_file(again) == test::read_file(path));
}

TEST_CASE("read_hmm_file rejects broken inputs") {
  CHECK_THROWS_AS(read_hmm_file("/nonexistent/model.hmm"), DataError);
  CHECK_THROWS_AS(
      read_hmm_file(test::write_file("bad_header.hmm", "not a model\n")),
      DataError);

  const auto corpus = with_word_classes(corpus_from("a/X b/Y"));
  const auto m = train_hmm(corpus, {"a", "b"});
  const auto path = (test::scratch_dir() / "cut.hmm").string();
  write_hmm_file(m, path);
  const auto full = test::read_file(path);
  CHECK_THROWS_AS(
      read_hmm_file(test::write_file("cut.hmm", full.substr(0, full.size() / 2))),
      DataError);

  // Tags out of canonical order are refused on load.
  auto unsorted = m;
  std::swap(unsorted.tags[0], unsorted.tags[1]);
  const auto bad = (test::scratch_dir() / "unsorted.hmm").string();
  write_hmm_file(unsorted, bad);
  CHECK_THROWS_AS(read_hmm_file(bad), DataError);
}
