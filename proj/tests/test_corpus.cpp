// Corpus loading, statistics estimation, and hapax extraction, checked
// against hand counts and an independent recount of the same corpora.

#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "fstag/corpus.hpp"
#include "fstag/error.hpp"
#include "support.hpp"

using namespace fstag;
using test::corpus_from;
using test::floored;

TEST_CASE("load_corpus parses the two-column format") {
  const auto path = test::write_file("basic.tsv", "the\tDET\ncat\tNOUN\n\n");
  const auto corpus = load_corpus(path);
  REQUIRE(corpus.sentences.size() == 1);
  REQUIRE(corpus.sentences[0].size() == 2);
  CHECK(corpus.sentences[0][0].word == "the");
  CHECK(corpus.sentences[0][0].tag == "DET");
  CHECK(corpus.sentences[0][1].word == "cat");
  CHECK(corpus.sentences[0][1].tag == "NOUN");
  CHECK(corpus.tagset == std::vector<std::string>{"DET", "NOUN"});
  CHECK(corpus.token_count() == 2);
}

TEST_CASE("load_corpus splits sentences at blank lines") {
  const auto path = test::write_file(
      "blocks.tsv", "a\tX\nb\tY\n\nc\tX\n\n\nd\tY\n");
  const auto corpus = load_corpus(path);
  REQUIRE(corpus.sentences.size() == 3);
  CHECK(corpus.sentences[0].size() == 2);
  CHECK(corpus.sentences[1].size() == 1);
  CHECK(corpus.sentences[2].size() == 1);
}

TEST_CASE("load_corpus keeps the tagset in first-seen order") {
  const auto path = test::write_file("order.tsv", "a\tZZ\nb\tAA\nc\tZZ\n");
  const auto corpus = load_corpus(path);
  CHECK(corpus.tagset == std::vector<std::string>{"ZZ", "AA"});
}

TEST_CASE("load_corpus strips carriage returns") {
  const auto path = test::write_file("crlf.tsv", "a\tX\r\nb\tY\r\n");
  const auto corpus = load_corpus(path);
  REQUIRE(corpus.sentences.size() == 1);
  CHECK(corpus.sentences[0][1].tag == "Y");
}

TEST_CASE("load_corpus rejects malformed input") {
  SUBCASE("line without a tab names the line number") {
    const auto path = test::write_file("columns.tsv", "cat NOUN VERB extra\n");
    try {
      load_corpus(path);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
  }
  SUBCASE("three tab-separated columns") {
    const auto path = test::write_file("threecol.tsv", "a\tX\tY\n");
    CHECK_THROWS_AS(load_corpus(path), DataError);
  }
  SUBCASE("missing word or tag") {
    CHECK_THROWS_AS(load_corpus(test::write_file("noword.tsv", "\tX\n")),
                    DataError);
    CHECK_THROWS_AS(load_corpus(test::write_file("notag.tsv", "a\t\n")),
                    DataError);
  }
  SUBCASE("empty corpus") {
    CHECK_THROWS_AS(load_corpus(test::write_file("empty.tsv", "\n\n")),
                    DataError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.tsv"), DataError);
  }
}

TEST_CASE("write_corpus_file round-trips through load_corpus") {
  const auto corpus = corpus_from("the/DET cat/NOUN | it/PRON ran/VERB");
  const auto path = (test::scratch_dir() / "roundtrip.tsv").string();
  write_corpus_file(corpus, path);
  const auto reloaded = load_corpus(path);
  REQUIRE(reloaded.sentences.size() == corpus.sentences.size());
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    REQUIRE(reloaded.sentences[s].size() == corpus.sentences[s].size());
    for (std::size_t i = 0; i < corpus.sentences[s].size(); ++i) {
      CHECK(reloaded.sentences[s][i].word == corpus.sentences[s][i].word);
      CHECK(reloaded.sentences[s][i].tag == corpus.sentences[s][i].tag);
    }
  }
  CHECK(reloaded.tagset == corpus.tagset);
}

TEST_CASE("compute_stats on the two-token sentence") {
  // One sentence [DET, NOUN]: DET starts, NOUN ends, one DET->NOUN
  // bigram. With floor f over 2 tags: observed-only mass is 1 - f.
  const auto corpus = corpus_from("the/DET cat/NOUN");
  const double f = 1e-6;
  const auto stats = compute_stats(corpus, f);

  REQUIRE(stats.tags == std::vector<std::string>{"DET", "NOUN"});
  CHECK(stats.tag_prob("DET") == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(stats.tag_prob("NOUN") == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(stats.tag_prob_initial("DET") == doctest::Approx(1.0 - f));
  CHECK(stats.tag_prob_initial("NOUN") == doctest::Approx(f));
  CHECK(stats.tag_prob_final("NOUN") == doctest::Approx(1.0 - f));
  CHECK(stats.tag_prob_final("DET") == doctest::Approx(f));
  CHECK(stats.tag_prob_given_prev("NOUN", "DET") == doctest::Approx(1.0 - f));
  CHECK(stats.tag_prob_given_prev("DET", "DET") == doctest::Approx(f));
  // NOUN never precedes anything: unobserved condition, uniform row.
  CHECK(stats.tag_prob_given_prev("DET", "NOUN") == doctest::Approx(0.5));
  CHECK(stats.tag_prob_given_prev("NOUN", "NOUN") == doctest::Approx(0.5));
  // Tokens preceding a NOUN are all DET; nothing precedes a DET.
  CHECK(stats.tag_prob_given_next("DET", "NOUN") == doctest::Approx(1.0 - f));
  CHECK(stats.tag_prob_given_next("NOUN", "NOUN") == doctest::Approx(f));
  CHECK(stats.tag_prob_given_next("DET", "DET") == doctest::Approx(0.5));
}

TEST_CASE("compute_stats matches an independent recount") {
  const auto corpus = corpus_from(
      "a/DET b/NOUN c/VERB | b/NOUN c/VERB | c/VERB a/DET b/NOUN b/NOUN");
  const double f = 1e-9;
  const auto stats = compute_stats(corpus, f);
  const std::size_t n = stats.tags.size();
  REQUIRE(n == 3);

  // Recount everything with plain maps.
  std::map<std::string, double> uni, bos, eos;
  std::map<std::string, std::map<std::string, double>> after, before;
  double tokens = 0.0, sentences = 0.0;
  for (const auto& sent : corpus.sentences) {
    ++sentences;
    bos[sent.front().tag] += 1.0;
    eos[sent.back().tag] += 1.0;
    for (std::size_t i = 0; i < sent.size(); ++i) {
      ++tokens;
      uni[sent[i].tag] += 1.0;
      if (i + 1 < sent.size()) {
        after[sent[i].tag][sent[i + 1].tag] += 1.0;
        before[sent[i + 1].tag][sent[i].tag] += 1.0;
      }
    }
  }
  for (const auto& t : stats.tags) {
    CHECK(stats.tag_prob(t) ==
          doctest::Approx(floored(uni[t], tokens, n, f)).epsilon(1e-12));
    CHECK(stats.tag_prob_initial(t) ==
          doctest::Approx(floored(bos[t], sentences, n, f)).epsilon(1e-12));
    CHECK(stats.tag_prob_final(t) ==
          doctest::Approx(floored(eos[t], sentences, n, f)).epsilon(1e-12));
    for (const auto& prev : stats.tags) {
      double row_total = 0.0;
      for (const auto& [_, c] : after[prev]) row_total += c;
      CHECK(stats.tag_prob_given_prev(t, prev) ==
            doctest::Approx(floored(after[prev][t], row_total, n, f))
                .epsilon(1e-12));
    }
    for (const auto& next : stats.tags) {
      double row_total = 0.0;
      for (const auto& [_, c] : before[next]) row_total += c;
      CHECK(stats.tag_prob_given_next(t, next) ==
            doctest::Approx(floored(before[next][t], row_total, n, f))
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("compute_stats distributions are normalized") {
  const auto corpus = corpus_from(
      "a/W b/X | c/Y d/Z a/W | b/X b/X c/Y | d/Z | a/W c/Y b/X d/Z a/W");
  const auto stats = compute_stats(corpus, 1e-4);
  const std::size_t n = stats.tags.size();
  auto sum = [](const std::vector<double>& v, std::size_t begin,
                std::size_t count) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += v[begin + i];
    return s;
  };
  CHECK(sum(stats.p_tag, 0, n) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sum(stats.p_bos, 0, n) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sum(stats.p_eos, 0, n) == doctest::Approx(1.0).epsilon(1e-9));
  for (std::size_t r = 0; r < n; ++r) {
    CHECK(sum(stats.p_prev, r * n, n) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sum(stats.p_next, r * n, n) == doctest::Approx(1.0).epsilon(1e-9));
  }
  // Every stored probability is at least the floor.
  for (double p : stats.p_tag) CHECK(p >= stats.floor);
  for (double p : stats.p_prev) CHECK(p >= stats.floor);
}

TEST_CASE("compute_stats gives never-initial tags exactly the floor") {
  const auto corpus = corpus_from("a/X b/Y | a/X b/Y | a/X a/X");
  const double f = 1e-5;
  const auto stats = compute_stats(corpus, f);
  CHECK(stats.tag_prob_initial("Y") == doctest::Approx(f));
}

TEST_CASE("compute_stats is uniform on a balanced corpus") {
  const auto corpus = corpus_from("a/X b/Y | b/Y a/X");
  const auto stats = compute_stats(corpus, 1e-6);
  CHECK(stats.tag_prob("X") == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(stats.tag_prob("Y") == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(stats.tag_prob_initial("X") == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(stats.tag_prob_final("X") == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("compute_stats rejects bad inputs") {
  const auto corpus = corpus_from("a/X b/Y");
  CHECK_THROWS_AS(compute_stats(corpus, 0.0), ContractError);
  CHECK_THROWS_AS(compute_stats(corpus, 0.5), ContractError);   // >= 1/2 tags
  CHECK_THROWS_AS(compute_stats(corpus, -1e-6), ContractError);
  CHECK_THROWS_AS(compute_stats(TaggedCorpus{}, 1e-6), ContractError);
}

TEST_CASE("stats accessors reject tags outside the tagset") {
  const auto stats = compute_stats(corpus_from("a/X b/Y"), 1e-6);
  CHECK_THROWS_AS(stats.tag_prob("Z"), ContractError);
  CHECK_THROWS_AS(stats.tag_prob_given_prev("X", "Z"), ContractError);
  CHECK(stats.index_of("Z") == -1);
}

TEST_CASE("hapax_tag_distribution") {
  SUBCASE("single hapax word") {
    const auto corpus =
        corpus_from("zyzzyva/NOUN the/DET | the/DET dog/ANIMAL dog/ANIMAL");
    const auto dist = hapax_tag_distribution(corpus);
    REQUIRE(dist.size() == 1);
    CHECK(dist.at("NOUN") == doctest::Approx(1.0));
  }
  SUBCASE("no hapax words") {
    const auto corpus = corpus_from("a/X b/Y | a/X b/Y");
    CHECK(hapax_tag_distribution(corpus).empty());
  }
  SUBCASE("hand-counted mixture") {
    // Hapaxes h1/NOUN, h2/NOUN, h3/VERB among repeated fillers.
    const auto corpus = corpus_from(
        "h1/NOUN f/DET h2/NOUN | f/DET h3/VERB f/DET");
    const auto dist = hapax_tag_distribution(corpus);
    REQUIRE(dist.size() == 2);
    CHECK(dist.at("NOUN") == doctest::Approx(2.0 / 3.0));
    CHECK(dist.at("VERB") == doctest::Approx(1.0 / 3.0));
  }
}
