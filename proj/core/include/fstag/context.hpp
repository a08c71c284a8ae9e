#ifndef FSTAG_CONTEXT_HPP_
#define FSTAG_CONTEXT_HPP_

#include <optional>
#include <string>
#include <vector>

#include "fstag/classes.hpp"
#include "fstag/corpus.hpp"

namespace fstag {

// Candidate tags of one position with their contextual scores. Scores
// are unnormalized: only ratios and argmaxes are ever consumed, so
// normalizing could not change any decision.
struct PairList {
  struct Entry {
    std::string tag;
    double prob;
  };
  std::vector<Entry> entries;

  std::vector<std::string> tag_list() const;
  std::vector<double> prob_vector() const;
};

// Left context of a position: the sentence boundary or the reduced
// class chosen at the preceding position.
struct LeftContext {
  const ReducedAmbiguityClass* prev = nullptr;

  static LeftContext boundary() { return {}; }
  static LeftContext after(const ReducedAmbiguityClass& r) { return {&r}; }
  bool is_boundary() const { return prev == nullptr; }
};

// Right context of a position: the sentence boundary or the tag chosen
// at the following position.
struct RightContext {
  std::optional<std::string> next_tag;

  static RightContext boundary() { return {}; }
  static RightContext before(std::string tag) { return {std::move(tag)}; }
  bool is_boundary() const { return !next_tag.has_value(); }
};

// Sentence-initial score of tag t within class c:
//   P(t | #) * P(t | c) / P(t).
// The independence approximation can push the score above 1; callers
// only compare scores. Throws ContractError when t is not in c.
double tag_prob_t1_initial(const std::string& t, const AmbiguityClass& c,
                           const CorpusStats& stats);

// Mixture estimate of P(t | preceding reduced class):
//   sum_k P(t | prev_tag_k) * P(prev_tag_k | r_prev).
double tag_prob_given_reduced(const std::string& t,
                              const ReducedAmbiguityClass& r_prev,
                              const CorpusStats& stats);

// Inner-position score of tag t within class c after r_prev:
//   P(t | r_prev) * P(t | c) / P(t).
double tag_prob_t1_inner(const std::string& t,
                         const ReducedAmbiguityClass& r_prev,
                         const AmbiguityClass& c, const CorpusStats& stats);

// One scored entry per tag of c, in the class's tag order.
PairList build_pair_list(const AmbiguityClass& c, const LeftContext& left,
                         const CorpusStats& stats);

// Keeps exactly the entries whose score is within factor tau of the
// maximum (survive iff prob / max >= tau). The argmax always survives,
// so the result is never empty. Requires 0 < tau <= 1.
PairList reduce_pair_list(const PairList& pl, double tau);

// Among inventory entries with the same tag list as pl, the one whose
// probability vector is most cosine-similar to pl's scores; ties go to
// the lowest variant. Throws DataError when no entry matches the tag
// list (an inventory-closure violation).
const ReducedAmbiguityClass& select_reduced_class(const PairList& pl,
                                                  const ReducedInventory& inv);

// Sentence-final score of tag t within reduced class r:
//   P(t | #following) * P(t | r) / P(t).
double tag_prob_t2_final(const std::string& t, const ReducedAmbiguityClass& r,
                         const CorpusStats& stats);

// Inner-position score of tag t within r given the following tag:
//   P(t | t_next) * P(t | r) / P(t),
// where P(t | t_next) is estimated from bigram counts read in the
// (t, t_next) direction.
double tag_prob_t2_inner(const std::string& t, const ReducedAmbiguityClass& r,
                         const std::string& t_next, const CorpusStats& stats);

// Argmax tag of r under the right context; exact ties go to the first
// tag in canonical order.
std::string select_tag(const ReducedAmbiguityClass& r,
                       const RightContext& right, const CorpusStats& stats);

}  // namespace fstag

#endif  // FSTAG_CONTEXT_HPP_
