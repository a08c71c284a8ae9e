#include "fstag/context.hpp"

#include <algorithm>

#include "fstag/error.hpp"

namespace fstag {

std::vector<std::string> PairList::tag_list() const {
  std::vector<std::string> tags;
  tags.reserve(entries.size());
  for (const auto& e : entries) tags.push_back(e.tag);
  return tags;
}

std::vector<double> PairList::prob_vector() const {
  std::vector<double> probs;
  probs.reserve(entries.size());
  for (const auto& e : entries) probs.push_back(e.prob);
  return probs;
}

double tag_prob_t1_initial(const std::string& t, const AmbiguityClass& c,
                           const CorpusStats& stats) {
  return stats.tag_prob_initial(t) * c.prob_of(t) / stats.tag_prob(t);
}

double tag_prob_given_reduced(const std::string& t,
                              const ReducedAmbiguityClass& r_prev,
                              const CorpusStats& stats) {
  double p = 0.0;
  for (std::size_t k = 0; k < r_prev.tags.size(); ++k)
    p += stats.tag_prob_given_prev(t, r_prev.tags[k]) * r_prev.probs[k];
  return p;
}

double tag_prob_t1_inner(const std::string& t,
                         const ReducedAmbiguityClass& r_prev,
                         const AmbiguityClass& c, const CorpusStats& stats) {
  return tag_prob_given_reduced(t, r_prev, stats) * c.prob_of(t) /
         stats.tag_prob(t);
}

PairList build_pair_list(const AmbiguityClass& c, const LeftContext& left,
                         const CorpusStats& stats) {
  PairList pl;
  pl.entries.reserve(c.tags.size());
  for (const auto& tag : c.tags) {
    const double score = left.is_boundary()
                             ? tag_prob_t1_initial(tag, c, stats)
                             : tag_prob_t1_inner(tag, *left.prev, c, stats);
    pl.entries.push_back({tag, score});
  }
  return pl;
}

PairList reduce_pair_list(const PairList& pl, double tau) {
  if (!(tau > 0.0 && tau <= 1.0))
    throw ContractError("reduce_pair_list: tau must be in (0, 1]");
  if (pl.entries.empty())
    throw ContractError("reduce_pair_list: empty pair list");
  double max_prob = pl.entries.front().prob;
  for (const auto& e : pl.entries) max_prob = std::max(max_prob, e.prob);

  PairList reduced;
  for (const auto& e : pl.entries)
    if (e.prob / max_prob >= tau) reduced.entries.push_back(e);
  return reduced;
}

const ReducedAmbiguityClass& select_reduced_class(const PairList& pl,
                                                  const ReducedInventory& inv) {
  const auto tags = pl.tag_list();
  const auto candidates = inv.variants_of(tags);
  if (candidates.empty())
    throw DataError("no reduced class with tag list " +
                    class_symbol_for(tags) +
                    " in the inventory (closure violation)");
  const auto probs = pl.prob_vector();
  const ReducedAmbiguityClass* best = nullptr;
  double best_sim = -1.0;
  // Candidates come in variant order; strict > keeps the lowest variant
  // on ties.
  for (int idx : candidates) {
    const auto& r = inv.classes[idx];
    const double sim = cosine(probs, r.probs);
    if (sim > best_sim) {
      best_sim = sim;
      best = &r;
    }
  }
  return *best;
}

double tag_prob_t2_final(const std::string& t, const ReducedAmbiguityClass& r,
                         const CorpusStats& stats) {
  return stats.tag_prob_final(t) * r.prob_of(t) / stats.tag_prob(t);
}

double tag_prob_t2_inner(const std::string& t, const ReducedAmbiguityClass& r,
                         const std::string& t_next, const CorpusStats& stats) {
  return stats.tag_prob_given_next(t, t_next) * r.prob_of(t) /
         stats.tag_prob(t);
}

std::string select_tag(const ReducedAmbiguityClass& r,
                       const RightContext& right, const CorpusStats& stats) {
  const std::string* best = nullptr;
  double best_score = 0.0;
  // Tags are in canonical order; strict > keeps the first tag on ties.
  for (const auto& tag : r.tags) {
    const double score = right.is_boundary()
                             ? tag_prob_t2_final(tag, r, stats)
                             : tag_prob_t2_inner(tag, r, *right.next_tag, stats);
    if (best == nullptr || score > best_score) {
      best = &tag;
      best_score = score;
    }
  }
  if (best == nullptr)
    throw ContractError("select_tag: reduced class has no tags");
  return *best;
}

}  // namespace fstag
