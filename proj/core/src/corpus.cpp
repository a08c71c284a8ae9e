#include "fstag/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "fstag/error.hpp"

namespace fstag {

std::size_t TaggedCorpus::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

namespace {

bool has_whitespace(const std::string& s) {
  return s.find_first_of(" \t\r\n\v\f") != std::string::npos;
}

}  // namespace

TaggedCorpus parse_corpus(std::istream& in, const std::string& source_name) {
  TaggedCorpus corpus;
  std::set<std::string> seen_tags;
  Sentence current;
  std::string line;
  std::size_t line_no = 0;

  auto flush_sentence = [&] {
    if (!current.empty()) {
      corpus.sentences.push_back(std::move(current));
      current.clear();
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush_sentence();
      continue;
    }
    const auto first_tab = line.find('\t');
    if (first_tab == std::string::npos || first_tab == 0 ||
        first_tab + 1 == line.size() ||
        line.find('\t', first_tab + 1) != std::string::npos) {
      std::ostringstream msg;
      msg << source_name << ": line " << line_no
          << ": expected exactly two tab-separated columns, got \"" << line
          << "\"";
      throw DataError(msg.str());
    }
    TaggedToken tok;
    tok.word = line.substr(0, first_tab);
    tok.tag = line.substr(first_tab + 1);
    if (has_whitespace(tok.tag)) {
      std::ostringstream msg;
      msg << source_name << ": line " << line_no << ": tag \"" << tok.tag
          << "\" contains whitespace";
      throw DataError(msg.str());
    }
    if (seen_tags.insert(tok.tag).second) corpus.tagset.push_back(tok.tag);
    current.push_back(std::move(tok));
  }
  flush_sentence();

  if (corpus.sentences.empty())
    throw DataError(source_name + ": empty corpus");
  return corpus;
}

TaggedCorpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file: " + path);
  return parse_corpus(in, path);
}

void CorpusStats::reindex() {
  index_.clear();
  for (std::size_t i = 0; i < tags.size(); ++i)
    index_[tags[i]] = static_cast<int>(i);
}

int CorpusStats::index_of(const std::string& tag) const {
  auto it = index_.find(tag);
  return it == index_.end() ? -1 : it->second;
}

int CorpusStats::require(const std::string& tag) const {
  const int id = index_of(tag);
  if (id < 0) throw ContractError("tag not in tagset: " + tag);
  return id;
}

double CorpusStats::tag_prob(const std::string& t) const {
  return p_tag[require(t)];
}

double CorpusStats::tag_prob_initial(const std::string& t) const {
  return p_bos[require(t)];
}

double CorpusStats::tag_prob_final(const std::string& t) const {
  return p_eos[require(t)];
}

double CorpusStats::tag_prob_given_prev(const std::string& t,
                                        const std::string& prev) const {
  const std::size_t n = tags.size();
  return p_prev[static_cast<std::size_t>(require(prev)) * n + require(t)];
}

double CorpusStats::tag_prob_given_next(const std::string& t,
                                        const std::string& next) const {
  const std::size_t n = tags.size();
  return p_next[static_cast<std::size_t>(require(next)) * n + require(t)];
}

namespace {

// floor + (1 - n*floor) * count/total per event; uniform when the
// condition was never observed.
std::vector<double> floored_distribution(const std::vector<double>& counts,
                                         double floor) {
  const std::size_t n = counts.size();
  std::vector<double> probs(n);
  double total = 0.0;
  for (double c : counts) total += c;
  if (total <= 0.0) {
    std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(n));
    return probs;
  }
  const double scale = 1.0 - static_cast<double>(n) * floor;
  for (std::size_t i = 0; i < n; ++i)
    probs[i] = floor + scale * (counts[i] / total);
  return probs;
}

}  // namespace

CorpusStats compute_stats(const TaggedCorpus& corpus, double floor) {
  if (corpus.sentences.empty()) throw ContractError("compute_stats: empty corpus");

  CorpusStats stats;
  stats.tags = corpus.tagset;
  std::sort(stats.tags.begin(), stats.tags.end());
  stats.reindex();
  stats.floor = floor;

  const std::size_t n = stats.tags.size();
  if (!(floor > 0.0 && floor < 1.0 / static_cast<double>(n)))
    throw ContractError("compute_stats: floor must satisfy 0 < floor < 1/|tagset|");

  std::vector<double> uni(n, 0.0), bos(n, 0.0), eos(n, 0.0);
  std::vector<std::vector<double>> prev(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> next(n, std::vector<double>(n, 0.0));

  for (const auto& sent : corpus.sentences) {
    for (std::size_t i = 0; i < sent.size(); ++i) {
      const int t = stats.index_of(sent[i].tag);
      uni[t] += 1.0;
      if (i == 0) bos[t] += 1.0;
      if (i + 1 == sent.size()) eos[t] += 1.0;
      if (i + 1 < sent.size()) {
        const int u = stats.index_of(sent[i + 1].tag);
        prev[t][u] += 1.0;  // row = preceding tag, column = current tag
        next[u][t] += 1.0;  // row = following tag, column = current tag
      }
    }
  }

  stats.p_tag = floored_distribution(uni, floor);
  stats.p_bos = floored_distribution(bos, floor);
  stats.p_eos = floored_distribution(eos, floor);
  stats.p_prev.resize(n * n);
  stats.p_next.resize(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row_prev = floored_distribution(prev[r], floor);
    const auto row_next = floored_distribution(next[r], floor);
    std::copy(row_prev.begin(), row_prev.end(), stats.p_prev.begin() + r * n);
    std::copy(row_next.begin(), row_next.end(), stats.p_next.begin() + r * n);
  }
  return stats;
}

std::map<std::string, double> hapax_tag_distribution(const TaggedCorpus& corpus) {
  std::unordered_map<std::string, int> word_freq;
  for (const auto& sent : corpus.sentences)
    for (const auto& tok : sent) ++word_freq[tok.word];

  std::map<std::string, double> counts;
  double total = 0.0;
  for (const auto& sent : corpus.sentences)
    for (const auto& tok : sent)
      if (word_freq.at(tok.word) == 1) {
        counts[tok.tag] += 1.0;
        total += 1.0;
      }
  for (auto& [tag, c] : counts) c /= total;
  return counts;
}

void write_corpus_file(const TaggedCorpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write corpus file: " + path);
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    if (s > 0) out << '\n';
    for (const auto& tok : corpus.sentences[s])
      out << tok.word << '\t' << tok.tag << '\n';
  }
  if (!out) throw DataError("short write to corpus file: " + path);
}

}  // namespace fstag
