#include "fstag/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "fstag/error.hpp"
#include "textio.hpp"

namespace fstag {

namespace {

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

double HmmModel::transition(int prev, int t) const {
  const auto cols = tags.size() + 1;
  return trans[static_cast<std::size_t>(prev + 1) * cols +
               static_cast<std::size_t>(t)];
}

double HmmModel::emission(int t, int cls) const {
  return emit[static_cast<std::size_t>(t) *
                  static_cast<std::size_t>(class_symbols.size()) +
              static_cast<std::size_t>(cls)];
}

void HmmModel::finalize() {
  log_trans.resize(trans.size());
  log_emit.resize(emit.size());
  std::transform(trans.begin(), trans.end(), log_trans.begin(),
                 [](double p) { return std::log(p); });
  std::transform(emit.begin(), emit.end(), log_emit.begin(),
                 [](double p) { return std::log(p); });
}

int HmmModel::tag_index(const std::string& tag) const {
  const auto it = std::lower_bound(tags.begin(), tags.end(), tag);
  if (it == tags.end() || *it != tag) return -1;
  return static_cast<int>(it - tags.begin());
}

HmmModel train_hmm(const TaggedCorpus& corpus,
                   const std::vector<std::string>& class_symbols,
                   double floor) {
  HmmModel m;
  m.floor = floor;
  m.tags = corpus.tagset;
  std::sort(m.tags.begin(), m.tags.end());
  m.tags.erase(std::unique(m.tags.begin(), m.tags.end()), m.tags.end());
  if (m.tags.empty()) throw DataError("cannot train an HMM on an empty corpus");

  for (const auto& sym : class_symbols)
    if (m.class_symbols.add(sym) !=
        static_cast<std::int32_t>(m.class_symbols.size()) - 1)
      throw ContractError("duplicate class symbol " + sym +
                          " in the observation alphabet");

  const std::size_t t_count = m.tags.size();
  const std::size_t c_count = static_cast<std::size_t>(m.class_symbols.size());
  if (!(floor > 0.0 && floor < 1.0 / static_cast<double>(t_count + 1) &&
        floor < 1.0 / static_cast<double>(c_count)))
    throw ContractError("floor must lie in (0, 1/(|tags|+1)) and below "
                        "1/|class symbols|");

  const std::size_t cols = t_count + 1;
  std::vector<std::vector<double>> trans_counts(t_count + 1,
                                                std::vector<double>(cols, 0.0));
  std::vector<std::vector<double>> emit_counts(t_count,
                                               std::vector<double>(c_count, 0.0));

  for (const auto& sent : corpus.sentences) {
    int prev = -1;
    for (const auto& tok : sent) {
      const int t = m.tag_index(tok.tag);
      const auto cls = m.class_symbols.find(tok.class_sym);
      if (cls < 0)
        throw DataError("token class " + tok.class_sym +
                        " is outside the observation alphabet");
      trans_counts[static_cast<std::size_t>(prev + 1)]
                  [static_cast<std::size_t>(t)] += 1.0;
      emit_counts[static_cast<std::size_t>(t)]
                 [static_cast<std::size_t>(cls)] += 1.0;
      prev = t;
    }
    if (prev >= 0)
      trans_counts[static_cast<std::size_t>(prev + 1)][t_count] += 1.0;
  }

  m.trans.resize((t_count + 1) * cols);
  for (std::size_t r = 0; r <= t_count; ++r) {
    const auto row = floored_distribution(trans_counts[r], floor);
    std::copy(row.begin(), row.end(), m.trans.begin() + r * cols);
  }
  m.emit.resize(t_count * c_count);
  for (std::size_t r = 0; r < t_count; ++r) {
    const auto row = floored_distribution(emit_counts[r], floor);
    std::copy(row.begin(), row.end(), m.emit.begin() + r * c_count);
  }
  m.finalize();
  return m;
}

std::vector<std::int32_t> viterbi(const HmmModel& m,
                                  std::span<const std::int32_t> classes) {
  if (classes.empty()) return {};
  const auto t_count = m.tags.size();
  const auto c_count = static_cast<std::size_t>(m.class_symbols.size());
  const auto cols = t_count + 1;
  const double neg_inf = -std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i] < 0 || static_cast<std::size_t>(classes[i]) >= c_count)
      throw ContractError("class id out of range at position " +
                          std::to_string(i));

  std::vector<double> delta(t_count), next(t_count);
  std::vector<std::int32_t> psi(classes.size() * t_count, -1);

  for (std::size_t t = 0; t < t_count; ++t)
    delta[t] = m.log_trans[t] +
               m.log_emit[t * c_count + static_cast<std::size_t>(classes[0])];

  for (std::size_t i = 1; i < classes.size(); ++i) {
    for (std::size_t t = 0; t < t_count; ++t) {
      double best = neg_inf;
      std::int32_t arg = -1;
      for (std::size_t prev = 0; prev < t_count; ++prev) {
        const double score = delta[prev] + m.log_trans[(prev + 1) * cols + t];
        if (score > best) {
          best = score;
          arg = static_cast<std::int32_t>(prev);
        }
      }
      next[t] = best +
                m.log_emit[t * c_count + static_cast<std::size_t>(classes[i])];
      psi[i * t_count + t] = arg;
    }
    std::swap(delta, next);
  }

  double best = neg_inf;
  std::int32_t last = -1;
  for (std::size_t t = 0; t < t_count; ++t) {
    const double score = delta[t] + m.log_trans[(t + 1) * cols + t_count];
    if (score > best) {
      best = score;
      last = static_cast<std::int32_t>(t);
    }
  }

  std::vector<std::int32_t> path(classes.size());
  path.back() = last;
  for (std::size_t i = classes.size() - 1; i > 0; --i)
    path[i - 1] = psi[i * t_count + static_cast<std::size_t>(path[i])];
  return path;
}

std::vector<std::string> viterbi_tags(const HmmModel& m,
                                      const std::vector<std::string>& classes) {
  std::vector<std::int32_t> ids(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i) {
    ids[i] = m.class_symbols.find(classes[i]);
    if (ids[i] < 0)
      throw DataError("class symbol \"" + classes[i] + "\" at position " +
                      std::to_string(i) + " is outside the model's alphabet");
  }
  const auto path = viterbi(m, ids);
  std::vector<std::string> out(path.size());
  for (std::size_t i = 0; i < path.size(); ++i)
    out[i] = m.tags[static_cast<std::size_t>(path[i])];
  return out;
}

void write_hmm_file(const HmmModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write HMM file: " + path);
  const auto t_count = m.tags.size();
  const auto c_count = static_cast<std::size_t>(m.class_symbols.size());
  const auto cols = t_count + 1;

  out << "fstag-hmm 1\n";
  out << "floor\t" << textio::format_double(m.floor) << '\n';
  out << "tags\t" << t_count << '\n';
  for (const auto& tag : m.tags) out << tag << '\n';
  out << "classes\t" << c_count << '\n';
  for (const auto& sym : m.class_symbols.symbols()) out << sym << '\n';
  for (std::size_t r = 0; r <= t_count; ++r)
    out << "trans\t" << (r == 0 ? std::string("#") : m.tags[r - 1]) << '\t'
        << textio::join_row(m.trans.data() + r * cols, cols) << '\n';
  for (std::size_t r = 0; r < t_count; ++r)
    out << "emit\t" << m.tags[r] << '\t'
        << textio::join_row(m.emit.data() + r * c_count, c_count) << '\n';
  if (!out) throw DataError("short write to HMM file: " + path);
}

HmmModel read_hmm_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open HMM file: " + path);
  textio::LineReader reader(in, path);

  if (reader.next("format header") != "fstag-hmm 1")
    throw DataError(reader.where() + ": not an HMM file (bad header)");

  HmmModel m;
  m.floor = textio::parse_double(
      textio::expect_kv(reader.next("floor"), "floor", reader.where()),
      reader.where());

  const auto t_count = textio::parse_size(
      textio::expect_kv(reader.next("tag count"), "tags", reader.where()),
      reader.where());
  if (t_count == 0) throw DataError(reader.where() + ": empty tagset");
  m.tags.reserve(t_count);
  for (std::size_t i = 0; i < t_count; ++i) m.tags.push_back(reader.next("tag"));
  if (!std::is_sorted(m.tags.begin(), m.tags.end()))
    throw DataError(path + ": tag list is not in canonical order");

  const auto c_count = textio::parse_size(
      textio::expect_kv(reader.next("class count"), "classes", reader.where()),
      reader.where());
  if (c_count == 0) throw DataError(reader.where() + ": empty class alphabet");
  for (std::size_t i = 0; i < c_count; ++i) {
    const auto sym = reader.next("class symbol");
    if (m.class_symbols.add(sym) != static_cast<std::int32_t>(i))
      throw DataError(path + ": duplicate class symbol " + sym);
  }

  const auto cols = t_count + 1;
  m.trans.resize((t_count + 1) * cols);
  for (std::size_t r = 0; r <= t_count; ++r) {
    const auto fields =
        textio::split_tabs(reader.next("transition row"), 3, reader.where());
    if (fields[0] != "trans")
      throw DataError(reader.where() + ": expected a \"trans\" row");
    const auto row = textio::parse_row(fields[2], cols, reader.where());
    std::copy(row.begin(), row.end(), m.trans.begin() + r * cols);
  }
  m.emit.resize(t_count * c_count);
  for (std::size_t r = 0; r < t_count; ++r) {
    const auto fields =
        textio::split_tabs(reader.next("emission row"), 3, reader.where());
    if (fields[0] != "emit")
      throw DataError(reader.where() + ": expected an \"emit\" row");
    const auto row = textio::parse_row(fields[2], c_count, reader.where());
    std::copy(row.begin(), row.end(), m.emit.begin() + r * c_count);
  }

  m.finalize();
  return m;
}

}  // namespace fstag
