#include "fstag/transducer.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "fstag/context.hpp"
#include "fstag/error.hpp"

namespace fstag {

std::int32_t SymbolTable::add(const std::string& symbol) {
  const auto it = index_.find(symbol);
  if (it != index_.end()) return it->second;
  const auto id = static_cast<std::int32_t>(symbols_.size());
  symbols_.push_back(symbol);
  index_[symbol] = id;
  return id;
}

std::int32_t SymbolTable::find(const std::string& symbol) const {
  const auto it = index_.find(symbol);
  return it == index_.end() ? -1 : it->second;
}

const std::string& SymbolTable::name(std::int32_t id) const {
  return symbols_.at(static_cast<std::size_t>(id));
}

std::int64_t SequentialTransducer::num_arcs() const {
  std::int64_t n = 0;
  for (const auto& arcs : arcs_) n += static_cast<std::int64_t>(arcs.size());
  return n;
}

std::int32_t SequentialTransducer::add_state() {
  arcs_.emplace_back();
  return static_cast<std::int32_t>(arcs_.size()) - 1;
}

void SequentialTransducer::add_arc(std::int32_t src, std::int32_t input,
                                   std::int32_t output, std::int32_t dst) {
  if (src < 0 || src >= num_states() || dst < 0 || dst >= num_states())
    throw ContractError("add_arc: state index out of range");
  if (input < 0 || input >= input_alphabet.size())
    throw ContractError("add_arc: input symbol id out of range");
  if (output < 0 || output >= output_alphabet.size())
    throw ContractError("add_arc: output symbol id out of range");
  auto& arcs = arcs_[src];
  const Arc arc{input, output, dst};
  const auto pos = std::lower_bound(
      arcs.begin(), arcs.end(), input,
      [](const Arc& a, std::int32_t in) { return a.input < in; });
  if (pos != arcs.end() && pos->input == input)
    throw ContractError("add_arc: duplicate arc for (state " +
                        std::to_string(src) + ", " +
                        input_alphabet.name(input) + ")");
  arcs.insert(pos, arc);
}

const SequentialTransducer::Arc* SequentialTransducer::find_arc(
    std::int32_t state, std::int32_t input) const {
  const auto& arcs = arcs_[state];
  const auto pos = std::lower_bound(
      arcs.begin(), arcs.end(), input,
      [](const Arc& a, std::int32_t in) { return a.input < in; });
  if (pos == arcs.end() || pos->input != input) return nullptr;
  return &*pos;
}

void SequentialTransducer::run(std::span<const std::int32_t> input,
                               std::span<std::int32_t> output) const {
  std::int32_t state = initial;
  for (std::size_t i = 0; i < input.size(); ++i) {
    const Arc* arc = find_arc(state, input[i]);
    if (arc == nullptr) {
      std::ostringstream msg;
      msg << "no arc from state " << state << " on symbol "
          << input_alphabet.name(input[i]) << " at position " << i;
      throw DataError(msg.str());
    }
    output[i] = arc->output;
    state = arc->dst;
  }
}

namespace {

std::vector<std::int32_t> intern_input(const SequentialTransducer& t,
                                       const std::vector<std::string>& input) {
  std::vector<std::int32_t> ids(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    ids[i] = t.input_alphabet.find(input[i]);
    if (ids[i] < 0) {
      std::ostringstream msg;
      msg << "input symbol \"" << input[i] << "\" at position " << i
          << " is outside the input alphabet";
      throw DataError(msg.str());
    }
  }
  return ids;
}

std::vector<std::string> extern_output(const SequentialTransducer& t,
                                       const std::vector<std::int32_t>& ids) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (const auto id : ids) out.push_back(t.output_alphabet.name(id));
  return out;
}

}  // namespace

std::vector<std::string> apply_ltr(const SequentialTransducer& t,
                                   const std::vector<std::string>& input) {
  if (t.direction != Direction::kLeftToRight)
    throw ContractError("apply_ltr: machine is right-to-left");
  auto ids = intern_input(t, input);
  std::vector<std::int32_t> out(ids.size());
  t.run(ids, out);
  return extern_output(t, out);
}

std::vector<std::string> apply_rtl(const SequentialTransducer& t,
                                   const std::vector<std::string>& input) {
  if (t.direction != Direction::kRightToLeft)
    throw ContractError("apply_rtl: machine is left-to-right");
  auto ids = intern_input(t, input);
  std::reverse(ids.begin(), ids.end());
  std::vector<std::int32_t> out(ids.size());
  t.run(ids, out);
  std::reverse(out.begin(), out.end());
  return extern_output(t, out);
}

namespace {

// Reachable state set from the initial state, renumbered in ascending
// old-index order so the result does not depend on traversal order.
std::vector<std::int32_t> reachability_map(const SequentialTransducer& t) {
  std::vector<bool> seen(static_cast<std::size_t>(t.num_states()), false);
  std::deque<std::int32_t> queue{t.initial};
  seen[static_cast<std::size_t>(t.initial)] = true;
  while (!queue.empty()) {
    const auto s = queue.front();
    queue.pop_front();
    for (const auto& arc : t.arcs_from(s))
      if (!seen[static_cast<std::size_t>(arc.dst)]) {
        seen[static_cast<std::size_t>(arc.dst)] = true;
        queue.push_back(arc.dst);
      }
  }
  std::vector<std::int32_t> remap(seen.size(), -1);
  std::int32_t next = 0;
  for (std::size_t s = 0; s < seen.size(); ++s)
    if (seen[s]) remap[s] = next++;
  return remap;
}

SequentialTransducer prune_unreachable(const SequentialTransducer& t) {
  const auto remap = reachability_map(t);
  SequentialTransducer pruned;
  pruned.direction = t.direction;
  pruned.input_alphabet = t.input_alphabet;
  pruned.output_alphabet = t.output_alphabet;
  for (std::int32_t s = 0; s < t.num_states(); ++s)
    if (remap[static_cast<std::size_t>(s)] >= 0) pruned.add_state();
  pruned.initial = remap[static_cast<std::size_t>(t.initial)];
  for (std::int32_t s = 0; s < t.num_states(); ++s) {
    const auto new_src = remap[static_cast<std::size_t>(s)];
    if (new_src < 0) continue;
    for (const auto& arc : t.arcs_from(s))
      pruned.add_arc(new_src, arc.input, arc.output,
                     remap[static_cast<std::size_t>(arc.dst)]);
  }
  return pruned;
}

}  // namespace

SequentialTransducer build_t1(const ClassInventory& classes,
                              const ReducedInventory& reduced,
                              const CorpusStats& stats, double tau) {
  SequentialTransducer t1;
  t1.direction = Direction::kLeftToRight;
  for (const auto& cls : classes.classes) t1.input_alphabet.add(cls.symbol);
  for (const auto& r : reduced.classes) t1.output_alphabet.add(r.symbol);

  t1.initial = t1.add_state();
  for (std::size_t i = 0; i < reduced.size(); ++i) t1.add_state();

  for (std::int32_t s = 0; s < t1.num_states(); ++s) {
    const LeftContext left =
        s == t1.initial
            ? LeftContext::boundary()
            : LeftContext::after(reduced.classes[static_cast<std::size_t>(s) - 1]);
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const auto& cls = classes.classes[c];
      const auto pl = reduce_pair_list(build_pair_list(cls, left, stats), tau);
      const ReducedAmbiguityClass& r = select_reduced_class(pl, reduced);
      const auto r_index =
          static_cast<std::int32_t>(&r - reduced.classes.data());
      t1.add_arc(s, static_cast<std::int32_t>(c),
                 t1.output_alphabet.find(r.symbol), r_index + 1);
    }
  }

  // Reduced classes unlikely in any context vanish with their states.
  auto pruned = prune_unreachable(t1);

  // Compact the output alphabet to the symbols still emitted.
  SymbolTable compacted;
  std::vector<bool> used(static_cast<std::size_t>(pruned.output_alphabet.size()),
                         false);
  for (std::int32_t s = 0; s < pruned.num_states(); ++s)
    for (const auto& arc : pruned.arcs_from(s))
      used[static_cast<std::size_t>(arc.output)] = true;
  std::vector<std::int32_t> remap(used.size(), -1);
  for (std::size_t i = 0; i < used.size(); ++i)
    if (used[i]) remap[i] = compacted.add(pruned.output_alphabet.name(
        static_cast<std::int32_t>(i)));

  SequentialTransducer result;
  result.direction = pruned.direction;
  result.input_alphabet = pruned.input_alphabet;
  result.output_alphabet = compacted;
  for (std::int32_t s = 0; s < pruned.num_states(); ++s) result.add_state();
  result.initial = pruned.initial;
  for (std::int32_t s = 0; s < pruned.num_states(); ++s)
    for (const auto& arc : pruned.arcs_from(s))
      result.add_arc(s, arc.input, remap[static_cast<std::size_t>(arc.output)],
                     arc.dst);
  return result;
}

SequentialTransducer build_t2(const std::vector<std::string>& reduced_used,
                              const ReducedInventory& reduced,
                              const std::vector<std::string>& tagset,
                              const CorpusStats& stats) {
  SequentialTransducer t2;
  t2.direction = Direction::kRightToLeft;
  for (const auto& sym : reduced_used) t2.input_alphabet.add(sym);
  for (const auto& tag : tagset) t2.output_alphabet.add(tag);

  t2.initial = t2.add_state();
  for (std::size_t i = 0; i < tagset.size(); ++i) t2.add_state();

  for (std::int32_t s = 0; s < t2.num_states(); ++s) {
    const RightContext right =
        s == t2.initial
            ? RightContext::boundary()
            : RightContext::before(tagset[static_cast<std::size_t>(s) - 1]);
    for (std::size_t i = 0; i < reduced_used.size(); ++i) {
      const ReducedAmbiguityClass* r = reduced.find(reduced_used[i]);
      if (r == nullptr)
        throw DataError("build_t2: reduced class " + reduced_used[i] +
                        " absent from the inventory");
      const std::string tag = select_tag(*r, right, stats);
      const auto tag_id = t2.output_alphabet.find(tag);
      t2.add_arc(s, static_cast<std::int32_t>(i), tag_id, tag_id + 1);
    }
  }
  return t2;
}

SequentialTransducer minimize(const SequentialTransducer& t) {
  const auto machine = prune_unreachable(t);
  const auto n = static_cast<std::size_t>(machine.num_states());

  // Moore refinement over (input, output, destination block) signatures.
  // All states are accepting, so the starting partition is one block.
  std::vector<std::int32_t> block(n, 0);
  std::size_t block_count = 1;
  for (;;) {
    std::map<std::vector<std::int64_t>, std::int32_t> signature_block;
    std::vector<std::int32_t> next_block(n);
    for (std::size_t s = 0; s < n; ++s) {
      std::vector<std::int64_t> sig;
      sig.reserve(machine.arcs_from(static_cast<std::int32_t>(s)).size() * 3 + 1);
      sig.push_back(block[s]);
      for (const auto& arc : machine.arcs_from(static_cast<std::int32_t>(s))) {
        sig.push_back(arc.input);
        sig.push_back(arc.output);
        sig.push_back(block[static_cast<std::size_t>(arc.dst)]);
      }
      const auto it = signature_block.find(sig);
      if (it != signature_block.end()) {
        next_block[s] = it->second;
      } else {
        const auto id = static_cast<std::int32_t>(signature_block.size());
        signature_block.emplace(std::move(sig), id);
        next_block[s] = id;
      }
    }
    const std::size_t next_count = signature_block.size();
    // Renumber blocks by first occurrence so state 0 stays in block 0.
    std::vector<std::int32_t> renumber(next_count, -1);
    std::int32_t fresh = 0;
    for (std::size_t s = 0; s < n; ++s) {
      auto& r = renumber[static_cast<std::size_t>(next_block[s])];
      if (r < 0) r = fresh++;
      next_block[s] = r;
    }
    const bool stable = next_count == block_count;
    block = std::move(next_block);
    block_count = next_count;
    if (stable) break;
  }

  SequentialTransducer result;
  result.direction = machine.direction;
  result.input_alphabet = machine.input_alphabet;
  result.output_alphabet = machine.output_alphabet;
  for (std::size_t b = 0; b < block_count; ++b) result.add_state();
  result.initial = block[static_cast<std::size_t>(machine.initial)];

  std::vector<bool> emitted(block_count, false);
  for (std::size_t s = 0; s < n; ++s) {
    const auto b = static_cast<std::size_t>(block[s]);
    if (emitted[b]) continue;
    emitted[b] = true;
    for (const auto& arc : machine.arcs_from(static_cast<std::int32_t>(s)))
      result.add_arc(static_cast<std::int32_t>(b), arc.input, arc.output,
                     block[static_cast<std::size_t>(arc.dst)]);
  }
  return result;
}

namespace {

constexpr char kMagic[4] = {'F', 'S', 'Q', 'T'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 24));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  put_u32(out, static_cast<std::uint32_t>(v));
  put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

void put_string(std::vector<std::uint8_t>& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    const std::uint64_t lo = u32();
    const std::uint64_t hi = u32();
    return lo | (hi << 32);
  }
  std::string string() {
    const auto len = u32();
    need(len);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), len);
    pos_ += len;
    return s;
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) {
    if (pos_ + n > bytes_.size())
      throw TruncatedModelError("transducer image ends mid-record");
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize(const SequentialTransducer& t) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u32(out, kFormatVersion);
  out.push_back(static_cast<std::uint8_t>(t.direction));
  put_u32(out, static_cast<std::uint32_t>(t.num_states()));
  put_u32(out, static_cast<std::uint32_t>(t.initial));
  put_u32(out, static_cast<std::uint32_t>(t.input_alphabet.size()));
  for (const auto& s : t.input_alphabet.symbols()) put_string(out, s);
  put_u32(out, static_cast<std::uint32_t>(t.output_alphabet.size()));
  for (const auto& s : t.output_alphabet.symbols()) put_string(out, s);
  put_u64(out, static_cast<std::uint64_t>(t.num_arcs()));
  for (std::int32_t s = 0; s < t.num_states(); ++s)
    for (const auto& arc : t.arcs_from(s)) {
      put_u32(out, static_cast<std::uint32_t>(s));
      put_u32(out, static_cast<std::uint32_t>(arc.input));
      put_u32(out, static_cast<std::uint32_t>(arc.output));
      put_u32(out, static_cast<std::uint32_t>(arc.dst));
    }
  return out;
}

SequentialTransducer deserialize(std::span<const std::uint8_t> bytes) {
  Reader reader(bytes);
  char magic[4];
  for (char& c : magic) c = static_cast<char>(reader.u8());
  if (!std::equal(magic, magic + 4, kMagic))
    throw FormatVersionError("not a transducer image (bad magic)");
  const auto version = reader.u32();
  if (version != kFormatVersion)
    throw FormatVersionError("unsupported transducer format version " +
                             std::to_string(version));

  SequentialTransducer t;
  const auto direction = reader.u8();
  if (direction > 1)
    throw CorruptModelError("invalid direction flag " +
                            std::to_string(direction));
  t.direction = static_cast<Direction>(direction);

  const auto num_states = reader.u32();
  const auto initial = reader.u32();
  if (initial >= num_states && num_states > 0)
    throw CorruptModelError("initial state index out of range");
  if (num_states == 0) throw CorruptModelError("transducer has no states");

  const auto in_count = reader.u32();
  for (std::uint32_t i = 0; i < in_count; ++i)
    t.input_alphabet.add(reader.string());
  const auto out_count = reader.u32();
  for (std::uint32_t i = 0; i < out_count; ++i)
    t.output_alphabet.add(reader.string());
  if (static_cast<std::uint32_t>(t.input_alphabet.size()) != in_count ||
      static_cast<std::uint32_t>(t.output_alphabet.size()) != out_count)
    throw CorruptModelError("duplicate symbol in alphabet table");

  for (std::uint32_t s = 0; s < num_states; ++s) t.add_state();
  t.initial = static_cast<std::int32_t>(initial);

  const auto num_arcs = reader.u64();
  for (std::uint64_t i = 0; i < num_arcs; ++i) {
    const auto src = reader.u32();
    const auto input = reader.u32();
    const auto output = reader.u32();
    const auto dst = reader.u32();
    if (src >= num_states || dst >= num_states)
      throw CorruptModelError("arc references state outside the machine");
    if (input >= in_count || output >= out_count)
      throw CorruptModelError("arc references symbol outside its alphabet");
    try {
      t.add_arc(static_cast<std::int32_t>(src), static_cast<std::int32_t>(input),
                static_cast<std::int32_t>(output), static_cast<std::int32_t>(dst));
    } catch (const ContractError& e) {
      throw CorruptModelError(e.what());
    }
  }
  if (!reader.at_end())
    throw CorruptModelError("trailing bytes after transducer image");
  return t;
}

void write_transducer_file(const SequentialTransducer& t,
                           const std::string& path) {
  const auto bytes = serialize(t);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write transducer file: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("short write to transducer file: " + path);
}

SequentialTransducer read_transducer_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open transducer file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

void write_text_dump(std::ostream& out, const SequentialTransducer& t) {
  out << "fstag-transducer-dump 1\n";
  out << "direction\t"
      << (t.direction == Direction::kLeftToRight ? "ltr" : "rtl") << '\n';
  out << "states\t" << t.num_states() << "\tinitial\t" << t.initial << '\n';
  out << "arcs\t" << t.num_arcs() << '\n';
  for (std::int32_t s = 0; s < t.num_states(); ++s)
    for (const auto& arc : t.arcs_from(s))
      out << s << '\t' << t.input_alphabet.name(arc.input) << '\t'
          << t.output_alphabet.name(arc.output) << '\t' << arc.dst << '\n';
}

}  // namespace fstag
