#ifndef FSTAG_TRANSDUCER_HPP_
#define FSTAG_TRANSDUCER_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fstag/classes.hpp"
#include "fstag/corpus.hpp"

namespace fstag {

enum class Direction : std::uint8_t { kLeftToRight = 0, kRightToLeft = 1 };

// Interned symbols; ids are dense and stable in insertion order.
class SymbolTable {
 public:
  std::int32_t add(const std::string& symbol);          // idempotent
  std::int32_t find(const std::string& symbol) const;   // -1 when absent
  const std::string& name(std::int32_t id) const;
  std::int32_t size() const { return static_cast<std::int32_t>(symbols_.size()); }
  bool operator==(const SymbolTable& other) const {
    return symbols_ == other.symbols_;
  }
  const std::vector<std::string>& symbols() const { return symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, std::int32_t> index_;
};

// A deterministic sequential transducer: at most one arc per
// (state, input symbol), every state accepting, exactly one output
// symbol emitted per input symbol. A missing arc is a hard error at
// application time, never a silent skip.
class SequentialTransducer {
 public:
  struct Arc {
    std::int32_t input;
    std::int32_t output;
    std::int32_t dst;

    bool operator==(const Arc&) const = default;
  };

  Direction direction = Direction::kLeftToRight;
  std::int32_t initial = 0;
  SymbolTable input_alphabet;
  SymbolTable output_alphabet;

  std::int32_t num_states() const {
    return static_cast<std::int32_t>(arcs_.size());
  }
  std::int64_t num_arcs() const;
  std::int32_t add_state();
  // Keeps per-state arcs sorted by input id; throws ContractError on a
  // duplicate (state, input) pair or out-of-range ids.
  void add_arc(std::int32_t src, std::int32_t input, std::int32_t output,
               std::int32_t dst);
  const Arc* find_arc(std::int32_t state, std::int32_t input) const;
  std::span<const Arc> arcs_from(std::int32_t state) const {
    return arcs_[state];
  }

  // Runs over pre-interned input ids, writing one output id per input
  // id. For a right-to-left machine the caller passes the reversed
  // input and reverses the output; apply_ltr / apply_rtl do this.
  void run(std::span<const std::int32_t> input,
           std::span<std::int32_t> output) const;

 private:
  std::vector<std::vector<Arc>> arcs_;
};

// Maps a symbol sequence through a left-to-right machine. Throws
// ContractError on direction mismatch, DataError naming the symbol and
// position on an input symbol outside the alphabet or a missing arc.
std::vector<std::string> apply_ltr(const SequentialTransducer& t,
                                   const std::vector<std::string>& input);

// Right-to-left application: reverse the input, run, reverse the output.
std::vector<std::string> apply_rtl(const SequentialTransducer& t,
                                   const std::vector<std::string>& input);

// Builds T1: one state per reduced class plus an initial state; from
// every state one arc per ambiguity class c labeled c:r, where r is the
// most likely reduced class of c after the source state's reduced class
// (sentence boundary at the initial state). Unreachable states are
// pruned and the output alphabet is compacted to the symbols actually
// emitted.
SequentialTransducer build_t1(const ClassInventory& classes,
                              const ReducedInventory& reduced,
                              const CorpusStats& stats, double tau);

// Builds T2 over the reduced classes T1 can emit: one state per tag
// plus an initial state; from every state one arc per reduced class r
// labeled r:t, where t is the most likely tag of r before the source
// state's tag (sentence boundary at the initial state, since T2 runs
// right to left).
SequentialTransducer build_t2(const std::vector<std::string>& reduced_used,
                              const ReducedInventory& reduced,
                              const std::vector<std::string>& tagset,
                              const CorpusStats& stats);

// Moore partition refinement over composite (input, output) arc labels,
// preceded by reachability pruning. The result realizes exactly the
// same string function with at most as many states.
SequentialTransducer minimize(const SequentialTransducer& t);

// Versioned little-endian binary image. deserialize distinguishes a
// bad magic/version (FormatVersionError), a short file
// (TruncatedModelError), and dangling state/symbol ids
// (CorruptModelError).
std::vector<std::uint8_t> serialize(const SequentialTransducer& t);
SequentialTransducer deserialize(std::span<const std::uint8_t> bytes);

void write_transducer_file(const SequentialTransducer& t,
                           const std::string& path);
SequentialTransducer read_transducer_file(const std::string& path);

// Stable text dump for diffing: a header, then one arc per line as
// `src<TAB>input<TAB>output<TAB>dst` with symbolic labels.
void write_text_dump(std::ostream& out, const SequentialTransducer& t);

}  // namespace fstag

#endif  // FSTAG_TRANSDUCER_HPP_
