#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace glmkit {

// Mask over n-gram slots marking counted vs. skipped positions. Slot 1 is
// the leftmost word; the last slot is the predicted word. Canonical
// patterns start and end with a counted slot: skipping slot 1 trims the
// word (and any skips it exposes) instead of leaving a wildcard.
//
// Text form: '1' = counted, '0' = skipped, e.g. "10101".
class Pattern {
 public:
  static constexpr int kMaxSlots = 8;

  Pattern() = default;  // unigram

  static Pattern counted(int length);
  static Pattern parse(std::string_view text);

  int length() const { return length_; }
  int counted_slots() const;
  int skipped_slots() const { return length_ - counted_slots(); }
  bool is_counted(int slot) const;  // 1-based
  bool has_internal_skip() const { return counted_slots() != length_; }
  bool all_counted() const { return !has_internal_skip(); }

  // Skip operator. Slot 1 removes the word and trims exposed leading
  // skips; interior slots become wildcards. The last slot is never
  // skippable.
  Pattern apply_skip(int slot) const;

  // Reverse of a single wildcard: mark a skipped slot counted again.
  Pattern with_slot_counted(int slot) const;

  // 0-based index into the key words for a counted slot.
  int word_index(int slot) const;

  std::string to_string() const;

  // Mask read as a binary number, most significant bit first
  // ("1011" -> 11). Tie-breaker of the reporting order.
  unsigned value() const;

  auto operator<=>(const Pattern&) const = default;

 private:
  Pattern(std::uint8_t length, std::uint8_t mask)
      : length_(length), mask_(mask) {}

  std::uint8_t length_ = 1;
  std::uint8_t mask_ = 1;  // bit (slot-1) set = counted
};

struct LatticeEdge {
  Pattern parent;
  Pattern child;
  int skipped_slot;  // 1-based position within parent
};

// One edge per counted context slot, ascending. Unigram has none.
std::vector<LatticeEdge> children(const Pattern& p);

// All patterns reachable from the all-counted pattern of the given order,
// sorted by (words used, length, mask value) — the order the sparsity
// report prints its rows in.
std::vector<Pattern> lattice(int order);

// The slot whose fillers the numerator continuation count ranges over:
// the leftmost internal gap, or the virtual left-extension slot when the
// pattern has no internal gap. Not meaningful for the top (full-order)
// node, which uses absolute counts.
struct ContinuationSlot {
  bool left_extension = false;
  int slot = 0;  // 1-based, valid when !left_extension
};
ContinuationSlot continuation_slot(const Pattern& p);

struct SequenceKey {
  Pattern pattern;
  std::vector<std::string> words;  // one per counted slot
};

}  // namespace glmkit
