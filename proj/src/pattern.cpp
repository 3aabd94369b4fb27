#include "glmkit/pattern.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <stdexcept>

namespace glmkit {

Pattern Pattern::counted(int length) {
  if (length < 1 || length > kMaxSlots)
    throw std::invalid_argument("pattern length out of range");
  return Pattern(static_cast<std::uint8_t>(length),
                 static_cast<std::uint8_t>((1u << length) - 1));
}

Pattern Pattern::parse(std::string_view text) {
  if (text.empty() || text.size() > kMaxSlots)
    throw std::invalid_argument("pattern text length out of range");
  std::uint8_t mask = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '1')
      mask |= static_cast<std::uint8_t>(1u << i);
    else if (text[i] != '0')
      throw std::invalid_argument("pattern text must be over {0,1}");
  }
  Pattern p(static_cast<std::uint8_t>(text.size()), mask);
  if (!p.is_counted(1) || !p.is_counted(p.length()))
    throw std::invalid_argument("pattern must start and end counted");
  return p;
}

int Pattern::counted_slots() const { return std::popcount(mask_); }

bool Pattern::is_counted(int slot) const {
  if (slot < 1 || slot > length_)
    throw std::out_of_range("pattern slot out of range");
  return (mask_ >> (slot - 1)) & 1u;
}

Pattern Pattern::apply_skip(int slot) const {
  if (slot < 1 || slot >= length_)
    throw std::invalid_argument("skip slot out of range");
  if (!is_counted(slot))
    throw std::invalid_argument("slot already skipped");
  if (slot == 1) {
    std::uint8_t mask = mask_ >> 1;
    std::uint8_t len = static_cast<std::uint8_t>(length_ - 1);
    while (len > 0 && !(mask & 1u)) {  // trim skips exposed at the front
      mask >>= 1;
      --len;
    }
    return Pattern(len, mask);
  }
  return Pattern(length_,
                 static_cast<std::uint8_t>(mask_ & ~(1u << (slot - 1))));
}

Pattern Pattern::with_slot_counted(int slot) const {
  if (slot < 1 || slot > length_)
    throw std::invalid_argument("slot out of range");
  if (is_counted(slot)) throw std::invalid_argument("slot already counted");
  return Pattern(length_, static_cast<std::uint8_t>(mask_ | (1u << (slot - 1))));
}

int Pattern::word_index(int slot) const {
  if (!is_counted(slot)) throw std::invalid_argument("slot not counted");
  return std::popcount(static_cast<unsigned>(mask_ & ((1u << slot) - 1))) - 1;
}

std::string Pattern::to_string() const {
  std::string out;
  out.reserve(length_);
  for (int i = 1; i <= length_; ++i) out.push_back(is_counted(i) ? '1' : '0');
  return out;
}

unsigned Pattern::value() const {
  unsigned v = 0;
  for (int i = 1; i <= length_; ++i) v = (v << 1) | (is_counted(i) ? 1u : 0u);
  return v;
}

std::vector<LatticeEdge> children(const Pattern& p) {
  std::vector<LatticeEdge> out;
  for (int j = 1; j < p.length(); ++j)
    if (p.is_counted(j)) out.push_back({p, p.apply_skip(j), j});
  return out;
}

std::vector<Pattern> lattice(int order) {
  if (order < 1 || order > Pattern::kMaxSlots)
    throw std::invalid_argument("order out of range");
  std::set<Pattern> seen;
  std::vector<Pattern> todo{Pattern::counted(order)};
  while (!todo.empty()) {
    Pattern p = todo.back();
    todo.pop_back();
    if (!seen.insert(p).second) continue;
    for (const LatticeEdge& e : children(p)) todo.push_back(e.child);
  }
  std::vector<Pattern> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end(), [](const Pattern& a, const Pattern& b) {
    if (a.counted_slots() != b.counted_slots())
      return a.counted_slots() < b.counted_slots();
    if (a.length() != b.length()) return a.length() < b.length();
    return a.value() < b.value();
  });
  return out;
}

ContinuationSlot continuation_slot(const Pattern& p) {
  for (int i = 1; i <= p.length(); ++i)
    if (!p.is_counted(i)) return {false, i};
  return {true, 0};
}

}  // namespace glmkit
