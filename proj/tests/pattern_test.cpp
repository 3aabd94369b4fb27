#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "glmkit/pattern.hpp"

using glmkit::children;
using glmkit::continuation_slot;
using glmkit::lattice;
using glmkit::LatticeEdge;
using glmkit::Pattern;

namespace {

// Independent lattice enumeration over vector<bool> masks; trimming and
// reachability written from scratch so the Pattern algebra has a second
// route to agree with.
using Mask = std::vector<bool>;  // true = counted

Mask ref_skip(Mask m, std::size_t j) {  // 0-based
  if (j == 0) {
    m.erase(m.begin());
    while (!m.empty() && !m.front()) m.erase(m.begin());
  } else {
    m[j] = false;
  }
  return m;
}

std::set<Mask> ref_lattice(int order) {
  std::set<Mask> seen;
  std::vector<Mask> todo{Mask(static_cast<std::size_t>(order), true)};
  while (!todo.empty()) {
    Mask m = todo.back();
    todo.pop_back();
    if (!seen.insert(m).second) continue;
    for (std::size_t j = 0; j + 1 < m.size(); ++j)
      if (m[j]) todo.push_back(ref_skip(m, j));
  }
  return seen;
}

Mask to_mask(const Pattern& p) {
  Mask m;
  for (int i = 1; i <= p.length(); ++i) m.push_back(p.is_counted(i));
  return m;
}

}  // namespace

TEST_CASE("skip operator on interior and first slots") {
  CHECK(Pattern::counted(4).apply_skip(3) == Pattern::parse("1101"));
  CHECK(Pattern::counted(4).apply_skip(1) == Pattern::counted(3));
  // removing the first word also trims the skip it exposes
  CHECK(Pattern::parse("1011").apply_skip(1) == Pattern::parse("11"));
  CHECK(Pattern::parse("10011").apply_skip(1) == Pattern::parse("11"));
}

TEST_CASE("skip operator rejects bad slots") {
  CHECK_THROWS(Pattern::counted(3).apply_skip(3));  // last slot
  CHECK_THROWS(Pattern::counted(3).apply_skip(0));
  CHECK_THROWS(Pattern::counted(3).apply_skip(4));
  CHECK_THROWS(Pattern::parse("101").apply_skip(2));  // already skipped
}

TEST_CASE("parse and to_string round trip, canonical form enforced") {
  for (const char* text : {"1", "11", "101", "1011", "10101", "11111"})
    CHECK(Pattern::parse(text).to_string() == text);
  CHECK_THROWS(Pattern::parse("01"));
  CHECK_THROWS(Pattern::parse("10"));
  CHECK_THROWS(Pattern::parse(""));
  CHECK_THROWS(Pattern::parse("1x1"));
  CHECK_THROWS(Pattern::parse("111111111"));
}

TEST_CASE("children enumerate counted context slots in order") {
  CHECK(children(Pattern::counted(5)).size() == 4);
  CHECK(children(Pattern::counted(1)).empty());

  std::vector<LatticeEdge> edges = children(Pattern::parse("1011"));
  REQUIRE(edges.size() == 2);
  CHECK(edges[0].skipped_slot == 1);
  CHECK(edges[0].child == Pattern::parse("11"));
  CHECK(edges[1].skipped_slot == 3);
  CHECK(edges[1].child == Pattern::parse("1001"));
}

TEST_CASE("lattice matches the independent enumeration") {
  for (int order = 1; order <= 5; ++order) {
    std::set<Mask> expected = ref_lattice(order);
    std::vector<Pattern> got = lattice(order);
    CHECK(got.size() == expected.size());
    std::set<Mask> got_masks;
    for (const Pattern& p : got) got_masks.insert(to_mask(p));
    CHECK(got_masks == expected);
  }
}

TEST_CASE("small lattices by hand") {
  auto texts = [](int order) {
    std::vector<std::string> out;
    for (const Pattern& p : lattice(order)) out.push_back(p.to_string());
    return out;
  };
  CHECK(texts(2) == std::vector<std::string>{"1", "11"});
  CHECK(texts(3) == std::vector<std::string>{"1", "11", "101", "111"});
}

TEST_CASE("order-5 lattice is the sixteen reporting rows") {
  std::vector<std::string> expected = {
      "1",     "11",    "101",   "1001",  "10001", "111",
      "1011",  "1101",  "10011", "10101", "11001", "1111",
      "10111", "11011", "11101", "11111"};
  std::vector<std::string> got;
  for (const Pattern& p : lattice(5)) got.push_back(p.to_string());
  CHECK(got == expected);
}

TEST_CASE("canonical form is preserved by every skip") {
  for (const Pattern& p : lattice(5)) {
    CHECK(p.is_counted(1));
    CHECK(p.is_counted(p.length()));
    for (const LatticeEdge& e : children(p)) {
      CHECK(e.child.is_counted(1));
      CHECK(e.child.is_counted(e.child.length()));
    }
    CHECK(static_cast<int>(children(p).size()) == p.counted_slots() - 1);
  }
}

TEST_CASE("always skipping the first slot walks the classical suffix path") {
  Pattern p = Pattern::counted(5);
  std::vector<Pattern> path{p};
  while (p.length() > 1) {
    p = p.apply_skip(1);
    path.push_back(p);
  }
  REQUIRE(path.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(path[i] == Pattern::counted(5 - i));
}

TEST_CASE("continuation slot: left extension without a gap, else leftmost gap") {
  CHECK(continuation_slot(Pattern::counted(3)).left_extension);
  CHECK(continuation_slot(Pattern::parse("1011")).slot == 2);
  CHECK(continuation_slot(Pattern::parse("1001")).slot == 2);
  CHECK(continuation_slot(Pattern::parse("11011")).slot == 3);
}

TEST_CASE("word index maps counted slots to key positions") {
  Pattern p = Pattern::parse("10101");
  CHECK(p.word_index(1) == 0);
  CHECK(p.word_index(3) == 1);
  CHECK(p.word_index(5) == 2);
  CHECK_THROWS(p.word_index(2));
}
