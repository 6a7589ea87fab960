#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "moran/error.hpp"
#include "moran/indexed_list.hpp"

using namespace moran;

TEST_CASE("find_random is uniform over live entries") {
  IndexedList list;
  list.insert(10);
  const auto b = list.insert(20);
  list.insert(30);
  list.erase(b);
  CHECK(list.size() == 2);

  Rng rng(8);
  int tens = 0;
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) {
    const auto v = list.sample(rng);
    REQUIRE((v == 10 || v == 30));
    tens += v == 10;
  }
  CHECK(std::abs(tens / static_cast<double>(kDraws) - 0.5) < 4 * std::sqrt(0.25 / kDraws));
}

TEST_CASE("compaction once more than half the entries are deleted") {
  IndexedList list;
  std::vector<IndexedList::Slot> slots;
  for (IndexedList::Value v = 0; v < 10; ++v) slots.push_back(list.insert(v));
  std::map<IndexedList::Value, IndexedList::Slot> where;
  for (IndexedList::Value v = 0; v < 10; ++v) where[v] = slots[v];
  auto track = [&](IndexedList::Value v, IndexedList::Slot s) { where[v] = s; };

  for (IndexedList::Value v = 0; v < 5; ++v) {
    list.erase(where[v], track);
    where.erase(v);
    CHECK(list.capacity() == 10);
  }
  // Sixth delete: 6 deleted > 4 live.
  list.erase(where[5], track);
  where.erase(5);
  CHECK(list.size() == 4);
  CHECK(list.capacity() == 4);
  CHECK(list.free_chain_length() == 0);
  CHECK(list.deleted_since_rebuild() == 0);
  for (auto [v, s] : where) {
    CHECK(list.live(s));
    CHECK(list.at(s) == v);
  }
}

TEST_CASE("null slots are reused before appending") {
  IndexedList list;
  for (IndexedList::Value v = 0; v < 4; ++v) list.insert(v);
  list.erase(1);
  CHECK(list.free_chain_length() == 1);
  CHECK(list.insert(99) == 1);
  CHECK(list.capacity() == 4);
  CHECK(list.free_chain_length() == 0);
}

TEST_CASE("error paths") {
  IndexedList list;
  Rng rng(1);
  try {
    list.sample(rng);
    FAIL("expected EmptyList");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyList);
  }
  const auto s = list.insert(7);
  list.insert(8);
  list.insert(9);
  list.erase(s);
  try {
    list.erase(s);
    FAIL("expected DeadSlot");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DeadSlot);
  }
  CHECK_THROWS_AS(list.erase(100), Error);
}

TEST_CASE("random operations against a reference model") {
  Rng rng(2024);
  IndexedList list;
  std::map<IndexedList::Value, IndexedList::Slot> where;
  auto track = [&](IndexedList::Value v, IndexedList::Slot s) { where[v] = s; };
  IndexedList::Value next = 0;
  constexpr int kOps = 10000;
  for (int op = 0; op < kOps; ++op) {
    // Drift between growth and shrink phases so compactions happen repeatedly.
    const bool grow = where.empty() || rng.below(100) < ((op / 1000) % 2 == 0 ? 65U : 35U);
    if (grow) {
      const auto v = next++;
      where[v] = list.insert(v);
    } else {
      auto it = where.begin();
      std::advance(it, static_cast<long>(rng.below(where.size())));
      const auto victim = *it;
      where.erase(it);
      list.erase(victim.second, track);
    }
    REQUIRE(list.size() == where.size());
    if (list.size() > 0) REQUIRE(2ULL * list.size() >= list.capacity());
    REQUIRE(list.free_chain_length() == list.capacity() - list.size());
  }
  for (auto [v, s] : where) {
    REQUIRE(list.live(s));
    REQUIRE(list.at(s) == v);
  }
  std::set<IndexedList::Value> seen;
  list.for_each([&](IndexedList::Value v, IndexedList::Slot) { seen.insert(v); });
  CHECK(seen.size() == where.size());

  // Amortized O(1): every operation touches one slot, and each compaction
  // moves at most 2 * size slots, paid for by the > size deletes before it.
  CHECK(list.work() <= 4ULL * kOps);
}

TEST_CASE("sampling probes stay near 2 under the half-full invariant") {
  IndexedList list;
  std::vector<IndexedList::Slot> slots;
  for (IndexedList::Value v = 0; v < 1000; ++v) slots.push_back(list.insert(v));
  for (IndexedList::Value v = 0; v < 500; ++v) list.erase(slots[2 * v]);  // exactly half: no rebuild
  CHECK(list.capacity() == 1000);
  CHECK(list.size() == 500);
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) CHECK(list.sample(rng) % 2 == 1);
}

TEST_CASE("arena-backed list mirrors the vector-backed one within a fixed capacity") {
  constexpr std::uint32_t kCap = 8;
  std::vector<std::uint32_t> block(kArenaHeaderWords + kCap, 0xdeadbeef);
  detail::ArenaStorage::init(block.data());
  std::uint64_t work = 0;
  ArenaIndexedList arena(block.data(), kCap, &work);
  IndexedList plain;
  std::map<std::uint32_t, IndexedList::Slot> in_plain, in_arena;  // value -> slot
  Rng rng(17);
  std::uint32_t next = 0;
  for (int op = 0; op < 20000; ++op) {
    if (in_plain.size() < kCap && (in_plain.empty() || rng.below(2) == 0)) {
      in_plain[next] = plain.insert(next);
      in_arena[next] = arena.insert(next);
      CHECK(in_plain[next] == in_arena[next]);
      ++next;
    } else {
      auto it = std::next(in_plain.begin(), static_cast<std::ptrdiff_t>(rng.below(in_plain.size())));
      const std::uint32_t value = it->first;
      plain.erase(it->second, [&](std::uint32_t v, IndexedList::Slot s) { in_plain[v] = s; });
      arena.erase(in_arena.at(value), [&](std::uint32_t v, IndexedList::Slot s) { in_arena[v] = s; });
      in_plain.erase(value);
      in_arena.erase(value);
    }
    REQUIRE(arena.capacity() <= kCap);
    REQUIRE(arena.size() == plain.size());
    REQUIRE(arena.capacity() == plain.capacity());
    REQUIRE(arena.free_chain_length() == plain.free_chain_length());
  }
  CHECK(in_plain == in_arena);
  for (auto [v, s] : in_arena) CHECK(arena.at(s) == v);
  CHECK(work == plain.work());
  Rng pick(3);
  CHECK(in_arena.count(arena.sample(pick)) == 1);
}
