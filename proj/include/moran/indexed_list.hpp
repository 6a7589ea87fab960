#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "moran/error.hpp"
#include "moran/rng.hpp"

namespace moran {

namespace detail {

// Header words shared by both storages: slot count, live count, deletions
// since the last rebuild, head of the free chain.
enum : std::size_t { kLen = 0, kSize = 1, kDeleted = 2, kFreeHead = 3, kHeaderWords = 4 };

inline constexpr std::uint32_t kNoSlot = 0x7fffffffU;

class VectorStorage {
 protected:
  std::uint32_t* header() noexcept { return header_.data(); }
  const std::uint32_t* header() const noexcept { return header_.data(); }
  std::uint32_t* data() noexcept { return slots_.data(); }
  const std::uint32_t* data() const noexcept { return slots_.data(); }
  void push(std::uint32_t value) {
    slots_.push_back(value);
    ++header_[kLen];
  }
  void truncate(std::uint32_t len) {
    slots_.resize(len);
    header_[kLen] = len;
  }
  std::uint64_t& work_counter() noexcept { return work_; }
  std::uint64_t work_counter() const noexcept { return work_; }

 private:
  std::array<std::uint32_t, kHeaderWords> header_{0, 0, 0, kNoSlot};
  std::vector<std::uint32_t> slots_;
  std::uint64_t work_ = 0;
};

// Header followed by a fixed number of slots, inside memory owned elsewhere.
class ArenaStorage {
 public:
  ArenaStorage(std::uint32_t* block, std::uint32_t capacity, std::uint64_t* work) noexcept
      : block_(block), cap_(capacity), work_(work) {}

  /// Writes an empty header into `block`.
  static void init(std::uint32_t* block) noexcept {
    block[kLen] = 0;
    block[kSize] = 0;
    block[kDeleted] = 0;
    block[kFreeHead] = kNoSlot;
  }

 protected:
  std::uint32_t* header() noexcept { return block_; }
  const std::uint32_t* header() const noexcept { return block_; }
  std::uint32_t* data() noexcept { return block_ + kHeaderWords; }
  const std::uint32_t* data() const noexcept { return block_ + kHeaderWords; }
  void push(std::uint32_t value) {
    if (block_[kLen] == cap_) throw Error(ErrorCode::InvalidArgument, "arena list is full");
    data()[block_[kLen]++] = value;
  }
  void truncate(std::uint32_t len) noexcept { block_[kLen] = len; }
  std::uint64_t& work_counter() noexcept { return *work_; }
  std::uint64_t work_counter() const noexcept { return *work_; }

 private:
  std::uint32_t* block_;
  std::uint32_t cap_;
  std::uint64_t* work_;
};

}  // namespace detail

/// Dynamic array with O(1) amortized insert and delete and expected O(1)
/// uniform sampling of a live entry.
///
/// Deleting an entry leaves a null slot. Null slots form an intrusive free
/// chain (a null slot stores the index of the next free slot) so inserts
/// reuse them first. Once more entries have been deleted since the last
/// rebuild than are currently live, the array is compacted; between rebuilds
/// at least half the slots are therefore live, and rejection sampling of a
/// random slot needs at most 2 probes in expectation.
///
/// Values are opaque 31-bit payloads. Compaction moves live entries, and the
/// caller learns about every move through the on_move callback of erase().
///
/// Since inserts only append when the free chain is empty, the slot count
/// never exceeds the largest live count, which lets ArenaStorage work with a
/// fixed capacity.
template <class Storage>
class BasicIndexedList : public Storage {
 public:
  using Slot = std::uint32_t;
  using Value = std::uint32_t;

  static constexpr Value kNullBit = 0x80000000U;
  static constexpr Slot kNoSlot = detail::kNoSlot;

  using Storage::Storage;

  std::uint32_t size() const noexcept { return hdr()[detail::kSize]; }
  std::uint32_t capacity() const noexcept { return hdr()[detail::kLen]; }
  bool empty() const noexcept { return size() == 0; }
  std::uint32_t deleted_since_rebuild() const noexcept { return hdr()[detail::kDeleted]; }
  std::uint64_t work() const noexcept { return this->work_counter(); }

  bool live(Slot slot) const noexcept { return slot < capacity() && !(this->data()[slot] & kNullBit); }
  Value at(Slot slot) const noexcept { return this->data()[slot]; }

  Slot insert(Value value) {
    ++this->work_counter();
    std::uint32_t* h = this->header();
    ++h[detail::kSize];
    if (h[detail::kFreeHead] != kNoSlot) {
      const Slot slot = h[detail::kFreeHead];
      h[detail::kFreeHead] = this->data()[slot] & ~kNullBit;
      this->data()[slot] = value;
      return slot;
    }
    this->push(value);
    return capacity() - 1;
  }

  /// Removes the entry in `slot`. If this triggers a rebuild, on_move(value,
  /// new_slot) is called for every live entry that changed position.
  template <class OnMove>
  void erase(Slot slot, OnMove&& on_move) {
    if (!live(slot)) throw Error(ErrorCode::DeadSlot, "slot " + std::to_string(slot) + " is not live");
    ++this->work_counter();
    std::uint32_t* h = this->header();
    this->data()[slot] = kNullBit | h[detail::kFreeHead];
    h[detail::kFreeHead] = slot;
    --h[detail::kSize];
    if (++h[detail::kDeleted] > h[detail::kSize]) compact(on_move);
  }

  void erase(Slot slot) {
    erase(slot, [](Value, Slot) {});
  }

  /// Uniform live entry. Throws EmptyList when there is none.
  Value sample(Rng& rng) const {
    if (empty()) throw Error(ErrorCode::EmptyList, "sampling from an empty list");
    const Value* d = this->data();
    for (;;) {
      const Value v = d[rng.below(capacity())];
      if (!(v & kNullBit)) return v;
    }
  }

  void clear() {
    this->work_counter() += capacity();
    this->truncate(0);
    std::uint32_t* h = this->header();
    h[detail::kSize] = 0;
    h[detail::kDeleted] = 0;
    h[detail::kFreeHead] = kNoSlot;
  }

  /// Calls f(value, slot) for each live entry in slot order.
  template <class F>
  void for_each(F&& f) const {
    const Value* d = this->data();
    for (Slot s = 0, n = capacity(); s < n; ++s) {
      if (!(d[s] & kNullBit)) f(d[s], s);
    }
  }

  /// Number of null slots reachable through the free chain.
  std::uint32_t free_chain_length() const noexcept {
    std::uint32_t count = 0;
    for (Slot s = hdr()[detail::kFreeHead]; s != kNoSlot; s = this->data()[s] & ~kNullBit) ++count;
    return count;
  }

 private:
  const std::uint32_t* hdr() const noexcept { return this->header(); }

  template <class OnMove>
  void compact(OnMove& on_move) {
    Value* d = this->data();
    Slot out = 0;
    for (Slot s = 0, n = capacity(); s < n; ++s) {
      ++this->work_counter();
      const Value v = d[s];
      if (v & kNullBit) continue;
      if (out != s) {
        d[out] = v;
        on_move(v, out);
      }
      ++out;
    }
    this->truncate(out);
    std::uint32_t* h = this->header();
    h[detail::kFreeHead] = kNoSlot;
    h[detail::kDeleted] = 0;
  }
};

using IndexedList = BasicIndexedList<detail::VectorStorage>;

/// IndexedList over a header-plus-slots block in caller-owned memory. The
/// block holds kArenaHeaderWords + capacity words.
using ArenaIndexedList = BasicIndexedList<detail::ArenaStorage>;
inline constexpr std::size_t kArenaHeaderWords = detail::kHeaderWords;

}  // namespace moran
