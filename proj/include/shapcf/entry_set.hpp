#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace shapcf {

// Index of a record in the entry universe (row number of the training pool,
// or a feature/column index for vertically partitioned data).
enum class EntryId : std::uint32_t {};

constexpr std::uint32_t to_index(EntryId id) noexcept {
  return static_cast<std::uint32_t>(id);
}
constexpr EntryId entry(std::uint32_t index) noexcept {
  return static_cast<EntryId>(index);
}

// Fixed-universe set of entry ids backed by a bitset. Set algebra runs
// through the SIMD kernel table.
class EntrySet {
 public:
  EntrySet() = default;
  explicit EntrySet(std::size_t universe);
  EntrySet(std::size_t universe, std::initializer_list<std::uint32_t> ids);

  static EntrySet from_ids(std::size_t universe, std::span<const EntryId> ids);
  static EntrySet full(std::size_t universe);

  std::size_t universe() const noexcept { return universe_; }
  std::size_t size() const;
  bool empty() const;

  bool contains(EntryId id) const;
  void insert(EntryId id);
  void erase(EntryId id);

  EntrySet& operator|=(const EntrySet& other);
  // Set difference.
  EntrySet& operator-=(const EntrySet& other);
  friend EntrySet operator|(EntrySet lhs, const EntrySet& rhs) { return lhs |= rhs; }
  friend EntrySet operator-(EntrySet lhs, const EntrySet& rhs) { return lhs -= rhs; }
  EntrySet intersection(const EntrySet& other) const;

  bool is_subset_of(const EntrySet& other) const;
  bool intersects(const EntrySet& other) const;

  // Ascending ids.
  std::vector<EntryId> ids() const;

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        const int bit = std::countr_zero(bits);
        fn(entry(static_cast<std::uint32_t>(w * 64 + static_cast<std::size_t>(bit))));
        bits &= bits - 1;
      }
    }
  }

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  bool operator==(const EntrySet& other) const = default;

 private:
  void check_compatible(const EntrySet& other) const;
  void check_id(EntryId id) const;

  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

struct EntrySetHash {
  std::size_t operator()(const EntrySet& set) const noexcept;
  std::size_t operator()(std::span<const std::uint64_t> words) const noexcept;
};

}  // namespace shapcf
