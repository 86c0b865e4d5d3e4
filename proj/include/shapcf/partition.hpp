#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shapcf/entry_set.hpp"
#include "shapcf/rng.hpp"

namespace shapcf {

// Position of an owner inside an OwnerPartition.
enum class OwnerId : std::uint32_t {};

constexpr std::uint32_t to_index(OwnerId id) noexcept {
  return static_cast<std::uint32_t>(id);
}
constexpr OwnerId owner(std::uint32_t index) noexcept {
  return static_cast<OwnerId>(index);
}

inline constexpr std::size_t kMaxOwners = 64;

// Set of owners, stored as a bitmask over owner positions.
class Coalition {
 public:
  constexpr Coalition() = default;
  constexpr explicit Coalition(std::uint64_t mask) : mask_(mask) {}

  static constexpr Coalition of(std::initializer_list<OwnerId> members) {
    Coalition c;
    for (OwnerId o : members) c.insert(o);
    return c;
  }

  constexpr bool contains(OwnerId o) const { return (mask_ >> to_index(o)) & 1U; }
  constexpr void insert(OwnerId o) { mask_ |= std::uint64_t{1} << to_index(o); }
  constexpr void erase(OwnerId o) { mask_ &= ~(std::uint64_t{1} << to_index(o)); }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(mask_)); }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr std::uint64_t mask() const { return mask_; }

  constexpr Coalition with(OwnerId o) const {
    Coalition c = *this;
    c.insert(o);
    return c;
  }

  std::vector<OwnerId> members() const;

  constexpr bool operator==(const Coalition&) const = default;

 private:
  std::uint64_t mask_ = 0;
};

// Ownership of entries by named owners. Owners hold sets (not multisets) of
// entries and may overlap. Immutable: transfers produce a new partition.
class OwnerPartition {
 public:
  // Requires 2 <= owners <= kMaxOwners, unique names and every set over
  // `universe`. Owners may be empty.
  OwnerPartition(std::size_t universe, std::vector<std::string> names,
                 std::vector<EntrySet> entries);

  std::size_t size() const noexcept { return names_.size(); }
  std::size_t universe() const noexcept { return universe_; }

  const EntrySet& entries(OwnerId o) const { return entries_.at(to_index(o)); }
  const std::string& name(OwnerId o) const { return names_.at(to_index(o)); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  std::optional<OwnerId> find(std::string_view name) const;
  // Throws UnknownOwner.
  OwnerId id(std::string_view name) const;

  Coalition everyone() const;

  // Composed dataset of a coalition: the union of its members' entries.
  EntrySet compose(Coalition coalition) const;
  // Union of the coalition's entries with an extra entry set.
  EntrySet compose(Coalition coalition, const EntrySet& extra) const;

  // Union of all owners' entries.
  EntrySet all_entries() const;

  bool operator==(const OwnerPartition&) const = default;

 private:
  std::size_t universe_;
  std::vector<std::string> names_;
  std::vector<EntrySet> entries_;
};

struct Transfer {
  OwnerId from;
  OwnerId to;
  EntrySet delta;
};

// entries(from) \ delta and entries(to) U delta; other owners untouched.
// Throws DeltaNotOwned or SameOwner.
OwnerPartition apply_transfer(const OwnerPartition& partition, const Transfer& transfer);

// One uniformly random ordering of all owners of a partition.
class PermutationSample {
 public:
  explicit PermutationSample(std::vector<OwnerId> order);

  const std::vector<OwnerId>& order() const noexcept { return order_; }
  std::size_t position(OwnerId o) const { return position_.at(to_index(o)); }

  // Owners preceding every member of `owners`.
  Coalition prefix(Coalition owners) const;

 private:
  std::vector<OwnerId> order_;
  std::vector<std::size_t> position_;
};

PermutationSample sample_permutation(std::size_t n_owners, Rng& rng);
inline PermutationSample sample_permutation(const OwnerPartition& partition, Rng& rng) {
  return sample_permutation(partition.size(), rng);
}

// Owners that come before both a and b.
Coalition prefix_before_pair(const PermutationSample& perm, OwnerId a, OwnerId b);

}  // namespace shapcf
