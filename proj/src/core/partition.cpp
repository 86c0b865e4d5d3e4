#include "shapcf/partition.hpp"

#include <algorithm>
#include <set>

#include "shapcf/error.hpp"

namespace shapcf {

std::vector<OwnerId> Coalition::members() const {
  std::vector<OwnerId> out;
  std::uint64_t bits = mask_;
  while (bits != 0) {
    out.push_back(owner(static_cast<std::uint32_t>(std::countr_zero(bits))));
    bits &= bits - 1;
  }
  return out;
}

OwnerPartition::OwnerPartition(std::size_t universe, std::vector<std::string> names,
                               std::vector<EntrySet> entries)
    : universe_(universe), names_(std::move(names)), entries_(std::move(entries)) {
  if (names_.size() != entries_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "owner names and entry sets differ in count");
  }
  if (names_.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "a partition needs at least two owners");
  }
  if (names_.size() > kMaxOwners) {
    throw Error(ErrorCode::kTooManyOwners,
                "at most " + std::to_string(kMaxOwners) + " owners are supported");
  }
  std::set<std::string_view> seen;
  for (const auto& n : names_) {
    if (!seen.insert(n).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate owner name '" + n + "'");
    }
  }
  for (const auto& e : entries_) {
    if (e.universe() != universe_) {
      throw Error(ErrorCode::kInvalidArgument, "owner entry set over the wrong universe");
    }
  }
}

std::optional<OwnerId> OwnerPartition::find(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return owner(static_cast<std::uint32_t>(it - names_.begin()));
}

OwnerId OwnerPartition::id(std::string_view name) const {
  if (auto found = find(name)) return *found;
  throw Error(ErrorCode::kUnknownOwner, "no owner named '" + std::string(name) + "'");
}

Coalition OwnerPartition::everyone() const {
  const std::size_t n = size();
  return Coalition(n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
}

EntrySet OwnerPartition::compose(Coalition coalition) const {
  EntrySet out(universe_);
  std::uint64_t bits = coalition.mask();
  while (bits != 0) {
    out |= entries_[static_cast<std::size_t>(std::countr_zero(bits))];
    bits &= bits - 1;
  }
  return out;
}

EntrySet OwnerPartition::compose(Coalition coalition, const EntrySet& extra) const {
  EntrySet out = extra;
  std::uint64_t bits = coalition.mask();
  while (bits != 0) {
    out |= entries_[static_cast<std::size_t>(std::countr_zero(bits))];
    bits &= bits - 1;
  }
  return out;
}

EntrySet OwnerPartition::all_entries() const { return compose(everyone()); }

OwnerPartition apply_transfer(const OwnerPartition& partition, const Transfer& transfer) {
  if (transfer.from == transfer.to) {
    throw Error(ErrorCode::kSameOwner, "transfer source and destination coincide");
  }
  const EntrySet& source = partition.entries(transfer.from);
  partition.entries(transfer.to);  // range check
  if (!transfer.delta.is_subset_of(source)) {
    throw Error(ErrorCode::kDeltaNotOwned,
                "transferred entries are not all owned by '" +
                    partition.name(transfer.from) + "'");
  }
  std::vector<EntrySet> entries;
  entries.reserve(partition.size());
  for (std::uint32_t i = 0; i < partition.size(); ++i) {
    entries.push_back(partition.entries(owner(i)));
  }
  entries[to_index(transfer.from)] -= transfer.delta;
  entries[to_index(transfer.to)] |= transfer.delta;
  return OwnerPartition(partition.universe(), partition.names(), std::move(entries));
}

PermutationSample::PermutationSample(std::vector<OwnerId> order)
    : order_(std::move(order)), position_(order_.size(), order_.size()) {
  for (std::size_t i = 0; i < order_.size(); ++i) {
    const auto o = to_index(order_[i]);
    if (o >= order_.size() || position_[o] != order_.size()) {
      throw Error(ErrorCode::kInvalidArgument, "order is not a permutation of owners");
    }
    position_[o] = i;
  }
}

Coalition PermutationSample::prefix(Coalition owners) const {
  std::size_t first = order_.size();
  for (OwnerId o : owners.members()) first = std::min(first, position(o));
  Coalition out;
  for (std::size_t i = 0; i < first; ++i) out.insert(order_[i]);
  return out;
}

PermutationSample sample_permutation(std::size_t n_owners, Rng& rng) {
  std::vector<OwnerId> order(n_owners);
  for (std::uint32_t i = 0; i < n_owners; ++i) order[i] = owner(i);
  for (std::size_t i = n_owners; i > 1; --i) {
    std::swap(order[i - 1], order[rng.uniform_index(i)]);
  }
  return PermutationSample(std::move(order));
}

Coalition prefix_before_pair(const PermutationSample& perm, OwnerId a, OwnerId b) {
  return perm.prefix(Coalition::of({a, b}));
}

}  // namespace shapcf
