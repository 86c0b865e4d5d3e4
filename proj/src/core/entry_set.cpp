#include "shapcf/entry_set.hpp"

#include <string>

#include "shapcf/error.hpp"
#include "shapcf/kernels.hpp"

namespace shapcf {

EntrySet::EntrySet(std::size_t universe)
    : universe_(universe), words_((universe + 63) / 64, 0) {}

EntrySet::EntrySet(std::size_t universe, std::initializer_list<std::uint32_t> ids)
    : EntrySet(universe) {
  for (std::uint32_t id : ids) insert(entry(id));
}

EntrySet EntrySet::from_ids(std::size_t universe, std::span<const EntryId> ids) {
  EntrySet set(universe);
  for (EntryId id : ids) set.insert(id);
  return set;
}

EntrySet EntrySet::full(std::size_t universe) {
  EntrySet set(universe);
  for (std::size_t i = 0; i < universe; ++i) {
    set.words_[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  return set;
}

std::size_t EntrySet::size() const { return kernels::popcount(words_); }

bool EntrySet::empty() const {
  for (std::uint64_t w : words_) {
    if (w != 0) return false;
  }
  return true;
}

void EntrySet::check_id(EntryId id) const {
  if (to_index(id) >= universe_) {
    throw Error(ErrorCode::kInvalidArgument,
                "entry id " + std::to_string(to_index(id)) +
                    " outside universe of size " + std::to_string(universe_));
  }
}

void EntrySet::check_compatible(const EntrySet& other) const {
  if (other.universe_ != universe_) {
    throw Error(ErrorCode::kInvalidArgument,
                "entry sets over different universes (" + std::to_string(universe_) +
                    " vs " + std::to_string(other.universe_) + ")");
  }
}

bool EntrySet::contains(EntryId id) const {
  const std::uint32_t i = to_index(id);
  if (i >= universe_) return false;
  return (words_[i / 64] >> (i % 64)) & 1U;
}

void EntrySet::insert(EntryId id) {
  check_id(id);
  const std::uint32_t i = to_index(id);
  words_[i / 64] |= std::uint64_t{1} << (i % 64);
}

void EntrySet::erase(EntryId id) {
  check_id(id);
  const std::uint32_t i = to_index(id);
  words_[i / 64] &= ~(std::uint64_t{1} << (i % 64));
}

EntrySet& EntrySet::operator|=(const EntrySet& other) {
  check_compatible(other);
  kernels::bit_or(words_, other.words_);
  return *this;
}

EntrySet& EntrySet::operator-=(const EntrySet& other) {
  check_compatible(other);
  kernels::bit_andnot(words_, other.words_);
  return *this;
}

EntrySet EntrySet::intersection(const EntrySet& other) const {
  check_compatible(other);
  EntrySet out(universe_);
  for (std::size_t w = 0; w < words_.size(); ++w) {
    out.words_[w] = words_[w] & other.words_[w];
  }
  return out;
}

bool EntrySet::is_subset_of(const EntrySet& other) const {
  check_compatible(other);
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if ((words_[w] & ~other.words_[w]) != 0) return false;
  }
  return true;
}

bool EntrySet::intersects(const EntrySet& other) const {
  check_compatible(other);
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if ((words_[w] & other.words_[w]) != 0) return true;
  }
  return false;
}

std::vector<EntryId> EntrySet::ids() const {
  std::vector<EntryId> out;
  out.reserve(size());
  for_each([&](EntryId id) { out.push_back(id); });
  return out;
}

std::size_t EntrySetHash::operator()(std::span<const std::uint64_t> words) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ words.size();
  for (std::uint64_t w : words) {
    std::uint64_t z = w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    h ^= z ^ (z >> 31);
  }
  return static_cast<std::size_t>(h);
}

std::size_t EntrySetHash::operator()(const EntrySet& set) const noexcept {
  return (*this)(set.words());
}

}  // namespace shapcf
