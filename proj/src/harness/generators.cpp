#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "shapcf/error.hpp"
#include "shapcf/harness.hpp"

namespace shapcf {

namespace {

std::vector<std::string> numbered_names(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("O" + std::to_string(i + 1));
  return names;
}

// k distinct entries drawn uniformly from [0, universe) (partial shuffle).
EntrySet draw_entries(std::size_t universe, std::size_t k, Rng& rng) {
  std::vector<std::uint32_t> pool(universe);
  std::iota(pool.begin(), pool.end(), 0U);
  EntrySet set(universe);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_index(universe - i);
    std::swap(pool[i], pool[j]);
    set.insert(entry(pool[i]));
  }
  return set;
}

std::size_t power_of(std::size_t base, std::size_t k) {
  std::size_t v = 1;
  for (std::size_t i = 0; i < k; ++i) v *= base;
  return v;
}

std::string format_value(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

OwnerPartition gen_uniform(std::size_t universe, std::size_t n, Rng& rng) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two owners");
  if (universe == 0) throw Error(ErrorCode::kInvalidArgument, "empty training set");
  std::vector<EntrySet> sets;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t size = rng.uniform_int(1, universe);
    sets.push_back(draw_entries(universe, size, rng));
  }
  return OwnerPartition(universe, numbered_names(n), std::move(sets));
}

OwnerPartition gen_zipfian(std::size_t universe, std::size_t n, const ZipfianOptions& options,
                           Rng& rng) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two owners");
  if (options.base < 2) throw Error(ErrorCode::kInvalidArgument, "zipfian base must be >= 2");
  if (power_of(options.base, options.k_max) > universe) {
    throw Error(ErrorCode::kSizeOverflow,
                std::to_string(options.base) + "^" + std::to_string(options.k_max) +
                    " exceeds the " + std::to_string(universe) + " training entries");
  }
  for (const auto& k : {options.k_a, options.k_b}) {
    if (k && *k > options.k_max) {
      throw Error(ErrorCode::kInvalidArgument, "designated exponent exceeds k_max");
    }
  }
  std::vector<EntrySet> sets;
  for (std::size_t i = 0; i < n; ++i) {
    std::optional<std::size_t> k = i == 0 ? options.k_a : i == 1 ? options.k_b : std::nullopt;
    const std::size_t exponent = k ? *k : rng.uniform_int(0, options.k_max);
    sets.push_back(draw_entries(universe, power_of(options.base, exponent), rng));
  }
  return OwnerPartition(universe, numbered_names(n), std::move(sets));
}

OwnerPartition gen_natural(const Dataset& data, std::string_view group_column) {
  const std::size_t c = data.column_index(group_column);
  std::map<double, std::vector<EntryId>> groups;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    groups[data.at(r, c)].push_back(entry(static_cast<std::uint32_t>(r)));
  }
  if (groups.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "column '" + std::string(group_column) + "' has fewer than two distinct values");
  }
  std::vector<std::string> names;
  std::vector<EntrySet> sets;
  for (const auto& [value, ids] : groups) {
    names.push_back(format_value(value));
    sets.push_back(EntrySet::from_ids(data.rows(), ids));
  }
  return OwnerPartition(data.rows(), std::move(names), std::move(sets));
}

OwnerPartition gen_vertical(
    const Dataset& data,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& groups) {
  std::vector<std::string> names;
  std::vector<EntrySet> sets;
  EntrySet seen(data.cols());
  for (const auto& [name, features] : groups) {
    EntrySet set(data.cols());
    for (const auto& feature : features) {
      const EntryId id = entry(static_cast<std::uint32_t>(data.column_index(feature)));
      if (seen.contains(id)) {
        throw Error(ErrorCode::kInvalidArgument, "feature '" + feature + "' assigned twice");
      }
      seen.insert(id);
      set.insert(id);
    }
    names.push_back(name);
    sets.push_back(std::move(set));
  }
  if (seen.size() != data.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "feature groups must cover every column");
  }
  return OwnerPartition(data.cols(), std::move(names), std::move(sets));
}

}  // namespace shapcf
