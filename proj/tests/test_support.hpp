#pragma once

// Shared builders and independent oracles for the tests. The oracles here
// deliberately avoid the library's estimators: they enumerate permutations
// over plain std::function utilities.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "shapcf/partition.hpp"
#include "shapcf/rng.hpp"
#include "shapcf/utility.hpp"

namespace shapcf::testing {

inline std::string data_path(const std::string& name) {
  return std::string(SHAPCF_TEST_DATA) + "/" + name;
}

inline OwnerPartition make_partition(std::size_t universe,
                                     const std::vector<std::vector<std::uint32_t>>& owners) {
  std::vector<std::string> names;
  std::vector<EntrySet> sets;
  for (std::size_t i = 0; i < owners.size(); ++i) {
    names.push_back(std::string(1, static_cast<char>('A' + i)));
    EntrySet s(universe);
    for (std::uint32_t id : owners[i]) s.insert(entry(id));
    sets.push_back(std::move(s));
  }
  return OwnerPartition(universe, std::move(names), std::move(sets));
}

inline UtilityOracle additive_oracle(std::vector<double> weights, bool memoize = true) {
  return UtilityOracle(std::make_shared<AdditiveUtility>(std::move(weights)), memoize);
}

// Additive game: one entry per weight, owners listed by entry index.
struct AdditiveGame {
  std::vector<double> weights;
  std::vector<std::vector<std::uint32_t>> owners;
  OwnerPartition partition() const { return make_partition(weights.size(), owners); }
  UtilityOracle oracle() const { return additive_oracle(weights); }
  double owner_weight(std::size_t o) const {
    double w = 0;
    for (std::uint32_t id : owners[o]) w += weights[id];
    return w;
  }
};

// Disjoint owners with random positive integer weights.
inline AdditiveGame random_additive_game(std::size_t n_owners, std::size_t max_entries, Rng& rng,
                                         std::size_t max_weight = 9) {
  AdditiveGame g;
  for (std::size_t o = 0; o < n_owners; ++o) {
    const std::size_t k = rng.uniform_int(1, max_entries);
    std::vector<std::uint32_t> ids;
    for (std::size_t i = 0; i < k; ++i) {
      ids.push_back(static_cast<std::uint32_t>(g.weights.size()));
      g.weights.push_back(static_cast<double>(rng.uniform_int(1, max_weight)));
    }
    g.owners.push_back(ids);
  }
  return g;
}

// Coalition utility evaluated from first principles for the permutation
// oracle: compose the members' entries and hand them to `u`.
using RawUtility = std::function<double(const std::vector<bool>& composed)>;

// psi(o) as the average marginal over all n! orders.
inline std::vector<double> permutation_shapley(const std::vector<std::vector<std::uint32_t>>& owners,
                                               std::size_t universe, const RawUtility& u) {
  const std::size_t n = owners.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> psi(n, 0.0);
  double count = 0;
  do {
    std::vector<bool> composed(universe, false);
    double prev = 0.0;  // U(empty) = 0
    for (std::size_t o : order) {
      for (std::uint32_t id : owners[o]) composed[id] = true;
      const double cur = u(composed);
      psi[o] += cur - prev;
      prev = cur;
    }
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& v : psi) v /= count;
  return psi;
}

// Set-cover utility written directly from its definition.
inline RawUtility raw_set_cover(std::size_t elements,
                                const std::vector<std::vector<std::uint32_t>>& subsets) {
  return [=](const std::vector<bool>& chosen) {
    const std::size_t m = subsets.size();
    std::vector<bool> covered(elements, false);
    std::size_t k = 0;
    double f = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (!chosen[j]) continue;
      ++k;
      f += std::pow(2.0, static_cast<double>(j + 1)) / std::pow(2.0, static_cast<double>(m + 1));
      for (std::uint32_t e : subsets[j]) covered[e] = true;
    }
    if (k == 0 || !std::all_of(covered.begin(), covered.end(), [](bool b) { return b; })) return 0.0;
    return static_cast<double>(m) - static_cast<double>(k) + f;
  };
}

inline RawUtility raw_additive(const std::vector<double>& weights) {
  return [=](const std::vector<bool>& composed) {
    double s = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (composed[i]) s += weights[i];
    }
    return s;
  };
}

// Concave monotone game: sqrt of the additive weight. Marginals depend on
// the coalition, so sampled terms have non-zero variance.
class SqrtUtility final : public UtilityModel {
 public:
  explicit SqrtUtility(std::vector<double> weights) : weights_(std::move(weights)) {}
  UtilityKind kind() const override { return UtilityKind::kAdditive; }
  std::size_t universe() const override { return weights_.size(); }
  double score(const EntrySet& composed) const override {
    double s = 0;
    composed.for_each([&](EntryId id) { s += weights_[to_index(id)]; });
    return std::sqrt(s);
  }
  bool monotone() const override { return true; }

 private:
  std::vector<double> weights_;
};

inline UtilityOracle sqrt_oracle(std::vector<double> weights) {
  return UtilityOracle(std::make_shared<SqrtUtility>(std::move(weights)));
}

// Set-cover instance with a unique minimum cover. The cover's subsets
// partition the elements into blocks of at least three; every other subset
// is a strict subset of one block, so replacing any block needs two or more
// subsets. There are more noise subsets than cover subsets.
struct CoverGadget {
  SetCoverGame game;
  std::vector<std::uint32_t> cover;  // subset ids, ascending
};

inline CoverGadget make_cover_gadget(Rng& rng) {
  const std::size_t blocks = rng.uniform_int(1, 3);
  std::vector<std::vector<std::uint32_t>> block_elems;
  std::uint32_t next = 0;
  for (std::size_t k = 0; k < blocks; ++k) {
    const std::size_t size = rng.uniform_int(3, 4);
    std::vector<std::uint32_t> b;
    for (std::size_t i = 0; i < size; ++i) b.push_back(next++);
    block_elems.push_back(b);
  }
  std::vector<std::vector<std::uint32_t>> subsets = block_elems;
  std::vector<bool> is_cover(blocks, true);
  const std::size_t noise = blocks + rng.uniform_int(1, 3);
  for (std::size_t i = 0; i < noise; ++i) {
    const auto& b = block_elems[rng.uniform_index(blocks)];
    std::vector<std::uint32_t> s;
    // Non-empty strict subset of the block.
    while (s.empty() || s.size() == b.size()) {
      s.clear();
      for (std::uint32_t e : b) {
        if (rng.uniform01() < 0.5) s.push_back(e);
      }
    }
    subsets.push_back(s);
    is_cover.push_back(false);
  }
  // Shuffle subset positions so the cover is not always a prefix.
  std::vector<std::size_t> order(subsets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  CoverGadget g;
  g.game.elements = next;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    g.game.subsets.push_back(subsets[order[pos]]);
    if (is_cover[order[pos]]) g.cover.push_back(static_cast<std::uint32_t>(pos));
  }
  return g;
}

// Minimal transfer size for disjoint additive owners: the fewest largest
// weights of A whose sum exceeds (w(A) - w(B)) / 2.
inline std::size_t greedy_additive_size(std::vector<double> a_weights, double w_b) {
  double w_a = 0;
  for (double w : a_weights) w_a += w;
  std::sort(a_weights.rbegin(), a_weights.rend());
  double moved = 0;
  for (std::size_t k = 0; k < a_weights.size(); ++k) {
    moved += a_weights[k];
    if (moved > (w_a - w_b) / 2.0) return k + 1;
  }
  return a_weights.size();
}

}  // namespace shapcf::testing
