#include "shapcf/shapley.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shapcf/error.hpp"

namespace shapcf {

namespace {

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return std::round(r);
}

void check_exact_size(const OwnerPartition& partition, std::size_t limit) {
  if (partition.size() > limit) {
    throw Error(ErrorCode::kTooManyOwners,
                std::to_string(partition.size()) + " owners exceed the exact limit of " +
                    std::to_string(limit));
  }
}

void check_owner(const OwnerPartition& partition, OwnerId o) {
  if (to_index(o) >= partition.size()) {
    throw Error(ErrorCode::kUnknownOwner, "owner index " + std::to_string(to_index(o)));
  }
}

// Visits every subset of `free_mask` (including the empty set).
template <typename Fn>
void for_each_subset(std::uint64_t free_mask, Fn&& fn) {
  std::uint64_t s = 0;
  while (true) {
    fn(s);
    if (s == free_mask) break;
    s = (s - free_mask) & free_mask;
  }
}

std::uint64_t bit(OwnerId o) { return std::uint64_t{1} << to_index(o); }

}  // namespace

double coalition_utility(const OwnerPartition& partition, const UtilityOracle& oracle,
                         Coalition coalition) {
  return oracle(partition.compose(coalition));
}

double shapley_exact(const OwnerPartition& partition, const UtilityOracle& oracle, OwnerId o,
                     std::size_t owner_limit) {
  check_exact_size(partition, owner_limit);
  check_owner(partition, o);
  const std::size_t n = partition.size();
  const std::uint64_t others = partition.everyone().mask() & ~bit(o);
  double total = 0.0;
  for_each_subset(others, [&](std::uint64_t s) {
    const Coalition c(s);
    const double marginal = coalition_utility(partition, oracle, c.with(o)) -
                            coalition_utility(partition, oracle, c);
    total += marginal / binomial(n - 1, c.size());
  });
  return total / static_cast<double>(n);
}

std::vector<double> shapley_exact_all(const OwnerPartition& partition,
                                      const UtilityOracle& oracle, std::size_t owner_limit) {
  check_exact_size(partition, owner_limit);
  const std::size_t n = partition.size();
  const std::uint64_t all = partition.everyone().mask();
  std::vector<double> u(std::size_t{1} << n);
  for (std::uint64_t s = 0; s <= all; ++s) u[s] = coalition_utility(partition, oracle, Coalition(s));
  std::vector<double> weight(n);
  for (std::size_t k = 0; k < n; ++k) weight[k] = 1.0 / binomial(n - 1, k);
  std::vector<double> psi(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t b = std::uint64_t{1} << i;
    for_each_subset(all & ~b, [&](std::uint64_t s) {
      psi[i] += (u[s | b] - u[s]) * weight[static_cast<std::size_t>(std::popcount(s))];
    });
    psi[i] /= static_cast<double>(n);
  }
  return psi;
}

double shapley_permutation_exact(const OwnerPartition& partition, const UtilityOracle& oracle,
                                 OwnerId o) {
  check_exact_size(partition, 8);
  check_owner(partition, o);
  std::vector<std::uint32_t> order(partition.size());
  std::iota(order.begin(), order.end(), 0U);
  double total = 0.0;
  std::size_t count = 0;
  do {
    Coalition before;
    for (std::uint32_t i : order) {
      if (i == to_index(o)) break;
      before.insert(owner(i));
    }
    total += coalition_utility(partition, oracle, before.with(o)) -
             coalition_utility(partition, oracle, before);
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  return total / static_cast<double>(count);
}

std::vector<DiffShapleyTerm> diff_shapley_terms(const OwnerPartition& partition,
                                                const UtilityOracle& oracle, OwnerId a,
                                                OwnerId b, std::size_t owner_limit) {
  check_exact_size(partition, owner_limit);
  check_owner(partition, a);
  check_owner(partition, b);
  std::vector<DiffShapleyTerm> terms;
  if (a == b) return terms;
  const std::size_t n = partition.size();
  const std::uint64_t others = partition.everyone().mask() & ~bit(a) & ~bit(b);
  for_each_subset(others, [&](std::uint64_t s) {
    const Coalition c(s);
    const std::size_t k = c.size();
    const double diff = coalition_utility(partition, oracle, c.with(a)) -
                        coalition_utility(partition, oracle, c.with(b));
    terms.push_back({c, diff / (static_cast<double>(k + 1) * binomial(n - 1, k + 1))});
  });
  return terms;
}

double diff_shapley_exact(const OwnerPartition& partition, const UtilityOracle& oracle,
                          OwnerId a, OwnerId b, std::size_t owner_limit) {
  double total = 0.0;
  for (const auto& t : diff_shapley_terms(partition, oracle, a, b, owner_limit)) total += t.value;
  return total;
}

double diff_shapley_sample(const OwnerPartition& partition, const UtilityOracle& oracle,
                           OwnerId a, OwnerId b, const PermutationSample& perm) {
  if (a == b) return 0.0;
  const Coalition p = prefix_before_pair(perm, a, b);
  const auto n = static_cast<double>(partition.size());
  const double diff = coalition_utility(partition, oracle, p.with(a)) -
                      coalition_utility(partition, oracle, p.with(b));
  return 0.5 * n * diff / (n - static_cast<double>(p.size()) - 1.0);
}

double default_target_half_width(double mean) { return 0.01 * std::max(1.0, std::abs(mean)); }

namespace {

void check_sampling(const SamplingOptions& options) {
  if (options.batch == 0) throw Error(ErrorCode::kInvalidArgument, "batch size must be >= 1");
  if (options.max_samples == 0) {
    throw Error(ErrorCode::kInvalidArgument, "sample budget must be >= 1");
  }
}

// Draws batches of `sample(perm)` until `done(estimate)` holds between
// batches or the budget is spent.
template <typename Sample, typename Done>
Estimate run_sampling(const OwnerPartition& partition, const SamplingOptions& options, Rng& rng,
                      Sample&& sample, Done&& done) {
  check_sampling(options);
  Estimate est(options.confidence);
  while (est.count() < options.max_samples) {
    const std::size_t todo = std::min(options.batch, options.max_samples - est.count());
    for (std::size_t i = 0; i < todo; ++i) est.add(sample(sample_permutation(partition, rng)));
    if (est.count() >= options.min_samples && done(est)) break;
    if (options.cancelled && options.cancelled()) break;
  }
  return est;
}

}  // namespace

Estimate diff_shapley_mc(const OwnerPartition& partition, const UtilityOracle& oracle,
                         OwnerId a, OwnerId b, const SamplingOptions& options, Rng& rng) {
  check_owner(partition, a);
  check_owner(partition, b);
  if (a == b) {
    // Every term is exactly zero.
    Estimate est(options.confidence);
    const std::size_t k = std::max<std::size_t>(2, std::min(options.min_samples, options.max_samples));
    for (std::size_t i = 0; i < k; ++i) est.add(0.0);
    return est;
  }
  return run_sampling(
      partition, options, rng,
      [&](const PermutationSample& perm) {
        return diff_shapley_sample(partition, oracle, a, b, perm);
      },
      [&](const Estimate& est) {
        return options.target_half_width && est.half_width() <= *options.target_half_width;
      });
}

Estimate shapley_mc(const OwnerPartition& partition, const UtilityOracle& oracle, OwnerId o,
                    const SamplingOptions& options, Rng& rng) {
  check_owner(partition, o);
  return run_sampling(
      partition, options, rng,
      [&](const PermutationSample& perm) {
        const Coalition p = perm.prefix(Coalition::of({o}));
        return coalition_utility(partition, oracle, p.with(o)) -
               coalition_utility(partition, oracle, p);
      },
      [&](const Estimate& est) {
        return options.target_half_width && est.half_width() <= *options.target_half_width;
      });
}

const char* flip_outcome_name(FlipOutcome outcome) {
  switch (outcome) {
    case FlipOutcome::kFlipped: return "flipped";
    case FlipOutcome::kNotFlipped: return "not_flipped";
    case FlipOutcome::kUndecided: return "undecided";
  }
  return "undecided";
}

FlipCheck is_flipped(const OwnerPartition& partition, const UtilityOracle& oracle, OwnerId a,
                     OwnerId b, const SamplingOptions& options, Rng& rng) {
  check_owner(partition, a);
  check_owner(partition, b);
  if (a == b) return {FlipOutcome::kUndecided, diff_shapley_mc(partition, oracle, a, b, options, rng)};
  const auto decided = [](const Estimate& est) { return est.upper() < 0.0 || est.lower() > 0.0; };
  Estimate est = run_sampling(
      partition, options, rng,
      [&](const PermutationSample& perm) {
        return diff_shapley_sample(partition, oracle, a, b, perm);
      },
      decided);
  FlipOutcome outcome = FlipOutcome::kUndecided;
  if (est.upper() < 0.0) {
    outcome = FlipOutcome::kFlipped;
  } else if (est.lower() > 0.0) {
    outcome = FlipOutcome::kNotFlipped;
  }
  return {outcome, est};
}

}  // namespace shapcf
