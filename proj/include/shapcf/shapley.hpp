#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "shapcf/estimate.hpp"
#include "shapcf/partition.hpp"
#include "shapcf/rng.hpp"
#include "shapcf/utility.hpp"

namespace shapcf {

inline constexpr std::size_t kDefaultExactOwnerLimit = 12;

// U of the coalition's composed dataset.
double coalition_utility(const OwnerPartition& partition, const UtilityOracle& oracle,
                         Coalition coalition);

// Subset form of the Shapley value:
//   psi(O) = 1/n * sum_{S subset of others} [U(S + O) - U(S)] / C(n-1, |S|).
// Throws TooManyOwners when the partition has more than `owner_limit` owners.
double shapley_exact(const OwnerPartition& partition, const UtilityOracle& oracle, OwnerId o,
                     std::size_t owner_limit = kDefaultExactOwnerLimit);
// All owners at once, sharing one pass over the 2^n coalitions.
std::vector<double> shapley_exact_all(const OwnerPartition& partition,
                                      const UtilityOracle& oracle,
                                      std::size_t owner_limit = kDefaultExactOwnerLimit);
// Permutation form (average marginal over all n! orders). Cross-check only;
// limited to 8 owners.
double shapley_permutation_exact(const OwnerPartition& partition, const UtilityOracle& oracle,
                                 OwnerId o);

// psi(a) - psi(b) computed directly:
//   sum_{S subset of others} [U(S + a) - U(S + b)] / ((|S| + 1) * C(n-1, |S|+1)).
double diff_shapley_exact(const OwnerPartition& partition, const UtilityOracle& oracle,
                          OwnerId a, OwnerId b,
                          std::size_t owner_limit = kDefaultExactOwnerLimit);

// One summand of diff_shapley_exact, tagged with its coalition.
struct DiffShapleyTerm {
  Coalition coalition;
  double value;
};
std::vector<DiffShapleyTerm> diff_shapley_terms(const OwnerPartition& partition,
                                                const UtilityOracle& oracle, OwnerId a,
                                                OwnerId b,
                                                std::size_t owner_limit = kDefaultExactOwnerLimit);

// Unbiased single-permutation estimate of psi(a) - psi(b):
//   n/2 * [U(P + a) - U(P + b)] / (n - |P| - 1), P = owners before both.
double diff_shapley_sample(const OwnerPartition& partition, const UtilityOracle& oracle,
                           OwnerId a, OwnerId b, const PermutationSample& perm);

struct SamplingOptions {
  double confidence = 0.95;
  std::size_t batch = 64;
  std::size_t max_samples = 20000;
  std::size_t min_samples = 128;
  // Stop once the half-width falls to this value (checked between batches).
  std::optional<double> target_half_width;
  // Polled between batches; returning true ends sampling early.
  std::function<bool()> cancelled;
};

// Half-width target used when "converged" is requested without an explicit
// value: 0.01 * max(1, |mean|).
double default_target_half_width(double mean);

Estimate diff_shapley_mc(const OwnerPartition& partition, const UtilityOracle& oracle,
                         OwnerId a, OwnerId b, const SamplingOptions& options, Rng& rng);

// Monte Carlo Shapley value of one owner: marginal U(P + o) - U(P) over the
// owners P preceding o in a uniform permutation.
Estimate shapley_mc(const OwnerPartition& partition, const UtilityOracle& oracle, OwnerId o,
                    const SamplingOptions& options, Rng& rng);

enum class FlipOutcome { kFlipped, kNotFlipped, kUndecided };
const char* flip_outcome_name(FlipOutcome outcome);

struct FlipCheck {
  FlipOutcome outcome;
  Estimate estimate;
  bool flipped() const { return outcome == FlipOutcome::kFlipped; }
};

// Samples psi(a) - psi(b) until the confidence interval excludes zero or the
// budget runs out. Flipped means the upper bound is below zero (psi(b) now
// exceeds psi(a)); not flipped means the lower bound is above zero.
// `target_half_width` is ignored.
FlipCheck is_flipped(const OwnerPartition& partition, const UtilityOracle& oracle, OwnerId a,
                     OwnerId b, const SamplingOptions& options, Rng& rng);

}  // namespace shapcf
