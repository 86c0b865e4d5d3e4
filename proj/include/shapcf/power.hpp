#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "shapcf/estimate.hpp"
#include "shapcf/partition.hpp"
#include "shapcf/rng.hpp"
#include "shapcf/utility.hpp"

namespace shapcf {

// Unbiased single-permutation estimate of the power of x in A towards B,
// i.e. psi'(B + x) - psi'(A - x) after moving x from A to B. With
// P = owners before both A and B in `perm`:
//   common x (also in B):  n/2 * [U(P + B)     - U(P + (A - x))] / (n - |P| - 1)
//   otherwise:             n/2 * [U(P + B + x) - U(P + (A - x))] / (n - |P| - 1)
// Throws DeltaNotOwned if x is not in A, SingletonOwner if A = {x}.
double power_sample(const OwnerPartition& partition, const UtilityOracle& oracle, OwnerId a,
                    OwnerId b, EntryId x, const PermutationSample& perm);

// Exact power by enumeration: diff_shapley_exact on the transferred partition
// with the owner roles swapped.
double power_exact(const OwnerPartition& partition, const UtilityOracle& oracle, OwnerId a,
                   OwnerId b, EntryId x);

struct ArmState {
  EntryId entry;
  Estimate estimate;
  bool is_common = false;
};

struct BanditOptions {
  double confidence = 0.95;
  // Stop once the leading arm's half-width is at most epsilon.
  double epsilon = 0.01;
  // Samples per arm before the first posterior draw.
  std::size_t prior_samples = 8;
  std::size_t batch = 32;
  std::size_t max_samples_per_arm = 20000;
  // Joint posterior draws used to estimate P(best arm is truly best).
  std::size_t posterior_draws = 256;
  std::function<bool()> cancelled;
};

struct Top1Result {
  std::size_t arm = 0;
  EntryId entry{};
  // The leading arm hit its budget (or sampling was cancelled) before its
  // interval reached epsilon. The entry is still the best estimate.
  bool budget_exhausted = false;
  std::size_t samples = 0;
  std::vector<ArmState> arms;
};

// Draws one observation for the arm at the given index.
using ArmSampler = std::function<double(std::size_t arm, Rng& rng)>;

// Thompson sampling for the arm with the largest mean. Each round draws one
// value per arm from Normal(mean, var / count) and takes the argmax x_best;
// with probability p (the share of joint posterior draws in which x_best is
// the argmax) x_best is sampled, otherwise a uniformly chosen other arm.
Top1Result thompson_top1(std::vector<ArmState> arms, const ArmSampler& sampler,
                         const BanditOptions& options, Rng& rng);

// Arms for every entry of A, sampled with power_sample on fresh permutations.
Top1Result find_top_power_entry(const OwnerPartition& partition, const UtilityOracle& oracle,
                                OwnerId a, OwnerId b, const BanditOptions& options, Rng& rng);

}  // namespace shapcf
