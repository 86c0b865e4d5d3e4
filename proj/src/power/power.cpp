#include "shapcf/power.hpp"

#include "shapcf/error.hpp"
#include "shapcf/shapley.hpp"

namespace shapcf {

namespace {

void check_entry(const OwnerPartition& partition, OwnerId a, EntryId x) {
  const EntrySet& entries_a = partition.entries(a);
  if (!entries_a.contains(x)) {
    throw Error(ErrorCode::kDeltaNotOwned,
                "entry " + std::to_string(to_index(x)) + " is not owned by " + partition.name(a));
  }
  if (entries_a.size() == 1) {
    throw Error(ErrorCode::kSingletonOwner,
                partition.name(a) + " holds a single entry; it is the trivial explanation");
  }
}

}  // namespace

double power_sample(const OwnerPartition& partition, const UtilityOracle& oracle, OwnerId a,
                    OwnerId b, EntryId x, const PermutationSample& perm) {
  check_entry(partition, a, x);
  const Coalition p = prefix_before_pair(perm, a, b);
  const auto n = static_cast<double>(partition.size());

  EntrySet a_minus = partition.entries(a);
  a_minus.erase(x);
  EntrySet b_plus = partition.entries(b);
  // For a common entry this insert is a no-op: B + x = B.
  b_plus.insert(x);

  const double u_b = oracle(partition.compose(p, b_plus));
  const double u_a = oracle(partition.compose(p, a_minus));
  return 0.5 * n * (u_b - u_a) / (n - static_cast<double>(p.size()) - 1.0);
}

double power_exact(const OwnerPartition& partition, const UtilityOracle& oracle, OwnerId a,
                   OwnerId b, EntryId x) {
  check_entry(partition, a, x);
  EntrySet delta(partition.universe());
  delta.insert(x);
  const OwnerPartition moved = apply_transfer(partition, {a, b, delta});
  return diff_shapley_exact(moved, oracle, b, a);
}

}  // namespace shapcf
