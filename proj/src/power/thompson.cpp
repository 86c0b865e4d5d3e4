#include <algorithm>
#include <cmath>

#include "shapcf/error.hpp"
#include "shapcf/power.hpp"

namespace shapcf {

namespace {

std::size_t leader_of(const std::vector<ArmState>& arms) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < arms.size(); ++i) {
    if (arms[i].estimate.mean() > arms[best].estimate.mean()) best = i;
  }
  return best;
}

double posterior_draw(const Estimate& e, Rng& rng) {
  const double sd = std::sqrt(e.variance() / static_cast<double>(std::max<std::size_t>(1, e.count())));
  return rng.normal(e.mean(), sd);
}

std::size_t posterior_argmax(const std::vector<ArmState>& arms, Rng& rng) {
  std::size_t best = 0;
  double best_value = posterior_draw(arms[0].estimate, rng);
  for (std::size_t i = 1; i < arms.size(); ++i) {
    const double v = posterior_draw(arms[i].estimate, rng);
    if (v > best_value) {
      best = i;
      best_value = v;
    }
  }
  return best;
}

}  // namespace

Top1Result thompson_top1(std::vector<ArmState> arms, const ArmSampler& sampler,
                         const BanditOptions& options, Rng& rng) {
  if (arms.empty()) throw Error(ErrorCode::kInvalidArgument, "thompson_top1 needs at least one arm");
  if (!(options.epsilon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be > 0");
  if (options.batch == 0 || options.max_samples_per_arm == 0) {
    throw Error(ErrorCode::kInvalidArgument, "batch and per-arm budget must be >= 1");
  }

  Top1Result result;
  const auto pull = [&](std::size_t arm, std::size_t k) {
    for (std::size_t i = 0; i < k && arms[arm].estimate.count() < options.max_samples_per_arm; ++i) {
      arms[arm].estimate.add(sampler(arm, rng));
      ++result.samples;
    }
  };

  const std::size_t prior = std::max<std::size_t>(2, options.prior_samples);
  for (std::size_t i = 0; i < arms.size(); ++i) pull(i, prior);

  while (true) {
    const std::size_t leader = leader_of(arms);
    const Estimate& top = arms[leader].estimate;
    result.arm = leader;
    if (top.half_width() <= options.epsilon) break;
    if (top.count() >= options.max_samples_per_arm || (options.cancelled && options.cancelled())) {
      result.budget_exhausted = true;
      break;
    }

    std::size_t chosen = leader;
    if (arms.size() > 1) {
      const std::size_t best = posterior_argmax(arms, rng);
      std::size_t wins = 0;
      for (std::size_t d = 0; d < options.posterior_draws; ++d) {
        if (posterior_argmax(arms, rng) == best) ++wins;
      }
      const double p = options.posterior_draws == 0
                           ? 1.0
                           : static_cast<double>(wins) / static_cast<double>(options.posterior_draws);
      if (rng.uniform01() < p) {
        chosen = best;
      } else {
        const std::size_t other = rng.uniform_index(arms.size() - 1);
        chosen = other >= best ? other + 1 : other;
      }
      if (arms[chosen].estimate.count() >= options.max_samples_per_arm) chosen = leader;
    }
    pull(chosen, options.batch);
  }

  result.entry = arms[result.arm].entry;
  result.arms = std::move(arms);
  return result;
}

Top1Result find_top_power_entry(const OwnerPartition& partition, const UtilityOracle& oracle,
                                OwnerId a, OwnerId b, const BanditOptions& options, Rng& rng) {
  const EntrySet& entries_a = partition.entries(a);
  const EntrySet& entries_b = partition.entries(b);
  std::vector<ArmState> arms;
  for (EntryId x : entries_a.ids()) {
    arms.push_back({x, Estimate(options.confidence), entries_b.contains(x)});
  }
  if (arms.size() == 1) {
    throw Error(ErrorCode::kSingletonOwner,
                partition.name(a) + " holds a single entry; it is the trivial explanation");
  }
  const ArmSampler sampler = [&](std::size_t arm, Rng& r) {
    // A fresh permutation per observation: no common random numbers.
    return power_sample(partition, oracle, a, b, arms[arm].entry, sample_permutation(partition, r));
  };
  return thompson_top1(arms, sampler, options, rng);
}

}  // namespace shapcf
