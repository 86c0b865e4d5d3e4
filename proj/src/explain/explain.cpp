#include "shapcf/explain.hpp"

#include <cmath>
#include <numeric>

#include "shapcf/error.hpp"

namespace shapcf {

std::string_view engine_name(Engine engine) {
  switch (engine) {
    case Engine::kBruteForce: return "bf";
    case Engine::kMonteCarlo: return "mc";
    case Engine::kSvExp: return "svexp";
  }
  return "bf";
}

Engine parse_engine(std::string_view name) {
  if (name == "bf") return Engine::kBruteForce;
  if (name == "mc") return Engine::kMonteCarlo;
  if (name == "svexp") return Engine::kSvExp;
  throw Error(ErrorCode::kInvalidArgument, "unknown engine '" + std::string(name) + "'");
}

std::string_view status_name(ExplainStatus status) {
  switch (status) {
    case ExplainStatus::kFound: return "found";
    case ExplainStatus::kPreconditionNotMet: return "precondition_not_met";
    case ExplainStatus::kPreconditionUndecided: return "precondition_undecided";
    case ExplainStatus::kTimedOut: return "timed_out";
    case ExplainStatus::kTooLarge: return "too_large";
  }
  return "found";
}

Deadline::Deadline(double seconds) : start_(std::chrono::steady_clock::now()) {
  if (std::isfinite(seconds)) {
    end_ = start_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(std::max(0.0, seconds)));
  }
}

bool Deadline::expired() const { return end_ && std::chrono::steady_clock::now() >= *end_; }

double Deadline::elapsed() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

OwnerPartition transferred(const OwnerPartition& partition, OwnerId a, OwnerId b,
                           const std::vector<EntryId>& delta) {
  return apply_transfer(partition, {a, b, EntrySet::from_ids(partition.universe(), delta)});
}

namespace {

void check_pair(const OwnerPartition& partition, OwnerId a, OwnerId b) {
  if (to_index(a) >= partition.size() || to_index(b) >= partition.size()) {
    throw Error(ErrorCode::kUnknownOwner, "owner index out of range");
  }
  if (a == b) throw Error(ErrorCode::kSameOwner, "a and b must be different owners");
}

SamplingOptions flip_options(const ExplainOptions& options, const Deadline* deadline) {
  SamplingOptions s;
  s.confidence = options.confidence;
  s.batch = options.batch;
  s.max_samples = options.flip_max_samples;
  s.min_samples = options.flip_min_samples;
  if (deadline != nullptr) s.cancelled = [deadline] { return deadline->expired(); };
  return s;
}

// Visits subsets of ids in size-ascending, lexicographic order (sizes
// 1..|ids|-1). `test` returns true to stop; the return value says whether
// enumeration stopped early.
template <typename Test>
bool enumerate_subsets(const std::vector<EntryId>& ids, Test&& test) {
  const std::size_t m = ids.size();
  std::vector<EntryId> subset;
  for (std::size_t k = 1; k < m; ++k) {
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    while (true) {
      subset.clear();
      for (std::size_t i : idx) subset.push_back(ids[i]);
      if (test(subset)) return true;
      // Next combination in lexicographic order.
      std::size_t i = k;
      while (i > 0 && idx[i - 1] == m - k + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return false;
}

// Fresh sign test on the final partition at an elevated budget.
void verify(CounterfactualResult& result, const OwnerPartition& partition,
            const UtilityOracle& oracle, OwnerId a, OwnerId b, const ExplainOptions& options,
            Rng& rng) {
  SamplingOptions s = flip_options(options, nullptr);
  s.max_samples = options.flip_max_samples * std::max<std::size_t>(1, options.verify_multiplier);
  const OwnerPartition moved = transferred(partition, a, b, result.delta);
  Rng verify_rng = rng.fork(0x766572696679ULL);
  const FlipCheck check = is_flipped(moved, oracle, a, b, s, verify_rng);
  result.success = check.flipped();
  result.final_diff = check.estimate.mean();
  result.final_half_width = check.estimate.half_width();
  result.samples += check.estimate.count();
}

// Shared precondition step for the sampling engines. Returns false when the
// search should not run.
bool sampled_precondition(CounterfactualResult& result, const OwnerPartition& partition,
                          const UtilityOracle& oracle, OwnerId a, OwnerId b,
                          const ExplainOptions& options, const Deadline& deadline, Rng& rng) {
  const FlipCheck initial = is_flipped(partition, oracle, a, b, flip_options(options, &deadline), rng);
  result.initial_diff = initial.estimate.mean();
  result.initial_half_width = initial.estimate.half_width();
  result.samples += initial.estimate.count();
  if (deadline.expired()) {
    result.status = ExplainStatus::kTimedOut;
    result.timed_out = true;
    return false;
  }
  if (initial.outcome == FlipOutcome::kFlipped) {
    result.status = ExplainStatus::kPreconditionNotMet;
    return false;
  }
  if (initial.outcome == FlipOutcome::kUndecided) {
    result.status = ExplainStatus::kPreconditionUndecided;
    return false;
  }
  return true;
}

void mark_timed_out(CounterfactualResult& result) {
  result.status = ExplainStatus::kTimedOut;
  result.timed_out = true;
  result.success = false;
}

}  // namespace

CounterfactualResult explain_bruteforce(const OwnerPartition& partition,
                                        const UtilityOracle& oracle, OwnerId a, OwnerId b,
                                        const ExplainOptions& options) {
  check_pair(partition, a, b);
  const Deadline deadline(options.timeout_seconds);
  CounterfactualResult result;
  result.engine = Engine::kBruteForce;
  if (partition.size() > options.exact_owner_limit) {
    result.status = ExplainStatus::kTooLarge;
    result.seconds = deadline.elapsed();
    return result;
  }
  result.initial_diff = diff_shapley_exact(partition, oracle, a, b, options.exact_owner_limit);
  if (!(result.initial_diff > 0.0)) {
    result.status = ExplainStatus::kPreconditionNotMet;
    result.seconds = deadline.elapsed();
    return result;
  }

  const std::vector<EntryId> ids = partition.entries(a).ids();
  bool too_large = false;
  bool timed_out = false;
  std::optional<double> found_diff;
  enumerate_subsets(ids, [&](const std::vector<EntryId>& subset) {
    if (result.subsets_tested >= options.max_subsets) return too_large = true;
    if (deadline.expired()) return timed_out = true;
    ++result.subsets_tested;
    const double d = diff_shapley_exact(transferred(partition, a, b, subset), oracle, a, b,
                                        options.exact_owner_limit);
    if (d < 0.0) {
      result.delta = subset;
      found_diff = d;
      return true;
    }
    return false;
  });

  if (too_large) {
    result.status = ExplainStatus::kTooLarge;
  } else if (timed_out) {
    mark_timed_out(result);
  } else {
    if (!found_diff) {
      // Nothing smaller flips: move everything.
      result.delta = ids;
      ++result.subsets_tested;
      found_diff = diff_shapley_exact(transferred(partition, a, b, ids), oracle, a, b,
                                      options.exact_owner_limit);
    }
    result.status = ExplainStatus::kFound;
    result.final_diff = *found_diff;
    result.final_half_width = 0.0;
    result.success = *found_diff < 0.0;
  }
  result.seconds = deadline.elapsed();
  return result;
}

CounterfactualResult explain_mc(const OwnerPartition& partition, const UtilityOracle& oracle,
                                OwnerId a, OwnerId b, const ExplainOptions& options, Rng& rng) {
  check_pair(partition, a, b);
  const Deadline deadline(options.timeout_seconds);
  CounterfactualResult result;
  result.engine = Engine::kMonteCarlo;
  if (!sampled_precondition(result, partition, oracle, a, b, options, deadline, rng)) {
    result.seconds = deadline.elapsed();
    return result;
  }

  const SamplingOptions flip = flip_options(options, &deadline);
  const std::vector<EntryId> ids = partition.entries(a).ids();
  bool too_large = false;
  bool timed_out = false;
  const bool found = enumerate_subsets(ids, [&](const std::vector<EntryId>& subset) {
    if (result.subsets_tested >= options.max_subsets) return too_large = true;
    if (deadline.expired()) return timed_out = true;
    ++result.subsets_tested;
    const FlipCheck check = is_flipped(transferred(partition, a, b, subset), oracle, a, b, flip, rng);
    result.samples += check.estimate.count();
    if (check.flipped()) {
      result.delta = subset;
      return true;
    }
    return false;
  });

  if (too_large) {
    result.status = ExplainStatus::kTooLarge;
  } else if (timed_out || deadline.expired()) {
    mark_timed_out(result);
  } else {
    if (!found) result.delta = ids;
    result.status = ExplainStatus::kFound;
    if (options.verify) {
      verify(result, partition, oracle, a, b, options, rng);
    } else {
      result.success = found;
    }
  }
  result.seconds = deadline.elapsed();
  return result;
}

CounterfactualResult explain_svexp(const OwnerPartition& partition, const UtilityOracle& oracle,
                                   OwnerId a, OwnerId b, const ExplainOptions& options, Rng& rng) {
  check_pair(partition, a, b);
  const Deadline deadline(options.timeout_seconds);
  CounterfactualResult result;
  result.engine = Engine::kSvExp;
  if (!sampled_precondition(result, partition, oracle, a, b, options, deadline, rng)) {
    result.seconds = deadline.elapsed();
    return result;
  }

  const SamplingOptions flip = flip_options(options, &deadline);
  BanditOptions bandit = options.bandit;
  bandit.confidence = options.confidence;
  bandit.epsilon = options.epsilon;
  bandit.cancelled = [&deadline] { return deadline.expired(); };

  OwnerPartition current = partition;
  bool flipped = false;
  while (!current.entries(a).empty()) {
    if (deadline.expired()) break;
    StepDiagnostic step;
    const EntrySet& remaining = current.entries(a);
    if (remaining.size() == 1) {
      step.entry = remaining.ids().front();
    } else {
      const Top1Result top = find_top_power_entry(current, oracle, a, b, bandit, rng);
      const Estimate& e = top.arms[top.arm].estimate;
      step.entry = top.entry;
      step.power_mean = e.mean();
      step.power_half_width = e.half_width();
      step.power_samples = top.samples;
      step.power_budget_exhausted = top.budget_exhausted;
      result.budget_exhausted = result.budget_exhausted || top.budget_exhausted;
      result.samples += top.samples;
      if (deadline.expired()) break;
    }
    current = transferred(current, a, b, {step.entry});
    result.delta.push_back(step.entry);

    if (!current.entries(a).empty()) {
      // Fresh estimate on the new partition; old samples do not carry over.
      const FlipCheck check = is_flipped(current, oracle, a, b, flip, rng);
      step.diff_mean = check.estimate.mean();
      step.diff_half_width = check.estimate.half_width();
      step.diff_samples = check.estimate.count();
      step.outcome = check.outcome;
      result.samples += check.estimate.count();
      flipped = check.flipped();
    }
    result.steps.push_back(step);
    if (flipped) break;
  }

  if (deadline.expired() && !flipped && !current.entries(a).empty()) {
    mark_timed_out(result);
  } else {
    result.status = ExplainStatus::kFound;
    if (options.verify) {
      verify(result, partition, oracle, a, b, options, rng);
    } else {
      result.success = flipped;
    }
  }
  result.seconds = deadline.elapsed();
  return result;
}

CounterfactualResult explain(Engine engine, const OwnerPartition& partition,
                             const UtilityOracle& oracle, OwnerId a, OwnerId b,
                             const ExplainOptions& options, Rng& rng) {
  switch (engine) {
    case Engine::kBruteForce: return explain_bruteforce(partition, oracle, a, b, options);
    case Engine::kMonteCarlo: return explain_mc(partition, oracle, a, b, options, rng);
    case Engine::kSvExp: return explain_svexp(partition, oracle, a, b, options, rng);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown engine");
}

}  // namespace shapcf
