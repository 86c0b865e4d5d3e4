#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "shapcf/partition.hpp"
#include "shapcf/power.hpp"
#include "shapcf/rng.hpp"
#include "shapcf/shapley.hpp"
#include "shapcf/utility.hpp"

namespace shapcf {

enum class Engine { kBruteForce, kMonteCarlo, kSvExp };
std::string_view engine_name(Engine engine);
// Accepts "bf", "mc" and "svexp".
Engine parse_engine(std::string_view name);

enum class ExplainStatus {
  kFound,
  // psi(a) <= psi(b) to begin with: nothing to explain.
  kPreconditionNotMet,
  // The initial sign test could not separate psi(a) from psi(b).
  kPreconditionUndecided,
  kTimedOut,
  // Exact enumeration limits exceeded (owners or subsets).
  kTooLarge,
};
std::string_view status_name(ExplainStatus status);

// Wall-clock limit shared by the search loop and its inner samplers.
class Deadline {
 public:
  explicit Deadline(double seconds);
  bool expired() const;
  double elapsed() const;

 private:
  std::chrono::steady_clock::time_point start_;
  std::optional<std::chrono::steady_clock::time_point> end_;
};

struct ExplainOptions {
  double confidence = 0.95;
  // Thompson stopping width for the top-1 power estimate.
  double epsilon = 0.01;
  double timeout_seconds = 7200.0;
  // Budget for every sign test (precondition, per-candidate, per-step).
  std::size_t flip_max_samples = 20000;
  std::size_t flip_min_samples = 128;
  std::size_t batch = 64;
  BanditOptions bandit;
  // Verification runs a fresh sign test with this many times the budget.
  std::size_t verify_multiplier = 4;
  bool verify = true;
  std::size_t exact_owner_limit = kDefaultExactOwnerLimit;
  // Candidate subsets tested before BF/MC give up with TooLarge.
  std::size_t max_subsets = std::size_t{1} << 22;
};

struct StepDiagnostic {
  EntryId entry;
  double power_mean = 0.0;
  double power_half_width = 0.0;
  std::size_t power_samples = 0;
  bool power_budget_exhausted = false;
  double diff_mean = 0.0;
  double diff_half_width = 0.0;
  std::size_t diff_samples = 0;
  FlipOutcome outcome = FlipOutcome::kUndecided;
};

struct CounterfactualResult {
  Engine engine = Engine::kBruteForce;
  ExplainStatus status = ExplainStatus::kFound;
  // Transfer order for SV-Exp; enumeration order (ascending ids) otherwise.
  std::vector<EntryId> delta;
  bool success = false;
  bool timed_out = false;
  bool budget_exhausted = false;
  // psi(a) - psi(b) before any transfer (exact for BF, estimated otherwise).
  double initial_diff = 0.0;
  double initial_half_width = 0.0;
  // psi'(a) - psi'(b) after the transfer, from the verification check.
  std::optional<double> final_diff;
  std::optional<double> final_half_width;
  std::size_t subsets_tested = 0;
  std::size_t samples = 0;
  double seconds = 0.0;
  std::vector<StepDiagnostic> steps;

  std::size_t size() const { return delta.size(); }
};

// Exact search in size-ascending, lexicographic order; returns
// the first subset whose transfer makes psi(b) exceed psi(a), or all of A.
CounterfactualResult explain_bruteforce(const OwnerPartition& partition,
                                        const UtilityOracle& oracle, OwnerId a, OwnerId b,
                                        const ExplainOptions& options = {});

// The same enumeration, with each candidate tested by a Monte
// Carlo sign test.
CounterfactualResult explain_mc(const OwnerPartition& partition, const UtilityOracle& oracle,
                                OwnerId a, OwnerId b, const ExplainOptions& options, Rng& rng);

// Repeatedly move A's top-power entry to B until the order flips
// or A is exhausted.
CounterfactualResult explain_svexp(const OwnerPartition& partition, const UtilityOracle& oracle,
                                   OwnerId a, OwnerId b, const ExplainOptions& options, Rng& rng);

CounterfactualResult explain(Engine engine, const OwnerPartition& partition,
                             const UtilityOracle& oracle, OwnerId a, OwnerId b,
                             const ExplainOptions& options, Rng& rng);

// The partition after moving `delta` from a to b.
OwnerPartition transferred(const OwnerPartition& partition, OwnerId a, OwnerId b,
                           const std::vector<EntryId>& delta);

nlohmann::ordered_json result_to_json(const CounterfactualResult& result,
                                      const OwnerPartition& partition, OwnerId a, OwnerId b);

}  // namespace shapcf
