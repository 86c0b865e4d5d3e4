#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "shapcf/dataset.hpp"
#include "shapcf/explain.hpp"
#include "shapcf/partition.hpp"
#include "shapcf/rng.hpp"

namespace shapcf {

// --- generators -------------------------------------------------------------

// n owners named O1..On. Each owner's size is uniform on [1, universe]; its
// entries are drawn without replacement, independently of other owners (so
// owners may overlap).
OwnerPartition gen_uniform(std::size_t universe, std::size_t n, Rng& rng);

struct ZipfianOptions {
  std::size_t base = 3;
  std::size_t k_max = 4;
  // Exponents for the designated pair (owners O1 and O2); unset means random.
  std::optional<std::size_t> k_a;
  std::optional<std::size_t> k_b;
};
// Sizes base^k with k in {0..k_max}. Throws SizeOverflow when
// base^k_max > universe.
OwnerPartition gen_zipfian(std::size_t universe, std::size_t n, const ZipfianOptions& options,
                           Rng& rng);

// One owner per distinct value of `group_column`, in ascending value order.
// Throws UnknownColumn, or InvalidArgument with fewer than two groups.
OwnerPartition gen_natural(const Dataset& data, std::string_view group_column);

// Owners hold disjoint feature groups covering every column; entries are
// column indices. Throws UnknownColumn or InvalidArgument.
OwnerPartition gen_vertical(const Dataset& data,
                            const std::vector<std::pair<std::string, std::vector<std::string>>>&
                                groups);

// --- metrics ----------------------------------------------------------------

// |X n Y| / |X u Y|; two empty sets count as identical.
double jaccard(const std::vector<EntryId>& x, const std::vector<EntryId>& y);

struct SizeStats {
  std::size_t count = 0;
  double mean = 0.0;
  // Population standard deviation.
  double sd = 0.0;
  // sd / mean; unset when the mean is 0 or there are no sizes.
  std::optional<double> cov;
};
SizeStats size_stats(const std::vector<double>& sizes);

struct SuccessTally {
  std::size_t successes = 0;
  std::size_t completed = 0;
  std::size_t timeouts = 0;
  // successes / completed; timeouts are not counted. Unset if none completed.
  std::optional<double> rate() const;
};

// Exact 1-D W1 distance between two empirical distributions.
double wasserstein_1d(std::vector<double> x, std::vector<double> y);

// Per-feature W1 between two row subsets after z-scoring with `data`'s
// statistics, averaged over features.
double mean_wasserstein(const Dataset& data, const EntrySet& x, const EntrySet& y);

// --- experiments ------------------------------------------------------------

enum class AllocationKind { kUniform, kZipfian, kNatural, kVertical };

struct ExperimentConfig {
  std::filesystem::path data;
  std::optional<std::filesystem::path> test;
  std::optional<std::string> label;
  double test_fraction = 0.2;
  // Per-trial subsample sizes drawn from the train/test split.
  std::optional<std::size_t> train_rows;
  std::optional<std::size_t> test_rows;
  nlohmann::ordered_json utility;
  std::vector<Engine> engines{Engine::kSvExp};

  AllocationKind allocation = AllocationKind::kUniform;
  std::vector<std::size_t> n_owners{3};
  ZipfianOptions zipf;
  std::string group_column;
  std::vector<std::pair<std::string, std::vector<std::string>>> feature_groups;
  // Grid runs: zipfian over (k_a, k_b), natural/vertical over all ordered
  // owner pairs. Each cell gets `trials` trials.
  bool grid = false;
  std::optional<std::pair<std::string, std::string>> pair;

  std::size_t trials = 1;
  std::uint64_t seed = 0;
  ExplainOptions explain;
  std::size_t pair_max_samples = 2000;
  std::size_t pair_redraws = 20;
  // 0 means: SHAPCF_THREADS if set, else hardware concurrency.
  std::size_t threads = 0;
};

// Relative paths resolve against `base_dir`.
ExperimentConfig parse_experiment_config(const nlohmann::ordered_json& doc,
                                         const std::filesystem::path& base_dir = {});

struct TrialRecord {
  std::size_t trial = 0;
  std::size_t n = 0;
  std::string cell_row;
  std::string cell_col;
  std::string a;
  std::string b;
  std::size_t size_a = 0;
  std::size_t size_b = 0;
  // Sign estimate used to orient the pair.
  std::optional<double> pair_diff;
  std::optional<double> wasserstein_ab;
  // Set when the trial could not run (e.g. no decided pair).
  std::string error;
  std::optional<CounterfactualResult> result;
  Engine engine = Engine::kSvExp;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;
  nlohmann::ordered_json summary;
  // Row/column labels and per-cell values for grid runs.
  std::vector<std::string> grid_rows;
  std::vector<std::string> grid_cols;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

// trials.csv, summary.json, timings.csv and, for grid runs,
// pairwise_size.csv / pairwise_success.csv.
void write_experiment(const ExperimentResult& result, const std::filesystem::path& out_dir);

// Worker count: SHAPCF_THREADS when set (>= 1), else hardware concurrency.
std::size_t worker_count(std::size_t requested = 0);

}  // namespace shapcf
