#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "shapcf/dataset.hpp"
#include "shapcf/entry_set.hpp"
#include "shapcf/rng.hpp"

namespace shapcf {

enum class UtilityKind {
  kAdditive,
  kSetCover,
  kKde,
  kLogisticRegression,
  kLinearRegression,
  kVerticalLinearRegression,
};

std::string_view utility_kind_name(UtilityKind kind);

// Task score of a composed dataset. Implementations are immutable and safe to
// call concurrently. `score` is only called with non-empty sets; the oracle
// owns the U(empty) = 0 rule and the clamp at zero.
class UtilityModel {
 public:
  virtual ~UtilityModel() = default;
  virtual UtilityKind kind() const = 0;
  virtual std::size_t universe() const = 0;
  virtual double score(const EntrySet& composed) const = 0;
  // True when D1 subset D2 implies score(D1) <= score(D2) by construction.
  virtual bool monotone() const { return false; }
};

// U(D) = sum of non-negative per-entry weights.
class AdditiveUtility final : public UtilityModel {
 public:
  explicit AdditiveUtility(std::vector<double> weights);
  UtilityKind kind() const override { return UtilityKind::kAdditive; }
  std::size_t universe() const override { return weights_.size(); }
  double score(const EntrySet& composed) const override;
  bool monotone() const override { return true; }
  double weight(EntryId id) const { return weights_.at(to_index(id)); }

 private:
  std::vector<double> weights_;
};

// Subsets S_1..S_m of an element universe. Entry id i-1 stands for S_i.
struct SetCoverGame {
  std::size_t elements = 0;
  std::vector<std::vector<std::uint32_t>> subsets;
};

// Encoding f(chosen) = sum over chosen S_i of 2^i / 2^(m+1).
double set_cover_encoding(const SetCoverGame& game, const EntrySet& chosen);

// 0 when the chosen subsets do not cover every element, otherwise
// m - |chosen| + f(chosen). Not monotone: adding a subset to a cover lowers
// the score by roughly one. Being a cover is monotone.
class SetCoverUtility final : public UtilityModel {
 public:
  explicit SetCoverUtility(SetCoverGame game);
  UtilityKind kind() const override { return UtilityKind::kSetCover; }
  std::size_t universe() const override { return game_.subsets.size(); }
  double score(const EntrySet& composed) const override;
  bool covers(const EntrySet& chosen) const;
  const SetCoverGame& game() const { return game_; }

 private:
  SetCoverGame game_;
  std::vector<EntrySet> subset_bits_;
};

struct KdeOptions {
  // Fixed isotropic bandwidth (standardised units). Unset: Scott's rule on
  // the composed set.
  std::optional<double> bandwidth;
  // Lower bound for the Scott bandwidth. Unset: the pool's Scott bandwidth.
  std::optional<double> bandwidth_floor;
  // Unset: the largest loss of any single-entry training set.
  std::optional<double> eta;
};

// Gaussian kernel density fitted on the composed rows. Loss is the sum over
// test points of |log p_pool(t) - log p_D(t)|, where p_pool is the density of
// the whole training pool. Score = eta - loss.
class KdeUtility final : public UtilityModel {
 public:
  KdeUtility(const Dataset& pool, const Dataset& test, KdeOptions options = {});
  UtilityKind kind() const override { return UtilityKind::kKde; }
  std::size_t universe() const override { return pool_rows_; }
  double score(const EntrySet& composed) const override;

  double loss(const EntrySet& composed) const;
  double bandwidth_for(const EntrySet& composed) const;
  double pool_bandwidth() const { return pool_bandwidth_; }
  double eta() const { return eta_; }

 private:
  double log_density(std::span<const double> point, const std::vector<std::uint32_t>& rows,
                     double bandwidth) const;
  double loss_for_rows(const std::vector<std::uint32_t>& rows, double bandwidth) const;

  std::size_t dim_;
  std::size_t pool_rows_;
  std::vector<double> pool_;  // standardised, row-major
  std::vector<double> test_;  // standardised with pool statistics
  std::size_t test_rows_;
  std::optional<double> fixed_bandwidth_;
  double floor_;
  double pool_bandwidth_;
  std::vector<double> reference_log_density_;
  double eta_;
};

struct LogisticRegressionOptions {
  double eta = 20.0;
  std::size_t iterations = 200;
  double learning_rate = 0.5;
  double l2 = 1e-3;
};

// Full-batch gradient descent from zero weights on pool-standardised
// features; score = eta - mean test log-loss. Single-class training sets
// fall back to the constant predictor p = (positives + 1) / (rows + 2).
class LogisticRegressionUtility final : public UtilityModel {
 public:
  LogisticRegressionUtility(const Dataset& pool, const Dataset& test,
                            LogisticRegressionOptions options = {});
  UtilityKind kind() const override { return UtilityKind::kLogisticRegression; }
  std::size_t universe() const override { return pool_rows_; }
  double score(const EntrySet& composed) const override;

  double loss(const EntrySet& composed) const;
  double eta() const { return options_.eta; }

 private:
  double test_log_loss(std::span<const double> weights, double bias) const;
  double constant_log_loss(double p) const;

  std::size_t dim_;
  std::size_t pool_rows_;
  std::vector<double> pool_;
  std::vector<double> pool_labels_;
  std::vector<double> test_;
  std::vector<double> test_labels_;
  LogisticRegressionOptions options_;
};

struct LinearRegressionOptions {
  // Unset: the largest test MSE of any single-entry training set.
  std::optional<double> eta;
  double ridge = 0.0;
};

// Least squares with intercept; score = eta - test MSE. Fewer rows than
// parameters falls back to the mean-label predictor.
class LinearRegressionUtility final : public UtilityModel {
 public:
  LinearRegressionUtility(const Dataset& pool, const Dataset& test,
                          LinearRegressionOptions options = {});
  UtilityKind kind() const override { return UtilityKind::kLinearRegression; }
  std::size_t universe() const override { return pool_rows_; }
  double score(const EntrySet& composed) const override;

  double loss(const EntrySet& composed) const;
  double eta() const { return eta_; }

 private:
  std::size_t dim_;
  std::size_t pool_rows_;
  std::vector<double> pool_;
  std::vector<double> pool_labels_;
  std::vector<double> test_;
  std::vector<double> test_labels_;
  double ridge_;
  double eta_;
};

// Vertically partitioned data: entries are feature columns. A coalition's
// model is least squares on the union of its columns; the loss is the MSE on
// `eval` (the training rows themselves when no evaluation set is given).
class VerticalLinearRegressionUtility final : public UtilityModel {
 public:
  VerticalLinearRegressionUtility(const Dataset& train, const Dataset* eval = nullptr,
                                  LinearRegressionOptions options = {});
  UtilityKind kind() const override { return UtilityKind::kVerticalLinearRegression; }
  std::size_t universe() const override { return dim_; }
  double score(const EntrySet& composed) const override;

  double loss(const EntrySet& composed) const;
  double eta() const { return eta_; }

 private:
  std::size_t dim_;
  Dataset train_;
  std::optional<Dataset> eval_;
  double ridge_;
  double eta_;
};

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
};

// U: composed dataset -> [0, inf). Applies U(empty) = 0, the clamp at zero
// and memoisation keyed on the composed entry set. Copies share the model and
// the cache.
class UtilityOracle {
 public:
  explicit UtilityOracle(std::shared_ptr<const UtilityModel> model, bool memoize = true,
                         std::size_t cache_capacity = std::size_t{1} << 21);

  double operator()(const EntrySet& composed) const;
  double uncached(const EntrySet& composed) const;

  const UtilityModel& model() const { return *model_; }
  UtilityKind kind() const { return model_->kind(); }
  std::size_t universe() const { return model_->universe(); }
  bool monotone() const { return model_->monotone(); }
  bool memoized() const { return cache_ != nullptr; }

  CacheStats stats() const;
  void clear_cache() const;

 private:
  struct Cache;
  std::shared_ptr<const UtilityModel> model_;
  std::shared_ptr<Cache> cache_;
};

// Empirical check of D1 subset D2 => U(D1) <= U(D2) + tolerance over random
// nested pairs drawn from `pool`.
struct MonotonicityViolation {
  std::vector<EntryId> smaller;
  std::vector<EntryId> larger;
  double smaller_utility;
  double larger_utility;
};
struct MonotonicityAudit {
  std::size_t pairs = 0;
  std::vector<MonotonicityViolation> violations;
};
MonotonicityAudit audit_monotonicity(const UtilityOracle& oracle, const EntrySet& pool,
                                     std::size_t pairs, double tolerance, Rng& rng);

// Builds an oracle from a JSON utility config, e.g.
//   {"kind": "logreg", "eta": 20.0, "label": "booking_status"}
// `train` supplies the entry universe for data-backed kinds and `test` the
// evaluation rows (required for kde/logreg/linreg).
UtilityOracle make_oracle(const nlohmann::ordered_json& config, const Dataset* train,
                          const Dataset* test);

}  // namespace shapcf
