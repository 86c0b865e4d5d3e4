#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "shapcf/error.hpp"
#include "shapcf/kernels.hpp"
#include "shapcf/utility.hpp"

namespace shapcf {

namespace {

// Scott's rule for an isotropic kernel on standardised data:
// h = mean feature sd * n^(-1 / (d + 4)).
double scott_bandwidth(const std::vector<double>& data, std::size_t dim,
                       const std::vector<std::uint32_t>& rows) {
  const std::size_t n = rows.size();
  if (n < 2) return 0.0;
  std::vector<double> sum(dim, 0.0);
  std::vector<double> sum_sq(dim, 0.0);
  for (std::uint32_t r : rows) {
    const double* x = data.data() + static_cast<std::size_t>(r) * dim;
    for (std::size_t c = 0; c < dim; ++c) {
      sum[c] += x[c];
      sum_sq[c] += x[c] * x[c];
    }
  }
  const auto nd = static_cast<double>(n);
  double variance = 0.0;
  for (std::size_t c = 0; c < dim; ++c) {
    const double mean = sum[c] / nd;
    variance += std::max(0.0, sum_sq[c] / nd - mean * mean);
  }
  const double sd = std::sqrt(variance / static_cast<double>(dim));
  return sd * std::pow(nd, -1.0 / (static_cast<double>(dim) + 4.0));
}

std::vector<std::uint32_t> row_list(const EntrySet& set) {
  std::vector<std::uint32_t> rows;
  rows.reserve(set.size());
  set.for_each([&](EntryId id) { rows.push_back(to_index(id)); });
  return rows;
}

}  // namespace

KdeUtility::KdeUtility(const Dataset& pool, const Dataset& test, KdeOptions options)
    : dim_(pool.cols()),
      pool_rows_(pool.rows()),
      test_rows_(test.rows()),
      fixed_bandwidth_(options.bandwidth) {
  if (pool.rows() == 0 || test.rows() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "kde utility needs non-empty pool and test sets");
  }
  if (test.cols() != pool.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "pool and test sets differ in arity");
  }
  if (options.bandwidth && !(*options.bandwidth > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "kde bandwidth must be positive");
  }
  const ColumnStats stats = column_stats(pool);
  pool_ = standardize(pool, stats);
  test_ = standardize(test, stats);

  std::vector<std::uint32_t> all(pool_rows_);
  for (std::uint32_t i = 0; i < pool_rows_; ++i) all[i] = i;
  constexpr double kMinimumBandwidth = 1e-3;
  pool_bandwidth_ = std::max(kMinimumBandwidth, scott_bandwidth(pool_, dim_, all));
  floor_ = options.bandwidth_floor.value_or(pool_bandwidth_);
  if (!(floor_ > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "kde bandwidth floor must be positive");
  }

  const double reference_bandwidth = fixed_bandwidth_.value_or(pool_bandwidth_);
  reference_log_density_.resize(test_rows_);
  for (std::size_t t = 0; t < test_rows_; ++t) {
    reference_log_density_[t] = log_density(
        std::span<const double>(test_.data() + t * dim_, dim_), all, reference_bandwidth);
  }

  if (options.eta) {
    eta_ = *options.eta;
  } else {
    eta_ = 0.0;
    std::vector<std::uint32_t> single(1);
    for (std::uint32_t i = 0; i < pool_rows_; ++i) {
      single[0] = i;
      eta_ = std::max(eta_, loss_for_rows(single, fixed_bandwidth_.value_or(floor_)));
    }
  }
}

double KdeUtility::log_density(std::span<const double> point,
                               const std::vector<std::uint32_t>& rows,
                               double bandwidth) const {
  const double inv_two_h2 = 1.0 / (2.0 * bandwidth * bandwidth);
  // log-sum-exp over kernels, anchored at the nearest row.
  std::vector<double> exponents(rows.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const std::span<const double> x(pool_.data() + static_cast<std::size_t>(rows[j]) * dim_,
                                    dim_);
    exponents[j] = -kernels::squared_distance(point, x) * inv_two_h2;
    best = std::max(best, exponents[j]);
  }
  double acc = 0.0;
  for (double e : exponents) acc += std::exp(e - best);
  const double log_norm = std::log(static_cast<double>(rows.size())) +
                          0.5 * static_cast<double>(dim_) *
                              std::log(2.0 * std::numbers::pi * bandwidth * bandwidth);
  return best + std::log(acc) - log_norm;
}

double KdeUtility::loss_for_rows(const std::vector<std::uint32_t>& rows,
                                 double bandwidth) const {
  double loss = 0.0;
  for (std::size_t t = 0; t < test_rows_; ++t) {
    const double lp =
        log_density(std::span<const double>(test_.data() + t * dim_, dim_), rows, bandwidth);
    loss += std::abs(reference_log_density_[t] - lp);
  }
  return loss;
}

double KdeUtility::bandwidth_for(const EntrySet& composed) const {
  if (fixed_bandwidth_) return *fixed_bandwidth_;
  return std::max(floor_, scott_bandwidth(pool_, dim_, row_list(composed)));
}

double KdeUtility::loss(const EntrySet& composed) const {
  const auto rows = row_list(composed);
  if (rows.empty()) return std::numeric_limits<double>::infinity();
  const double h =
      fixed_bandwidth_ ? *fixed_bandwidth_ : std::max(floor_, scott_bandwidth(pool_, dim_, rows));
  return loss_for_rows(rows, h);
}

double KdeUtility::score(const EntrySet& composed) const { return eta_ - loss(composed); }

}  // namespace shapcf
