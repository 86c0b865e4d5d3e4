#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "shapcf/error.hpp"
#include "shapcf/kernels.hpp"
#include "shapcf/utility.hpp"

namespace shapcf {

namespace {

constexpr double kProbabilityClip = 1e-15;

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double binary_log_loss(double y, double p) {
  p = std::clamp(p, kProbabilityClip, 1.0 - kProbabilityClip);
  return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
}

std::vector<double> binary_labels(const Dataset& data, const char* role) {
  if (!data.has_labels()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(role) + " set needs a label column for logistic regression");
  }
  std::vector<double> labels(data.labels().begin(), data.labels().end());
  for (double y : labels) {
    if (y != 0.0 && y != 1.0) {
      throw Error(ErrorCode::kInvalidArgument, "logistic regression labels must be 0 or 1");
    }
  }
  return labels;
}

std::vector<double> numeric_labels(const Dataset& data, const char* role) {
  if (!data.has_labels()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(role) + " set needs a label column for linear regression");
  }
  return {data.labels().begin(), data.labels().end()};
}

// Least squares with intercept on the given (row-major) design rows. Returns
// coefficients [intercept, w...]; falls back to the mean predictor when there
// are fewer rows than parameters.
Eigen::VectorXd fit_least_squares(const std::vector<const double*>& rows, std::size_t dim,
                                  const std::vector<double>& targets, double ridge) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(dim) + 1;
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(p);
  double mean = 0.0;
  for (double y : targets) mean += y;
  mean /= static_cast<double>(std::max<std::size_t>(1, targets.size()));
  if (n < p && ridge <= 0.0) {
    coef(0) = mean;
    return coef;
  }
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (Eigen::Index c = 0; c < p - 1; ++c) x(i, c + 1) = rows[static_cast<std::size_t>(i)][c];
    y(i) = targets[static_cast<std::size_t>(i)];
  }
  if (ridge > 0.0) {
    Eigen::MatrixXd gram = x.transpose() * x;
    gram.diagonal().tail(p - 1).array() += ridge;
    coef = gram.ldlt().solve(x.transpose() * y);
  } else {
    coef = x.colPivHouseholderQr().solve(y);
  }
  if (!coef.allFinite()) {
    coef.setZero();
    coef(0) = mean;
  }
  return coef;
}

double predict(const Eigen::VectorXd& coef, const double* row, std::size_t dim) {
  return coef(0) + kernels::dot(std::span<const double>(coef.data() + 1, dim),
                                std::span<const double>(row, dim));
}

}  // namespace

// --- logistic regression ----------------------------------------------------

LogisticRegressionUtility::LogisticRegressionUtility(const Dataset& pool, const Dataset& test,
                                                     LogisticRegressionOptions options)
    : dim_(pool.cols()), pool_rows_(pool.rows()), options_(options) {
  if (test.rows() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "logistic regression needs a non-empty test set");
  }
  if (test.cols() != pool.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "pool and test sets differ in arity");
  }
  if (options_.iterations == 0 || !(options_.learning_rate > 0.0) || options_.l2 < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid logistic regression trainer settings");
  }
  const ColumnStats stats = column_stats(pool);
  pool_ = standardize(pool, stats);
  test_ = standardize(test, stats);
  pool_labels_ = binary_labels(pool, "training");
  test_labels_ = binary_labels(test, "test");
}

double LogisticRegressionUtility::constant_log_loss(double p) const {
  double loss = 0.0;
  for (double y : test_labels_) loss += binary_log_loss(y, p);
  return loss / static_cast<double>(test_labels_.size());
}

double LogisticRegressionUtility::test_log_loss(std::span<const double> weights,
                                                double bias) const {
  double loss = 0.0;
  for (std::size_t t = 0; t < test_labels_.size(); ++t) {
    const std::span<const double> x(test_.data() + t * dim_, dim_);
    loss += binary_log_loss(test_labels_[t], sigmoid(kernels::dot(weights, x) + bias));
  }
  return loss / static_cast<double>(test_labels_.size());
}

double LogisticRegressionUtility::loss(const EntrySet& composed) const {
  std::vector<std::uint32_t> rows;
  rows.reserve(composed.size());
  std::size_t positives = 0;
  composed.for_each([&](EntryId id) {
    rows.push_back(to_index(id));
    if (pool_labels_[to_index(id)] == 1.0) ++positives;
  });
  const std::size_t k = rows.size();
  if (k == 0 || positives == 0 || positives == k) {
    return constant_log_loss((static_cast<double>(positives) + 1.0) /
                             (static_cast<double>(k) + 2.0));
  }

  std::vector<double> w(dim_, 0.0);
  std::vector<double> grad(dim_);
  double b = 0.0;
  const double inv_k = 1.0 / static_cast<double>(k);
  for (std::size_t it = 0; it < options_.iterations; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    for (std::uint32_t r : rows) {
      const std::span<const double> x(pool_.data() + static_cast<std::size_t>(r) * dim_, dim_);
      const double err = sigmoid(kernels::dot(w, x) + b) - pool_labels_[r];
      kernels::axpy(err, x, grad);
      grad_b += err;
    }
    for (std::size_t c = 0; c < dim_; ++c) {
      w[c] -= options_.learning_rate * (grad[c] * inv_k + options_.l2 * w[c]);
    }
    b -= options_.learning_rate * grad_b * inv_k;
  }
  return test_log_loss(w, b);
}

double LogisticRegressionUtility::score(const EntrySet& composed) const {
  return options_.eta - loss(composed);
}

// --- linear regression ------------------------------------------------------

LinearRegressionUtility::LinearRegressionUtility(const Dataset& pool, const Dataset& test,
                                                 LinearRegressionOptions options)
    : dim_(pool.cols()), pool_rows_(pool.rows()), ridge_(options.ridge) {
  if (test.rows() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "linear regression needs a non-empty test set");
  }
  if (test.cols() != pool.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "pool and test sets differ in arity");
  }
  if (ridge_ < 0.0) throw Error(ErrorCode::kInvalidArgument, "ridge must be >= 0");
  const ColumnStats stats = column_stats(pool);
  pool_ = standardize(pool, stats);
  test_ = standardize(test, stats);
  pool_labels_ = numeric_labels(pool, "training");
  test_labels_ = numeric_labels(test, "test");
  if (options.eta) {
    eta_ = *options.eta;
  } else {
    // Worst single-entry training set: a constant predictor at that label.
    eta_ = 0.0;
    for (double y_train : pool_labels_) {
      double mse = 0.0;
      for (double y : test_labels_) mse += (y - y_train) * (y - y_train);
      eta_ = std::max(eta_, mse / static_cast<double>(test_labels_.size()));
    }
  }
}

double LinearRegressionUtility::loss(const EntrySet& composed) const {
  std::vector<const double*> rows;
  std::vector<double> targets;
  composed.for_each([&](EntryId id) {
    rows.push_back(pool_.data() + static_cast<std::size_t>(to_index(id)) * dim_);
    targets.push_back(pool_labels_[to_index(id)]);
  });
  const Eigen::VectorXd coef = fit_least_squares(rows, dim_, targets, ridge_);
  double mse = 0.0;
  for (std::size_t t = 0; t < test_labels_.size(); ++t) {
    const double err = predict(coef, test_.data() + t * dim_, dim_) - test_labels_[t];
    mse += err * err;
  }
  return mse / static_cast<double>(test_labels_.size());
}

double LinearRegressionUtility::score(const EntrySet& composed) const {
  return eta_ - loss(composed);
}

// --- vertical linear regression ---------------------------------------------

VerticalLinearRegressionUtility::VerticalLinearRegressionUtility(
    const Dataset& train, const Dataset* eval, LinearRegressionOptions options)
    : dim_(train.cols()), train_(train), ridge_(options.ridge) {
  numeric_labels(train, "training");
  if (eval != nullptr) {
    if (eval->cols() != train.cols()) {
      throw Error(ErrorCode::kInvalidArgument, "training and evaluation sets differ in arity");
    }
    numeric_labels(*eval, "evaluation");
    eval_ = *eval;
  }
  if (options.eta) {
    eta_ = *options.eta;
  } else {
    // Intercept-only model: no feature set does worse on its training rows.
    const Dataset& target = eval_ ? *eval_ : train_;
    double mean = 0.0;
    for (double y : train_.labels()) mean += y;
    mean /= static_cast<double>(train_.rows());
    double mse = 0.0;
    for (double y : target.labels()) mse += (y - mean) * (y - mean);
    eta_ = mse / static_cast<double>(target.rows());
  }
}

double VerticalLinearRegressionUtility::loss(const EntrySet& composed) const {
  std::vector<std::size_t> columns;
  composed.for_each([&](EntryId id) { columns.push_back(to_index(id)); });
  const Dataset x_train = train_.select_columns(columns);
  const ColumnStats stats = column_stats(x_train);
  const std::vector<double> z_train = standardize(x_train, stats);
  const std::size_t d = columns.size();
  std::vector<const double*> rows;
  for (std::size_t r = 0; r < x_train.rows(); ++r) rows.push_back(z_train.data() + r * d);
  const std::vector<double> targets(train_.labels().begin(), train_.labels().end());
  const Eigen::VectorXd coef = fit_least_squares(rows, d, targets, ridge_);

  const Dataset& target = eval_ ? *eval_ : train_;
  const Dataset x_eval = target.select_columns(columns);
  const std::vector<double> z_eval = standardize(x_eval, stats);
  double mse = 0.0;
  for (std::size_t r = 0; r < x_eval.rows(); ++r) {
    const double err = predict(coef, z_eval.data() + r * d, d) - target.label(r);
    mse += err * err;
  }
  return mse / static_cast<double>(x_eval.rows());
}

double VerticalLinearRegressionUtility::score(const EntrySet& composed) const {
  return eta_ - loss(composed);
}

}  // namespace shapcf
