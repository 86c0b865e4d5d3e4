#include "shapcf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shapcf/error.hpp"
#include "shapcf/rng.hpp"

namespace shapcf {

Dataset::Dataset(std::vector<std::string> feature_names, std::vector<double> features,
                 std::optional<std::vector<double>> labels, std::string label_name)
    : feature_names_(std::move(feature_names)),
      features_(std::move(features)),
      labels_(std::move(labels)),
      label_name_(std::move(label_name)) {
  if (feature_names_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "dataset needs at least one feature");
  }
  if (features_.size() % feature_names_.size() != 0) {
    throw Error(ErrorCode::kInvalidArgument, "ragged feature matrix");
  }
  rows_ = features_.size() / feature_names_.size();
  for (double v : features_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite feature value");
    }
  }
  if (labels_) {
    if (labels_->size() != rows_) {
      throw Error(ErrorCode::kInvalidArgument, "label count does not match rows");
    }
    for (double v : *labels_) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kInvalidArgument, "non-finite label value");
      }
    }
  }
}

std::span<const double> Dataset::labels() const {
  if (!labels_) throw Error(ErrorCode::kInvalidArgument, "dataset has no label column");
  return *labels_;
}

std::size_t Dataset::column_index(std::string_view name) const {
  const auto it = std::find(feature_names_.begin(), feature_names_.end(), name);
  if (it == feature_names_.end()) {
    throw Error(ErrorCode::kUnknownColumn, "no column named '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - feature_names_.begin());
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  std::vector<double> features;
  features.reserve(rows.size() * cols());
  std::optional<std::vector<double>> labels;
  if (labels_) labels.emplace().reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= rows_) throw Error(ErrorCode::kInvalidArgument, "row index out of range");
    const auto src = row(r);
    features.insert(features.end(), src.begin(), src.end());
    if (labels_) labels->push_back((*labels_)[r]);
  }
  return Dataset(feature_names_, std::move(features), std::move(labels), label_name_);
}

Dataset Dataset::select_columns(std::span<const std::size_t> columns) const {
  std::vector<std::string> names;
  for (std::size_t c : columns) {
    if (c >= cols()) throw Error(ErrorCode::kInvalidArgument, "column index out of range");
    names.push_back(feature_names_[c]);
  }
  std::vector<double> features;
  features.reserve(rows_ * columns.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c : columns) features.push_back(at(r, c));
  }
  return Dataset(std::move(names), std::move(features), labels_, label_name_);
}

TrainTestSplit shuffle_split(const Dataset& data, double test_fraction,
                             std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "test_fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.uniform_index(i)]);
  }
  auto n_test = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(data.rows())));
  n_test = std::clamp<std::size_t>(n_test, 1, data.rows() - 1);
  const std::span<const std::size_t> all(order);
  return {data.select_rows(all.subspan(n_test)), data.select_rows(all.first(n_test))};
}

ColumnStats column_stats(const Dataset& data) {
  ColumnStats stats{std::vector<double>(data.cols(), 0.0),
                    std::vector<double>(data.cols(), 1.0)};
  if (data.rows() == 0) return stats;
  const auto n = static_cast<double>(data.rows());
  for (std::size_t c = 0; c < data.cols(); ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < data.rows(); ++r) sum += data.at(r, c);
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t r = 0; r < data.rows(); ++r) {
      const double d = data.at(r, c) - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / n);
    stats.mean[c] = mean;
    stats.sd[c] = sd > 0.0 ? sd : 1.0;
  }
  return stats;
}

std::vector<double> standardize(const Dataset& data, const ColumnStats& stats) {
  std::vector<double> out(data.rows() * data.cols());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < data.cols(); ++c) {
      out[r * data.cols() + c] = (data.at(r, c) - stats.mean[c]) / stats.sd[c];
    }
  }
  return out;
}

}  // namespace shapcf
