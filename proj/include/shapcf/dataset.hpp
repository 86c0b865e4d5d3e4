#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace shapcf {

// Dense row-major table of finite feature values with an optional numeric
// label column. Row index doubles as the EntryId of the record.
class Dataset {
 public:
  Dataset() = default;

  // Validates arity >= 1, consistent row width and finite values.
  Dataset(std::vector<std::string> feature_names, std::vector<double> features,
          std::optional<std::vector<double>> labels = std::nullopt,
          std::string label_name = {});

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return feature_names_.size(); }
  bool has_labels() const noexcept { return labels_.has_value(); }

  std::span<const double> row(std::size_t r) const {
    return {features_.data() + r * cols(), cols()};
  }
  double at(std::size_t r, std::size_t c) const { return features_[r * cols() + c]; }
  double label(std::size_t r) const { return (*labels_)[r]; }

  std::span<const double> features() const noexcept { return features_; }
  std::span<const double> labels() const;
  const std::vector<std::string>& feature_names() const noexcept {
    return feature_names_;
  }
  const std::string& label_name() const noexcept { return label_name_; }

  // Throws UnknownColumn.
  std::size_t column_index(std::string_view name) const;

  Dataset select_rows(std::span<const std::size_t> rows) const;
  Dataset select_columns(std::span<const std::size_t> columns) const;

 private:
  std::vector<std::string> feature_names_;
  std::vector<double> features_;
  std::optional<std::vector<double>> labels_;
  std::string label_name_;
  std::size_t rows_ = 0;
};

// Seeded shuffle split into (train, test). test_fraction in (0, 1).
struct TrainTestSplit {
  Dataset train;
  Dataset test;
};
TrainTestSplit shuffle_split(const Dataset& data, double test_fraction,
                             std::uint64_t seed);

// Per-column mean and standard deviation (population); zero deviations are
// reported as 1 so standardisation leaves constant columns at 0.
struct ColumnStats {
  std::vector<double> mean;
  std::vector<double> sd;
};
ColumnStats column_stats(const Dataset& data);
std::vector<double> standardize(const Dataset& data, const ColumnStats& stats);

}  // namespace shapcf
