#include <algorithm>
#include <cmath>

#include "shapcf/error.hpp"
#include "shapcf/harness.hpp"

namespace shapcf {

double jaccard(const std::vector<EntryId>& x, const std::vector<EntryId>& y) {
  std::vector<std::uint32_t> a;
  std::vector<std::uint32_t> b;
  for (EntryId id : x) a.push_back(to_index(id));
  for (EntryId id : y) b.push_back(to_index(id));
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  if (a.empty() && b.empty()) return 1.0;
  std::vector<std::uint32_t> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  const std::size_t uni = a.size() + b.size() - common.size();
  return static_cast<double>(common.size()) / static_cast<double>(uni);
}

SizeStats size_stats(const std::vector<double>& sizes) {
  SizeStats s;
  s.count = sizes.size();
  if (sizes.empty()) return s;
  for (double v : sizes) s.mean += v;
  s.mean /= static_cast<double>(sizes.size());
  double ss = 0.0;
  for (double v : sizes) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / static_cast<double>(sizes.size()));
  if (s.mean != 0.0) s.cov = s.sd / s.mean;
  return s;
}

std::optional<double> SuccessTally::rate() const {
  if (completed == 0) return std::nullopt;
  return static_cast<double>(successes) / static_cast<double>(completed);
}

double wasserstein_1d(std::vector<double> x, std::vector<double> y) {
  if (x.empty() || y.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "wasserstein distance needs non-empty samples");
  }
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  // Integrate |F_x - F_y| over the merged support.
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double prev = std::min(x.front(), y.front());
  double total = 0.0;
  while (i < x.size() || j < y.size()) {
    double next;
    if (j >= y.size() || (i < x.size() && x[i] <= y[j])) {
      next = x[i];
    } else {
      next = y[j];
    }
    total += std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny) * (next - prev);
    while (i < x.size() && x[i] == next) ++i;
    while (j < y.size() && y[j] == next) ++j;
    prev = next;
  }
  return total;
}

double mean_wasserstein(const Dataset& data, const EntrySet& x, const EntrySet& y) {
  const ColumnStats stats = column_stats(data);
  const auto xs = x.ids();
  const auto ys = y.ids();
  double total = 0.0;
  for (std::size_t c = 0; c < data.cols(); ++c) {
    std::vector<double> a;
    std::vector<double> b;
    for (EntryId id : xs) a.push_back((data.at(to_index(id), c) - stats.mean[c]) / stats.sd[c]);
    for (EntryId id : ys) b.push_back((data.at(to_index(id), c) - stats.mean[c]) / stats.sd[c]);
    total += wasserstein_1d(std::move(a), std::move(b));
  }
  return total / static_cast<double>(data.cols());
}

}  // namespace shapcf
