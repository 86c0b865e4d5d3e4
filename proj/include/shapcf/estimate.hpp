#pragma once

#include <cstddef>

namespace shapcf {

// Two-sided standard-normal critical value for confidence level `confidence`
// in (0, 1): z = Phi^-1((1 + confidence) / 2).
double z_score(double confidence);

// Running mean and variance (Welford) with a normal-approximation confidence
// interval. Accumulators merge associatively, so parallel workers can sample
// independently and combine.
class Estimate {
 public:
  explicit Estimate(double confidence = 0.95);

  void add(double value);
  void merge(const Estimate& other);

  double mean() const noexcept { return mean_; }
  std::size_t count() const noexcept { return count_; }
  double m2() const noexcept { return m2_; }
  double confidence() const noexcept { return confidence_; }
  // m2 / count; 0 for fewer than two samples.
  double variance() const noexcept;
  // z * sqrt(m2 / count) / sqrt(count); infinity for fewer than two samples.
  double half_width() const;
  double lower() const { return mean_ - half_width(); }
  double upper() const { return mean_ + half_width(); }

 private:
  double confidence_;
  double z_;
  double mean_ = 0.0;
  double m2_ = 0.0;
  std::size_t count_ = 0;
};

}  // namespace shapcf
