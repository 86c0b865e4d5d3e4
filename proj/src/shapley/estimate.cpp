#include "shapcf/estimate.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>

#include "shapcf/error.hpp"

namespace shapcf {

double z_score(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "confidence must lie in (0, 1)");
  }
  return boost::math::quantile(boost::math::normal(), 0.5 * (1.0 + confidence));
}

Estimate::Estimate(double confidence) : confidence_(confidence), z_(z_score(confidence)) {}

void Estimate::add(double value) {
  ++count_;
  const double d = value - mean_;
  mean_ += d / static_cast<double>(count_);
  m2_ += d * (value - mean_);
}

void Estimate::merge(const Estimate& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    mean_ = other.mean_;
    m2_ = other.m2_;
    count_ = other.count_;
    return;
  }
  const auto n1 = static_cast<double>(count_);
  const auto n2 = static_cast<double>(other.count_);
  const double n = n1 + n2;
  const double d = other.mean_ - mean_;
  mean_ += d * n2 / n;
  m2_ += other.m2_ + d * d * n1 * n2 / n;
  count_ += other.count_;
}

double Estimate::variance() const noexcept {
  return count_ < 2 ? 0.0 : m2_ / static_cast<double>(count_);
}

double Estimate::half_width() const {
  if (count_ < 2) return std::numeric_limits<double>::infinity();
  return z_ * std::sqrt(variance()) / std::sqrt(static_cast<double>(count_));
}

}  // namespace shapcf
