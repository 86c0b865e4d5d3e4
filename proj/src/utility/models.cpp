#include <cmath>

#include "shapcf/error.hpp"
#include "shapcf/utility.hpp"

namespace shapcf {

std::string_view utility_kind_name(UtilityKind kind) {
  switch (kind) {
    case UtilityKind::kAdditive: return "additive";
    case UtilityKind::kSetCover: return "setcover";
    case UtilityKind::kKde: return "kde";
    case UtilityKind::kLogisticRegression: return "logreg";
    case UtilityKind::kLinearRegression: return "linreg";
    case UtilityKind::kVerticalLinearRegression: return "linreg-vertical";
  }
  return "unknown";
}

AdditiveUtility::AdditiveUtility(std::vector<double> weights) : weights_(std::move(weights)) {
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidArgument, "additive weights must be finite and >= 0");
    }
  }
}

double AdditiveUtility::score(const EntrySet& composed) const {
  double sum = 0.0;
  composed.for_each([&](EntryId id) { sum += weights_[to_index(id)]; });
  return sum;
}

double set_cover_encoding(const SetCoverGame& game, const EntrySet& chosen) {
  const int m = static_cast<int>(game.subsets.size());
  double f = 0.0;
  // Entry j is S_(j+1): contributes 2^(j+1) / 2^(m+1).
  chosen.for_each([&](EntryId id) {
    f += std::ldexp(1.0, static_cast<int>(to_index(id)) + 1 - (m + 1));
  });
  return f;
}

SetCoverUtility::SetCoverUtility(SetCoverGame game) : game_(std::move(game)) {
  if (game_.subsets.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "set-cover game needs at least one subset");
  }
  // The encoding sums distinct powers of two; beyond 52 subsets it would no
  // longer be exact in a double.
  if (game_.subsets.size() > 52) {
    throw Error(ErrorCode::kInvalidArgument, "set-cover games support at most 52 subsets");
  }
  EntrySet covered(game_.elements);
  for (const auto& subset : game_.subsets) {
    EntrySet bits(game_.elements);
    for (std::uint32_t e : subset) {
      if (e >= game_.elements) {
        throw Error(ErrorCode::kInvalidArgument, "subset element outside the universe");
      }
      bits.insert(entry(e));
    }
    covered |= bits;
    subset_bits_.push_back(std::move(bits));
  }
  if (covered.size() != game_.elements) {
    throw Error(ErrorCode::kInvalidArgument, "subsets do not cover the universe");
  }
}

bool SetCoverUtility::covers(const EntrySet& chosen) const {
  EntrySet covered(game_.elements);
  chosen.for_each([&](EntryId id) { covered |= subset_bits_[to_index(id)]; });
  return covered.size() == game_.elements;
}

double SetCoverUtility::score(const EntrySet& composed) const {
  if (!covers(composed)) return 0.0;
  const auto m = static_cast<double>(game_.subsets.size());
  return m - static_cast<double>(composed.size()) + set_cover_encoding(game_, composed);
}

}  // namespace shapcf
