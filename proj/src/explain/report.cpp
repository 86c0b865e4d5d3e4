#include <cmath>

#include "shapcf/explain.hpp"

namespace shapcf {

namespace {

using Json = nlohmann::ordered_json;

// JSON has no infinity; unbounded half-widths become null.
Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json id_list(const std::vector<EntryId>& ids) {
  Json out = Json::array();
  for (EntryId id : ids) out.push_back(to_index(id));
  return out;
}

}  // namespace

Json result_to_json(const CounterfactualResult& result, const OwnerPartition& partition,
                    OwnerId a, OwnerId b) {
  Json steps = Json::array();
  for (const auto& s : result.steps) {
    steps.push_back({
        {"entry", to_index(s.entry)},
        {"power_mean", s.power_mean},
        {"power_half_width", number_or_null(s.power_half_width)},
        {"power_samples", s.power_samples},
        {"power_budget_exhausted", s.power_budget_exhausted},
        {"diff_mean", s.diff_mean},
        {"diff_half_width", number_or_null(s.diff_half_width)},
        {"diff_samples", s.diff_samples},
        {"outcome", flip_outcome_name(s.outcome)},
    });
  }
  Json out = {
      {"engine", engine_name(result.engine)},
      {"a", partition.name(a)},
      {"b", partition.name(b)},
      {"status", status_name(result.status)},
      {"delta", id_list(result.delta)},
      {"size", result.size()},
      {"success", result.success},
      {"timed_out", result.timed_out},
      {"budget_exhausted", result.budget_exhausted},
      {"initial_diff", result.initial_diff},
      {"initial_half_width", number_or_null(result.initial_half_width)},
      {"final_diff", result.final_diff ? Json(*result.final_diff) : Json(nullptr)},
      {"final_half_width",
       result.final_half_width ? number_or_null(*result.final_half_width) : Json(nullptr)},
      {"subsets_tested", result.subsets_tested},
      {"samples", result.samples},
      {"seconds", result.seconds},
      {"steps", std::move(steps)},
  };
  return out;
}

}  // namespace shapcf
