#include <string>

#include "shapcf/error.hpp"
#include "shapcf/utility.hpp"

namespace shapcf {

namespace {

using Json = nlohmann::ordered_json;

std::optional<double> optional_number(const Json& config, const char* key) {
  if (!config.contains(key) || config[key].is_null()) return std::nullopt;
  if (!config[key].is_number()) {
    throw Error(ErrorCode::kParse, std::string("utility key '") + key + "' must be a number");
  }
  return config[key].get<double>();
}

const Dataset& require(const Dataset* data, const std::string& kind, const char* role) {
  if (data == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, kind + " utility needs a " + role + " dataset");
  }
  return *data;
}

std::shared_ptr<const UtilityModel> additive_from(const Json& config, const Dataset* train) {
  std::vector<double> weights;
  if (config.contains("weights")) {
    weights = config["weights"].get<std::vector<double>>();
  } else if (config.contains("weight_column")) {
    const Dataset& data = require(train, "additive", "training");
    const std::size_t c = data.column_index(config["weight_column"].get<std::string>());
    for (std::size_t r = 0; r < data.rows(); ++r) weights.push_back(data.at(r, c));
  } else {
    throw Error(ErrorCode::kParse, "additive utility needs 'weights' or 'weight_column'");
  }
  if (train != nullptr && weights.size() != train->rows()) {
    throw Error(ErrorCode::kInvalidArgument, "additive weights do not match the dataset size");
  }
  return std::make_shared<AdditiveUtility>(std::move(weights));
}

std::shared_ptr<const UtilityModel> setcover_from(const Json& config) {
  SetCoverGame game;
  game.elements = config.at("elements").get<std::size_t>();
  game.subsets = config.at("subsets").get<std::vector<std::vector<std::uint32_t>>>();
  return std::make_shared<SetCoverUtility>(std::move(game));
}

}  // namespace

UtilityOracle make_oracle(const Json& config_in, const Dataset* train, const Dataset* test) {
  const Json& config = config_in.contains("utility") ? config_in["utility"] : config_in;
  if (!config.is_object() || !config.contains("kind") || !config["kind"].is_string()) {
    throw Error(ErrorCode::kParse, "utility config needs a string 'kind'");
  }
  const std::string kind = config["kind"].get<std::string>();
  const bool memoize = config.value("memoize", true);

  std::shared_ptr<const UtilityModel> model;
  try {
    if (kind == "additive") {
      model = additive_from(config, train);
    } else if (kind == "setcover" || kind == "set-cover") {
      model = setcover_from(config);
    } else if (kind == "kde") {
      KdeOptions options;
      options.bandwidth = optional_number(config, "bandwidth");
      options.bandwidth_floor = optional_number(config, "bandwidth_floor");
      options.eta = optional_number(config, "eta");
      model = std::make_shared<KdeUtility>(require(train, kind, "training"),
                                           require(test, kind, "test"), options);
    } else if (kind == "logreg" || kind == "logistic-regression") {
      LogisticRegressionOptions options;
      options.eta = optional_number(config, "eta").value_or(options.eta);
      options.iterations = config.value("iterations", options.iterations);
      options.learning_rate = config.value("learning_rate", options.learning_rate);
      options.l2 = config.value("l2", options.l2);
      model = std::make_shared<LogisticRegressionUtility>(require(train, kind, "training"),
                                                          require(test, kind, "test"), options);
    } else if (kind == "linreg" || kind == "linear-regression") {
      LinearRegressionOptions options;
      options.eta = optional_number(config, "eta");
      options.ridge = config.value("ridge", 0.0);
      model = std::make_shared<LinearRegressionUtility>(require(train, kind, "training"),
                                                        require(test, kind, "test"), options);
    } else if (kind == "linreg-vertical" || kind == "vertical-linear-regression") {
      LinearRegressionOptions options;
      options.eta = optional_number(config, "eta");
      options.ridge = config.value("ridge", 0.0);
      model = std::make_shared<VerticalLinearRegressionUtility>(require(train, kind, "training"),
                                                                test, options);
    } else {
      throw Error(ErrorCode::kParse, "unknown utility kind '" + kind + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, "utility config: " + std::string(e.what()));
  }
  return UtilityOracle(std::move(model), memoize);
}

}  // namespace shapcf
