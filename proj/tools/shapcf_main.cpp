// shapcf: Shapley valuation of data owners and counterfactual explanations.
//
//   shapcf shapley    --data d.csv --partition p.json --utility u.json [--exact|--mc] ...
//   shapcf explain    --engine svexp --data d.csv --partition p.json --utility u.json --a A --b B
//   shapcf experiment --config exp.json --out dir/

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>

#include "shapcf/error.hpp"
#include "shapcf/explain.hpp"
#include "shapcf/harness.hpp"
#include "shapcf/io.hpp"
#include "shapcf/kernels.hpp"
#include "shapcf/shapley.hpp"
#include "shapcf/utility.hpp"

namespace {

using Json = nlohmann::ordered_json;
using namespace shapcf;

struct GameArgs {
  std::string data;
  std::string partition;
  std::string utility;
  std::string test;
};

void add_game_options(CLI::App* cmd, GameArgs& args) {
  cmd->add_option("--data", args.data, "training pool CSV (header row)")->required();
  cmd->add_option("--partition", args.partition, "owner partition JSON")->required();
  cmd->add_option("--utility", args.utility, "utility config JSON")->required();
  cmd->add_option("--test", args.test,
                  "evaluation CSV for ML utilities (default: the utility's \"test\" key, "
                  "else the training pool)");
}

struct Game {
  Dataset train;
  Dataset test;
  std::optional<UtilityOracle> oracle;
  std::optional<OwnerPartition> partition;
};

Game load_game(const GameArgs& args) {
  Game g;
  const Json config = load_json(args.utility);
  const Json& u = config.contains("utility") ? config["utility"] : config;
  std::optional<std::string> label;
  if (u.contains("label")) label = u["label"].get<std::string>();
  g.train = load_csv(args.data, label);

  std::string test_path = args.test;
  if (test_path.empty() && u.contains("test")) {
    const std::filesystem::path p(u["test"].get<std::string>());
    test_path = (p.is_relative() ? std::filesystem::path(args.utility).parent_path() / p : p).string();
  }
  g.test = test_path.empty() ? g.train : load_csv(test_path, label);

  g.oracle = make_oracle(config, &g.train, &g.test);
  g.partition = load_partition(args.partition, g.oracle->universe());
  return g;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

void emit(const Json& doc, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + out_path);
  out << doc.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shapley valuation of data owners and counterfactual explanations"};
  app.require_subcommand(1);
  std::string simd = "auto";
  app.add_option("--simd", simd, "kernel variant: auto, ref or avx2")
      ->check(CLI::IsMember({"auto", "ref", "avx2"}));

  // shapley
  GameArgs shapley_game;
  bool exact = false;
  bool mc = false;
  double shapley_delta = 0.95;
  std::size_t budget = 100000;
  std::optional<double> target;
  std::uint64_t shapley_seed = 0;
  std::string shapley_out;
  auto* shapley_cmd = app.add_subcommand("shapley", "Shapley value of every owner");
  add_game_options(shapley_cmd, shapley_game);
  auto* exact_flag = shapley_cmd->add_flag("--exact", exact, "exact enumeration (default)");
  shapley_cmd->add_flag("--mc", mc, "Monte Carlo permutation sampling")->excludes(exact_flag);
  shapley_cmd->add_option("--delta", shapley_delta, "confidence level")->check(CLI::Range(0.0, 1.0));
  shapley_cmd->add_option("--budget", budget, "permutations per owner")->check(CLI::PositiveNumber);
  shapley_cmd->add_option("--target", target, "stop once the half-width reaches this value");
  shapley_cmd->add_option("--seed", shapley_seed, "RNG seed");
  shapley_cmd->add_option("--out", shapley_out, "write JSON here instead of stdout");

  // explain
  GameArgs explain_game;
  std::string engine = "svexp";
  std::string owner_a;
  std::string owner_b;
  ExplainOptions options;
  std::uint64_t explain_seed = 0;
  std::string explain_out;
  auto* explain_cmd = app.add_subcommand("explain", "counterfactual explanation for a pair");
  add_game_options(explain_cmd, explain_game);
  explain_cmd->add_option("--engine", engine, "bf, mc or svexp")
      ->check(CLI::IsMember({"bf", "mc", "svexp"}));
  explain_cmd->add_option("--a", owner_a, "owner with the larger Shapley value")->required();
  explain_cmd->add_option("--b", owner_b, "owner to overtake a")->required();
  explain_cmd->add_option("--delta", options.confidence, "confidence level")
      ->check(CLI::Range(0.0, 1.0));
  explain_cmd->add_option("--epsilon", options.epsilon, "top-1 confidence width")
      ->check(CLI::PositiveNumber);
  explain_cmd->add_option("--timeout", options.timeout_seconds, "seconds");
  explain_cmd->add_option("--budget", options.flip_max_samples, "samples per sign test");
  explain_cmd->add_option("--seed", explain_seed, "RNG seed");
  explain_cmd->add_option("--out", explain_out, "write JSON here instead of stdout");

  // experiment
  std::string experiment_config;
  std::string experiment_out;
  auto* experiment_cmd = app.add_subcommand("experiment", "run a batch of trials");
  experiment_cmd->add_option("--config", experiment_config, "experiment JSON")->required();
  experiment_cmd->add_option("--out", experiment_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simd != "auto" && !kernels::select_table(simd)) {
      std::cerr << "warning: kernel variant '" << simd << "' unavailable, using "
                << kernels::active_table().name << '\n';
    }

    if (*shapley_cmd) {
      Game g = load_game(shapley_game);
      const OwnerPartition& p = *g.partition;
      Json out = Json::object();
      if (mc) {
        SamplingOptions s;
        s.confidence = shapley_delta;
        s.max_samples = budget;
        s.min_samples = std::min<std::size_t>(s.min_samples, budget);
        s.target_half_width = target;
        const Rng root(shapley_seed);
        for (std::uint32_t i = 0; i < p.size(); ++i) {
          Rng rng = root.fork(i);
          const Estimate e = shapley_mc(p, *g.oracle, owner(i), s, rng);
          out[p.name(owner(i))] = {{"mean", e.mean()},
                                   {"half_width", number_or_null(e.half_width())},
                                   {"count", e.count()}};
        }
      } else {
        const std::vector<double> psi = shapley_exact_all(p, *g.oracle);
        for (std::uint32_t i = 0; i < p.size(); ++i) {
          out[p.name(owner(i))] = {{"mean", psi[i]}, {"half_width", 0.0}, {"count", 0}};
        }
      }
      emit(out, shapley_out);
    } else if (*explain_cmd) {
      Game g = load_game(explain_game);
      const OwnerPartition& p = *g.partition;
      const OwnerId a = p.id(owner_a);
      const OwnerId b = p.id(owner_b);
      Rng rng(explain_seed);
      const CounterfactualResult result =
          explain(parse_engine(engine), p, *g.oracle, a, b, options, rng);
      emit(result_to_json(result, p, a, b), explain_out);
    } else if (*experiment_cmd) {
      const std::filesystem::path config_path(experiment_config);
      const ExperimentConfig config =
          parse_experiment_config(load_json(config_path), config_path.parent_path());
      const ExperimentResult result = run_experiment(config);
      write_experiment(result, experiment_out);
      std::cout << result.summary.dump(2) << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
