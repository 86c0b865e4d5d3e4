#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "shapcf/error.hpp"
#include "shapcf/harness.hpp"
#include "shapcf/io.hpp"
#include "shapcf/utility.hpp"

namespace shapcf {

using Json = nlohmann::ordered_json;

std::size_t worker_count(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SHAPCF_THREADS")) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(env, env + std::char_traits<char>::length(env), v);
    if (ec == std::errc() && v > 0) return v;
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

// --- config -----------------------------------------------------------------

ExperimentConfig parse_experiment_config(const Json& doc, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  const auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };
  try {
    c.data = resolve(doc.at("data").get<std::string>());
    if (doc.contains("test")) c.test = resolve(doc["test"].get<std::string>());
    c.utility = doc.at("utility");
    if (c.utility.contains("utility")) c.utility = Json(c.utility["utility"]);
    if (doc.contains("label")) {
      c.label = doc["label"].get<std::string>();
    } else if (c.utility.contains("label")) {
      c.label = c.utility["label"].get<std::string>();
    }
    c.test_fraction = doc.value("test_fraction", c.test_fraction);
    if (doc.contains("train_rows")) c.train_rows = doc["train_rows"].get<std::size_t>();
    if (doc.contains("test_rows")) c.test_rows = doc["test_rows"].get<std::size_t>();

    if (doc.contains("engines")) {
      c.engines.clear();
      for (const auto& e : doc["engines"]) c.engines.push_back(parse_engine(e.get<std::string>()));
    } else if (doc.contains("engine")) {
      c.engines = {parse_engine(doc["engine"].get<std::string>())};
    }
    if (c.engines.empty()) throw Error(ErrorCode::kInvalidArgument, "no engines configured");

    const Json alloc = doc.value("allocation", Json{{"kind", "uniform"}});
    const std::string kind = alloc.value("kind", "uniform");
    if (kind == "uniform") {
      c.allocation = AllocationKind::kUniform;
    } else if (kind == "zipfian") {
      c.allocation = AllocationKind::kZipfian;
      c.zipf.base = alloc.value("a", c.zipf.base);
      c.zipf.k_max = alloc.value("k_max", c.zipf.k_max);
      if (alloc.contains("k_a")) c.zipf.k_a = alloc["k_a"].get<std::size_t>();
      if (alloc.contains("k_b")) c.zipf.k_b = alloc["k_b"].get<std::size_t>();
    } else if (kind == "natural") {
      c.allocation = AllocationKind::kNatural;
      c.group_column = alloc.at("column").get<std::string>();
    } else if (kind == "vertical") {
      c.allocation = AllocationKind::kVertical;
      for (const auto& [name, features] : alloc.at("groups").items()) {
        c.feature_groups.emplace_back(name, features.get<std::vector<std::string>>());
      }
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown allocation '" + kind + "'");
    }
    if (alloc.contains("n")) {
      c.n_owners = alloc["n"].is_array() ? alloc["n"].get<std::vector<std::size_t>>()
                                         : std::vector<std::size_t>{alloc["n"].get<std::size_t>()};
    }
    c.grid = alloc.value("grid", false);
    if (doc.contains("pair")) {
      c.pair = {doc["pair"].at("a").get<std::string>(), doc["pair"].at("b").get<std::string>()};
    }

    c.trials = doc.value("trials", c.trials);
    c.seed = doc.value("seed", c.seed);
    c.threads = doc.value("threads", c.threads);
    c.pair_max_samples = doc.value("pair_max_samples", c.pair_max_samples);
    c.pair_redraws = doc.value("pair_redraws", c.pair_redraws);

    ExplainOptions& e = c.explain;
    e.confidence = doc.value("delta", e.confidence);
    e.epsilon = doc.value("epsilon", e.epsilon);
    e.timeout_seconds = doc.value("timeout", e.timeout_seconds);
    e.flip_max_samples = doc.value("flip_max_samples", e.flip_max_samples);
    e.flip_min_samples = doc.value("flip_min_samples", e.flip_min_samples);
    e.verify_multiplier = doc.value("verify_multiplier", e.verify_multiplier);
    e.max_subsets = doc.value("max_subsets", e.max_subsets);
    e.bandit.max_samples_per_arm = doc.value("bandit_max_samples", e.bandit.max_samples_per_arm);
    e.bandit.prior_samples = doc.value("prior_samples", e.bandit.prior_samples);
    e.bandit.batch = doc.value("bandit_batch", e.bandit.batch);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kParse, std::string("experiment config: ") + ex.what());
  }
  return c;
}

// --- running ----------------------------------------------------------------

namespace {

struct Task {
  std::size_t n = 0;
  std::string cell_row;
  std::string cell_col;
  // Fixed pair (grid cells or configured pair) by owner name.
  std::optional<std::pair<std::string, std::string>> pair;
  std::optional<std::size_t> k_a;
  std::optional<std::size_t> k_b;
};

struct Inputs {
  Dataset train;
  Dataset test;
  std::optional<OwnerPartition> fixed_partition;  // natural / vertical
  std::optional<UtilityOracle> shared_oracle;
};

Dataset drop_column(const Dataset& data, std::size_t column) {
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < data.cols(); ++c) {
    if (c != column) keep.push_back(c);
  }
  return data.select_columns(keep);
}

Dataset subsample(const Dataset& data, std::size_t rows, Rng& rng) {
  if (rows >= data.rows()) return data;
  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < rows; ++i) std::swap(order[i], order[i + rng.uniform_index(data.rows() - i)]);
  order.resize(rows);
  std::sort(order.begin(), order.end());
  return data.select_rows(order);
}

Inputs prepare_inputs(const ExperimentConfig& config) {
  Inputs in;
  const Dataset full = load_csv(config.data, config.label);
  if (config.test) {
    in.train = full;
    in.test = load_csv(*config.test, config.label);
  } else {
    auto split = shuffle_split(full, config.test_fraction, derive_seed(config.seed, 0x73706c6974ULL));
    in.train = std::move(split.train);
    in.test = std::move(split.test);
  }
  if (config.allocation == AllocationKind::kNatural) {
    in.fixed_partition = gen_natural(in.train, config.group_column);
    const std::size_t c = in.train.column_index(config.group_column);
    in.train = drop_column(in.train, c);
    in.test = drop_column(in.test, in.test.column_index(config.group_column));
  } else if (config.allocation == AllocationKind::kVertical) {
    in.fixed_partition = gen_vertical(in.train, config.feature_groups);
  }
  if (!config.train_rows && !config.test_rows) {
    in.shared_oracle = make_oracle(config.utility, &in.train, &in.test);
  }
  return in;
}

std::vector<Task> build_tasks(const ExperimentConfig& config, const Inputs& in,
                              std::vector<std::string>& rows, std::vector<std::string>& cols) {
  std::vector<Task> cells;
  if (config.grid && config.allocation == AllocationKind::kZipfian) {
    for (std::size_t ka = 0; ka <= config.zipf.k_max; ++ka) {
      std::size_t size = 1;
      for (std::size_t i = 0; i < ka; ++i) size *= config.zipf.base;
      rows.push_back(std::to_string(size));
    }
    cols = rows;
    for (std::size_t n : config.n_owners) {
      for (std::size_t ka = 0; ka <= config.zipf.k_max; ++ka) {
        for (std::size_t kb = 0; kb <= config.zipf.k_max; ++kb) {
          Task t;
          t.n = n;
          t.cell_row = rows[ka];
          t.cell_col = cols[kb];
          t.pair = {{"O1", "O2"}};
          t.k_a = ka;
          t.k_b = kb;
          cells.push_back(t);
        }
      }
    }
  } else if (config.grid && in.fixed_partition) {
    rows = in.fixed_partition->names();
    cols = rows;
    for (const auto& a : rows) {
      for (const auto& b : cols) {
        if (a == b) continue;
        Task t;
        t.n = in.fixed_partition->size();
        t.cell_row = a;
        t.cell_col = b;
        t.pair = {{a, b}};
        cells.push_back(t);
      }
    }
  } else if (in.fixed_partition) {
    Task t;
    t.n = in.fixed_partition->size();
    t.pair = config.pair;
    cells.push_back(t);
  } else {
    for (std::size_t n : config.n_owners) {
      Task t;
      t.n = n;
      t.pair = config.pair;
      cells.push_back(t);
    }
  }
  std::vector<Task> tasks;
  for (const auto& cell : cells) {
    for (std::size_t i = 0; i < config.trials; ++i) tasks.push_back(cell);
  }
  return tasks;
}

// Random ordered pair oriented so that psi(a) > psi(b), redrawing pairs whose
// sign stays undecided.
std::optional<std::pair<OwnerId, OwnerId>> choose_pair(const ExperimentConfig& config,
                                                       const OwnerPartition& partition,
                                                       const UtilityOracle& oracle, Rng& rng,
                                                       std::optional<double>& diff) {
  SamplingOptions s;
  s.confidence = config.explain.confidence;
  s.max_samples = config.pair_max_samples;
  s.min_samples = std::min(config.explain.flip_min_samples, config.pair_max_samples);
  s.batch = config.explain.batch;
  for (std::size_t attempt = 0; attempt <= config.pair_redraws; ++attempt) {
    const auto a = owner(static_cast<std::uint32_t>(rng.uniform_index(partition.size())));
    auto bi = static_cast<std::uint32_t>(rng.uniform_index(partition.size() - 1));
    if (bi >= to_index(a)) ++bi;
    const OwnerId b = owner(bi);
    const FlipCheck check = is_flipped(partition, oracle, a, b, s, rng);
    if (check.outcome == FlipOutcome::kNotFlipped) {
      diff = check.estimate.mean();
      return std::pair{a, b};
    }
    if (check.outcome == FlipOutcome::kFlipped) {
      diff = -check.estimate.mean();
      return std::pair{b, a};
    }
  }
  return std::nullopt;
}

std::vector<TrialRecord> run_task(const ExperimentConfig& config, const Inputs& in,
                                  const Task& task, std::size_t index) {
  const Rng rng(derive_seed(config.seed, index));
  TrialRecord base;
  base.trial = index;
  base.n = task.n;
  base.cell_row = task.cell_row;
  base.cell_col = task.cell_col;

  const auto fail = [&](const std::string& message) {
    std::vector<TrialRecord> out;
    for (Engine e : config.engines) {
      TrialRecord r = base;
      r.engine = e;
      r.error = message;
      out.push_back(std::move(r));
    }
    return out;
  };

  try {
    std::optional<Dataset> local_train;
    std::optional<Dataset> local_test;
    std::optional<UtilityOracle> local;
    if (!in.shared_oracle) {
      Rng data_rng = rng.fork(1);
      local_train = config.train_rows ? subsample(in.train, *config.train_rows, data_rng) : in.train;
      local_test = config.test_rows ? subsample(in.test, *config.test_rows, data_rng) : in.test;
      local = make_oracle(config.utility, &*local_train, &*local_test);
    }
    const Dataset& train = local_train ? *local_train : in.train;
    const UtilityOracle& oracle = in.shared_oracle ? *in.shared_oracle : *local;

    Rng part_rng = rng.fork(2);
    std::optional<OwnerPartition> partition;
    switch (config.allocation) {
      case AllocationKind::kUniform:
        partition = gen_uniform(oracle.universe(), task.n, part_rng);
        break;
      case AllocationKind::kZipfian: {
        ZipfianOptions z = config.zipf;
        if (task.k_a) z.k_a = task.k_a;
        if (task.k_b) z.k_b = task.k_b;
        partition = gen_zipfian(oracle.universe(), task.n, z, part_rng);
        break;
      }
      case AllocationKind::kNatural:
      case AllocationKind::kVertical:
        partition = *in.fixed_partition;
        break;
    }

    Rng pair_rng = rng.fork(3);
    OwnerId a{};
    OwnerId b{};
    if (task.pair) {
      a = partition->id(task.pair->first);
      b = partition->id(task.pair->second);
    } else {
      const auto chosen = choose_pair(config, *partition, oracle, pair_rng, base.pair_diff);
      if (!chosen) return fail("no pair with a decided Shapley order");
      std::tie(a, b) = *chosen;
    }
    base.a = partition->name(a);
    base.b = partition->name(b);
    base.size_a = partition->entries(a).size();
    base.size_b = partition->entries(b).size();
    if (config.allocation != AllocationKind::kVertical && base.size_a > 0 && base.size_b > 0) {
      base.wasserstein_ab = mean_wasserstein(train, partition->entries(a), partition->entries(b));
    }

    std::vector<TrialRecord> out;
    for (std::size_t e = 0; e < config.engines.size(); ++e) {
      TrialRecord r = base;
      r.engine = config.engines[e];
      Rng engine_rng = rng.fork(100 + static_cast<std::uint64_t>(r.engine));
      try {
        r.result = explain(r.engine, *partition, oracle, a, b, config.explain, engine_rng);
      } catch (const std::exception& ex) {
        r.error = ex.what();
      }
      out.push_back(std::move(r));
    }
    return out;
  } catch (const std::exception& ex) {
    return fail(ex.what());
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

Json optional_number(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? Json(*v) : Json(nullptr);
}

bool is_completed(const TrialRecord& r) {
  if (!r.error.empty() || !r.result) return false;
  return r.result->status == ExplainStatus::kFound;
}

Json summarize(const ExperimentConfig& config, const std::vector<TrialRecord>& records) {
  Json groups = Json::array();
  std::vector<std::size_t> ns;
  for (const auto& r : records) {
    if (std::find(ns.begin(), ns.end(), r.n) == ns.end()) ns.push_back(r.n);
  }
  for (std::size_t n : ns) {
    for (Engine engine : config.engines) {
      SuccessTally tally;
      std::vector<double> sizes;
      std::map<std::string, std::size_t> statuses;
      std::size_t errors = 0;
      std::size_t count = 0;
      for (const auto& r : records) {
        if (r.n != n || r.engine != engine) continue;
        ++count;
        if (!r.error.empty() || !r.result) {
          ++errors;
          continue;
        }
        ++statuses[std::string(status_name(r.result->status))];
        if (r.result->timed_out) ++tally.timeouts;
        if (is_completed(r)) {
          ++tally.completed;
          if (r.result->success) ++tally.successes;
        }
        if (r.result->status == ExplainStatus::kFound) {
          sizes.push_back(static_cast<double>(r.result->size()));
        }
      }
      const SizeStats st = size_stats(sizes);
      Json status_json = Json::object();
      for (const auto& [k, v] : statuses) status_json[k] = v;
      groups.push_back({
          {"n", n},
          {"engine", engine_name(engine)},
          {"trials", count},
          {"errors", errors},
          {"statuses", status_json},
          {"completed", tally.completed},
          {"timeouts", tally.timeouts},
          {"successes", tally.successes},
          {"success_rate", optional_number(tally.rate())},
          {"size_count", st.count},
          {"size_mean", st.count ? Json(st.mean) : Json(nullptr)},
          {"size_sd", st.count ? Json(st.sd) : Json(nullptr)},
          {"size_cov", optional_number(st.cov)},
      });
    }
  }

  // Engine-to-engine agreement on the same trial.
  Json agreement = Json::array();
  for (std::size_t i = 0; i < config.engines.size(); ++i) {
    for (std::size_t j = i + 1; j < config.engines.size(); ++j) {
      for (std::size_t n : ns) {
        std::map<std::size_t, const TrialRecord*> first;
        std::vector<double> jac;
        std::size_t below = 0;
        for (const auto& r : records) {
          if (r.n != n || r.engine != config.engines[i]) continue;
          if (r.result && r.result->status == ExplainStatus::kFound) first[r.trial] = &r;
        }
        for (const auto& r : records) {
          if (r.n != n || r.engine != config.engines[j]) continue;
          if (!r.result || r.result->status != ExplainStatus::kFound) continue;
          const auto it = first.find(r.trial);
          if (it == first.end()) continue;
          jac.push_back(jaccard(it->second->result->delta, r.result->delta));
          if (r.result->size() < it->second->result->size()) ++below;
        }
        const SizeStats js = size_stats(jac);
        agreement.push_back({
            {"n", n},
            {"engines", {engine_name(config.engines[i]), engine_name(config.engines[j])}},
            {"pairs", js.count},
            {"jaccard_mean", js.count ? Json(js.mean) : Json(nullptr)},
            {"jaccard_sd", js.count ? Json(js.sd) : Json(nullptr)},
            {"second_smaller", below},
        });
      }
    }
  }
  return {{"records", records.size()}, {"groups", groups}, {"agreement", agreement}};
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult out;
  if (config.trials == 0) {
    out.summary = summarize(config, {});
    return out;
  }
  const Inputs in = prepare_inputs(config);
  const std::vector<Task> tasks = build_tasks(config, in, out.grid_rows, out.grid_cols);

  std::vector<std::vector<TrialRecord>> slots(tasks.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      slots[i] = run_task(config, in, tasks[i], i);
    }
  };
  const std::size_t workers = std::min(worker_count(config.threads), tasks.size());
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  // Merge in trial order regardless of completion order.
  for (auto& slot : slots) {
    for (auto& r : slot) out.records.push_back(std::move(r));
  }
  out.summary = summarize(config, out.records);
  return out;
}

// --- output -----------------------------------------------------------------

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

void write_grid(const ExperimentResult& result, const std::filesystem::path& path, bool sizes) {
  std::ofstream out(path);
  out << "engine,a";
  for (const auto& c : result.grid_cols) out << ',' << csv_field(c);
  out << '\n';
  std::vector<Engine> engines;
  for (const auto& r : result.records) {
    if (std::find(engines.begin(), engines.end(), r.engine) == engines.end()) engines.push_back(r.engine);
  }
  for (Engine e : engines) {
    for (const auto& row : result.grid_rows) {
      out << engine_name(e) << ',' << csv_field(row);
      for (const auto& col : result.grid_cols) {
        std::vector<double> values;
        SuccessTally tally;
        for (const auto& r : result.records) {
          if (r.engine != e || r.cell_row != row || r.cell_col != col || !r.result) continue;
          if (sizes && r.result->status == ExplainStatus::kFound) {
            values.push_back(static_cast<double>(r.result->size()));
          }
          if (is_completed(r)) {
            ++tally.completed;
            if (r.result->success) ++tally.successes;
          }
        }
        out << ',';
        if (sizes && !values.empty()) out << format_double(size_stats(values).mean);
        if (!sizes && tally.rate()) out << format_double(*tally.rate());
      }
      out << '\n';
    }
  }
}

}  // namespace

void write_experiment(const ExperimentResult& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out(out_dir / "trials.csv");
    out << "trial,n,cell_row,cell_col,engine,a,b,size_a,size_b,pair_diff,wasserstein_ab,status,"
           "size,success,timed_out,budget_exhausted,initial_diff,final_diff,subsets_tested,"
           "samples,delta,error\n";
    for (const auto& r : result.records) {
      out << r.trial << ',' << r.n << ',' << csv_field(r.cell_row) << ',' << csv_field(r.cell_col)
          << ',' << engine_name(r.engine) << ',' << csv_field(r.a) << ',' << csv_field(r.b) << ','
          << r.size_a << ',' << r.size_b << ',' << opt(r.pair_diff) << ','
          << opt(r.wasserstein_ab) << ',';
      if (r.result) {
        const auto& c = *r.result;
        std::string delta;
        for (EntryId id : c.delta) {
          if (!delta.empty()) delta += ' ';
          delta += std::to_string(to_index(id));
        }
        out << status_name(c.status) << ',' << c.size() << ',' << (c.success ? 1 : 0) << ','
            << (c.timed_out ? 1 : 0) << ',' << (c.budget_exhausted ? 1 : 0) << ','
            << format_double(c.initial_diff) << ',' << opt(c.final_diff) << ','
            << c.subsets_tested << ',' << c.samples << ',' << delta << ',';
      } else {
        out << "error,,,,,,,,,,";
      }
      out << csv_field(r.error) << '\n';
    }
  }
  {
    // Wall-clock times vary between runs, so they live apart from trials.csv.
    std::ofstream out(out_dir / "timings.csv");
    out << "trial,engine,seconds\n";
    for (const auto& r : result.records) {
      out << r.trial << ',' << engine_name(r.engine) << ','
          << (r.result ? format_double(r.result->seconds) : "") << '\n';
    }
  }
  {
    std::ofstream out(out_dir / "summary.json");
    out << result.summary.dump(2) << '\n';
  }
  if (!result.grid_rows.empty()) {
    write_grid(result, out_dir / "pairwise_size.csv", true);
    write_grid(result, out_dir / "pairwise_success.csv", false);
  }
}

}  // namespace shapcf
