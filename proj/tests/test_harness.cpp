#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "shapcf/error.hpp"
#include "shapcf/harness.hpp"
#include "shapcf/io.hpp"
#include "test_support.hpp"

namespace shapcf {
namespace {

using Json = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("shapcf_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string fixture(const std::string& name) {
  return std::string(SHAPCF_TEST_DATA) + "/../fixtures/" + name;
}

Json additive_config() {
  return Json{
      {"data", fixture("weights30.csv")},
      {"utility", {{"kind", "additive"}, {"weight_column", "w"}}},
      {"test_fraction", 0.2},
      {"engines", {"bf", "svexp"}},
      {"allocation", {{"kind", "uniform"}, {"n", 3}}},
      {"trials", 4},
      {"seed", 5},
      {"timeout", 60},
      {"flip_max_samples", 4000},
      {"epsilon", 0.05},
  };
}

TEST(Generators, UniformSizes) {
  Rng rng(1);
  double total = 0;
  std::size_t count = 0;
  for (int i = 0; i < 5000; ++i) {
    const OwnerPartition p = gen_uniform(455, 2, rng);
    for (std::uint32_t o = 0; o < 2; ++o) {
      const std::size_t s = p.entries(owner(o)).size();
      EXPECT_GE(s, 1U);
      EXPECT_LE(s, 455U);
      total += static_cast<double>(s);
      ++count;
    }
  }
  EXPECT_NEAR(total / static_cast<double>(count), 228.0, 5.0);
}

TEST(Generators, UniformDeterministicAndNamed) {
  Rng r1(9);
  Rng r2(9);
  const OwnerPartition a = gen_uniform(100, 4, r1);
  EXPECT_EQ(a, gen_uniform(100, 4, r2));
  EXPECT_EQ(a.names(), (std::vector<std::string>{"O1", "O2", "O3", "O4"}));
  EXPECT_THROW(gen_uniform(100, 1, r1), Error);
}

TEST(Generators, ZipfianSizes) {
  Rng rng(2);
  ZipfianOptions opts;
  opts.base = 3;
  opts.k_max = 4;
  for (int i = 0; i < 50; ++i) {
    const OwnerPartition p = gen_zipfian(100, 9, opts, rng);
    EXPECT_EQ(p.size(), 9U);
    for (std::uint32_t o = 0; o < 9; ++o) {
      const std::size_t s = p.entries(owner(o)).size();
      EXPECT_TRUE(s == 1 || s == 3 || s == 9 || s == 27 || s == 81) << s;
    }
  }
  opts.k_a = 3;
  opts.k_b = 3;
  const OwnerPartition p = gen_zipfian(100, 3, opts, rng);
  EXPECT_EQ(p.entries(owner(0)).size(), 27U);
  EXPECT_EQ(p.entries(owner(1)).size(), 27U);
  opts.k_max = 5;
  try {
    gen_zipfian(100, 3, opts, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSizeOverflow);
  }
  opts.k_a = 5;
  EXPECT_EQ(gen_zipfian(243, 3, opts, rng).entries(owner(0)).size(), 243U);
}

TEST(Generators, HotelMonths) {
  const Dataset d = load_csv(testing::data_path("hotel_bookings.csv"), std::string("booking_status"));
  const OwnerPartition p = gen_natural(d, "arrival_month");
  const std::vector<std::size_t> expected{25, 37, 52, 45, 59, 61, 65, 79, 105, 117, 73, 82};
  ASSERT_EQ(p.size(), 12U);
  EntrySet seen(d.rows());
  for (std::uint32_t o = 0; o < 12; ++o) {
    EXPECT_EQ(p.entries(owner(o)).size(), expected[o]);
    EXPECT_FALSE(seen.intersects(p.entries(owner(o))));
    seen |= p.entries(owner(o));
  }
  EXPECT_EQ(seen.size(), d.rows());
  EXPECT_EQ(p.name(owner(0)), "1");
  EXPECT_EQ(p.name(owner(11)), "12");
}

TEST(Generators, NaturalErrors) {
  const Dataset single({"g", "x"}, {1, 0, 1, 2, 1, 3});
  EXPECT_THROW(gen_natural(single, "g"), Error);
  try {
    gen_natural(single, "nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownColumn);
  }
}

TEST(Generators, BostonVertical) {
  const Dataset d = load_csv(testing::data_path("boston_like.csv"), std::string("MEDV"));
  const std::vector<std::pair<std::string, std::vector<std::string>>> groups{
      {"env", {"CRIM", "ZN", "INDUS", "CHAS", "NOX"}},
      {"house", {"RM", "AGE", "DIS", "RAD"}},
      {"social", {"TAX", "PTRATIO", "B", "LSTAT"}},
  };
  const OwnerPartition p = gen_vertical(d, groups);
  EXPECT_EQ(p.universe(), 13U);
  EXPECT_EQ(p.entries(owner(1)), EntrySet(13, {5, 6, 7, 8}));
  EXPECT_EQ(p.all_entries().size(), 13U);
  auto missing = groups;
  missing.pop_back();
  EXPECT_THROW(gen_vertical(d, missing), Error);
  auto twice = groups;
  twice[0].second.push_back("RM");
  EXPECT_THROW(gen_vertical(d, twice), Error);
  auto unknown = groups;
  unknown[0].second.push_back("ZZ");
  EXPECT_THROW(gen_vertical(d, unknown), Error);
}

TEST(Metrics, Jaccard) {
  const auto ids = [](std::initializer_list<std::uint32_t> xs) {
    std::vector<EntryId> v;
    for (auto x : xs) v.push_back(entry(x));
    return v;
  };
  EXPECT_EQ(jaccard(ids({1, 2}), ids({1, 2})), 1.0);
  EXPECT_EQ(jaccard(ids({1}), ids({2})), 0.0);
  EXPECT_DOUBLE_EQ(jaccard(ids({1, 2, 3}), ids({2, 3, 4})), 0.5);
  EXPECT_EQ(jaccard(ids({}), ids({})), 1.0);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    std::vector<EntryId> x;
    std::vector<EntryId> y;
    for (std::uint32_t e = 0; e < 10; ++e) {
      if (rng.uniform01() < 0.4) x.push_back(entry(e));
      if (rng.uniform01() < 0.4) y.push_back(entry(e));
    }
    const double j = jaccard(x, y);
    EXPECT_GE(j, 0.0);
    EXPECT_LE(j, 1.0);
    EXPECT_EQ(j, jaccard(y, x));
    EXPECT_EQ(j == 1.0, x == y);
  }
}

TEST(Metrics, SizeStats) {
  const SizeStats equal = size_stats({3, 3, 3});
  ASSERT_TRUE(equal.cov.has_value());
  EXPECT_EQ(*equal.cov, 0.0);
  const SizeStats s = size_stats({1, 3});
  EXPECT_DOUBLE_EQ(s.mean, 2.0);
  EXPECT_DOUBLE_EQ(s.sd, 1.0);
  EXPECT_DOUBLE_EQ(*s.cov, 0.5);
  EXPECT_FALSE(size_stats({0, 0}).cov.has_value());
  EXPECT_EQ(size_stats({}).count, 0U);
}

TEST(Metrics, SuccessRateExcludesTimeouts) {
  SuccessTally t;
  EXPECT_FALSE(t.rate().has_value());
  // 7 completed runs with 6 successes, plus 3 injected timeouts.
  t.completed = 7;
  t.successes = 6;
  t.timeouts = 3;
  EXPECT_DOUBLE_EQ(*t.rate(), 6.0 / 7.0);
}

TEST(Metrics, WassersteinProperties) {
  EXPECT_EQ(wasserstein_1d({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(wasserstein_1d({0}, {5}), 5.0);
  EXPECT_DOUBLE_EQ(wasserstein_1d({0, 1}, {2, 3}), 2.0);
  // Unequal sample sizes: mass 1/2 at 0 and 1/2 at 2 against a point at 1.
  EXPECT_DOUBLE_EQ(wasserstein_1d({0, 2}, {1}), 1.0);
  EXPECT_THROW(wasserstein_1d({}, {1}), Error);
  Rng rng(4);
  const auto sample = [&] {
    std::vector<double> v(rng.uniform_int(1, 20));
    for (double& x : v) x = rng.normal(rng.uniform01() * 3, 1.0);
    return v;
  };
  for (int i = 0; i < 200; ++i) {
    const auto x = sample();
    const auto y = sample();
    const auto z = sample();
    const double xy = wasserstein_1d(x, y);
    EXPECT_GE(xy, 0.0);
    EXPECT_NEAR(xy, wasserstein_1d(y, x), 1e-9);
    EXPECT_LE(xy, wasserstein_1d(x, z) + wasserstein_1d(z, y) + 1e-9);
  }
}

TEST(Metrics, MeanWassersteinIdentity) {
  const Dataset d = load_csv(testing::data_path("hotel_bookings.csv"), std::string("booking_status"));
  const OwnerPartition p = gen_natural(d, "arrival_month");
  EXPECT_EQ(mean_wasserstein(d, p.entries(owner(0)), p.entries(owner(0))), 0.0);
  EXPECT_GT(mean_wasserstein(d, p.entries(owner(0)), p.entries(owner(6))), 0.0);
}

TEST(Experiment, ZeroTrialsGivesEmptySummary) {
  Json cfg = additive_config();
  cfg["trials"] = 0;
  const ExperimentResult r = run_experiment(parse_experiment_config(cfg));
  EXPECT_TRUE(r.records.empty());
  EXPECT_EQ(r.summary["records"], 0);
  for (const auto& g : r.summary["groups"]) EXPECT_EQ(g["trials"], 0);
  const auto dir = scratch_dir("empty");
  write_experiment(r, dir);
  EXPECT_TRUE(std::filesystem::exists(dir / "trials.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.json"));
}

TEST(Experiment, AdditiveRunIsDeterministic) {
  const ExperimentConfig cfg = parse_experiment_config(additive_config());
  const ExperimentResult r1 = run_experiment(cfg);
  const ExperimentResult r2 = run_experiment(cfg);
  ASSERT_EQ(r1.records.size(), 8U);
  const auto d1 = scratch_dir("det1");
  const auto d2 = scratch_dir("det2");
  write_experiment(r1, d1);
  write_experiment(r2, d2);
  EXPECT_EQ(read_file(d1 / "trials.csv"), read_file(d2 / "trials.csv"));
  EXPECT_EQ(read_file(d1 / "summary.json"), read_file(d2 / "summary.json"));
  for (const auto& rec : r1.records) {
    ASSERT_TRUE(rec.result.has_value()) << rec.error;
    if (rec.result->status != ExplainStatus::kFound) continue;
    EXPECT_TRUE(rec.result->success);
  }
  // Records come in trial order with one row per engine.
  for (std::size_t i = 0; i < r1.records.size(); ++i) EXPECT_EQ(r1.records[i].trial, i / 2);
}

TEST(Experiment, ThreadCountDoesNotChangeOutput) {
  Json cfg = additive_config();
  cfg["threads"] = 1;
  const ExperimentResult serial = run_experiment(parse_experiment_config(cfg));
  cfg["threads"] = 3;
  const ExperimentResult parallel = run_experiment(parse_experiment_config(cfg));
  const auto d1 = scratch_dir("thr1");
  const auto d2 = scratch_dir("thr3");
  write_experiment(serial, d1);
  write_experiment(parallel, d2);
  EXPECT_EQ(read_file(d1 / "trials.csv"), read_file(d2 / "trials.csv"));
}

TEST(Experiment, ZipfianGridWritesMatrices) {
  Json cfg = additive_config();
  cfg["engines"] = {"bf"};
  cfg["trials"] = 1;
  cfg["allocation"] = {{"kind", "zipfian"}, {"n", 3}, {"a", 2}, {"k_max", 2}, {"grid", true}};
  const ExperimentResult r = run_experiment(parse_experiment_config(cfg));
  EXPECT_EQ(r.grid_rows.size(), 3U);
  EXPECT_EQ(r.grid_cols.size(), 3U);
  EXPECT_EQ(r.records.size(), 9U);
  const auto dir = scratch_dir("grid");
  write_experiment(r, dir);
  const std::string sizes = read_file(dir / "pairwise_size.csv");
  EXPECT_EQ(sizes.substr(0, sizes.find('\n')), "engine,a,1,2,4");
  EXPECT_TRUE(std::filesystem::exists(dir / "pairwise_success.csv"));
}

TEST(Experiment, VerticalGridCoversOrderedPairs) {
  const Json cfg{
      {"data", testing::data_path("boston_like.csv")},
      {"label", "MEDV"},
      {"utility", {{"kind", "linreg-vertical"}}},
      {"engines", {"bf"}},
      {"allocation",
       {{"kind", "vertical"},
        {"grid", true},
        {"groups",
         {{"env", {"CRIM", "ZN", "INDUS", "CHAS", "NOX"}},
          {"house", {"RM", "AGE", "DIS", "RAD"}},
          {"social", {"TAX", "PTRATIO", "B", "LSTAT"}}}}}},
      {"trials", 1},
      {"seed", 1},
  };
  const ExperimentResult r = run_experiment(parse_experiment_config(cfg));
  EXPECT_EQ(r.grid_rows, (std::vector<std::string>{"env", "house", "social"}));
  EXPECT_EQ(r.records.size(), 6U);
  std::size_t found = 0;
  for (const auto& rec : r.records) {
    ASSERT_TRUE(rec.result.has_value()) << rec.error;
    if (rec.result->status == ExplainStatus::kFound) {
      ++found;
      EXPECT_TRUE(rec.result->success);
    }
  }
  // Each unordered pair has exactly one orientation with psi(a) > psi(b).
  EXPECT_EQ(found, 3U);
}

TEST(Experiment, ConfigErrors) {
  Json cfg = additive_config();
  cfg["allocation"] = {{"kind", "spiral"}};
  EXPECT_THROW(parse_experiment_config(cfg), Error);
  Json no_data = additive_config();
  no_data.erase("data");
  EXPECT_THROW(parse_experiment_config(no_data), Error);
  Json bad_engine = additive_config();
  bad_engine["engines"] = {"quantum"};
  EXPECT_THROW(parse_experiment_config(bad_engine), Error);
}

TEST(Experiment, WorkerCount) {
  EXPECT_EQ(worker_count(3), 3U);
  EXPECT_GE(worker_count(0), 1U);
}

}  // namespace
}  // namespace shapcf
