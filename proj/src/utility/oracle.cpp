#include <algorithm>
#include <array>
#include <atomic>
#include <mutex>
#include <unordered_map>

#include "shapcf/error.hpp"
#include "shapcf/utility.hpp"

namespace shapcf {

namespace {

struct WordsHash {
  std::size_t operator()(const std::vector<std::uint64_t>& words) const {
    return EntrySetHash{}(std::span<const std::uint64_t>(words));
  }
};

}  // namespace

struct UtilityOracle::Cache {
  static constexpr std::size_t kShards = 16;
  struct Shard {
    std::mutex mutex;
    std::unordered_map<std::vector<std::uint64_t>, double, WordsHash> values;
  };
  explicit Cache(std::size_t capacity) : per_shard(std::max<std::size_t>(1, capacity / kShards)) {}

  std::array<Shard, kShards> shards;
  std::size_t per_shard;
  std::atomic<std::uint64_t> hits{0};
  std::atomic<std::uint64_t> misses{0};
};

UtilityOracle::UtilityOracle(std::shared_ptr<const UtilityModel> model, bool memoize,
                             std::size_t cache_capacity)
    : model_(std::move(model)) {
  if (!model_) throw Error(ErrorCode::kInvalidArgument, "utility oracle needs a model");
  if (memoize && cache_capacity > 0) cache_ = std::make_shared<Cache>(cache_capacity);
}

double UtilityOracle::uncached(const EntrySet& composed) const {
  if (composed.universe() != model_->universe()) {
    throw Error(ErrorCode::kInvalidArgument, "entry set universe does not match the utility");
  }
  if (composed.empty()) return 0.0;
  const double u = model_->score(composed);
  return u > 0.0 ? u : 0.0;
}

double UtilityOracle::operator()(const EntrySet& composed) const {
  if (!cache_ || composed.empty()) return uncached(composed);
  const auto words = composed.words();
  std::vector<std::uint64_t> key(words.begin(), words.end());
  const std::size_t h = WordsHash{}(key);
  auto& shard = cache_->shards[h % Cache::kShards];
  {
    std::lock_guard lock(shard.mutex);
    if (auto it = shard.values.find(key); it != shard.values.end()) {
      cache_->hits.fetch_add(1, std::memory_order_relaxed);
      return it->second;
    }
  }
  cache_->misses.fetch_add(1, std::memory_order_relaxed);
  const double u = uncached(composed);
  std::lock_guard lock(shard.mutex);
  // Full shard: drop everything rather than track recency. Values are pure,
  // so eviction only costs recomputation.
  if (shard.values.size() >= cache_->per_shard) shard.values.clear();
  shard.values.emplace(std::move(key), u);
  return u;
}

CacheStats UtilityOracle::stats() const {
  if (!cache_) return {};
  return {cache_->hits.load(), cache_->misses.load()};
}

void UtilityOracle::clear_cache() const {
  if (!cache_) return;
  for (auto& shard : cache_->shards) {
    std::lock_guard lock(shard.mutex);
    shard.values.clear();
  }
  cache_->hits = 0;
  cache_->misses = 0;
}

MonotonicityAudit audit_monotonicity(const UtilityOracle& oracle, const EntrySet& pool,
                                     std::size_t pairs, double tolerance, Rng& rng) {
  MonotonicityAudit audit;
  const auto ids = pool.ids();
  if (ids.empty()) return audit;
  for (std::size_t p = 0; p < pairs; ++p) {
    EntrySet larger(pool.universe());
    EntrySet smaller(pool.universe());
    for (EntryId id : ids) {
      const double r = rng.uniform01();
      if (r < 0.5) {
        larger.insert(id);
        if (r < 0.25) smaller.insert(id);
      }
    }
    const double us = oracle(smaller);
    const double ul = oracle(larger);
    ++audit.pairs;
    if (us > ul + tolerance) {
      audit.violations.push_back({smaller.ids(), larger.ids(), us, ul});
    }
  }
  return audit;
}

}  // namespace shapcf
