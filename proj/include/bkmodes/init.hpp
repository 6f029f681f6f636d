#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bkmodes/dataset.hpp"
#include "bkmodes/engine.hpp"
#include "bkmodes/metrics.hpp"
#include "bkmodes/parallel.hpp"
#include "bkmodes/rng.hpp"

// Initial-center strategies for K-Modes. All four are deterministic given
// their inputs (plus the explicit seed for `random`); internal scans reduce
// over (value, index) pairs so the thread count never changes the outcome.

namespace bkmodes {

struct InitMethod {
  enum class Kind { kRandom, kFarthest, kCao, kBkModes };

  Kind kind = Kind::kBkModes;
  std::optional<std::uint64_t> seed;  // present iff kind == kRandom

  static InitMethod random(std::uint64_t seed) {
    return {Kind::kRandom, seed};
  }
  static InitMethod farthest() { return {Kind::kFarthest, std::nullopt}; }
  static InitMethod cao() { return {Kind::kCao, std::nullopt}; }
  static InitMethod bkmodes() { return {Kind::kBkModes, std::nullopt}; }

  bool valid() const {
    return seed.has_value() == (kind == Kind::kRandom);
  }
};

inline const char* to_string(InitMethod::Kind kind) {
  switch (kind) {
    case InitMethod::Kind::kRandom: return "random";
    case InitMethod::Kind::kFarthest: return "farthest";
    case InitMethod::Kind::kCao: return "cao";
    case InitMethod::Kind::kBkModes: return "bkmodes";
  }
  return "?";
}

inline InitMethod::Kind parse_method(std::string_view name) {
  if (name == "random") return InitMethod::Kind::kRandom;
  if (name == "farthest") return InitMethod::Kind::kFarthest;
  if (name == "cao") return InitMethod::Kind::kCao;
  if (name == "bkmodes") return InitMethod::Kind::kBkModes;
  throw std::invalid_argument("unknown init method: " + std::string(name));
}

namespace detail {

inline bool rows_equal(RowView a, RowView b) {
  return a.size() == b.size() && hamming(a, b) == 0;
}

// Argmax over rows of a per-row score with the lowest index winning ties.
template <typename ScoreFn>
std::size_t argmax_row(std::size_t n, int threads, ScoreFn&& score) {
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  struct Best {
    std::uint64_t value = 0;
    std::size_t index = kNone;
  };
  const auto better = [](const Best& a, const Best& b) {
    if (b.index == kNone) return false;
    if (a.index == kNone) return true;
    return b.value > a.value || (b.value == a.value && b.index < a.index);
  };
  std::vector<Best> partial(static_cast<std::size_t>(threads));
  parallel_chunks(n, threads, [&](int w, std::size_t begin, std::size_t end) {
    Best best;
    for (std::size_t i = begin; i < end; ++i) {
      const std::optional<std::uint64_t> v = score(i);
      if (!v) continue;
      const Best c{*v, i};
      if (better(best, c)) best = c;
    }
    partial[static_cast<std::size_t>(w)] = best;
  });
  Best winner;
  for (const Best& c : partial)
    if (better(winner, c)) winner = c;
  return winner.index;
}

inline FrequencyTable global_frequencies(const CategoricalDataset& ds) {
  FrequencyTable table(ds.cardinalities());
  for (std::size_t i = 0; i < ds.n(); ++i) table.add(ds.row(i));
  return table;
}

// Integer density numerators: m * Dens(x). Per row, the sum over attributes
// of how many dataset rows (including the row itself) share its value.
inline std::vector<std::uint64_t> cao_density_sums(
    const CategoricalDataset& ds) {
  const FrequencyTable global = global_frequencies(ds);
  std::vector<std::uint64_t> sums(ds.n(), 0);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    RowView row = ds.row(i);
    std::uint64_t s = 0;
    for (std::size_t a = 0; a < ds.m(); ++a) s += global.count(a, row[a]);
    sums[i] = s;
  }
  return sums;
}

}  // namespace detail

// K distinct rows drawn without replacement by a partial Fisher-Yates walk
// over the row indices; rows whose contents duplicate an already accepted
// center are skipped, so the returned centers are pairwise distinct points.
inline std::vector<DataPoint> random_init(const CategoricalDataset& ds,
                                          std::size_t k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("random_init: k must be >= 1");
  const std::size_t n = ds.n();
  Rng rng(seed);
  std::vector<RowIndex> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<RowIndex>(i);
  std::vector<DataPoint> centers;
  centers.reserve(k);
  for (std::size_t i = 0; i < n && centers.size() < k; ++i) {
    const std::size_t j = i + draw_below(rng, n - i);
    std::swap(order[i], order[j]);
    RowView row = ds.row(order[i]);
    bool duplicate = false;
    for (const DataPoint& c : centers)
      if (detail::rows_equal(c, row)) {
        duplicate = true;
        break;
      }
    if (!duplicate) centers.emplace_back(row.begin(), row.end());
  }
  if (centers.size() < k)
    throw std::runtime_error("random_init: fewer than k distinct rows");
  return centers;
}

// Farthest-point heuristic. The first center is the row with the highest
// attribute-frequency score (sum over attributes of the global frequency of
// the row's value); every next center maximizes the minimum distance to the
// centers chosen so far. All ties break to the lowest row index.
inline std::vector<DataPoint> farthest_point_init(const CategoricalDataset& ds,
                                                  std::size_t k,
                                                  int threads = 1) {
  if (k < 1) throw std::invalid_argument("farthest_point_init: k must be >= 1");
  if (k > ds.n())
    throw std::invalid_argument("farthest_point_init: more centers than rows");
  const int t = resolve_threads(threads);
  const std::size_t n = ds.n();
  const FrequencyTable global = detail::global_frequencies(ds);

  const std::size_t first = detail::argmax_row(
      n, t, [&](std::size_t i) -> std::optional<std::uint64_t> {
        RowView row = ds.row(i);
        std::uint64_t score = 0;
        for (std::size_t a = 0; a < ds.m(); ++a)
          score += global.count(a, row[a]);
        return score;
      });

  std::vector<char> chosen(n, 0);
  std::vector<std::uint32_t> min_dist(n, 0);
  std::vector<DataPoint> centers;
  centers.reserve(k);

  const auto take = [&](std::size_t idx) {
    chosen[idx] = 1;
    RowView row = ds.row(idx);
    centers.emplace_back(row.begin(), row.end());
    parallel_chunks(n, t, [&](int, std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const auto d = static_cast<std::uint32_t>(hamming(ds.row(i), row));
        if (centers.size() == 1 || d < min_dist[i]) min_dist[i] = d;
      }
    });
  };

  take(first);
  while (centers.size() < k) {
    const std::size_t next = detail::argmax_row(
        n, t, [&](std::size_t i) -> std::optional<std::uint64_t> {
          if (chosen[i]) return std::nullopt;
          return min_dist[i];
        });
    take(next);
  }
  return centers;
}

// Per-row density: the average over attributes of how many dataset rows share
// the row's value at that attribute. Computed from one global frequency table
// in O(n * m).
inline std::vector<double> cao_density(const CategoricalDataset& ds) {
  const std::vector<std::uint64_t> sums = detail::cao_density_sums(ds);
  std::vector<double> dens(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i)
    dens[i] = static_cast<double>(sums[i]) / static_cast<double>(ds.m());
  return dens;
}

// Density-distance selection: the first center is the densest row; each next
// center maximizes, over non-center rows, the minimum over existing centers
// of d(x, c) * Dens(x). Ties break to the lowest row index. Scores compare as
// exact integers (the 1/m density factor is common to all rows and dropped).
inline std::vector<DataPoint> cao_init(const CategoricalDataset& ds,
                                       std::size_t k, int threads = 1) {
  if (k < 1) throw std::invalid_argument("cao_init: k must be >= 1");
  if (k > ds.n())
    throw std::invalid_argument("cao_init: more centers than rows");
  const int t = resolve_threads(threads);
  const std::size_t n = ds.n();
  const std::vector<std::uint64_t> dens = detail::cao_density_sums(ds);

  const std::size_t first = detail::argmax_row(
      n, t,
      [&](std::size_t i) -> std::optional<std::uint64_t> { return dens[i]; });

  std::vector<char> chosen(n, 0);
  std::vector<std::uint32_t> min_dist(n, 0);
  std::vector<DataPoint> centers;
  centers.reserve(k);

  const auto take = [&](std::size_t idx) {
    chosen[idx] = 1;
    RowView row = ds.row(idx);
    centers.emplace_back(row.begin(), row.end());
    parallel_chunks(n, t, [&](int, std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const auto d = static_cast<std::uint32_t>(hamming(ds.row(i), row));
        if (centers.size() == 1 || d < min_dist[i]) min_dist[i] = d;
      }
    });
  };

  take(first);
  while (centers.size() < k) {
    // min over centers of d(x,c)*Dens(x) equals min_dist[x]*Dens(x); the
    // product stays well inside 64 bits for any dataset this library accepts
    // (it is at most n * m^2).
    const std::size_t next = detail::argmax_row(
        n, t, [&](std::size_t i) -> std::optional<std::uint64_t> {
          if (chosen[i]) return std::nullopt;
          return static_cast<std::uint64_t>(min_dist[i]) * dens[i];
        });
    take(next);
  }
  return centers;
}

struct TwoModesSplit {
  RowSubset left, right;
  DataPoint left_center, right_center;
  std::uint64_t left_sum = 0, right_sum = 0;
};

// Bisects one cluster with a two-center K-Modes run seeded by the cluster's
// mode and the member row farthest from it (ties: lowest row index). Assign,
// update, and tie rules are exactly the engine's.
inline TwoModesSplit two_modes_bisect(const CategoricalDataset& ds,
                                      const RowSubset& subset,
                                      const EngineConfig& config = {}) {
  if (subset.size() < 2)
    throw std::invalid_argument("two_modes_bisect: need at least two rows");
  const FrequencyTable table = freq_build(ds, subset);
  DataPoint first_center = mode_of(table);

  std::size_t farthest_pos = 0;
  std::size_t farthest_dist = 0;
  for (std::size_t p = 0; p < subset.size(); ++p) {
    const std::size_t d = hamming(ds.row(subset.indices[p]), first_center);
    if (d > farthest_dist) {
      farthest_dist = d;
      farthest_pos = p;
    }
  }
  if (farthest_dist == 0)
    throw std::runtime_error("cluster not bisectable: all rows identical");
  RowView far_row = ds.row(subset.indices[farthest_pos]);
  DataPoint second_center(far_row.begin(), far_row.end());

  const ClusterModel model = kmodes_fit_rows(
      ds, subset.indices, {std::move(first_center), std::move(second_center)},
      config);

  TwoModesSplit split;
  for (std::size_t p = 0; p < subset.size(); ++p) {
    (model.assignments[p] == 0 ? split.left : split.right)
        .indices.push_back(subset.indices[p]);
  }
  if (split.left.empty() || split.right.empty())
    throw std::runtime_error("two_modes_bisect: degenerate split");
  split.left_center = model.centers[0];
  split.right_center = model.centers[1];
  split.left_sum =
      sum_of_distances(ds, split.left, split.left_center, config.threads);
  split.right_sum =
      sum_of_distances(ds, split.right, split.right_center, config.threads);
  return split;
}

// Snapshot of the divisive process: disjoint clusters covering all rows, each
// with its current center and exact sum of distances to it.
struct BisectState {
  struct Cluster {
    RowSubset rows;
    DataPoint center;
    std::uint64_t sum_of_distances = 0;
  };
  std::vector<Cluster> clusters;
};

inline constexpr std::size_t kNoBisect = std::numeric_limits<std::size_t>::max();

// Observer for tests and tracing: invoked with the state before every
// bisection (`chosen` = index of the cluster about to split) and once after
// the loop with chosen == kNoBisect.
using BisectObserver =
    std::function<void(const BisectState&, std::size_t chosen)>;

// Bisecting K-Modes. Starts from one cluster holding every row, then
// repeatedly splits the cluster with the largest sum of distances (ties:
// lowest list position) until k clusters exist; returns their centers.
// A cluster is bisectable exactly when its sum is positive (a zero sum means
// all member rows are identical), so zero-sum clusters are skipped naturally.
// After a split the first child takes the parent's list slot and the second
// child is appended, which keeps positions stable for the tie rule.
inline std::vector<DataPoint> bkmodes_init(const CategoricalDataset& ds,
                                           std::size_t k,
                                           const EngineConfig& config = {},
                                           const BisectObserver& observer = {}) {
  if (k < 1) throw std::invalid_argument("bkmodes_init: k must be >= 1");
  if (k > ds.n())
    throw std::invalid_argument("bkmodes_init: more clusters than points");

  BisectState state;
  {
    RowSubset all = RowSubset::all(ds.n());
    DataPoint center = mode_of(freq_build(ds, all));
    const std::uint64_t sum =
        sum_of_distances(ds, all, center, config.threads);
    state.clusters.push_back({std::move(all), std::move(center), sum});
  }

  while (state.clusters.size() < k) {
    std::size_t chosen = kNoBisect;
    std::uint64_t best_sum = 0;
    for (std::size_t c = 0; c < state.clusters.size(); ++c) {
      if (state.clusters[c].sum_of_distances > best_sum) {
        best_sum = state.clusters[c].sum_of_distances;
        chosen = c;
      }
    }
    if (chosen == kNoBisect)
      throw std::runtime_error(
          "bkmodes_init: cannot produce K clusters (fewer than K distinct rows)");
    if (observer) observer(state, chosen);

    TwoModesSplit split =
        two_modes_bisect(ds, state.clusters[chosen].rows, config);
    state.clusters[chosen] = {std::move(split.left),
                              std::move(split.left_center), split.left_sum};
    state.clusters.push_back({std::move(split.right),
                              std::move(split.right_center), split.right_sum});
  }
  if (observer) observer(state, kNoBisect);

  std::vector<DataPoint> centers;
  centers.reserve(k);
  for (const BisectState::Cluster& c : state.clusters)
    centers.push_back(c.center);
  return centers;
}

// Dispatch used by the benchmark harness.
inline std::vector<DataPoint> make_initial_centers(
    const CategoricalDataset& ds, std::size_t k, const InitMethod& method,
    const EngineConfig& config = {}) {
  if (!method.valid())
    throw std::invalid_argument(
        "init method: seed must be given exactly for `random`");
  switch (method.kind) {
    case InitMethod::Kind::kRandom:
      return random_init(ds, k, *method.seed);
    case InitMethod::Kind::kFarthest:
      return farthest_point_init(ds, k, config.threads);
    case InitMethod::Kind::kCao:
      return cao_init(ds, k, config.threads);
    case InitMethod::Kind::kBkModes:
      return bkmodes_init(ds, k, config);
  }
  throw std::logic_error("unreachable");
}

}  // namespace bkmodes
