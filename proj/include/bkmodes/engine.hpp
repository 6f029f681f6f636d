#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bkmodes/dataset.hpp"
#include "bkmodes/metrics.hpp"
#include "bkmodes/parallel.hpp"

// Lloyd-style K-Modes: alternate nearest-center assignment with per-cluster
// mode updates until an assignment pass changes nothing.
//
// Conventions that pin down exact results and the iteration count:
//  * Assignment ties keep the point's previous cluster when that cluster is
//    among the tied set; otherwise the lowest cluster index wins.
//  * The initial partition against the given centers is not counted as an
//    iteration. Every later assignment pass is, including the final pass
//    that changes nothing. A run started from a fixed point therefore
//    reports exactly one iteration.
//  * An update pass that finds an empty cluster reseeds it with the point
//    farthest from that cluster's current center (ties: lowest row index),
//    drawn only from clusters that keep at least one member afterwards.

namespace bkmodes {

enum class EmptyClusterPolicy { kReseedFarthest };
enum class StepKind { kAssign, kUpdate };

struct EngineConfig {
  std::size_t max_iterations = 300;
  EmptyClusterPolicy empty_cluster_policy = EmptyClusterPolicy::kReseedFarthest;
  // 0 means "use default_thread_count()". Results never depend on this.
  int threads = 0;
  // Called with the exact integer total distance after every half-step.
  std::function<void(StepKind, std::uint64_t)> on_half_step;
};

struct ClusterModel {
  std::size_t k = 0;
  std::vector<DataPoint> centers;
  std::vector<ClusterIndex> assignments;
  std::uint64_t total_distance = 0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct AssignResult {
  std::vector<ClusterIndex> assignments;
  std::size_t changed = 0;
};

namespace detail {

inline constexpr ClusterIndex kNoCluster =
    std::numeric_limits<ClusterIndex>::max();

// Returns (cluster, distance to that cluster's center). Scan order makes the
// lowest index win strict ties; the previous cluster keeps the point when it
// ties the winner.
inline std::pair<ClusterIndex, std::size_t> nearest_center(
    RowView row, std::span<const DataPoint> centers, ClusterIndex previous) {
  ClusterIndex best = 0;
  std::size_t best_dist = std::numeric_limits<std::size_t>::max();
  std::size_t prev_dist = std::numeric_limits<std::size_t>::max();
  for (ClusterIndex j = 0; j < centers.size(); ++j) {
    const std::size_t d = hamming(row, centers[j]);
    if (d < best_dist) {
      best = j;
      best_dist = d;
    }
    if (j == previous) prev_dist = d;
  }
  if (previous != kNoCluster && prev_dist == best_dist)
    return {previous, prev_dist};
  return {best, best_dist};
}

// Row container for fits over the whole dataset (idx == nullptr) or a subset.
struct RowSet {
  const RowIndex* idx = nullptr;
  std::size_t count = 0;
  RowIndex global(std::size_t pos) const {
    return idx ? idx[pos] : static_cast<RowIndex>(pos);
  }
};

// Fills every empty cluster, in cluster index order, by moving in the row
// farthest from that cluster's current center. Donors must keep at least one
// member, which guarantees progress; some donor with two or more members
// exists whenever an empty cluster does (k <= row count).
inline void reseed_empty_clusters(const CategoricalDataset& ds, RowSet rows,
                                  std::vector<ClusterIndex>& assignments,
                                  std::vector<FrequencyTable>& tables,
                                  std::span<const DataPoint> centers,
                                  int threads) {
  for (std::size_t j = 0; j < tables.size(); ++j) {
    if (tables[j].size() != 0) continue;
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    struct Candidate {
      std::size_t dist = 0;
      std::size_t pos = kNone;
    };
    const auto better = [](const Candidate& a, const Candidate& b) {
      if (b.pos == kNone) return false;
      if (a.pos == kNone) return true;
      return b.dist > a.dist || (b.dist == a.dist && b.pos < a.pos);
    };
    std::vector<Candidate> partial(static_cast<std::size_t>(threads));
    parallel_chunks(
        rows.count, threads, [&](int w, std::size_t begin, std::size_t end) {
          Candidate best;
          for (std::size_t p = begin; p < end; ++p) {
            if (tables[assignments[p]].size() < 2) continue;
            const Candidate c{hamming(ds.row(rows.global(p)), centers[j]), p};
            if (better(best, c)) best = c;
          }
          partial[static_cast<std::size_t>(w)] = best;
        });
    Candidate winner;
    for (const Candidate& c : partial)
      if (better(winner, c)) winner = c;
    if (winner.pos == kNone)
      throw std::logic_error("reseed: no donor cluster with two members");
    RowView row = ds.row(rows.global(winner.pos));
    tables[assignments[winner.pos]].remove(row);
    tables[j].add(row);
    assignments[winner.pos] = static_cast<ClusterIndex>(j);
  }
}

}  // namespace detail

// One assignment pass over the whole dataset. With no previous assignments
// every point counts as changed.
inline AssignResult assign_step(const CategoricalDataset& ds,
                                std::span<const DataPoint> centers,
                                std::span<const ClusterIndex> previous = {},
                                int threads = 1) {
  if (centers.empty()) throw std::invalid_argument("assign_step: no centers");
  for (const DataPoint& c : centers)
    if (c.size() != ds.m())
      throw std::invalid_argument("assign_step: center length mismatch");
  if (!previous.empty() && previous.size() != ds.n())
    throw std::invalid_argument("assign_step: previous assignments size");
  const int t = resolve_threads(threads);
  AssignResult result;
  result.assignments.resize(ds.n());
  std::vector<std::size_t> changed(static_cast<std::size_t>(t), 0);
  parallel_chunks(ds.n(), t, [&](int w, std::size_t begin, std::size_t end) {
    std::size_t local = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const ClusterIndex prev =
          previous.empty() ? detail::kNoCluster : previous[i];
      const ClusterIndex next =
          detail::nearest_center(ds.row(i), centers, prev).first;
      result.assignments[i] = next;
      if (prev == detail::kNoCluster || next != prev) ++local;
    }
    changed[static_cast<std::size_t>(w)] = local;
  });
  for (std::size_t c : changed) result.changed += c;
  return result;
}

// One update pass: recompute every cluster's center as its mode. Empty
// clusters are resolved first per the policy, which may move a point
// (mutating `assignments`). `current_centers` are the centers the assignments
// were made against; the reseed rule measures distance from them.
inline std::vector<DataPoint> update_step(
    const CategoricalDataset& ds, std::vector<ClusterIndex>& assignments,
    std::span<const DataPoint> current_centers,
    EmptyClusterPolicy policy = EmptyClusterPolicy::kReseedFarthest,
    int threads = 1) {
  if (assignments.size() != ds.n())
    throw std::invalid_argument("update_step: assignments size != n");
  const std::size_t k = current_centers.size();
  std::vector<FrequencyTable> tables(k, FrequencyTable(ds.cardinalities()));
  for (std::size_t i = 0; i < ds.n(); ++i) {
    if (assignments[i] >= k)
      throw std::invalid_argument("update_step: assignment out of range");
    tables[assignments[i]].add(ds.row(i));
  }
  (void)policy;  // single policy today
  detail::reseed_empty_clusters(ds, detail::RowSet{nullptr, ds.n()},
                                assignments, tables, current_centers,
                                resolve_threads(threads));
  std::vector<DataPoint> centers(k);
  for (std::size_t j = 0; j < k; ++j) centers[j] = mode_of(tables[j]);
  return centers;
}

namespace detail {

inline ClusterModel fit_over(const CategoricalDataset& ds, RowSet rows,
                             std::vector<DataPoint> centers,
                             const EngineConfig& config) {
  const std::size_t k = centers.size();
  if (k == 0) throw std::invalid_argument("kmodes: need at least one center");
  if (k > rows.count)
    throw std::invalid_argument("more clusters than points");
  for (const DataPoint& c : centers)
    if (c.size() != ds.m())
      throw std::invalid_argument("kmodes: center length mismatch");
  if (config.max_iterations < 1)
    throw std::invalid_argument("kmodes: max_iterations must be >= 1");

  const int threads = resolve_threads(config.threads);
  std::vector<ClusterIndex> assignments(rows.count, kNoCluster);
  std::vector<ClusterIndex> next(rows.count);
  std::vector<FrequencyTable> tables(k, FrequencyTable(ds.cardinalities()));

  // One assignment pass. Nearest-center scans run in parallel; frequency
  // tables then absorb only the rows that moved, keeping the update pass at
  // O(K * total cardinality) instead of a full data pass.
  const auto assign_pass = [&](bool first) {
    std::vector<std::size_t> changed_parts(static_cast<std::size_t>(threads), 0);
    std::vector<std::uint64_t> total_parts(static_cast<std::size_t>(threads), 0);
    parallel_chunks(
        rows.count, threads, [&](int w, std::size_t begin, std::size_t end) {
          std::size_t changed = 0;
          std::uint64_t total = 0;
          for (std::size_t p = begin; p < end; ++p) {
            const ClusterIndex prev = first ? kNoCluster : assignments[p];
            const auto [cluster, dist] =
                nearest_center(ds.row(rows.global(p)), centers, prev);
            next[p] = cluster;
            total += dist;
            if (cluster != prev) ++changed;
          }
          changed_parts[static_cast<std::size_t>(w)] = changed;
          total_parts[static_cast<std::size_t>(w)] = total;
        });
    std::size_t changed = 0;
    std::uint64_t total = 0;
    for (std::size_t c : changed_parts) changed += c;
    for (std::uint64_t v : total_parts) total += v;
    for (std::size_t p = 0; p < rows.count; ++p) {
      if (next[p] == assignments[p]) continue;
      RowView row = ds.row(rows.global(p));
      if (assignments[p] != kNoCluster) tables[assignments[p]].remove(row);
      tables[next[p]].add(row);
      assignments[p] = next[p];
    }
    return std::pair<std::size_t, std::uint64_t>{changed, total};
  };

  const auto notify = [&](StepKind kind, std::uint64_t total) {
    if (config.on_half_step) config.on_half_step(kind, total);
  };

  notify(StepKind::kAssign, assign_pass(true).second);

  std::size_t iterations = 0;
  bool converged = false;
  std::uint64_t total = 0;
  while (iterations < config.max_iterations) {
    reseed_empty_clusters(ds, rows, assignments, tables, centers, threads);
    std::uint64_t after_update = 0;
    for (std::size_t j = 0; j < k; ++j) {
      centers[j] = mode_of(tables[j]);
      after_update += within_cluster_sum(tables[j], centers[j]);
    }
    notify(StepKind::kUpdate, after_update);

    const auto [changed, after_assign] = assign_pass(false);
    ++iterations;
    notify(StepKind::kAssign, after_assign);
    total = after_assign;
    if (changed == 0) {
      converged = true;
      break;
    }
  }

  ClusterModel model;
  model.k = k;
  model.centers = std::move(centers);
  model.assignments = std::move(assignments);
  model.total_distance = total;
  model.iterations = iterations;
  model.converged = converged;
  return model;
}

}  // namespace detail

// Full K-Modes run from the given initial centers.
inline ClusterModel kmodes_fit(const CategoricalDataset& ds,
                               std::vector<DataPoint> initial_centers,
                               const EngineConfig& config = {}) {
  return detail::fit_over(ds, detail::RowSet{nullptr, ds.n()},
                          std::move(initial_centers), config);
}

// Same loop restricted to a row subset; `model.assignments` are positional,
// i.e. assignments[p] belongs to rows[p].
inline ClusterModel kmodes_fit_rows(const CategoricalDataset& ds,
                                    std::span<const RowIndex> rows,
                                    std::vector<DataPoint> initial_centers,
                                    const EngineConfig& config = {}) {
  return detail::fit_over(ds, detail::RowSet{rows.data(), rows.size()},
                          std::move(initial_centers), config);
}

inline double sd_total(const CategoricalDataset& ds, const ClusterModel& model) {
  if (model.centers.size() != model.k)
    throw std::invalid_argument("sd_total: centers size != k");
  return sd_total(ds, model.assignments, model.centers);
}

}  // namespace bkmodes
