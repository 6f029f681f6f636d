#pragma once

// Shared generators and independent oracles for the test suites. Everything
// here is deliberately written with plain loops and ordered maps rather than
// the library's frequency tables or engine internals, so that oracle results
// do not depend on the implementation paths they check.

#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "bkmodes/dataset.hpp"
#include "bkmodes/rng.hpp"

namespace testutil {

using bkmodes::CategoricalDataset;
using bkmodes::ClusterIndex;
using bkmodes::Code;
using bkmodes::DataPoint;
using bkmodes::Rng;

inline std::vector<DataPoint> random_rows(Rng& rng, std::size_t n,
                                          std::size_t m,
                                          std::uint32_t cardinality) {
  std::vector<DataPoint> rows(n, DataPoint(m));
  for (auto& row : rows)
    for (auto& value : row)
      value = static_cast<Code>(bkmodes::draw_below(rng, cardinality));
  return rows;
}

inline CategoricalDataset random_dataset(Rng& rng, std::size_t n,
                                         std::size_t m,
                                         std::uint32_t cardinality) {
  return CategoricalDataset::from_rows(
      random_rows(rng, n, m, cardinality),
      std::vector<std::uint32_t>(m, cardinality));
}

inline std::size_t naive_hamming(const DataPoint& a, const DataPoint& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) ++d;
  return d;
}

// Per-attribute majority vote via ordered maps; ascending iteration makes the
// lowest code win ties.
inline DataPoint naive_mode(const std::vector<DataPoint>& rows) {
  if (rows.empty()) throw std::invalid_argument("naive_mode: empty");
  const std::size_t m = rows.front().size();
  DataPoint mode(m);
  for (std::size_t a = 0; a < m; ++a) {
    std::map<Code, std::size_t> counts;
    for (const DataPoint& row : rows) ++counts[row[a]];
    Code best = 0;
    std::size_t best_count = 0;
    for (const auto& [code, count] : counts) {
      if (count > best_count) {
        best_count = count;
        best = code;
      }
    }
    mode[a] = best;
  }
  return mode;
}

inline std::uint64_t naive_sum(const std::vector<DataPoint>& rows,
                               const DataPoint& center) {
  std::uint64_t total = 0;
  for (const DataPoint& row : rows) total += naive_hamming(row, center);
  return total;
}

// Exhaustive minimum of the within-set distance sum over the whole category
// product space, via an odometer over candidate vectors.
inline std::uint64_t exhaustive_best_sum(
    const std::vector<DataPoint>& rows,
    const std::vector<std::uint32_t>& cardinalities) {
  DataPoint candidate(cardinalities.size(), 0);
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  for (;;) {
    best = std::min(best, naive_sum(rows, candidate));
    std::size_t a = 0;
    while (a < candidate.size()) {
      if (++candidate[a] < cardinalities[a]) break;
      candidate[a] = 0;
      ++a;
    }
    if (a == candidate.size()) return best;
  }
}

// Straightforward K-Modes sharing the documented conventions: ties keep the
// previous cluster or take the lowest index, empty clusters reseed with the
// farthest point whose donor keeps a member, the initial partition is not an
// iteration, and the final no-change pass is.
struct NaiveFit {
  std::vector<ClusterIndex> assignments;
  std::vector<DataPoint> centers;
  std::uint64_t total = 0;
  std::size_t iterations = 0;
  bool converged = false;
};

inline std::vector<ClusterIndex> naive_assign(
    const std::vector<DataPoint>& rows, const std::vector<DataPoint>& centers,
    const std::vector<ClusterIndex>* previous, std::size_t* changed_out) {
  std::vector<ClusterIndex> next(rows.size());
  std::size_t changed = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::size_t best_dist = std::numeric_limits<std::size_t>::max();
    ClusterIndex best = 0;
    for (ClusterIndex j = 0; j < centers.size(); ++j) {
      const std::size_t d = naive_hamming(rows[i], centers[j]);
      if (d < best_dist) {
        best_dist = d;
        best = j;
      }
    }
    if (previous) {
      const ClusterIndex prev = (*previous)[i];
      if (naive_hamming(rows[i], centers[prev]) == best_dist) best = prev;
    }
    next[i] = best;
    if (!previous || (*previous)[i] != best) ++changed;
  }
  if (changed_out) *changed_out = changed;
  return next;
}

inline std::vector<DataPoint> naive_update(
    const std::vector<DataPoint>& rows, std::vector<ClusterIndex>& assignments,
    const std::vector<DataPoint>& current_centers) {
  const std::size_t k = current_centers.size();
  std::vector<std::size_t> sizes(k, 0);
  for (ClusterIndex a : assignments) ++sizes[a];
  for (std::size_t j = 0; j < k; ++j) {
    if (sizes[j] != 0) continue;
    std::size_t best_dist = 0;
    std::size_t best_row = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (sizes[assignments[i]] < 2) continue;
      const std::size_t d = naive_hamming(rows[i], current_centers[j]);
      if (best_row == std::numeric_limits<std::size_t>::max() ||
          d > best_dist) {
        best_dist = d;
        best_row = i;
      }
    }
    if (best_row == std::numeric_limits<std::size_t>::max())
      throw std::logic_error("naive_update: no donor");
    --sizes[assignments[best_row]];
    assignments[best_row] = static_cast<ClusterIndex>(j);
    ++sizes[j];
  }
  std::vector<DataPoint> centers(k);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<DataPoint> members;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (assignments[i] == j) members.push_back(rows[i]);
    centers[j] = naive_mode(members);
  }
  return centers;
}

inline NaiveFit naive_kmodes(const std::vector<DataPoint>& rows,
                             std::vector<DataPoint> centers,
                             std::size_t max_iterations = 300) {
  NaiveFit fit;
  fit.assignments = naive_assign(rows, centers, nullptr, nullptr);
  while (fit.iterations < max_iterations) {
    centers = naive_update(rows, fit.assignments, centers);
    std::size_t changed = 0;
    fit.assignments = naive_assign(rows, centers, &fit.assignments, &changed);
    ++fit.iterations;
    if (changed == 0) {
      fit.converged = true;
      break;
    }
  }
  fit.centers = centers;
  fit.total = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    fit.total += naive_hamming(rows[i], centers[fit.assignments[i]]);
  return fit;
}

// Quadratic density oracle: for every row, the average over attributes of how
// many rows share its value, by direct pairwise comparison.
inline std::vector<double> naive_cao_density(
    const std::vector<DataPoint>& rows) {
  const std::size_t n = rows.size();
  std::vector<double> dens(n, 0.0);
  if (n == 0) return dens;
  const std::size_t m = rows.front().size();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t matches = 0;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t a = 0; a < m; ++a)
        if (rows[i][a] == rows[j][a]) ++matches;
    dens[i] = static_cast<double>(matches) / static_cast<double>(m);
  }
  return dens;
}

}  // namespace testutil
