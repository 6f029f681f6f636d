#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>

#include "bkmodes/dataset.hpp"
#include "bkmodes/parallel.hpp"

namespace bkmodes {

namespace detail {

// Reference kernel. The public hamming() must stay bit-equivalent to this.
inline std::size_t hamming_scalar(RowView x, RowView y) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) d += (x[i] != y[i]) ? 1 : 0;
  return d;
}

// Sets bit 7 of every byte of v that is nonzero. The inner subtraction never
// borrows across bytes because every byte of (v | 0x80..) is >= 0x80.
inline std::uint64_t nonzero_byte_mask(std::uint64_t v) {
  constexpr std::uint64_t kLow = 0x0101010101010101ULL;
  constexpr std::uint64_t kHigh = 0x8080808080808080ULL;
  return (v | ((v | kHigh) - kLow)) & kHigh;
}

}  // namespace detail

// Number of mismatching attribute positions between two equal-length code
// vectors. Compares eight bytes per step; result is always in [0, m].
inline std::size_t hamming(RowView x, RowView y) {
  if (x.size() != y.size())
    throw std::invalid_argument("hamming: length mismatch");
  const std::size_t m = x.size();
  std::size_t d = 0;
  std::size_t i = 0;
  for (; i + 8 <= m; i += 8) {
    std::uint64_t a, b;
    std::memcpy(&a, x.data() + i, 8);
    std::memcpy(&b, y.data() + i, 8);
    d += static_cast<std::size_t>(
        std::popcount(detail::nonzero_byte_mask(a ^ b)));
  }
  for (; i < m; ++i) d += (x[i] != y[i]) ? 1 : 0;
  return d;
}

// Per-cluster, per-attribute category counts. Supports O(1) incremental
// maintenance while points move between clusters; the mode of the aggregated
// rows falls out of per-attribute argmax.
class FrequencyTable {
 public:
  explicit FrequencyTable(std::span<const std::uint32_t> cardinalities) {
    offsets_.reserve(cardinalities.size() + 1);
    offsets_.push_back(0);
    for (std::uint32_t card : cardinalities)
      offsets_.push_back(offsets_.back() + card);
    counts_.assign(offsets_.back(), 0);
  }

  std::size_t attributes() const { return offsets_.size() - 1; }
  std::size_t size() const { return size_; }

  std::uint32_t cardinality(std::size_t attr) const {
    return static_cast<std::uint32_t>(offsets_[attr + 1] - offsets_[attr]);
  }

  std::uint32_t count(std::size_t attr, std::uint32_t code) const {
    if (attr >= attributes() || code >= cardinality(attr))
      throw std::out_of_range("frequency table: attr/code out of range");
    return counts_[offsets_[attr] + code];
  }

  std::span<const std::uint32_t> counts(std::size_t attr) const {
    if (attr >= attributes())
      throw std::out_of_range("frequency table: attr out of range");
    return std::span<const std::uint32_t>(counts_.data() + offsets_[attr],
                                          cardinality(attr));
  }

  // delta is +1 or -1; decrementing a zero count is a contract violation.
  // Validates the whole point before touching any count.
  void update(RowView point, int delta) {
    if (point.size() != attributes())
      throw std::invalid_argument("frequency table: point length mismatch");
    if (delta != 1 && delta != -1)
      throw std::invalid_argument("frequency table: delta must be +1 or -1");
    if (delta < 0 && size_ == 0)
      throw std::invalid_argument("frequency table: decrement below zero");
    for (std::size_t i = 0; i < point.size(); ++i) {
      if (point[i] >= cardinality(i))
        throw std::out_of_range("frequency table: code out of range");
      if (delta < 0 && counts_[offsets_[i] + point[i]] == 0)
        throw std::invalid_argument("frequency table: decrement below zero");
    }
    for (std::size_t i = 0; i < point.size(); ++i) {
      std::uint32_t& slot = counts_[offsets_[i] + point[i]];
      slot = delta > 0 ? slot + 1 : slot - 1;
    }
    size_ = delta > 0 ? size_ + 1 : size_ - 1;
  }

  void add(RowView point) { update(point, +1); }
  void remove(RowView point) { update(point, -1); }

  bool operator==(const FrequencyTable&) const = default;

 private:
  std::vector<std::uint32_t> counts_;
  std::vector<std::size_t> offsets_;
  std::size_t size_ = 0;
};

inline FrequencyTable freq_build(const CategoricalDataset& ds,
                                 const RowSubset& subset) {
  FrequencyTable table(ds.cardinalities());
  for (RowIndex i : subset.indices) table.add(ds.row(i));
  return table;
}

// The mode of the aggregated rows: per attribute, a category with maximal
// count. Ties break to the lowest category code so results are deterministic.
// The mode minimizes the sum of Hamming distances over the aggregated rows
// and may be a synthetic point absent from the data.
inline DataPoint mode_of(const FrequencyTable& table) {
  if (table.size() == 0) throw std::domain_error("mode of empty cluster");
  DataPoint mode(table.attributes());
  for (std::size_t attr = 0; attr < table.attributes(); ++attr) {
    std::span<const std::uint32_t> counts = table.counts(attr);
    std::uint32_t best_code = 0;
    std::uint32_t best_count = counts[0];
    for (std::uint32_t c = 1; c < counts.size(); ++c) {
      if (counts[c] > best_count) {
        best_count = counts[c];
        best_code = c;
      }
    }
    mode[attr] = static_cast<Code>(best_code);
  }
  return mode;
}

// Sum of Hamming distances from every subset row to the center, as an exact
// integer.
inline std::uint64_t sum_of_distances(const CategoricalDataset& ds,
                                      const RowSubset& subset, RowView center,
                                      int threads = 1) {
  if (center.size() != ds.m())
    throw std::invalid_argument("sum_of_distances: center length mismatch");
  const int t = resolve_threads(threads);
  std::vector<std::uint64_t> partial(static_cast<std::size_t>(t), 0);
  parallel_chunks(subset.size(), t,
                  [&](int worker, std::size_t begin, std::size_t end) {
                    std::uint64_t acc = 0;
                    for (std::size_t p = begin; p < end; ++p)
                      acc += hamming(ds.row(subset.indices[p]), center);
                    partial[static_cast<std::size_t>(worker)] = acc;
                  });
  std::uint64_t total = 0;
  for (std::uint64_t v : partial) total += v;
  return total;
}

// Identity used by the engine's update pass: with a frequency table over a
// cluster, the within-cluster sum against center c is
// sum over attributes of (cluster size - count[attr][c_attr]).
inline std::uint64_t within_cluster_sum(const FrequencyTable& table,
                                        RowView center) {
  if (center.size() != table.attributes())
    throw std::invalid_argument("within_cluster_sum: center length mismatch");
  std::uint64_t total = 0;
  for (std::size_t attr = 0; attr < table.attributes(); ++attr)
    total += table.size() - table.count(attr, center[attr]);
  return total;
}

// Exact integer total of d(row, centers[assignment[row]]) over all rows.
inline std::uint64_t total_assignment_distance(
    const CategoricalDataset& ds, std::span<const ClusterIndex> assignments,
    std::span<const DataPoint> centers) {
  if (assignments.size() != ds.n())
    throw std::invalid_argument("assignments do not cover all rows");
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    if (assignments[i] >= centers.size())
      throw std::invalid_argument("assignment references missing cluster");
    total += hamming(ds.row(i), centers[assignments[i]]);
  }
  return total;
}

// Sum-of-distances quality metric: exact integer total divided by n at this
// reporting boundary only. Lower is better.
inline double sd_total(const CategoricalDataset& ds,
                       std::span<const ClusterIndex> assignments,
                       std::span<const DataPoint> centers) {
  return static_cast<double>(total_assignment_distance(ds, assignments,
                                                       centers)) /
         static_cast<double>(ds.n());
}

}  // namespace bkmodes
