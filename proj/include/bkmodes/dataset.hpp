#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bkmodes {

// One attribute value, recoded to a compact integer. Cardinalities are capped
// at 256 so a cell is always a single byte.
using Code = std::uint8_t;
using RowIndex = std::uint32_t;
using ClusterIndex = std::uint32_t;

inline constexpr std::uint32_t kMaxCardinality = 256;

// An owned m-length code vector. Cluster centers are DataPoints; a center
// produced by a mode computation may be synthetic, i.e. not present in the
// data.
using DataPoint = std::vector<Code>;

// Borrowed view of one row (or one center).
using RowView = std::span<const Code>;

// In-memory categorical dataset: n rows by m attributes, stored row-major as
// one contiguous byte block. Immutable after construction; safe for any
// number of concurrent readers.
class CategoricalDataset {
 public:
  CategoricalDataset(std::size_t n, std::size_t m,
                     std::vector<std::uint32_t> cardinalities,
                     std::vector<Code> codes,
                     std::vector<std::string> attribute_names)
      : n_(n),
        m_(m),
        cardinalities_(std::move(cardinalities)),
        codes_(std::move(codes)),
        attribute_names_(std::move(attribute_names)) {
    if (cardinalities_.size() != m_)
      throw std::invalid_argument("dataset: cardinalities size != m");
    if (attribute_names_.size() != m_)
      throw std::invalid_argument("dataset: attribute_names size != m");
    if (codes_.size() != n_ * m_)
      throw std::invalid_argument("dataset: codes size != n*m");
  }

  // Builds from row vectors. Cardinalities default to per-column max code + 1,
  // names to "a0", "a1", ...
  static CategoricalDataset from_rows(
      const std::vector<DataPoint>& rows,
      std::vector<std::uint32_t> cardinalities = {},
      std::vector<std::string> attribute_names = {}) {
    const std::size_t n = rows.size();
    const std::size_t m = n == 0 ? 0 : rows.front().size();
    std::vector<Code> codes;
    codes.reserve(n * m);
    for (const DataPoint& r : rows) {
      if (r.size() != m)
        throw std::invalid_argument("from_rows: ragged row lengths");
      codes.insert(codes.end(), r.begin(), r.end());
    }
    if (cardinalities.empty()) {
      cardinalities.assign(m, 1);
      for (const DataPoint& r : rows)
        for (std::size_t i = 0; i < m; ++i)
          cardinalities[i] =
              std::max(cardinalities[i], std::uint32_t{r[i]} + 1);
    }
    if (attribute_names.empty()) {
      attribute_names.reserve(m);
      for (std::size_t i = 0; i < m; ++i)
        attribute_names.push_back("a" + std::to_string(i));
    }
    return CategoricalDataset(n, m, std::move(cardinalities), std::move(codes),
                              std::move(attribute_names));
  }

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  const std::vector<std::uint32_t>& cardinalities() const {
    return cardinalities_;
  }
  const std::vector<std::string>& attribute_names() const {
    return attribute_names_;
  }

  RowView row(std::size_t i) const {
    if (i >= n_) throw std::out_of_range("dataset row index out of range");
    return RowView(codes_.data() + i * m_, m_);
  }

  Code at(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= m_) throw std::out_of_range("dataset cell out of range");
    return codes_[i * m_ + j];
  }

  std::span<const Code> raw_codes() const { return codes_; }

 private:
  std::size_t n_;
  std::size_t m_;
  std::vector<std::uint32_t> cardinalities_;
  std::vector<Code> codes_;
  std::vector<std::string> attribute_names_;
};

// Ordered list of distinct row indices; represents a cluster's membership
// without copying rows. Indices are kept strictly increasing.
struct RowSubset {
  std::vector<RowIndex> indices;

  static RowSubset all(std::size_t n) {
    RowSubset s;
    s.indices.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.indices[i] = static_cast<RowIndex>(i);
    return s;
  }

  std::size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
};

struct DatasetViolation {
  enum class Kind {
    kEmptyDataset,         // n == 0 or m == 0
    kCardinalityOutOfRange,  // cardinality 0 or > kMaxCardinality
    kCodeOutOfRange,         // code >= cardinality at (row, column)
  };

  Kind kind;
  std::size_t row = 0;     // meaningful for kCodeOutOfRange
  std::size_t column = 0;  // meaningful for kCardinality* and kCodeOutOfRange
  std::string message;
};

// Reports every invariant violation; an empty result means the dataset is
// well formed. Violations are data, not failures.
inline std::vector<DatasetViolation> validate(const CategoricalDataset& ds) {
  std::vector<DatasetViolation> out;
  if (ds.n() == 0 || ds.m() == 0) {
    out.push_back({DatasetViolation::Kind::kEmptyDataset, 0, 0,
                   "dataset must have at least one row and one column"});
    return out;
  }
  for (std::size_t j = 0; j < ds.m(); ++j) {
    const std::uint32_t card = ds.cardinalities()[j];
    if (card == 0 || card > kMaxCardinality) {
      out.push_back({DatasetViolation::Kind::kCardinalityOutOfRange, 0, j,
                     "cardinality " + std::to_string(card) + " of attribute " +
                         std::to_string(j) + " exceeds " +
                         std::to_string(kMaxCardinality)});
    }
  }
  for (std::size_t i = 0; i < ds.n(); ++i) {
    RowView r = ds.row(i);
    for (std::size_t j = 0; j < ds.m(); ++j) {
      if (r[j] >= ds.cardinalities()[j]) {
        out.push_back({DatasetViolation::Kind::kCodeOutOfRange, i, j,
                       "code " + std::to_string(r[j]) + " at (" +
                           std::to_string(i) + "," + std::to_string(j) +
                           ") >= cardinality " +
                           std::to_string(ds.cardinalities()[j])});
      }
    }
  }
  return out;
}

}  // namespace bkmodes
