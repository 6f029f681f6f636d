#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bkmodes/dataset.hpp"

// CSV ingestion: recodes source tokens to compact integer codes in
// first-appearance order, applies a named preprocessing profile (column
// drops, cardinality cap), and reports every dropped column. Fields are split
// on the delimiter verbatim; there is no quoting layer. Every distinct token
// (including the empty string) is its own category.

namespace bkmodes {

// Named preprocessing recipe. `drop_columns` holds 1-based source column
// indices. A column whose distinct-token count exceeds the cap (or reaches
// it, when drop_at_cap is set) is dropped and reported.
struct DatasetProfile {
  std::string name = "generic";
  std::vector<std::size_t> drop_columns;
  std::uint32_t max_cardinality = kMaxCardinality;
  bool drop_at_cap = false;
  bool has_header = false;
  char delimiter = ',';

  static DatasetProfile generic() { return {}; }

  static DatasetProfile us_census() {
    DatasetProfile p;
    p.name = "us-census";
    p.drop_columns = {1};  // record id
    p.has_header = true;
    return p;
  }

  static DatasetProfile kdd99() {
    DatasetProfile p;
    p.name = "kdd99";
    p.drop_columns = {1, 5, 6, 13, 14, 32, 33};
    p.max_cardinality = 256;
    p.drop_at_cap = true;  // drop at 256 or more categories
    return p;
  }

  // 64 binary attributes, pre-generated challenge file; nothing to drop.
  static DatasetProfile puf() {
    DatasetProfile p;
    p.name = "puf";
    return p;
  }

  static DatasetProfile by_name(std::string_view name) {
    if (name == "generic") return generic();
    if (name == "us-census") return us_census();
    if (name == "kdd99") return kdd99();
    if (name == "puf") return puf();
    throw std::invalid_argument("unknown dataset profile: " +
                                std::string(name));
  }
};

// tokens[attr][code] is the source token that encodes to `code`; positions
// follow first appearance in the file.
struct RecodeMap {
  std::vector<std::vector<std::string>> tokens;

  const std::string& decode(std::size_t attr, Code code) const {
    if (attr >= tokens.size() || code >= tokens[attr].size())
      throw std::out_of_range("recode map: attr/code out of range");
    return tokens[attr][code];
  }

  bool operator==(const RecodeMap&) const = default;
};

// Recode map for datasets that were never text (synthetic data): every code
// decodes to its own decimal string.
inline RecodeMap identity_recode_map(const CategoricalDataset& ds) {
  RecodeMap map;
  map.tokens.resize(ds.m());
  for (std::size_t a = 0; a < ds.m(); ++a) {
    map.tokens[a].reserve(ds.cardinalities()[a]);
    for (std::uint32_t c = 0; c < ds.cardinalities()[a]; ++c)
      map.tokens[a].push_back(std::to_string(c));
  }
  return map;
}

struct DropReport {
  struct Column {
    std::size_t source_index = 0;  // 1-based
    std::string name;
    std::string reason;
  };
  std::vector<Column> columns;

  std::string to_text() const {
    std::string out;
    for (const Column& c : columns) {
      out += "column " + std::to_string(c.source_index) + " (" + c.name +
             "): " + c.reason + "\n";
    }
    return out;
  }
};

class IngestError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IngestResult {
  CategoricalDataset dataset;
  RecodeMap recode;
  DropReport drops;
};

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line,
                                             char delimiter) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace detail

inline IngestResult ingest_csv(const std::filesystem::path& path,
                               const DatasetProfile& profile) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open " + path.string());

  {
    std::unordered_set<std::size_t> seen;
    for (std::size_t idx : profile.drop_columns) {
      if (idx < 1)
        throw std::invalid_argument("profile drop column indices are 1-based");
      if (!seen.insert(idx).second)
        throw std::invalid_argument("profile drop columns must be distinct");
    }
  }

  struct ColumnState {
    bool profile_dropped = false;
    bool cap_dropped = false;
    std::unordered_map<std::string, std::uint32_t> token_to_code;
    std::vector<std::string> tokens;   // code -> token
    std::vector<std::uint32_t> cells;  // freed once cap_dropped
  };

  std::vector<ColumnState> columns;
  std::vector<std::string> header_names;
  std::size_t n_columns = 0;
  std::size_t n_rows = 0;
  std::size_t line_number = 0;
  bool saw_header = false;
  std::string line;

  const auto init_columns = [&](std::size_t count) {
    n_columns = count;
    columns.resize(count);
    for (std::size_t src : profile.drop_columns) {
      if (src > count)
        throw IngestError("profile drops column " + std::to_string(src) +
                          " but the file has only " + std::to_string(count) +
                          " columns");
      columns[src - 1].profile_dropped = true;
    }
  };

  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields =
        detail::split_fields(line, profile.delimiter);

    if (profile.has_header && !saw_header) {
      saw_header = true;
      header_names = std::move(fields);
      init_columns(header_names.size());
      continue;
    }
    if (n_columns == 0) init_columns(fields.size());
    if (fields.size() != n_columns)
      throw IngestError("row " + std::to_string(line_number) + ": expected " +
                        std::to_string(n_columns) + " fields, got " +
                        std::to_string(fields.size()));

    for (std::size_t c = 0; c < n_columns; ++c) {
      ColumnState& col = columns[c];
      if (col.profile_dropped) continue;
      auto [it, inserted] = col.token_to_code.emplace(
          std::move(fields[c]),
          static_cast<std::uint32_t>(col.token_to_code.size()));
      if (inserted && !col.cap_dropped) {
        col.tokens.push_back(it->first);
        const std::size_t distinct = col.token_to_code.size();
        if (profile.drop_at_cap ? distinct >= profile.max_cardinality
                                : distinct > profile.max_cardinality) {
          col.cap_dropped = true;
          col.cells.clear();
          col.cells.shrink_to_fit();
          col.tokens.clear();
          col.tokens.shrink_to_fit();
        }
      }
      if (!col.cap_dropped) col.cells.push_back(it->second);
    }
    ++n_rows;
  }
  if (in.bad()) throw IngestError("read error on " + path.string());
  if (profile.has_header && !saw_header)
    throw IngestError(path.string() + " is empty");
  if (n_rows == 0) throw IngestError(path.string() + " has no data rows");

  const auto column_name = [&](std::size_t c) {
    if (c < header_names.size()) return header_names[c];
    return "col" + std::to_string(c + 1);
  };

  IngestResult result{
      CategoricalDataset(0, 0, {}, {}, {}), RecodeMap{}, DropReport{}};
  std::vector<std::size_t> kept;
  for (std::size_t c = 0; c < n_columns; ++c) {
    const ColumnState& col = columns[c];
    if (col.profile_dropped) {
      result.drops.columns.push_back(
          {c + 1, column_name(c), "dropped by profile " + profile.name});
    } else if (col.cap_dropped) {
      result.drops.columns.push_back(
          {c + 1, column_name(c),
           std::to_string(col.token_to_code.size()) +
               " distinct categories exceed the cap of " +
               std::to_string(profile.max_cardinality) +
               (profile.drop_at_cap ? " (inclusive)" : "")});
    } else {
      kept.push_back(c);
    }
  }
  if (kept.empty())
    throw IngestError(path.string() + ": no usable columns after drops");

  const std::size_t m = kept.size();
  std::vector<std::uint32_t> cardinalities(m);
  std::vector<std::string> names(m);
  result.recode.tokens.resize(m);
  for (std::size_t a = 0; a < m; ++a) {
    ColumnState& col = columns[kept[a]];
    cardinalities[a] = static_cast<std::uint32_t>(col.tokens.size());
    names[a] = column_name(kept[a]);
    result.recode.tokens[a] = std::move(col.tokens);
  }
  std::vector<Code> codes(n_rows * m);
  for (std::size_t a = 0; a < m; ++a) {
    const std::vector<std::uint32_t>& cells = columns[kept[a]].cells;
    for (std::size_t i = 0; i < n_rows; ++i)
      codes[i * m + a] = static_cast<Code>(cells[i]);
  }
  result.dataset = CategoricalDataset(n_rows, m, std::move(cardinalities),
                                      std::move(codes), std::move(names));
  return result;
}

}  // namespace bkmodes
