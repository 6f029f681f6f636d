#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bkmodes/dataset.hpp"
#include "bkmodes/engine.hpp"
#include "bkmodes/init.hpp"
#include "bkmodes/metrics.hpp"

// Benchmark harness: run one (initializer, k) combination or a whole
// methods x k-values x seeds matrix, and serialize the results. Non-timing
// fields are a pure function of (dataset, spec, seeds); timing fields come
// from a monotonic clock and are never part of determinism comparisons.

namespace bkmodes {

struct RunSpec {
  InitMethod method;
  std::size_t k = 2;
  EngineConfig engine;
};

struct RunRecord {
  std::string method;
  std::size_t k = 0;
  std::optional<std::uint64_t> seed;
  std::uint64_t total_distance = 0;
  std::size_t n = 0;
  std::size_t iterations = 0;
  bool converged = false;
  double init_time_sec = 0.0;
  double total_time_sec = 0.0;
  std::string error;

  bool failed() const { return !error.empty(); }
  double sd() const {
    return n == 0 ? 0.0
                  : static_cast<double>(total_distance) /
                        static_cast<double>(n);
  }
};

struct BenchmarkReport {
  std::vector<RunRecord> records;
};

// One initializer + K-Modes run. init_time covers the initializer only,
// total_time the initializer plus the fit. Errors propagate; the matrix
// runner is the layer that records them.
inline RunRecord run_once(const CategoricalDataset& ds, const RunSpec& spec,
                          ClusterModel* model_out = nullptr) {
  if (!spec.method.valid())
    throw std::invalid_argument(
        "run spec: seed must be given exactly for `random`");
  RunRecord rec;
  rec.method = to_string(spec.method.kind);
  rec.k = spec.k;
  rec.seed = spec.method.seed;
  rec.n = ds.n();

  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();
  std::vector<DataPoint> centers =
      make_initial_centers(ds, spec.k, spec.method, spec.engine);
  const auto initialized = Clock::now();
  ClusterModel model = kmodes_fit(ds, std::move(centers), spec.engine);
  const auto finished = Clock::now();

  rec.init_time_sec =
      std::chrono::duration<double>(initialized - started).count();
  rec.total_time_sec =
      std::chrono::duration<double>(finished - started).count();
  rec.total_distance = model.total_distance;
  rec.iterations = model.iterations;
  rec.converged = model.converged;
  if (model_out) *model_out = std::move(model);
  return rec;
}

struct MatrixSpec {
  std::vector<InitMethod::Kind> methods;
  std::vector<std::size_t> ks;
  std::vector<std::uint64_t> seeds;  // consumed by the random arm only
  EngineConfig engine;
  int parallel_runs = 1;
};

// Executes the methods x ks cross product (random fans out over the seeds),
// in deterministic (method, k, seed) order. Per-run failures land in the
// record's error field; the matrix keeps going. With parallel_runs > 1 the
// runs execute concurrently but the report order never changes.
inline BenchmarkReport run_matrix(const CategoricalDataset& ds,
                                  const MatrixSpec& spec) {
  std::vector<RunSpec> runs;
  for (InitMethod::Kind kind : spec.methods) {
    for (std::size_t k : spec.ks) {
      if (kind == InitMethod::Kind::kRandom) {
        if (spec.seeds.empty())
          throw std::invalid_argument(
              "matrix: the random method needs at least one seed");
        for (std::uint64_t seed : spec.seeds)
          runs.push_back({InitMethod::random(seed), k, spec.engine});
      } else {
        runs.push_back({InitMethod{kind, std::nullopt}, k, spec.engine});
      }
    }
  }

  BenchmarkReport report;
  report.records.resize(runs.size());
  const auto execute = [&](std::size_t i) {
    try {
      report.records[i] = run_once(ds, runs[i]);
    } catch (const std::exception& e) {
      RunRecord rec;
      rec.method = to_string(runs[i].method.kind);
      rec.k = runs[i].k;
      rec.seed = runs[i].method.seed;
      rec.n = ds.n();
      rec.error = e.what();
      report.records[i] = rec;
    }
  };

  if (spec.parallel_runs > 1 && runs.size() > 1) {
    std::atomic<std::size_t> cursor{0};
    const std::size_t workers =
        std::min<std::size_t>(spec.parallel_runs, runs.size());
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = cursor.fetch_add(1);
          if (i >= runs.size()) return;
          execute(i);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  } else {
    for (std::size_t i = 0; i < runs.size(); ++i) execute(i);
  }
  return report;
}

enum class ReportFormat { kCsv, kJson, kPlot };

inline ReportFormat parse_format(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  if (name == "plot") return ReportFormat::kPlot;
  throw std::invalid_argument("unknown report format: " + std::string(name));
}

struct EmitOptions {
  // Timing fields are environment-bound; dropping them makes reports
  // byte-comparable across runs and thread counts.
  bool include_timing = true;
  // Collapses the random arm's per-seed rows in csv/plot views; json always
  // carries the raw records (it is the canonical interchange format).
  enum class Aggregate { kNone, kMean, kMin } aggregate = Aggregate::kNone;
};

namespace detail {

inline std::string format_fixed(double v, int places) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", places, v);
  return buf;
}

// SD is reported to two decimal places everywhere.
inline std::string format_sd(std::uint64_t total, std::size_t n) {
  return format_fixed(
      static_cast<double>(total) / static_cast<double>(n == 0 ? 1 : n), 2);
}

inline std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

struct EmitRow {
  std::string method;
  std::size_t k = 0;
  std::string seed;         // empty when not applicable
  std::string sd;           // empty on error
  std::string iterations;   // empty on error; fractional for mean rows
  std::string converged;    // empty on error
  double init_time_sec = 0.0;
  double total_time_sec = 0.0;
  std::string error;
};

inline EmitRow row_from_record(const RunRecord& r) {
  EmitRow row;
  row.method = r.method;
  row.k = r.k;
  if (r.seed) row.seed = std::to_string(*r.seed);
  if (!r.failed()) {
    row.sd = format_sd(r.total_distance, r.n);
    row.iterations = std::to_string(r.iterations);
    row.converged = r.converged ? "true" : "false";
  }
  row.init_time_sec = r.init_time_sec;
  row.total_time_sec = r.total_time_sec;
  row.error = csv_safe(r.error);
  return row;
}

// Groups records by (method, k) in first-seen order and applies the
// aggregate. Mean rows carry fractional iteration counts; min picks the
// group's lowest-SD run verbatim. Groups whose runs all failed surface the
// first error.
inline std::vector<EmitRow> build_rows(const BenchmarkReport& report,
                                       EmitOptions::Aggregate aggregate) {
  std::vector<EmitRow> rows;
  if (aggregate == EmitOptions::Aggregate::kNone) {
    rows.reserve(report.records.size());
    for (const RunRecord& r : report.records) rows.push_back(row_from_record(r));
    return rows;
  }
  std::vector<std::pair<std::string, std::size_t>> keys;
  std::vector<std::vector<const RunRecord*>> groups;
  for (const RunRecord& r : report.records) {
    const std::pair<std::string, std::size_t> key{r.method, r.k};
    std::size_t g = 0;
    for (; g < keys.size(); ++g)
      if (keys[g] == key) break;
    if (g == keys.size()) {
      keys.push_back(key);
      groups.emplace_back();
    }
    groups[g].push_back(&r);
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<const RunRecord*> ok;
    for (const RunRecord* r : groups[g])
      if (!r->failed()) ok.push_back(r);
    if (ok.empty()) {
      rows.push_back(row_from_record(*groups[g].front()));
      continue;
    }
    if (ok.size() == 1) {
      rows.push_back(row_from_record(*ok.front()));
      continue;
    }
    if (aggregate == EmitOptions::Aggregate::kMin) {
      const RunRecord* best = ok.front();
      for (const RunRecord* r : ok)
        if (r->total_distance < best->total_distance) best = r;
      EmitRow row = row_from_record(*best);
      row.seed = "min";
      if (best->seed) row.seed += ":" + std::to_string(*best->seed);
      rows.push_back(std::move(row));
      continue;
    }
    EmitRow row;
    row.method = keys[g].first;
    row.k = keys[g].second;
    row.seed = "mean:" + std::to_string(ok.size());
    std::uint64_t total = 0;
    std::size_t iters = 0;
    bool all_converged = true;
    double init_time = 0.0, total_time = 0.0;
    for (const RunRecord* r : ok) {
      total += r->total_distance;
      iters += r->iterations;
      all_converged = all_converged && r->converged;
      init_time += r->init_time_sec;
      total_time += r->total_time_sec;
    }
    const auto count = static_cast<double>(ok.size());
    row.sd = format_fixed(static_cast<double>(total) /
                              (count * static_cast<double>(ok.front()->n)),
                          2);
    row.iterations = format_fixed(static_cast<double>(iters) / count, 2);
    row.converged = all_converged ? "true" : "false";
    row.init_time_sec = init_time / count;
    row.total_time_sec = total_time / count;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

// Serializes a report. Column order and the 2-decimal SD rule are fixed;
// given the same records and options the output is byte-identical.
inline std::string emit_report(const BenchmarkReport& report,
                               ReportFormat format,
                               const EmitOptions& options = {}) {
  if (format == ReportFormat::kJson) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const RunRecord& r : report.records) {
      nlohmann::ordered_json j;
      j["method"] = r.method;
      j["k"] = r.k;
      if (r.seed)
        j["seed"] = *r.seed;
      else
        j["seed"] = nullptr;
      if (!r.failed()) {
        j["sd"] = detail::format_sd(r.total_distance, r.n);
        j["total_distance"] = r.total_distance;
        j["n"] = r.n;
        j["iterations"] = r.iterations;
        j["converged"] = r.converged;
      }
      j["error"] = r.error;
      if (options.include_timing) {
        j["init_time_sec"] = r.init_time_sec;
        j["total_time_sec"] = r.total_time_sec;
      }
      out.push_back(std::move(j));
    }
    return out.dump(2) + "\n";
  }

  const std::vector<detail::EmitRow> rows =
      detail::build_rows(report, format == ReportFormat::kPlot &&
                                     options.aggregate ==
                                         EmitOptions::Aggregate::kNone
                             ? EmitOptions::Aggregate::kMean
                             : options.aggregate);

  std::string out;
  if (format == ReportFormat::kCsv) {
    out = "method,k,seed,sd,iterations,converged";
    if (options.include_timing) out += ",init_time_sec,total_time_sec";
    out += ",error\n";
    for (const detail::EmitRow& row : rows) {
      out += row.method + "," + std::to_string(row.k) + "," + row.seed + "," +
             row.sd + "," + row.iterations + "," + row.converged;
      if (options.include_timing)
        out += "," + detail::format_fixed(row.init_time_sec, 6) + "," +
               detail::format_fixed(row.total_time_sec, 6);
      out += "," + row.error + "\n";
    }
    return out;
  }

  // Plot data: one (k, sd) series per method, then one (k, time) series,
  // aggregated over seeds. These are the inputs for quality/time-vs-K plots.
  out = "# series: sd\nmethod,k,sd\n";
  for (const detail::EmitRow& row : rows) {
    if (row.sd.empty()) continue;
    out += row.method + "," + std::to_string(row.k) + "," + row.sd + "\n";
  }
  if (options.include_timing) {
    out += "# series: time\nmethod,k,total_time_sec\n";
    for (const detail::EmitRow& row : rows) {
      if (row.sd.empty()) continue;
      out += row.method + "," + std::to_string(row.k) + "," +
             detail::format_fixed(row.total_time_sec, 6) + "\n";
    }
  }
  return out;
}

// Reads back a report produced by the json format.
inline BenchmarkReport parse_report_json(const std::string& text) {
  BenchmarkReport report;
  const nlohmann::json in = nlohmann::json::parse(text);
  for (const auto& j : in) {
    RunRecord r;
    r.method = j.at("method").get<std::string>();
    r.k = j.at("k").get<std::size_t>();
    if (j.contains("seed") && !j.at("seed").is_null())
      r.seed = j.at("seed").get<std::uint64_t>();
    r.error = j.value("error", std::string{});
    if (!r.failed()) {
      r.total_distance = j.at("total_distance").get<std::uint64_t>();
      r.n = j.at("n").get<std::size_t>();
      r.iterations = j.at("iterations").get<std::size_t>();
      r.converged = j.at("converged").get<bool>();
    }
    r.init_time_sec = j.value("init_time_sec", 0.0);
    r.total_time_sec = j.value("total_time_sec", 0.0);
    report.records.push_back(std::move(r));
  }
  return report;
}

// Persisted final model for --dump-model; sd can be re-derived from it
// exactly (total_distance over n, or by re-evaluating the assignments).
inline std::string dump_model_json(const ClusterModel& model, std::size_t n) {
  nlohmann::ordered_json j;
  j["k"] = model.k;
  j["n"] = n;
  j["total_distance"] = model.total_distance;
  j["iterations"] = model.iterations;
  j["converged"] = model.converged;
  j["centers"] = nlohmann::ordered_json::array();
  for (const DataPoint& c : model.centers) {
    std::vector<std::uint32_t> wide(c.begin(), c.end());
    j["centers"].push_back(wide);
  }
  j["assignments"] = model.assignments;
  return j.dump(2) + "\n";
}

}  // namespace bkmodes
