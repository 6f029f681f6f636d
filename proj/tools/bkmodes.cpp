// bkmodes: categorical clustering benchmark harness.
//
// Subcommands:
//   ingest  recode a delimiter-separated text file into an encoded dataset
//   synth   generate planted-cluster synthetic data
//   run     one initializer + K-Modes run, report SD/iterations/time
//   matrix  methods x k-values x seeds cross product
//   report  reformat or aggregate a saved JSON report
//
// Exit codes: 0 all runs completed, 2 any run failed, 64 usage error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bkmodes/bkmodes.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRunFailure = 2;
constexpr int kExitUsage = 64;

struct InputOptions {
  std::string path;
  std::string profile = "generic";
  std::optional<bool> header_override;
  char delimiter = ',';
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--input", in.path,
                  "Encoded dataset (.bkm) or delimiter-separated text")
      ->required();
  cmd->add_option("--profile", in.profile,
                  "Preprocessing profile for text input: "
                  "us-census|kdd99|puf|generic");
  cmd->add_flag(
      "--header{true},--no-header{false}",
      [&in](std::int64_t v) { in.header_override = (v != 0); },
      "Override the profile's header setting");
  cmd->add_option("--delimiter", in.delimiter, "Field delimiter for text input");
}

// Encoded files load as-is; anything else goes through the ingest pipeline
// with the selected profile. The drop report lands on stderr.
bkmodes::CategoricalDataset load_dataset(const InputOptions& in) {
  if (bkmodes::is_encoded_file(in.path))
    return bkmodes::load_encoded(in.path).first;
  bkmodes::DatasetProfile profile = bkmodes::DatasetProfile::by_name(in.profile);
  if (in.header_override) profile.has_header = *in.header_override;
  profile.delimiter = in.delimiter;
  bkmodes::IngestResult result = bkmodes::ingest_csv(in.path, profile);
  if (!result.drops.columns.empty()) std::cerr << result.drops.to_text();
  return std::move(result.dataset);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

bkmodes::EmitOptions::Aggregate parse_aggregate(const std::string& name) {
  if (name == "none") return bkmodes::EmitOptions::Aggregate::kNone;
  if (name == "mean") return bkmodes::EmitOptions::Aggregate::kMean;
  if (name == "min") return bkmodes::EmitOptions::Aggregate::kMin;
  throw std::invalid_argument("unknown aggregate mode: " + name);
}

int emit_and_status(const bkmodes::BenchmarkReport& report,
                    const std::string& format, const std::string& aggregate,
                    bool omit_timing, const std::string& output) {
  bkmodes::EmitOptions options;
  options.include_timing = !omit_timing;
  options.aggregate = parse_aggregate(aggregate);
  write_text(output, bkmodes::emit_report(
                         report, bkmodes::parse_format(format), options));
  for (const bkmodes::RunRecord& r : report.records)
    if (r.failed()) return kExitRunFailure;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Categorical clustering benchmark harness (K-Modes with "
               "random, farthest-point, density-distance, and bisecting "
               "initialization)"};
  app.require_subcommand(1);

  // ingest
  InputOptions ingest_in;
  std::string ingest_output;
  std::string drop_report_path;
  CLI::App* ingest = app.add_subcommand(
      "ingest", "Recode a text file into an encoded dataset");
  add_input_options(ingest, ingest_in);
  ingest->add_option("--output", ingest_output, "Encoded dataset path")
      ->required();
  ingest->add_option("--drop-report", drop_report_path,
                     "Write the drop report here instead of stderr");

  // synth
  std::size_t synth_k = 8, synth_n = 10000, synth_m = 32;
  std::uint32_t synth_card = 4;
  double synth_flip = 0.2;
  std::uint64_t synth_seed = 1;
  std::string synth_output, modes_out;
  CLI::App* synth =
      app.add_subcommand("synth", "Generate planted-cluster synthetic data");
  synth->add_option("--k-true", synth_k, "Number of planted modes");
  synth->add_option("--n", synth_n, "Rows");
  synth->add_option("--m", synth_m, "Attributes");
  synth->add_option("--cardinality", synth_card, "Categories per attribute");
  synth->add_option("--flip-prob", synth_flip, "Per-attribute noise rate");
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("--output", synth_output, "Encoded dataset path")
      ->required();
  synth->add_option("--modes-out", modes_out,
                    "Also write the planted modes as JSON");

  // shared run/matrix knobs
  std::size_t max_iter = 300;
  std::string format = "csv";
  std::string aggregate = "none";
  bool omit_timing = false;
  std::string output;

  // run
  InputOptions run_in;
  std::size_t run_k = 2;
  std::string run_method = "bkmodes";
  std::optional<std::uint64_t> run_seed;
  std::string dump_model_path;
  CLI::App* run = app.add_subcommand("run", "One initializer + K-Modes run");
  add_input_options(run, run_in);
  run->add_option("--k", run_k, "Number of clusters")->required();
  run->add_option("--method", run_method,
                  "Initializer: random|farthest|cao|bkmodes");
  run->add_option("--seed", [&run_seed](const std::vector<std::string>& v) {
    run_seed = std::stoull(v.front());
    return true;
  }, "Seed (required for --method random)");
  run->add_option("--max-iter", max_iter, "Iteration cap");
  run->add_option("--format", format, "Report format: csv|json|plot");
  run->add_option("--dump-model", dump_model_path,
                  "Persist the final model as JSON");
  run->add_flag("--omit-timing", omit_timing,
                "Drop timing fields from the report");
  run->add_option("--output", output, "Report path (default stdout)");

  // matrix
  InputOptions matrix_in;
  std::vector<std::size_t> matrix_ks;
  std::vector<std::string> matrix_methods = {"random", "cao", "bkmodes"};
  std::vector<std::uint64_t> matrix_seeds = {1, 2, 3, 4, 5};
  int parallel_runs = 1;
  CLI::App* matrix =
      app.add_subcommand("matrix", "Cross product of methods, K values, seeds");
  add_input_options(matrix, matrix_in);
  matrix->add_option("--k", matrix_ks, "K values (comma-separated)")
      ->required()
      ->delimiter(',');
  matrix->add_option("--methods", matrix_methods,
                     "Initializers (comma-separated)")
      ->delimiter(',');
  matrix->add_option("--seeds", matrix_seeds,
                     "Seeds for the random arm (comma-separated)")
      ->delimiter(',');
  matrix->add_option("--max-iter", max_iter, "Iteration cap");
  matrix->add_option("--format", format, "Report format: csv|json|plot");
  matrix->add_option("--parallel-runs", parallel_runs,
                     "Execute up to N runs concurrently");
  matrix->add_option("--aggregate", aggregate,
                     "Collapse seeds in csv/plot output: none|mean|min");
  matrix->add_flag("--omit-timing", omit_timing,
                   "Drop timing fields from the report");
  matrix->add_option("--output", output, "Report path (default stdout)");

  // report
  std::string report_input;
  CLI::App* report_cmd =
      app.add_subcommand("report", "Reformat or aggregate a saved JSON report");
  report_cmd->add_option("--input", report_input, "Report JSON path")
      ->required();
  report_cmd->add_option("--format", format, "Output format: csv|json|plot");
  report_cmd->add_option("--aggregate", aggregate,
                         "Collapse seeds in csv/plot output: none|mean|min");
  report_cmd->add_flag("--omit-timing", omit_timing,
                       "Drop timing fields from the output");
  report_cmd->add_option("--output", output, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*ingest) {
      bkmodes::DatasetProfile profile =
          bkmodes::DatasetProfile::by_name(ingest_in.profile);
      if (ingest_in.header_override)
        profile.has_header = *ingest_in.header_override;
      profile.delimiter = ingest_in.delimiter;
      bkmodes::IngestResult result =
          bkmodes::ingest_csv(ingest_in.path, profile);
      bkmodes::save_encoded(result.dataset, result.recode, ingest_output);
      const std::string report_text = result.drops.to_text();
      if (drop_report_path.empty())
        std::cerr << report_text;
      else
        write_text(drop_report_path, report_text);
      std::cerr << "encoded " << result.dataset.n() << " rows x "
                << result.dataset.m() << " attributes -> " << ingest_output
                << "\n";
      return kExitOk;
    }

    if (*synth) {
      bkmodes::SynthDataset data = bkmodes::synth_generate(
          synth_k, synth_n, synth_m, synth_card, synth_flip, synth_seed);
      bkmodes::save_encoded(data.dataset,
                            bkmodes::identity_recode_map(data.dataset),
                            synth_output);
      if (!modes_out.empty()) {
        nlohmann::ordered_json j;
        j["planted_modes"] = nlohmann::ordered_json::array();
        for (const bkmodes::DataPoint& mode : data.planted_modes) {
          std::vector<std::uint32_t> wide(mode.begin(), mode.end());
          j["planted_modes"].push_back(wide);
        }
        write_text(modes_out, j.dump(2) + "\n");
      }
      std::cerr << "generated " << synth_n << " rows x " << synth_m
                << " attributes (" << synth_k << " planted modes) -> "
                << synth_output << "\n";
      return kExitOk;
    }

    if (*run) {
      bkmodes::RunSpec spec;
      spec.method.kind = bkmodes::parse_method(run_method);
      spec.method.seed = run_seed;
      spec.k = run_k;
      spec.engine.max_iterations = max_iter;
      if (!spec.method.valid())
        throw std::invalid_argument(
            "--seed is required for --method random and invalid otherwise");
      const bkmodes::CategoricalDataset ds = load_dataset(run_in);
      bkmodes::BenchmarkReport report;
      if (dump_model_path.empty()) {
        report.records.push_back(bkmodes::run_once(ds, spec));
      } else {
        bkmodes::ClusterModel model;
        report.records.push_back(bkmodes::run_once(ds, spec, &model));
        write_text(dump_model_path, bkmodes::dump_model_json(model, ds.n()));
      }
      return emit_and_status(report, format, aggregate, omit_timing, output);
    }

    if (*matrix) {
      bkmodes::MatrixSpec spec;
      for (const std::string& name : matrix_methods)
        spec.methods.push_back(bkmodes::parse_method(name));
      spec.ks = matrix_ks;
      spec.seeds = matrix_seeds;
      spec.engine.max_iterations = max_iter;
      spec.parallel_runs = parallel_runs;
      const bkmodes::CategoricalDataset ds = load_dataset(matrix_in);
      const bkmodes::BenchmarkReport report = bkmodes::run_matrix(ds, spec);
      return emit_and_status(report, format, aggregate, omit_timing, output);
    }

    if (*report_cmd) {
      std::ifstream in(report_input);
      if (!in) throw std::runtime_error("cannot open " + report_input);
      const std::string text((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
      const bkmodes::BenchmarkReport report = bkmodes::parse_report_json(text);
      return emit_and_status(report, format, aggregate, omit_timing, output);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRunFailure;
  }
  return kExitOk;
}
