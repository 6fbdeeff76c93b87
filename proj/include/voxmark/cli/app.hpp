#ifndef VOXMARK_CLI_APP_HPP
#define VOXMARK_CLI_APP_HPP

#include <iostream>

#include "CLI11.hpp"
#include "voxmark/cli/analyze.hpp"
#include "voxmark/cli/featdict.hpp"

namespace voxmark::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // some input or stage failed at run time
inline constexpr int kExitUsage = 2;    // bad arguments, config or schema; nothing was run

inline int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::ConfigError:
    case ErrorCode::SchemaError:
    case ErrorCode::NoInputs:
    case ErrorCode::InvalidArgument:
      return kExitUsage;
    default:
      return kExitFailure;
  }
}

/// Entry point shared by the binary and the tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"voxmark: voice and transcript marker extraction and analysis"};
  app.require_subcommand(1);
  std::optional<std::string> config_path;
  std::optional<std::size_t> jobs;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--jobs", jobs, "worker threads for extract (default: logical cores)");
  app.add_option("--seed", seed, "seed for randomized steps");

  auto* ex = app.add_subcommand("extract", "extract one feature row per WAV recording");
  std::string audio_dir, ex_out;
  std::optional<std::string> transcripts, pairs;
  ex->add_option("AUDIO_DIR", audio_dir, "directory of .wav files")->required();
  ex->add_option("--transcripts", transcripts, "directory of .txt/.conllu transcripts (default: AUDIO_DIR)");
  ex->add_option("--pairs", pairs, "explicit audio,transcript pairing file");
  ex->add_option("-o,--out", ex_out, "output CSV")->required();

  auto* an = app.add_subcommand("analyze", "run selection/transformation stages over a feature CSV");
  std::string features_csv, an_out;
  std::optional<std::string> stages;
  an->add_option("FEATURES_CSV", features_csv, "feature table CSV")->required();
  an->add_option("--stages", stages, "stage spec JSON (default: the config 'analysis' entry)");
  an->add_option("-o,--out", an_out, "output directory")->required();

  auto* fd = app.add_subcommand("featdict", "write the feature dictionary for the active config");
  std::string fd_out;
  fd->add_option("-o,--out", fd_out, "output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    json cli_json = json::object();
    if (jobs) cli_json["jobs"] = *jobs;
    if (seed) cli_json["seed"] = *seed;
    const PipelineConfig cfg = load_config(config_path ? std::optional<std::filesystem::path>(*config_path) : std::nullopt, cli_json);

    if (*ex) {
      ExtractRequest req{audio_dir, std::nullopt, std::nullopt, ex_out};
      if (transcripts) req.transcript_dir = *transcripts;
      if (pairs) req.pairs_file = *pairs;
      const RunManifest m = cmd_extract(req, cfg);
      std::size_t n_ok = 0;
      for (const auto& s : m.inputs) {
        for (const auto& w : s.warnings) err << s.source_id << ": warning: " << w << "\n";
        if (s.ok) ++n_ok;
        else err << s.audio << ": error: " << s.message << "\n";
      }
      out << "extracted " << n_ok << "/" << m.inputs.size() << " recordings, " << m.n_features << " features -> " << ex_out << "\n";
      return m.all_ok() ? kExitOk : kExitFailure;
    }
    if (*an) {
      const json spec_json = stages ? read_json_file(*stages, ErrorCode::SchemaError)
                                    : (cfg.analysis.is_null() ? json{{"stages", json::array()}} : cfg.analysis);
      const AnalyzeSpec spec = parse_analyze_spec(spec_json);
      const auto table = ml::load_table_csv(features_csv, spec.task);
      const auto res = cmd_analyze(table, spec, an_out, cfg.seed);
      for (const auto& s : res.report["stages"]) {
        if (s.contains("warning")) err << s["warning"].get<std::string>() << "\n";
      }
      out << "analyzed " << table.n_rows() << " rows; " << res.final_columns.size() << " columns kept -> " << an_out << "\n";
      return kExitOk;
    }
    cmd_featdict(fd_out, cfg);
    out << "wrote feature dictionary -> " << fd_out << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "voxmark: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "voxmark: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace voxmark::cli

#endif
