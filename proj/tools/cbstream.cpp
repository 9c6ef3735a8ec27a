// Command-line front end: evaluation runs, dataset ingestion, synthetic
// corpora and the moderation server.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cbstream/core/csv.hpp"
#include "cbstream/llm/traits.hpp"
#include "cbstream/pipeline/corpus.hpp"
#include "cbstream/pipeline/features.hpp"
#include "cbstream/pipeline/stream.hpp"
#include "cbstream/pipeline/synthetic.hpp"
#include "cbstream/service/config.hpp"
#include "cbstream/service/http.hpp"
#include "cbstream/service/moderation.hpp"

namespace {

using namespace cbstream;

struct RunArgs {
  std::string input;
  int scenario = 1;
  std::string model = "arfc";
  std::size_t cold_start = 1500;
  std::uint64_t seed = 0;
  std::string llm = "mock";
  std::string grid = "listing";
  std::string llm_cache;
  std::size_t parallelism = 4;
  std::string metrics_out;
  std::string log_out;
  std::string snapshot_out;
};

std::unique_ptr<llm::ChatBackend> make_backend(const std::string& kind) {
  if (kind == "remote") return std::make_unique<llm::RemoteChatBackend>(llm::LlmBackendConfig::from_env());
  return std::make_unique<llm::MockChatBackend>();
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

int run(const RunArgs& a) {
  pipeline::PipelineConfig config;
  config.scenario = *pipeline::parse_scenario(std::to_string(a.scenario));
  config.cold_start_size = a.cold_start;
  config.model = *pipeline::parse_model_kind(a.model);
  config.grid = *pipeline::parse_grid_choice(a.grid);
  config.seed = a.seed;

  const auto posts = pipeline::load_posts(a.input);
  auto backend = make_backend(a.llm);
  llm::TraitCache cache(a.llm_cache.empty() ? std::nullopt : std::optional<std::string>(a.llm_cache));
  llm::TraitExtractor traits(*backend, cache, llm::LlmBackendConfig{}.max_retries, a.parallelism);
  pipeline::FeatureExtractor extractor(config.scenario, traits);

  std::optional<std::ofstream> log;
  if (!a.log_out.empty()) log.emplace(open_out(a.log_out, std::ios::out | std::ios::binary));
  const auto result = pipeline::run_stream(config, posts, extractor, log ? &*log : nullptr);

  const auto summary = result.summary();
  if (!a.metrics_out.empty()) open_out(a.metrics_out) << summary.dump(2) << '\n';
  if (!a.snapshot_out.empty())
    open_out(a.snapshot_out, std::ios::out | std::ios::binary) << result.state->snapshot();

  const auto& state = *result.state;
  std::cout << "model         " << state.spec().describe() << '\n'
            << "features      " << result.cold_start_mask.size() << " of " << result.importances.size()
            << " kept at cold start, " << state.mask().size() << " active at the end\n"
            << compute_metrics(state.cold_start_counts()).to_row("cold start") << '\n'
            << state.streaming_metrics().to_row("streaming") << '\n'
            << state.full_metrics().to_row("full stream") << '\n';
  if (result.degraded > 0) std::cout << "degraded LLM extractions: " << result.degraded << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cbstream: streaming cyberbullying detection"};
  app.require_subcommand(1);

  RunArgs r;
  auto* run_cmd = app.add_subcommand("run", "Cold start, then test-then-train over a labeled CSV");
  run_cmd->add_option("--input", r.input, "CSV with text,label columns")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--scenario", r.scenario, "1: side features, 2: side + word counts")
      ->check(CLI::IsMember({1, 2}));
  run_cmd->add_option("--model", r.model)->check(CLI::IsMember({"gnb", "hatc", "arfc"}));
  run_cmd->add_option("--cold-start", r.cold_start, "Labeled samples used for selection and tuning")
      ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
  run_cmd->add_option("--seed", r.seed);
  run_cmd->add_option("--llm", r.llm)->check(CLI::IsMember({"mock", "remote"}));
  run_cmd->add_option("--grid", r.grid, "listing: full grid search, reference: fixed parameters")
      ->check(CLI::IsMember({"listing", "reference"}));
  run_cmd->add_option("--llm-cache", r.llm_cache, "JSON-lines trait cache");
  run_cmd->add_option("--llm-parallelism", r.parallelism)->check(CLI::PositiveNumber);
  run_cmd->add_option("--metrics-out", r.metrics_out);
  run_cmd->add_option("--log-out", r.log_out, "JSON-lines prediction log");
  run_cmd->add_option("--snapshot-out", r.snapshot_out, "Binary stream snapshot for the server");

  std::string ingest_in, ingest_out;
  pipeline::IngestOptions ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Convert a multi-class tagged CSV to binary labels");
  ingest_cmd->add_option("--input", ingest_in)->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--output", ingest_out)->required();
  ingest_cmd->add_option("--text-column", ingest.text_column);
  ingest_cmd->add_option("--label-column", ingest.label_column);
  ingest_cmd->add_option("--absent-tag", ingest.absent_tag);
  ingest_cmd->add_flag("--balance", ingest.balance, "Undersample the majority class");
  ingest_cmd->add_option("--seed", ingest.seed);

  pipeline::SyntheticOptions synth;
  std::string synth_out;
  std::optional<std::size_t> drift_at;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic labeled corpus");
  synth_cmd->add_option("--n", synth.n)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--drift-at", drift_at);
  synth_cmd->add_option("--noise", synth.label_noise)->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--output", synth_out)->required();

  std::string config_path;
  auto* serve_cmd = app.add_subcommand("serve", "Run the moderation HTTP service");
  serve_cmd->add_option("--config", config_path, "JSON configuration file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return run(r);
    if (ingest_cmd->parsed()) {
      pipeline::IngestReport rep;
      const auto posts = pipeline::ingest_tagged(csv::read_file(ingest_in), ingest, &rep);
      auto out = open_out(ingest_out, std::ios::out | std::ios::binary);
      pipeline::write_posts(out, posts);
      std::cout << "read " << rep.read << ", dropped " << rep.dropped_empty << " empty, wrote " << posts.size()
                << " (absent " << rep.absent << ", present " << rep.present << ")\n";
      return 0;
    }
    if (synth_cmd->parsed()) {
      synth.drift_at = drift_at;
      auto out = open_out(synth_out, std::ios::out | std::ios::binary);
      pipeline::write_posts(out, pipeline::make_synthetic_stream(synth));
      return 0;
    }
    if (serve_cmd->parsed()) {
      const auto config = service::ServiceConfig::load(config_path);
      service::ModerationService svc(config);
      service::HttpServer server(svc, config);
      std::cout << "listening on " << config.bind_address << ':' << config.port << std::endl;
      server.listen();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
