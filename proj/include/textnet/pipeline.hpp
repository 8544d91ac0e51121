#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "textnet/analysis.hpp"
#include "textnet/article_sim.hpp"
#include "textnet/corpus.hpp"
#include "textnet/event.hpp"
#include "textnet/matching.hpp"
#include "textnet/providers.hpp"
#include "textnet/sentiment.hpp"
#include "textnet/sweep.hpp"

namespace textnet {

struct RunConfig {
  std::filesystem::path corpus_path;
  std::string provider = "toy:256,0";
  std::filesystem::path lexicon_path = "data/lexicon.tsv";
  std::filesystem::path junk_path = "data/junk_patterns.txt";
  std::filesystem::path abbreviations_path = "data/abbreviations.txt";
  std::vector<std::string> bias_levels = BiasScale().levels();
  double tau1 = 0.7;
  double tau2 = 0.1;
  Metric metric = Metric::kEdit;
  double resolution = 1.0;
  std::uint64_t seed = 0;
  double min_weight = 0.0;
  bool normalize_display = false;
  SweepGrid grid = SweepGrid::defaults();
  std::filesystem::path output_dir = "runs";
  unsigned threads = 1;
  int http_timeout_ms = 30000;

  MatchParams match_params() const { return {tau1, tau2}; }
  /// Throws ConfigError.
  void validate() const;
};

/// A stage failure: which stage, and the exit code for the cause
/// (1 configuration, 2 data, 3 provider).
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message, int exit_code);
  const std::string& stage() const { return stage_; }
  int exit_code() const { return exit_code_; }

 private:
  std::string stage_;
  int exit_code_;
};

/// Last stage a pipeline invocation runs.
enum class Stage { kSegment, kEmbed, kMatch, kSimilarity, kNetwork, kFull };

struct PipelineResult {
  std::filesystem::path run_dir;
  std::vector<EvaluationReport> reports;
  std::optional<Partition> ensemble;
  std::optional<double> ensemble_ari;
  std::vector<std::string> written;  // files (re)written by this invocation, relative to run_dir
};

/// Runs the pipeline up to `last` into cfg.output_dir. Outputs are staged in
/// <run>/partial and promoted on success; on failure the partial directory is
/// kept. Unchanged files are not rewritten. The run directory is locked for
/// the duration. Throws StageError.
PipelineResult run_pipeline(const RunConfig& cfg, Stage last = Stage::kFull);

/// Loads, segments, scores and embeds every event, reusing the cached
/// sentence files under cfg.output_dir when their key matches.
std::vector<ScoredEvent> load_scored_events(const RunConfig& cfg);

/// Writes the sweep surfaces and edge counts under <run>/sweep.
SweepResult run_sweep_command(const RunConfig& cfg);

/// Directory-safe form of an event id.
std::string event_dir_name(const std::string& event_id);

/// Scored sentences as written to <event>/sentences.jsonl: a header with the
/// cache key followed by one record per sentence.
std::string serialize_scored(const std::string& cache_key, const std::vector<ScoredSentence>& sentences);
std::optional<std::vector<ScoredSentence>> deserialize_scored(const std::string& text, const std::string& cache_key);

}  // namespace textnet
