#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "litmeta/community.hpp"
#include "litmeta/corpus.hpp"
#include "litmeta/pooling.hpp"

namespace litmeta {

inline constexpr const char* kVersion = "0.1.0";

struct RecordsInput {
  std::string path;
  RecordFormat format = RecordFormat::jsonl;
  Source source = Source::manual;
};

struct ScreenStageConfig {
  std::string name;
  std::set<std::string> exclude_ids;
  std::string reason;
};

/// Everything a full run needs. Relative paths in the config file resolve
/// against the config file's directory.
struct PipelineConfig {
  std::vector<RecordsInput> records;
  std::string effects_path;
  std::vector<ScreenStageConfig> screening;
  WeightKind weight_kind = WeightKind::normalized;
  double min_gain = 1e-9;
  NodeOrdering ordering = NodeOrdering::stable;
  std::vector<PoolModel> models = {PoolModel::FEM, PoolModel::REM};
  double enter_p = 0.05;
  double remove_p = 0.10;
  bool cluster_robust = true;
  long min_group_k = 10;
  std::string output_dir = "out";
  std::uint64_t seed = 0;

  static PipelineConfig from_json_file(const std::string& path);
  static PipelineConfig from_json_text(const std::string& text,
                                       const std::string& base_dir);

  /// Checks referenced paths and threshold ranges; throws ValidationError.
  void validate() const;
};

/// Ordered stage names: ingest, screen, couple, cluster, biblio, effects,
/// pool, bias, mra.
const std::vector<std::string>& pipeline_stages();

/// Runs every stage in order, writing the artifact tree under output_dir.
/// Throws ValidationError before any stage runs, StageError on failure
/// (after moving the failing stage's partial outputs to quarantine/).
void run_pipeline(const PipelineConfig& config);

/// Runs a single stage against the artifacts already on disk.
void run_stage(const PipelineConfig& config, const std::string& stage);

}  // namespace litmeta
