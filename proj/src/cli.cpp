#include "litmeta/cli.hpp"

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "litmeta/error.hpp"
#include "litmeta/log.hpp"
#include "litmeta/pipeline.hpp"

namespace litmeta {

namespace {

struct CliOverrides {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> weight;
  std::optional<double> enter_p;
  std::optional<double> remove_p;
  std::optional<double> min_gain;
};

void add_common(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--config", o.config_path, "pipeline config JSON")->required();
  cmd->add_option("--out", o.out_dir, "output directory (overrides config)");
  cmd->add_option("--seed", o.seed, "random seed (overrides config)");
  cmd->add_option("--weight", o.weight, "coupling weight kind: raw|normalized");
  cmd->add_option("--enter-p", o.enter_p, "stepwise entry p-value threshold");
  cmd->add_option("--remove-p", o.remove_p, "stepwise removal p-value threshold");
  cmd->add_option("--min-gain", o.min_gain, "louvain minimum modularity gain");
}

PipelineConfig load_config(const CliOverrides& o) {
  PipelineConfig config = PipelineConfig::from_json_file(o.config_path);
  if (o.out_dir) config.output_dir = *o.out_dir;
  if (o.seed) config.seed = *o.seed;
  if (o.weight) config.weight_kind = weight_kind_from_string(*o.weight);
  if (o.enter_p) config.enter_p = *o.enter_p;
  if (o.remove_p) config.remove_p = *o.remove_p;
  if (o.min_gain) config.min_gain = *o.min_gain;
  return config;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"literature mapping and meta-analysis pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("litmeta ") + kVersion);

  CliOverrides run_opts;
  std::string only_stage;
  CLI::App* run = app.add_subcommand("run", "run the full pipeline");
  add_common(run, run_opts);
  run->add_option("--stage", only_stage, "run a single named stage instead");

  // deque: CLI11 keeps references into the override structs
  std::deque<std::pair<CLI::App*, CliOverrides>> stage_cmds;
  for (const auto& stage : pipeline_stages()) {
    CLI::App* cmd = app.add_subcommand(stage, "run the " + stage + " stage");
    stage_cmds.emplace_back(cmd, CliOverrides{});
    add_common(cmd, stage_cmds.back().second);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      PipelineConfig config = load_config(run_opts);
      if (only_stage.empty())
        run_pipeline(config);
      else
        run_stage(config, only_stage);
      return 0;
    }
    for (size_t i = 0; i < stage_cmds.size(); ++i) {
      if (stage_cmds[i].first->parsed()) {
        run_stage(load_config(stage_cmds[i].second), pipeline_stages()[i]);
        return 0;
      }
    }
    return 2;
  } catch (const StageError& e) {
    log::error(e.what());
    return 3;
  } catch (const ValidationError& e) {
    log::error(e.what());
    return 2;
  } catch (const Error& e) {
    log::error(e.what());
    return 3;
  }
}

}  // namespace litmeta
