#include "litmeta/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fcntl.h>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <unistd.h>

#include "json.hpp"
#include "litmeta/bibliometrics.hpp"
#include "litmeta/csv.hpp"
#include "litmeta/effects.hpp"
#include "litmeta/error.hpp"
#include "litmeta/jsonl.hpp"
#include "litmeta/log.hpp"
#include "litmeta/metareg.hpp"
#include "litmeta/text.hpp"

namespace litmeta {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string resolve(const std::string& path, const std::string& base) {
  fs::path p(path);
  if (p.is_absolute() || base.empty()) return p.lexically_normal().string();
  return (fs::path(base) / p).lexically_normal().string();
}

PoolModel pool_model_from_string(const std::string& s) {
  if (s == "FEM") return PoolModel::FEM;
  if (s == "REM") return PoolModel::REM;
  throw ValidationError("unknown pooling model '" + s + "'");
}

NodeOrdering ordering_from_string(const std::string& s) {
  if (s == "stable") return NodeOrdering::stable;
  if (s == "shuffled") return NodeOrdering::shuffled;
  throw ValidationError("unknown louvain ordering '" + s + "'");
}

}  // namespace

PipelineConfig PipelineConfig::from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("config file not found: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str(), fs::path(path).parent_path().string());
}

PipelineConfig PipelineConfig::from_json_text(const std::string& text,
                                              const std::string& base_dir) {
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ValidationError("config is not valid JSON");

  PipelineConfig c;
  try {
    const auto& inputs = j.at("inputs");
    for (const auto& r : inputs.at("records")) {
      RecordsInput input;
      input.path = resolve(r.at("path").get<std::string>(), base_dir);
      input.format = record_format_from_string(r.value("format", "jsonl"));
      input.source = source_from_string(r.value("source", "manual"));
      c.records.push_back(std::move(input));
    }
    if (inputs.contains("effects"))
      c.effects_path = resolve(inputs.at("effects").get<std::string>(), base_dir);

    for (const auto& s : j.value("screening", ordered_json::array())) {
      ScreenStageConfig stage;
      stage.name = s.at("name").get<std::string>();
      for (const auto& id : s.at("exclude_ids"))
        stage.exclude_ids.insert(id.get<std::string>());
      stage.reason = s.value("reason", "");
      c.screening.push_back(std::move(stage));
    }

    if (j.contains("coupling"))
      c.weight_kind =
          weight_kind_from_string(j["coupling"].value("weight_kind", "normalized"));
    if (j.contains("louvain")) {
      c.min_gain = j["louvain"].value("min_gain", 1e-9);
      c.ordering = ordering_from_string(j["louvain"].value("ordering", "stable"));
    }
    if (j.contains("pooling") && j["pooling"].contains("models")) {
      c.models.clear();
      for (const auto& m : j["pooling"]["models"])
        c.models.push_back(pool_model_from_string(m.get<std::string>()));
    }
    if (j.contains("metareg")) {
      const auto& m = j["metareg"];
      c.enter_p = m.value("enter_p", 0.05);
      c.remove_p = m.value("remove_p", 0.10);
      c.cluster_robust = m.value("cluster_robust", true);
      c.min_group_k = m.value("min_group_k", 10L);
    }
    c.output_dir = resolve(j.value("output_dir", "out"), base_dir);
    c.seed = j.value("seed", 0ull);
  } catch (const ordered_json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

void PipelineConfig::validate() const {
  if (records.empty()) throw ValidationError("config: no records inputs given");
  for (const auto& r : records)
    if (!fs::exists(r.path))
      throw ValidationError("config: records file not found: " + r.path);
  if (effects_path.empty())
    throw ValidationError("config: inputs.effects is required");
  if (!fs::exists(effects_path))
    throw ValidationError("config: effects file not found: " + effects_path);
  if (!(min_gain > 0.0)) throw ValidationError("config: louvain.min_gain must be > 0");
  if (!(enter_p > 0.0 && enter_p <= remove_p && remove_p < 1.0))
    throw ValidationError("config: need 0 < enter_p <= remove_p < 1");
  if (min_group_k < 3)
    throw ValidationError("config: metareg.min_group_k must be >= 3");
  if (models.empty()) throw ValidationError("config: pooling.models is empty");
  if (output_dir.empty()) throw ValidationError("config: output_dir is empty");
  std::set<std::string> names;
  for (const auto& s : screening) {
    if (s.name.empty()) throw ValidationError("config: screening stage without a name");
    if (!names.insert(s.name).second)
      throw ValidationError("config: duplicate screening stage '" + s.name + "'");
  }
}

namespace {

ordered_json config_echo(const PipelineConfig& c) {
  ordered_json j;
  ordered_json records = ordered_json::array();
  for (const auto& r : c.records) {
    ordered_json rec;
    rec["path"] = r.path;
    rec["format"] = r.format == RecordFormat::bibtex_subset ? "bibtex" : "jsonl";
    rec["source"] = to_string(r.source);
    records.push_back(rec);
  }
  j["inputs"]["records"] = records;
  j["inputs"]["effects"] = c.effects_path;
  ordered_json screening = ordered_json::array();
  for (const auto& s : c.screening) {
    ordered_json stage;
    stage["name"] = s.name;
    stage["exclude_ids"] = s.exclude_ids;
    stage["reason"] = s.reason;
    screening.push_back(stage);
  }
  j["screening"] = screening;
  j["coupling"]["weight_kind"] = to_string(c.weight_kind);
  j["louvain"]["min_gain"] = c.min_gain;
  j["louvain"]["ordering"] =
      c.ordering == NodeOrdering::stable ? "stable" : "shuffled";
  ordered_json models = ordered_json::array();
  for (PoolModel m : c.models) models.push_back(to_string(m));
  j["pooling"]["models"] = models;
  j["metareg"]["enter_p"] = c.enter_p;
  j["metareg"]["remove_p"] = c.remove_p;
  j["metareg"]["cluster_robust"] = c.cluster_robust;
  j["metareg"]["min_group_k"] = c.min_group_k;
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  return j;
}

std::string utc_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc;
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

/// Exclusive lock on the output directory; one pipeline per directory.
class DirLock {
public:
  explicit DirLock(const fs::path& dir) : path_(dir / ".litmeta.lock") {
    fs::create_directories(dir);
    int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0)
      throw ValidationError("output directory is locked by another run (" +
                            path_.string() + " exists)");
    std::string pid = std::to_string(::getpid()) + "\n";
    ssize_t written = ::write(fd, pid.data(), pid.size());
    (void)written;
    ::close(fd);
  }
  ~DirLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

private:
  fs::path path_;
};

class StageContext {
public:
  StageContext(const PipelineConfig& config, ordered_json& manifest)
      : config_(config), out_dir_(config.output_dir), manifest_(manifest) {}

  void begin_stage(const std::string& name) {
    stage_ = name;
    written_.clear();
    manifest_["stages"][name] = ordered_json::object();
    manifest_["stages"][name]["outputs"] = ordered_json::object();
    manifest_["stages"][name]["counts"] = ordered_json::object();
  }

  const PipelineConfig& config() const { return config_; }

  void write_artifact(const std::string& rel, const std::string& content) {
    fs::path full = out_dir_ / rel;
    fs::create_directories(full.parent_path());
    std::ofstream out(full, std::ios::binary | std::ios::trunc);
    if (!out) throw StageError(stage_, "cannot write " + full.string());
    out << content;
    out.close();
    char hash[24];
    std::snprintf(hash, sizeof hash, "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(content)));
    manifest_["stages"][stage_]["outputs"][rel] = hash;
    written_.push_back(rel);
  }

  std::string read_artifact(const std::string& rel) const {
    fs::path full = out_dir_ / rel;
    std::ifstream in(full, std::ios::binary);
    if (!in)
      throw StageError(stage_, "missing prior-stage artifact " + full.string() +
                                   "; run the producing stage first");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }

  std::string read_input(const std::string& path) const {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StageError(stage_, "cannot read input " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }

  template <typename T>
  void count(const std::string& key, const T& value) {
    manifest_["stages"][stage_]["counts"][key] = value;
  }

  void note(const std::string& key, const ordered_json& value) {
    manifest_["stages"][stage_]["counts"][key] = value;
  }

  /// Moves this stage's partial outputs under quarantine/<stage>/.
  void quarantine() {
    for (const auto& rel : written_) {
      fs::path src = out_dir_ / rel;
      fs::path dst = out_dir_ / "quarantine" / stage_ / rel;
      std::error_code ec;
      fs::create_directories(dst.parent_path(), ec);
      fs::rename(src, dst, ec);
      if (ec) fs::remove(src, ec);
    }
    manifest_["stages"].erase(stage_);
  }

private:
  const PipelineConfig& config_;
  fs::path out_dir_;
  ordered_json& manifest_;
  std::string stage_;
  std::vector<std::string> written_;
};

// ---- stage bodies ---------------------------------------------------------

void stage_ingest(StageContext& ctx) {
  std::vector<Record> all;
  ordered_json per_file = ordered_json::object();
  for (const auto& input : ctx.config().records) {
    std::istringstream in(ctx.read_input(input.path));
    auto records = parse_records(in, input.format, input.source);
    per_file[input.path] = records.size();
    all.insert(all.end(), records.begin(), records.end());
  }
  auto [corpus, removed] = dedupe(all);
  std::ostringstream jsonl;
  write_jsonl(jsonl, corpus.records);
  ctx.write_artifact("corpus_ingested.jsonl", jsonl.str());
  ctx.write_artifact("ledger_ingest.csv", corpus.ledger.to_csv());
  ctx.count("records_parsed", all.size());
  ctx.note("records_per_file", per_file);
  ctx.count("duplicates_removed", removed.size());
  ctx.count("records_after_dedupe", corpus.records.size());
}

void stage_screen(StageContext& ctx) {
  Corpus corpus;
  {
    std::istringstream in(ctx.read_artifact("corpus_ingested.jsonl"));
    corpus.records = parse_jsonl(in);
  }
  corpus.ledger = ScreeningLedger::from_csv(ctx.read_artifact("ledger_ingest.csv"));
  for (const auto& stage : ctx.config().screening)
    corpus = screen(corpus, stage.name, stage.exclude_ids, stage.reason);
  std::ostringstream jsonl;
  write_jsonl(jsonl, corpus.records);
  ctx.write_artifact("corpus.jsonl", jsonl.str());
  ctx.write_artifact("ledger.csv", corpus.ledger.to_csv());
  ctx.count("screening_stages", ctx.config().screening.size());
  ctx.count("records_final", corpus.records.size());
}

Corpus load_corpus(const StageContext& ctx) {
  Corpus corpus;
  std::istringstream in(ctx.read_artifact("corpus.jsonl"));
  corpus.records = parse_jsonl(in);
  return corpus;
}

void stage_couple(StageContext& ctx) {
  Corpus corpus = load_corpus(ctx);
  IncidenceMatrix incidence = build_incidence(corpus);
  CouplingGraph graph = coupling_graph(incidence);
  ctx.write_artifact("graph.tsv", graph_to_tsv(graph));
  ctx.write_artifact("graph.graphml", graph_to_graphml(graph));
  GraphStats stats = graph_stats(graph);
  ctx.count("papers", incidence.n_rows());
  ctx.count("references", incidence.n_cols());
  ctx.count("incidence_ones", incidence.n_ones());
  ctx.count("nodes", stats.nodes);
  ctx.count("edges", stats.edges);
  ctx.count("isolated_nodes", stats.isolated_nodes);
  ctx.count("max_raw_weight", stats.max_raw_weight);
  log::info("couple: " + std::to_string(stats.edges) + " edges, max shared references " +
            std::to_string(stats.max_raw_weight));
}

CouplingGraph load_graph(const StageContext& ctx, const Corpus& corpus) {
  std::vector<std::string> node_ids;
  std::vector<long> self_counts;
  for (const auto& r : corpus.records) {
    node_ids.push_back(r.id);
    self_counts.push_back(static_cast<long>(r.references.size()));
  }
  return graph_from_tsv(node_ids, self_counts, ctx.read_artifact("graph.tsv"));
}

void stage_cluster(StageContext& ctx) {
  Corpus corpus = load_corpus(ctx);
  CouplingGraph graph = load_graph(ctx, corpus);
  LouvainOptions options;
  options.weight_kind = ctx.config().weight_kind;
  options.min_gain = ctx.config().min_gain;
  options.ordering = ctx.config().ordering;
  options.seed = ctx.config().seed;
  Partition partition = louvain(graph, options);
  ctx.write_artifact("partition.csv", partition.to_csv());
  auto profiles = profile_clusters(corpus, partition);
  ctx.write_artifact("cluster_profiles.json", cluster_profiles_to_json(profiles));
  int n_comm = 0;
  for (const auto& [id, label] : partition.assignment)
    n_comm = std::max(n_comm, label + 1);
  ctx.count("communities", n_comm);
  ctx.count("modularity", partition.modularity);
  ctx.count("passes", partition.passes);
  ctx.count("isolated_singletons", partition.isolated_nodes.size());
}

void stage_biblio(StageContext& ctx) {
  Corpus corpus = load_corpus(ctx);
  ctx.write_artifact("bibliometrics.json", bibliometrics_report(corpus));
  ctx.count("documents", corpus.records.size());
}

void stage_effects(StageContext& ctx) {
  Corpus corpus = load_corpus(ctx);
  Partition partition = Partition::from_csv(ctx.read_artifact("partition.csv"));
  std::istringstream in(ctx.read_input(ctx.config().effects_path));
  EffectLoadResult loaded = load_effects(in, corpus, partition);
  ctx.write_artifact("effects_validated.csv", effects_to_csv(loaded));
  ctx.note("raw_counts", loaded.raw_counts);
  ctx.note("validated_counts", loaded.validated_counts);
  ctx.count("rejected_rows", loaded.rejected.size());
  ordered_json rejected = ordered_json::array();
  for (const auto& [line, why] : loaded.rejected) {
    ordered_json r;
    r["line"] = line;
    r["reason"] = why;
    rejected.push_back(r);
  }
  ctx.note("rejected", rejected);
}

EffectLoadResult load_validated_effects(const StageContext& ctx) {
  std::istringstream in(ctx.read_artifact("effects_validated.csv"));
  return effects_from_csv(in);
}

void stage_pool(StageContext& ctx) {
  EffectLoadResult loaded = load_validated_effects(ctx);
  GroupedPooling grouped = pool_by_cluster(loaded.effects, ctx.config().models);
  ctx.write_artifact("pooling.csv", pooling_to_csv(grouped));
  ctx.write_artifact("boxplot_data.csv", boxplot_data_csv(loaded.effects));
  ctx.count("pooled_rows", grouped.rows.size());
  ordered_json skipped = ordered_json::array();
  for (const auto& [group, why] : grouped.skipped) {
    ordered_json s;
    s["group"] = group;
    s["reason"] = why;
    skipped.push_back(s);
  }
  ctx.note("skipped_groups", skipped);
}

ordered_json battery_manifest(const std::vector<GroupReport>& reports,
                              bool with_trace) {
  ordered_json groups = ordered_json::array();
  for (const auto& r : reports) {
    ordered_json g;
    g["group"] = r.name;
    g["k"] = r.k;
    g["n_studies"] = r.n_studies;
    g["skipped"] = r.skipped;
    if (r.skipped) g["skip_reason"] = r.skip_reason;
    if (!r.errors.empty()) g["errors"] = r.errors;
    if (with_trace && r.mra) {
      g["included_moderators"] = r.mra->included_moderators;
      g["warnings"] = r.mra->warnings;
      ordered_json steps = ordered_json::array();
      if (r.trace) {
        for (const auto& s : r.trace->steps) {
          ordered_json step;
          step["step"] = s.step;
          step["action"] = s.action == StepwiseTrace::Action::add ? "add" : "drop";
          step["moderator"] = s.moderator;
          step["p_value"] = s.p_value;
          step["criterion"] = s.criterion;
          steps.push_back(step);
        }
      }
      g["trace"] = steps;
    }
    groups.push_back(g);
  }
  ordered_json j;
  j["groups"] = groups;
  return j;
}

void stage_bias(StageContext& ctx) {
  EffectLoadResult loaded = load_validated_effects(ctx);
  BatteryOptions options;
  options.min_group_k = ctx.config().min_group_k;
  options.cluster_robust = ctx.config().cluster_robust;
  options.run_mra = false;
  auto reports = run_paper_battery(loaded.effects, options);
  ctx.write_artifact("funnel_data.csv", funnel_data_csv(loaded.effects));
  long run = 0;
  for (const auto& r : reports) {
    if (r.skipped) continue;
    ctx.write_artifact("fatpet_peese/" + r.name + ".csv", fatpet_peese_to_csv(r));
    ++run;
  }
  ctx.write_artifact("fatpet_peese/battery.json",
                     battery_manifest(reports, /*with_trace=*/false).dump(2) + "\n");
  ctx.count("groups_run", run);
  ctx.count("groups_total", reports.size());
}

void stage_mra(StageContext& ctx) {
  EffectLoadResult loaded = load_validated_effects(ctx);
  BatteryOptions options;
  options.min_group_k = ctx.config().min_group_k;
  options.enter_p = ctx.config().enter_p;
  options.remove_p = ctx.config().remove_p;
  options.cluster_robust = ctx.config().cluster_robust;
  options.run_bias = false;
  auto reports = run_paper_battery(loaded.effects, options);
  long run = 0;
  for (const auto& r : reports) {
    if (r.skipped) continue;
    ctx.write_artifact("mra/" + r.name + ".csv", mra_to_csv(r));
    ++run;
  }
  ctx.write_artifact("mra/battery.json",
                     battery_manifest(reports, /*with_trace=*/true).dump(2) + "\n");
  ctx.count("groups_run", run);
  ctx.count("groups_total", reports.size());
}

using StageFn = void (*)(StageContext&);

const std::vector<std::pair<std::string, StageFn>>& stage_table() {
  static const std::vector<std::pair<std::string, StageFn>> stages = {
      {"ingest", stage_ingest}, {"screen", stage_screen}, {"couple", stage_couple},
      {"cluster", stage_cluster}, {"biblio", stage_biblio},
      {"effects", stage_effects}, {"pool", stage_pool}, {"bias", stage_bias},
      {"mra", stage_mra},
  };
  return stages;
}

ordered_json load_or_init_manifest(const PipelineConfig& config) {
  fs::path path = fs::path(config.output_dir) / "manifest.json";
  if (fs::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    ordered_json j = ordered_json::parse(buf.str(), nullptr, false);
    if (!j.is_discarded()) {
      j["config"] = config_echo(config);
      return j;
    }
  }
  ordered_json j;
  j["tool"] = "litmeta";
  j["version"] = kVersion;
  j["config"] = config_echo(config);
  j["generated_at"] = "";
  j["stages"] = ordered_json::object();
  return j;
}

void write_manifest(const PipelineConfig& config, ordered_json& manifest) {
  manifest["generated_at"] = utc_now();
  fs::path path = fs::path(config.output_dir) / "manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << manifest.dump(2) << '\n';
}

void run_one(StageContext& ctx, ordered_json& manifest, const PipelineConfig& config,
             const std::string& name, StageFn fn) {
  ctx.begin_stage(name);
  log::info("stage " + name);
  try {
    fn(ctx);
  } catch (const StageError&) {
    ctx.quarantine();
    write_manifest(config, manifest);
    throw;
  } catch (const std::exception& e) {
    ctx.quarantine();
    write_manifest(config, manifest);
    throw StageError(name, e.what());
  }
  write_manifest(config, manifest);
}

}  // namespace

const std::vector<std::string>& pipeline_stages() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : stage_table()) out.push_back(name);
    return out;
  }();
  return names;
}

void run_pipeline(const PipelineConfig& config) {
  config.validate();
  DirLock lock{fs::path(config.output_dir)};
  ordered_json manifest = load_or_init_manifest(config);
  manifest["stages"] = ordered_json::object();  // full runs start clean
  StageContext ctx(config, manifest);
  for (const auto& [name, fn] : stage_table()) run_one(ctx, manifest, config, name, fn);
}

void run_stage(const PipelineConfig& config, const std::string& stage) {
  config.validate();
  for (const auto& [name, fn] : stage_table()) {
    if (name == stage) {
      DirLock lock{fs::path(config.output_dir)};
      ordered_json manifest = load_or_init_manifest(config);
      StageContext ctx(config, manifest);
      run_one(ctx, manifest, config, name, fn);
      return;
    }
  }
  throw ValidationError("unknown stage '" + stage + "'; stages are: " + [] {
    std::string s;
    for (const auto& n : pipeline_stages()) s += n + " ";
    return s;
  }());
}

}  // namespace litmeta
