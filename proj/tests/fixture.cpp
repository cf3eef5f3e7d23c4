#include "fixture.hpp"

#include <cmath>
#include <stdexcept>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "litmeta/jsonl.hpp"
#include "litmeta/text.hpp"

namespace fixture {

using namespace litmeta;
namespace fs = std::filesystem;

Corpus random_corpus(std::mt19937_64& rng, int max_papers, int max_refs) {
  std::uniform_int_distribution<int> n_papers_d(1, max_papers);
  std::uniform_int_distribution<int> ref_d(0, max_refs - 1);
  int n_papers = n_papers_d(rng);
  std::uniform_int_distribution<int> refs_per_paper(0, std::max(1, max_refs / 4));

  Corpus corpus;
  for (int i = 0; i < n_papers; ++i) {
    Record r;
    r.id = "p" + std::to_string(i);
    r.title = "synthetic title " + std::to_string(i);
    int n_authors = 1 + static_cast<int>(rng() % 4);
    for (int a = 0; a < n_authors; ++a)
      r.authors.push_back("Author" + std::to_string(rng() % 50) + " Surname" +
                          std::to_string(rng() % 50));
    r.year = 2003 + static_cast<int>(rng() % 18);
    r.doc_type = DocType::quantitative;
    r.published = rng() % 2 == 0;
    r.global_citations = static_cast<long>(rng() % 200);
    int k = refs_per_paper(rng);
    for (int c = 0; c < k; ++c) r.references.insert("ref" + std::to_string(ref_d(rng)));
    corpus.records.push_back(std::move(r));
  }
  return corpus;
}

std::vector<EffectRecord> random_effects(std::mt19937_64& rng, int k, int n_studies,
                                         int n_clusters) {
  std::vector<EffectRecord> effects;
  std::normal_distribution<double> t_d(0.5, 1.5);
  std::uniform_int_distribution<long> df_d(20, 2000);
  for (int i = 0; i < k; ++i) {
    int study = static_cast<int>(rng() % std::max(1, n_studies));
    EffectRecord e = EffectRecord::make(
        "s" + std::to_string(study), "e" + std::to_string(i), t_d(rng), df_d(rng),
        rng() % 2 == 0 ? Onset::slow : Onset::fast);
    e.cluster = n_clusters > 0 ? study % n_clusters : -1;
    effects.push_back(std::move(e));
  }
  return effects;
}

namespace {

struct BlockPlan {
  int papers;
  int pool_size;    // block-private reference keys
  int window;       // refs per paper from the block pool
  int stride;
};

// splitmix64; keeps fixture bytes identical across standard libraries.
struct Rng {
  std::uint64_t state;
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  std::uint64_t bounded(std::uint64_t n) { return next() % n; }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // Box-Muller on deterministic uniforms.
  double normal() {
    double u1 = 0.0;
    while (u1 <= 1e-12) u1 = unit();
    double u2 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
};

}  // namespace

Corpus paper_scale_corpus(const PaperScale& scale) {
  if (scale.blocks != 4) throw std::runtime_error("fixture: expects 4 blocks");
  // Every paper cites its block's 20-reference core (dense intra-block
  // coupling) plus a sliding window over the rest of the block pool
  // (stride * papers >= pool - core, so each pool key gets cited).
  const int core = 20;
  std::vector<BlockPlan> plan = {
      {51, 1800, 40, 35},
      {28, 1000, 40, 35},
      {37, 1300, 40, 35},
      {35, scale.references - 1800 - 1000 - 1300 - 100, 40, 35},
  };
  const int global_pool = 100;
  int paper_total = 0, ref_total = global_pool;
  for (const auto& b : plan) {
    paper_total += b.papers;
    ref_total += b.pool_size;
    if (b.papers * b.stride < b.pool_size - core || b.window < b.stride)
      throw std::runtime_error("fixture: block windows do not cover the pool");
  }
  if (paper_total != scale.papers || ref_total != scale.references)
    throw std::runtime_error("fixture: block plan does not match the scale");

  Rng rng{20260810};
  const char* doc_types[] = {"quantitative", "qualitative", "review", "theoretical",
                             "policy"};
  const char* levels[] = {"micro", "macro"};
  const char* units[] = {"household", "individual", "country", "territorial"};
  const char* corridors[] = {"internal", "international", "both"};
  const char* envs[] = {"climate_change", "natural_disasters", "both"};

  Corpus corpus;
  int global_index = 0;
  for (int b = 0; b < 4; ++b) {
    const BlockPlan& block = plan[b];
    for (int p = 0; p < block.papers; ++p, ++global_index) {
      Record r;
      r.id = "paper" + std::to_string(global_index);
      r.title = "study " + std::to_string(global_index) + " of environmental mobility";
      int n_authors = 1 + static_cast<int>(rng.bounded(4));
      for (int a = 0; a < n_authors; ++a)
        r.authors.push_back("Given" + std::to_string(rng.bounded(40)) + " Family" +
                            std::to_string(b * 40 + static_cast<int>(rng.bounded(40))));
      r.year = 2003 + static_cast<int>(rng.bounded(18));
      r.venue = "journal " + std::to_string(rng.bounded(12));
      // Mostly quantitative, echoing the corpus composition.
      std::uint64_t roll = rng.bounded(100);
      r.doc_type = doc_type_from_string(
          doc_types[roll < 76 ? 0 : (roll < 85 ? 1 : (roll < 93 ? 2 : (roll < 97 ? 3 : 4)))]);
      r.published = rng.bounded(100) < 80;
      r.global_citations = static_cast<long>(rng.bounded(250));
      r.impact_factor = r.published ? 0.5 + rng.unit() * 4.0 : 0.0;
      r.source = Source::scopus_export;
      r.keywords.insert(std::string("level:") + levels[rng.bounded(2)]);
      r.keywords.insert(std::string("unit:") + units[rng.bounded(4)]);
      r.keywords.insert(std::string("corridor:") + corridors[rng.bounded(3)]);
      r.keywords.insert(std::string("env:") + envs[rng.bounded(3)]);
      r.keywords.insert("block:" + std::to_string(b));

      for (int k = 0; k < core; ++k)
        r.references.insert("b" + std::to_string(b) + "_ref" + std::to_string(k));
      int tail = block.pool_size - core;
      int start = (p * block.stride) % tail;
      for (int k = 0; k < block.window; ++k) {
        int ref = core + (start + k) % tail;
        r.references.insert("b" + std::to_string(b) + "_ref" + std::to_string(ref));
      }
      // A couple of cross-block references from the shared global pool.
      r.references.insert("g_ref" + std::to_string(global_index % global_pool));
      r.references.insert("g_ref" +
                          std::to_string((global_index + 7) % global_pool));
      corpus.records.push_back(std::move(r));
    }
  }
  if (static_cast<int>(corpus.reference_universe().size()) != scale.references)
    throw std::runtime_error("fixture: reference universe size drifted");
  return corpus;
}

namespace {

const std::vector<std::string>& fixture_moderators() {
  static const std::vector<std::string> names = {
      "preferred_specification", "published", "impact_factor",
      "corridor_internal", "corridor_international", "corridor_urbanization",
      "meas_flows", "meas_stock",
      "origin_africa", "origin_asia", "origin_europe",
      "dest_high_income", "dest_upper_middle_income",
      "precipitation_levels", "precipitation_deviation",
      "temperature_levels", "temperature_deviation", "soil_degradation",
      "slow_time_lag",
      "fast_geophysical", "fast_meteorological", "fast_hydrological",
      "fast_occurrence", "fast_intensity", "fast_time_lag", "multiple_disasters",
      "src_census", "src_survey", "unit_household", "unit_country", "time_span",
      "est_panel", "est_linear", "est_iv",
      "ctrl_income", "ctrl_agriculture", "int_income", "slow_and_fast_included"};
  return names;
}

std::string effects_csv(const Corpus& corpus, const PaperScale& scale) {
  // Quantitative papers become studies; a deterministic subset reports each
  // onset, with row counts split as evenly as the totals allow.
  std::vector<const Record*> quantitative;
  for (const auto& r : corpus.records)
    if (r.doc_type == DocType::quantitative) quantitative.push_back(&r);
  if (static_cast<int>(quantitative.size()) < scale.slow_studies ||
      static_cast<int>(quantitative.size()) < scale.fast_studies + 10)
    throw std::runtime_error("fixture: not enough quantitative studies");

  Rng rng{971};
  std::ostringstream out;
  out << "study_id,estimate_id,onset,coef,coef_se,t,df";
  for (const auto& m : fixture_moderators()) out << ',' << m;
  out << '\n';

  auto block_of = [](const Record& r) {
    for (const auto& kw : r.keywords)
      if (kw.rfind("block:", 0) == 0) return std::stoi(kw.substr(6));
    return 0;
  };

  auto emit_rows = [&](const Record& study, const char* onset, long rows,
                       long first_estimate) {
    int block = block_of(study);
    // Cluster-dependent true effects, small like the field's.
    double true_pcc = (block - 1.5) * 0.004 + (onset[0] == 'f' ? 0.002 : 0.0);
    bool is_survey = rng.bounded(2) == 0;
    bool panel = rng.bounded(2) == 0;
    bool internal = rng.bounded(3) == 0;
    for (long e = 0; e < rows; ++e) {
      long df = 30 + static_cast<long>(rng.bounded(1970));
      double se = std::sqrt(1.0 / static_cast<double>(df));  // pre-pcc scale
      double pcc = true_pcc + se * rng.normal();
      double t = pcc / se;
      out << study.id << ",est" << (first_estimate + e) << ',' << onset << ",,,"
          << format_real(t) << ',' << df;
      for (const auto& m : fixture_moderators()) {
        double v = 0.0;
        if (m == "published") v = study.published ? 1.0 : 0.0;
        else if (m == "impact_factor") v = study.impact_factor;
        else if (m == "preferred_specification") v = e == 0 ? 1.0 : 0.0;
        else if (m == "corridor_internal") v = internal ? 1.0 : 0.0;
        else if (m == "corridor_international") v = internal ? 0.0 : (block % 2);
        else if (m == "meas_flows") v = block == 3 ? 1.0 : 0.0;
        else if (m == "origin_africa") v = block == 0 ? 1.0 : 0.0;
        else if (m == "origin_asia") v = block == 1 ? 1.0 : 0.0;
        else if (m == "dest_high_income") v = rng.bounded(4) == 0 ? 1.0 : 0.0;
        else if (m == "precipitation_levels") v = onset[0] == 's' && block % 2 == 0;
        else if (m == "temperature_levels") v = onset[0] == 's' && block % 2 == 1;
        else if (m == "slow_time_lag") v = onset[0] == 's' ? rng.bounded(3) : 0;
        else if (m == "fast_geophysical") v = onset[0] == 'f' && block % 2 == 0;
        else if (m == "fast_meteorological") v = onset[0] == 'f' && block % 2 == 1;
        else if (m == "fast_occurrence") v = onset[0] == 'f' ? 1.0 : 0.0;
        else if (m == "fast_time_lag") v = onset[0] == 'f' ? rng.bounded(2) : 0;
        else if (m == "src_census") v = is_survey ? 0.0 : 1.0;
        else if (m == "src_survey") v = is_survey ? 1.0 : 0.0;
        else if (m == "unit_household") v = is_survey ? 1.0 : 0.0;
        else if (m == "unit_country") v = is_survey ? 0.0 : 1.0;
        else if (m == "time_span") v = 5 + rng.bounded(30);
        else if (m == "est_panel") v = panel ? 1.0 : 0.0;
        else if (m == "est_linear") v = panel ? 0.0 : 1.0;
        else if (m == "ctrl_income") v = rng.bounded(2);
        else if (m == "ctrl_agriculture") v = rng.bounded(2);
        out << ',' << format_real(v);
      }
      out << '\n';
    }
  };

  long estimate_counter = 0;
  for (int s = 0; s < scale.slow_studies; ++s) {
    long rows = scale.slow_rows / scale.slow_studies +
                (s < scale.slow_rows % scale.slow_studies ? 1 : 0);
    emit_rows(*quantitative[s], "slow", rows, estimate_counter);
    estimate_counter += rows;
  }
  for (int s = 0; s < scale.fast_studies; ++s) {
    long rows = scale.fast_rows / scale.fast_studies +
                (s < scale.fast_rows % scale.fast_studies ? 1 : 0);
    // Overlap with slow studies mimics papers reporting both onsets.
    emit_rows(*quantitative[s + 10], "fast", rows, estimate_counter);
    estimate_counter += rows;
  }
  return out.str();
}

}  // namespace

std::string write_paper_scale_fixture(const std::string& dir, const PaperScale& scale) {
  fs::create_directories(dir);
  Corpus corpus = paper_scale_corpus(scale);

  {
    std::ofstream out(fs::path(dir) / "records.jsonl", std::ios::binary);
    write_jsonl(out, corpus.records);
  }
  {
    std::ofstream out(fs::path(dir) / "effects.csv", std::ios::binary);
    out << effects_csv(corpus, scale);
  }

  nlohmann::ordered_json config;
  config["inputs"]["records"] = {{{"path", "records.jsonl"},
                                  {"format", "jsonl"},
                                  {"source", "scopus_export"}}};
  config["inputs"]["effects"] = "effects.csv";
  config["screening"] = nlohmann::ordered_json::array();
  config["coupling"]["weight_kind"] = "normalized";
  config["louvain"]["min_gain"] = 1e-9;
  config["louvain"]["ordering"] = "stable";
  config["pooling"]["models"] = {"FEM", "REM"};
  config["metareg"]["enter_p"] = 0.05;
  config["metareg"]["remove_p"] = 0.10;
  config["metareg"]["cluster_robust"] = true;
  config["metareg"]["min_group_k"] = 10;
  config["output_dir"] = "out";
  config["seed"] = 0;

  std::string config_path = (fs::path(dir) / "config.json").string();
  std::ofstream out(config_path, std::ios::binary);
  out << config.dump(2) << '\n';
  return config_path;
}

}  // namespace fixture
