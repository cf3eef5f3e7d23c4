#include "litmeta/effects.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "litmeta/community.hpp"
#include "litmeta/csv.hpp"
#include "litmeta/error.hpp"
#include "litmeta/record.hpp"
#include "litmeta/text.hpp"

namespace litmeta {

const char* to_string(Onset o) { return o == Onset::slow ? "slow" : "fast"; }

Onset onset_from_string(const std::string& s) {
  if (s == "slow") return Onset::slow;
  if (s == "fast") return Onset::fast;
  throw ValidationError("unknown onset '" + s + "'");
}

PccResult pcc_from_t(double t, long df) {
  if (df < 1) throw ValidationError("pcc_from_t: df must be >= 1");
  if (!std::isfinite(t)) throw ValidationError("pcc_from_t: t must be finite");
  double pcc = t / std::sqrt(t * t + static_cast<double>(df));
  double se = std::sqrt((1.0 - pcc * pcc) / static_cast<double>(df));
  return {pcc, se};
}

PccResult pcc_from_coef(double coef, double coef_se, long df) {
  if (!(coef_se > 0.0)) throw ValidationError("pcc_from_coef: coef_se must be > 0");
  return pcc_from_t(coef / coef_se, df);
}

FisherZ fisher_z(double pcc, long df) {
  if (!(std::fabs(pcc) < 1.0)) throw ValidationError("fisher_z: |pcc| must be < 1");
  if (df < 2) throw ValidationError("fisher_z: df must be >= 2");
  return {0.5 * std::log((1.0 + pcc) / (1.0 - pcc)),
          1.0 / std::sqrt(static_cast<double>(df - 1))};
}

double ModeratorVector::value(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return values[i];
  throw ValidationError("moderator '" + name + "' not present");
}

const std::vector<std::pair<std::string, std::vector<std::string>>>&
moderator_taxonomy() {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> groups = {
      {"paper_features", {"preferred_specification", "published", "impact_factor"}},
      {"corridor", {"corridor_internal", "corridor_international",
                    "corridor_urbanization"}},
      {"measurement", {"meas_flows", "meas_stock"}},
      {"origin", {"origin_africa", "origin_asia", "origin_europe", "origin_lac",
                  "origin_mena", "origin_north_america"}},
      {"destination", {"dest_high_income", "dest_upper_middle_income",
                       "dest_lower_middle_income"}},
      {"slow_onset",
       {"precipitation_levels", "precipitation_deviation", "precipitation_anomaly",
        "temperature_levels", "temperature_deviation", "temperature_anomaly",
        "soil_degradation", "slow_time_lag"}},
      {"fast_onset",
       {"fast_geophysical", "fast_meteorological", "fast_hydrological",
        "fast_climatological", "fast_occurrence", "fast_frequency", "fast_intensity",
        "fast_duration", "fast_losses", "fast_time_lag", "multiple_disasters"}},
      {"sample",
       {"src_census", "src_survey", "src_official_statistics", "src_research_data",
        "unit_household", "unit_individual", "unit_country", "time_span"}},
      {"estimation", {"est_panel", "est_poisson", "est_linear", "est_iv", "est_logit"}},
      {"controls",
       {"ctrl_income", "ctrl_agriculture", "ctrl_conflict", "ctrl_political_stability",
        "ctrl_population", "ctrl_diaspora", "ctrl_past_migration", "ctrl_poverty",
        "ctrl_culture", "ctrl_geography", "ctrl_labor", "ctrl_urban",
        "ctrl_international_aid", "ctrl_education", "ctrl_environment",
        "ctrl_destination", "ctrl_origin", "slow_and_fast_included"}},
      {"interactions",
       {"int_income", "int_agriculture", "int_conflict", "int_political_stability",
        "int_population", "int_diaspora", "int_past_migration", "int_poverty",
        "int_culture", "int_geography", "int_labor", "int_urban",
        "int_international_aid", "int_education", "int_environment", "int_destination",
        "int_origin"}},
  };
  return groups;
}

std::string moderator_group(const std::string& name) {
  for (const auto& [group, names] : moderator_taxonomy())
    if (std::find(names.begin(), names.end(), name) != names.end()) return group;
  return "other";
}

int moderator_group_rank(const std::string& name) {
  const auto& groups = moderator_taxonomy();
  for (size_t g = 0; g < groups.size(); ++g)
    if (std::find(groups[g].second.begin(), groups[g].second.end(), name) !=
        groups[g].second.end())
      return static_cast<int>(g);
  return static_cast<int>(groups.size());  // "other" sorts last
}

bool moderator_is_dummy(const std::string& name) {
  static const std::set<std::string> continuous = {"impact_factor", "slow_time_lag",
                                                   "fast_time_lag", "time_span"};
  if (continuous.count(name)) return false;
  return moderator_group(name) != "other";
}

const std::vector<std::vector<std::string>>& moderator_mutex_groups() {
  static const std::vector<std::vector<std::string>> groups = {
      {"corridor_internal", "corridor_international", "corridor_urbanization"},
      {"meas_flows", "meas_stock"},
      {"unit_household", "unit_individual", "unit_country"},
      {"src_census", "src_survey", "src_official_statistics", "src_research_data"},
  };
  return groups;
}

EffectRecord EffectRecord::make(std::string study_id, std::string estimate_id, double t,
                                long df, Onset onset) {
  EffectRecord e;
  e.study_id = std::move(study_id);
  e.estimate_id = std::move(estimate_id);
  e.t_value = t;
  e.df = df;
  auto [pcc, se] = pcc_from_t(t, df);
  e.pcc = pcc;
  e.se = se;
  e.onset = onset;
  return e;
}

namespace {

struct ColumnMap {
  std::vector<std::string> moderators;
  size_t first_moderator = 7;
};

ColumnMap check_header(const std::vector<std::string>& header, bool with_cluster) {
  std::vector<std::string> fixed = {"study_id", "estimate_id", "onset",
                                    "coef",     "coef_se",     "t",
                                    "df"};
  if (with_cluster)
    fixed = {"study_id", "estimate_id", "onset", "cluster", "t", "df", "pcc", "se"};
  if (header.size() < fixed.size() ||
      !std::equal(fixed.begin(), fixed.end(), header.begin()))
    throw ValidationError("effects csv: header must start with '" +
                          [&] {
                            std::string s;
                            for (const auto& f : fixed) s += f + ",";
                            s.pop_back();
                            return s;
                          }() +
                          "'");
  ColumnMap map;
  map.first_moderator = fixed.size();
  std::set<std::string> seen;
  for (size_t i = fixed.size(); i < header.size(); ++i) {
    if (header[i].empty() || !seen.insert(header[i]).second)
      throw ValidationError("effects csv: duplicate or empty moderator column '" +
                            header[i] + "'");
    map.moderators.push_back(header[i]);
  }
  return map;
}

std::optional<double> parse_cell(const std::string& cell) {
  std::string t = trim(cell);
  if (t.empty()) return std::nullopt;
  size_t used = 0;
  double v = std::stod(t, &used);
  if (used != t.size()) throw ValidationError("not a number: '" + cell + "'");
  return v;
}

// Row-level moderator checks: dummies in {0,1}, finite values, and at most
// one active category per mutually exclusive group.
void validate_moderators(const ModeratorVector& m) {
  for (size_t i = 0; i < m.names.size(); ++i) {
    if (!std::isfinite(m.values[i]))
      throw ValidationError("moderator '" + m.names[i] + "' is not finite");
    if (moderator_is_dummy(m.names[i]) && m.values[i] != 0.0 && m.values[i] != 1.0)
      throw ValidationError("moderator '" + m.names[i] + "' must be 0 or 1, got " +
                            format_real(m.values[i]));
  }
  for (const auto& group : moderator_mutex_groups()) {
    int active = 0;
    for (const auto& name : group)
      for (size_t i = 0; i < m.names.size(); ++i)
        if (m.names[i] == name && m.values[i] == 1.0) ++active;
    if (active > 1)
      throw ValidationError("more than one active category in mutually exclusive group "
                            "containing '" + group.front() + "'");
  }
}

}  // namespace

EffectLoadResult load_effects(std::istream& in, const Corpus& corpus,
                              const Partition& partition) {
  auto rows = csv::read(in);
  if (rows.empty()) throw ValidationError("effects csv: empty stream");
  ColumnMap columns = check_header(rows[0], /*with_cluster=*/false);

  EffectLoadResult out;
  out.moderator_names = columns.moderators;
  out.raw_counts = {{"slow", 0}, {"fast", 0}};
  out.validated_counts = {{"slow", 0}, {"fast", 0}};

  std::set<std::string> unresolved;
  std::set<std::pair<std::string, std::string>> estimate_keys;

  for (size_t row_no = 1; row_no < rows.size(); ++row_no) {
    const auto& row = rows[row_no];
    size_t line = row_no + 1;
    auto reject = [&](const std::string& why) {
      out.rejected.emplace_back(line, why);
    };
    if (row.size() != columns.first_moderator + columns.moderators.size()) {
      reject("wrong field count");
      continue;
    }
    try {
      const std::string& study_id = row[0];
      const std::string& estimate_id = row[1];
      Onset onset = onset_from_string(row[2]);
      ++out.raw_counts[to_string(onset)];

      if (study_id.empty() || estimate_id.empty())
        throw ValidationError("empty study_id or estimate_id");
      if (!estimate_keys.emplace(study_id, estimate_id).second)
        throw ValidationError("duplicate estimate_id '" + estimate_id +
                              "' within study '" + study_id + "'");

      auto coef = parse_cell(row[3]);
      auto coef_se = parse_cell(row[4]);
      auto t = parse_cell(row[5]);
      auto df_cell = parse_cell(row[6]);
      if (!df_cell) throw ValidationError("missing df");
      double df_real = *df_cell;
      if (df_real < 1 || df_real != std::floor(df_real))
        throw ValidationError("df must be a positive integer");
      long df = static_cast<long>(df_real);

      bool has_t = t.has_value();
      bool has_coef = coef.has_value() || coef_se.has_value();
      if (has_t == has_coef)
        throw ValidationError(
            "exactly one of {t} or {coef,coef_se} must be provided");
      double t_value;
      if (has_t) {
        t_value = *t;
      } else {
        if (!coef || !coef_se) throw ValidationError("coef and coef_se must both be set");
        if (!(*coef_se > 0.0)) throw ValidationError("coef_se must be > 0");
        t_value = *coef / *coef_se;
      }

      if (!corpus.contains(study_id)) {
        unresolved.insert(study_id);
        continue;
      }

      EffectRecord e = EffectRecord::make(study_id, estimate_id, t_value, df, onset);
      if (std::fabs(e.pcc) >= 1.0) throw ValidationError("degenerate |pcc| = 1");
      if (!has_t) {
        e.original_coef = coef;
        e.original_coef_se = coef_se;
      }
      auto it = partition.assignment.find(study_id);
      e.cluster = it == partition.assignment.end() ? -1 : it->second;

      e.moderators.names = out.moderator_names;
      for (size_t k = 0; k < columns.moderators.size(); ++k) {
        auto v = parse_cell(row[columns.first_moderator + k]);
        e.moderators.values.push_back(v.value_or(0.0));
      }
      validate_moderators(e.moderators);

      ++out.validated_counts[to_string(e.onset)];
      out.effects.push_back(std::move(e));
    } catch (const Error& err) {
      reject(err.what());
    } catch (const std::exception& err) {
      reject(std::string("bad cell: ") + err.what());
    }
  }

  if (!unresolved.empty()) {
    std::string msg = "effects csv: study ids not present in the corpus:";
    for (const auto& id : unresolved) msg += " '" + id + "'";
    throw ValidationError(msg);
  }
  return out;
}

std::string effects_to_csv(const EffectLoadResult& loaded) {
  std::ostringstream out;
  std::vector<std::string> header = {"study_id", "estimate_id", "onset", "cluster",
                                     "t",        "df",          "pcc",   "se"};
  header.insert(header.end(), loaded.moderator_names.begin(),
                loaded.moderator_names.end());
  csv::write_row(out, header);
  for (const auto& e : loaded.effects) {
    std::vector<std::string> row = {
        e.study_id,
        e.estimate_id,
        to_string(e.onset),
        e.cluster < 0 ? "unassigned" : std::to_string(e.cluster),
        format_real(e.t_value),
        std::to_string(e.df),
        format_real(e.pcc),
        format_real(e.se)};
    for (double v : e.moderators.values) row.push_back(format_real(v));
    csv::write_row(out, row);
  }
  return out.str();
}

std::vector<std::pair<std::string, std::vector<EffectRecord>>>
group_by_onset_cluster(const std::vector<EffectRecord>& effects) {
  std::vector<std::pair<std::string, std::vector<EffectRecord>>> groups;
  for (Onset onset : {Onset::slow, Onset::fast}) {
    std::vector<EffectRecord> overall;
    std::map<int, std::vector<EffectRecord>> per_cluster;
    for (const auto& e : effects) {
      if (e.onset != onset) continue;
      overall.push_back(e);
      per_cluster[e.cluster].push_back(e);
    }
    if (overall.empty()) continue;
    std::string prefix = to_string(onset);
    groups.emplace_back(prefix + "_overall", std::move(overall));
    for (auto& [cluster, recs] : per_cluster)
      if (cluster >= 0)
        groups.emplace_back(prefix + "_cluster_" + std::to_string(cluster),
                            std::move(recs));
    if (auto it = per_cluster.find(-1); it != per_cluster.end())
      groups.emplace_back(prefix + "_cluster_unassigned", std::move(it->second));
  }
  return groups;
}

EffectLoadResult effects_from_csv(std::istream& in) {
  auto rows = csv::read(in);
  if (rows.empty()) throw ValidationError("effects csv: empty stream");
  ColumnMap columns = check_header(rows[0], /*with_cluster=*/true);

  EffectLoadResult out;
  out.moderator_names = columns.moderators;
  out.raw_counts = {{"slow", 0}, {"fast", 0}};
  out.validated_counts = {{"slow", 0}, {"fast", 0}};
  for (size_t row_no = 1; row_no < rows.size(); ++row_no) {
    const auto& row = rows[row_no];
    if (row.size() != columns.first_moderator + columns.moderators.size())
      throw ValidationError("validated effects csv: row " + std::to_string(row_no + 1) +
                            " has wrong field count");
    Onset onset = onset_from_string(row[2]);
    EffectRecord e = EffectRecord::make(row[0], row[1], std::stod(row[4]),
                                        std::stol(row[5]), onset);
    e.cluster = row[3] == "unassigned" ? -1 : std::stoi(row[3]);
    e.moderators.names = out.moderator_names;
    for (size_t k = 0; k < columns.moderators.size(); ++k)
      e.moderators.values.push_back(std::stod(row[columns.first_moderator + k]));
    ++out.raw_counts[to_string(onset)];
    ++out.validated_counts[to_string(onset)];
    out.effects.push_back(std::move(e));
  }
  return out;
}

}  // namespace litmeta
