#include "litmeta/pooling.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "litmeta/error.hpp"
#include "litmeta/numerics.hpp"
#include "litmeta/text.hpp"

namespace litmeta {

const char* to_string(PoolModel m) { return m == PoolModel::FEM ? "FEM" : "REM"; }

namespace {

void check_inputs(const std::vector<EffectRecord>& effects) {
  if (effects.size() < 2)
    throw ValidationError("pooling requires at least 2 estimates, got " +
                          std::to_string(effects.size()));
  for (const auto& e : effects)
    if (!(e.se > 0.0))
      throw ValidationError("estimate '" + e.study_id + "/" + e.estimate_id +
                            "' has non-positive se");
}

long count_studies(const std::vector<EffectRecord>& effects) {
  std::set<std::string> studies;
  for (const auto& e : effects) studies.insert(e.study_id);
  return static_cast<long>(studies.size());
}

}  // namespace

QStatistic q_statistic(const std::vector<EffectRecord>& effects) {
  check_inputs(effects);
  double sum_w = 0.0, sum_wy = 0.0;
  for (const auto& e : effects) {
    double w = 1.0 / (e.se * e.se);
    sum_w += w;
    sum_wy += w * e.pcc;
  }
  double mean = sum_wy / sum_w;
  double q = 0.0;
  for (const auto& e : effects) {
    double w = 1.0 / (e.se * e.se);
    q += w * (e.pcc - mean) * (e.pcc - mean);
  }
  long df = static_cast<long>(effects.size()) - 1;
  return {q, df, num::chi2_sf(q, static_cast<double>(df))};
}

double i_squared(double Q, long k) {
  if (k < 2) throw ValidationError("i_squared: k must be >= 2");
  if (Q < 0.0) throw ValidationError("i_squared: Q must be >= 0");
  if (Q == 0.0) return 0.0;
  return std::max(0.0, (Q - static_cast<double>(k - 1)) / Q) * 100.0;
}

PooledResult pool(const std::vector<EffectRecord>& effects, PoolModel model) {
  check_inputs(effects);
  QStatistic q = q_statistic(effects);
  const long k = static_cast<long>(effects.size());

  double tau2 = 0.0;
  if (model == PoolModel::REM) {
    // DerSimonian-Laird: tau2 = max(0, (Q - (k-1)) / (S1 - S2/S1)),
    // S1 = sum of FEM weights, S2 = sum of squared FEM weights.
    double s1 = 0.0, s2 = 0.0;
    for (const auto& e : effects) {
      double w = 1.0 / (e.se * e.se);
      s1 += w;
      s2 += w * w;
    }
    double denom = s1 - s2 / s1;
    tau2 = denom > 0.0
               ? std::max(0.0, (q.Q - static_cast<double>(k - 1)) / denom)
               : 0.0;
  }

  double sum_w = 0.0, sum_wy = 0.0;
  for (const auto& e : effects) {
    double w = 1.0 / (e.se * e.se + tau2);
    sum_w += w;
    sum_wy += w * e.pcc;
  }

  PooledResult r;
  r.model = model;
  r.mean = sum_wy / sum_w;
  double half_width = num::kZ975 * std::sqrt(1.0 / sum_w);
  r.ci_low = r.mean - half_width;
  r.ci_high = r.mean + half_width;
  r.Q = q.Q;
  r.Q_pvalue = q.p_value;
  r.I2 = i_squared(q.Q, k);
  r.tau2 = tau2;
  r.k = k;
  r.n_studies = count_studies(effects);
  return r;
}

GroupedPooling pool_by_cluster(const std::vector<EffectRecord>& effects,
                               const std::vector<PoolModel>& models) {
  GroupedPooling out;
  for (const auto& [name, recs] : group_by_onset_cluster(effects)) {
    if (recs.size() < 2) {
      out.skipped.emplace_back(name, "k = " + std::to_string(recs.size()) + " < 2");
      continue;
    }
    for (PoolModel model : models) out.rows.push_back({name, pool(recs, model)});
  }
  return out;
}

std::string pooling_to_csv(const GroupedPooling& grouped) {
  std::ostringstream out;
  out << "group,model,mean,ci_low,ci_high,I2,Q_pvalue,k,n_studies\n";
  for (const auto& row : grouped.rows) {
    const PooledResult& r = row.result;
    out << row.group << ',' << to_string(r.model) << ',' << format_real(r.mean) << ','
        << format_real(r.ci_low) << ',' << format_real(r.ci_high) << ','
        << format_real(r.I2) << ',' << format_real(r.Q_pvalue) << ',' << r.k << ','
        << r.n_studies << '\n';
  }
  return out.str();
}

namespace {

// Type-7 quantile (linear interpolation), matching the common default.
double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.size() == 1) return sorted[0];
  double pos = p * static_cast<double>(sorted.size() - 1);
  size_t lo = static_cast<size_t>(std::floor(pos));
  size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

std::string boxplot_data_csv(const std::vector<EffectRecord>& effects) {
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  for (const auto& e : effects)
    groups[{to_string(e.onset), e.study_id}].push_back(e.pcc);

  std::ostringstream out;
  out << "onset,study_id,min,q1,median,q3,max,n\n";
  for (auto& [key, values] : groups) {
    std::sort(values.begin(), values.end());
    out << key.first << ',' << key.second << ',' << format_real(values.front()) << ','
        << format_real(quantile_sorted(values, 0.25)) << ','
        << format_real(quantile_sorted(values, 0.5)) << ','
        << format_real(quantile_sorted(values, 0.75)) << ','
        << format_real(values.back()) << ',' << values.size() << '\n';
  }
  return out.str();
}

}  // namespace litmeta
