#pragma once

#include <map>
#include <string>
#include <vector>

#include "litmeta/effects.hpp"

namespace litmeta {

enum class PoolModel { FEM, REM };
const char* to_string(PoolModel m);

struct PooledResult {
  PoolModel model = PoolModel::FEM;
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double Q = 0.0;
  double Q_pvalue = 1.0;
  double I2 = 0.0;     // percent
  double tau2 = 0.0;   // 0 under FEM
  long k = 0;          // estimate count
  long n_studies = 0;
};

struct QStatistic {
  double Q = 0.0;
  long df = 0;
  double p_value = 1.0;
};

/// Homogeneity test: Q = sum w_i (pcc_i - mean_FEM)^2 with w = 1/se^2,
/// referred to chi-squared with k-1 degrees of freedom.
QStatistic q_statistic(const std::vector<EffectRecord>& effects);

/// I^2 = max(0, (Q - (k-1)) / Q) * 100; 0 when Q = 0.
double i_squared(double Q, long k);

/// Inverse-variance pooling. REM uses DerSimonian-Laird tau^2 (method of
/// moments, computed from FEM weights). 95% CI uses the pinned normal
/// critical value 1.959964. Requires k >= 2.
PooledResult pool(const std::vector<EffectRecord>& effects, PoolModel model);

/// Grouped pooling: one result per (onset, cluster) plus an overall row per
/// onset, for every requested model. Groups with k < 2 are skipped and
/// recorded, never fatal.
struct GroupedPooling {
  struct Row {
    std::string group;  // e.g. "slow_overall", "fast_cluster_2"
    PooledResult result;
  };
  std::vector<Row> rows;
  std::vector<std::pair<std::string, std::string>> skipped;  // (group, reason)
};

GroupedPooling pool_by_cluster(const std::vector<EffectRecord>& effects,
                               const std::vector<PoolModel>& models);

/// CSV mirroring the pooled summary table:
/// `group,model,mean,ci_low,ci_high,I2,Q_pvalue,k,n_studies`.
std::string pooling_to_csv(const GroupedPooling& grouped);

/// Per-study five-number summaries of pcc:
/// `onset,study_id,min,q1,median,q3,max,n` (type-7 quartiles).
std::string boxplot_data_csv(const std::vector<EffectRecord>& effects);

}  // namespace litmeta
