#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "litmeta/effects.hpp"

namespace litmeta {

enum class RegSpec { FAT_PET, PEESE, MULTIPLE_MRA };
enum class SeKind { classical, cluster_robust };
const char* to_string(RegSpec s);
const char* to_string(SeKind s);

struct Coefficient {
  std::string name;
  double estimate = 0.0;
  double se = 0.0;
  double p_value = 1.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct RegressionResult {
  RegSpec spec = RegSpec::FAT_PET;
  std::vector<Coefficient> coefficients;  // design-matrix order
  std::string weights_kind;
  SeKind se_kind = SeKind::classical;
  long n_obs = 0;
  long n_studies = 0;
  std::vector<std::string> included_moderators;
  std::vector<std::string> warnings;  // dropped columns etc., never silent

  const Coefficient& coef(const std::string& name) const;
};

/// Weighted least squares solved through a column-pivoted QR of sqrt(W)X;
/// the normal-equation inverse is recovered from the triangular factor, never
/// formed directly from X. Classical errors use sigma^2 (X'WX)^-1; with
/// cluster ids the CR1 sandwich (X'WX)^-1 [sum_g s_g s_g'] (X'WX)^-1 is
/// scaled by G/(G-1)*(N-1)/(N-K) and inference switches to a t distribution
/// with G-1 degrees of freedom.
///
/// Throws on rank deficiency (collinear columns listed by name) and on
/// fewer than 2 clusters under cluster-robust errors.
RegressionResult wls(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                     const std::vector<std::string>& names,
                     const Eigen::VectorXd& weights,
                     const std::optional<std::vector<int>>& cluster_ids);

/// Funnel-asymmetry / precision-effect test in WLS form:
/// t_i = fat_beta1 + pet_beta0 * (1/se_i). Requires k >= 3 estimates.
RegressionResult fat_pet(const std::vector<EffectRecord>& effects, bool cluster_robust);

/// Precision-effect estimate with standard error, WLS form without
/// intercept: t_i = peese_beta1 * se_i + peese_beta0 * (1/se_i).
RegressionResult peese(const std::vector<EffectRecord>& effects, bool cluster_robust);

/// Moderated meta-regression: the FAT-PET base plus each selected moderator
/// entering as m_i / se_i (the transformed-equation consequence of adding
/// moderators to the level equation). All-constant moderators are dropped
/// with a warning; remaining rank deficiencies drop moderator columns
/// right-to-left in canonical order, also with warnings.
RegressionResult multiple_mra(const std::vector<EffectRecord>& effects,
                              const std::vector<std::string>& moderators,
                              bool cluster_robust);

struct StepwiseTrace {
  enum class Action { add, drop };
  struct Step {
    int step = 0;
    Action action = Action::add;
    std::string moderator;
    double p_value = 1.0;
    double criterion = 0.0;  // threshold the p-value was compared against
  };
  std::vector<Step> steps;
};

struct StepwiseResult {
  RegressionResult model;
  StepwiseTrace trace;
};

/// Forward selection with backward pruning over the candidate moderators.
/// Adds the smallest-p candidate below enter_p (ties resolved by canonical
/// order), then drops included moderators above remove_p largest-first, until
/// a full round changes nothing. The FAT-PET base is always retained.
/// Defaults: enter_p 0.05, remove_p 0.10. Aborts after 10x|candidates| steps.
StepwiseResult stepwise(const std::vector<EffectRecord>& effects,
                        const std::vector<std::string>& candidate_moderators,
                        double enter_p, double remove_p, bool cluster_robust);

/// Publication-bias battery over (onset x {overall, clusters}) groups.
struct GroupReport {
  std::string name;
  long k = 0;
  long n_studies = 0;
  bool skipped = false;
  std::string skip_reason;
  std::optional<RegressionResult> fat_pet;
  std::optional<RegressionResult> peese;
  std::optional<RegressionResult> mra;
  std::optional<StepwiseTrace> trace;
  std::vector<std::string> errors;  // per-analysis failures, recorded not fatal
};

struct BatteryOptions {
  long min_group_k = 10;
  double enter_p = 0.05;
  double remove_p = 0.10;
  bool cluster_robust = true;
  bool run_mra = true;   // the bias stage runs FAT-PET/PEESE only
  bool run_bias = true;  // the mra stage runs stepwise only
};

std::vector<GroupReport> run_paper_battery(const std::vector<EffectRecord>& effects,
                                           const BatteryOptions& options = {});

/// Per-group CSV `term,estimate,se,p,ci_low,ci_high`. MRA rows are ordered by
/// taxonomy group, then canonical order within group.
std::string regression_to_csv(const RegressionResult& result);
std::string fatpet_peese_to_csv(const GroupReport& report);
std::string mra_to_csv(const GroupReport& report);

/// `pcc,se,precision` rows for external funnel plotting.
std::string funnel_data_csv(const std::vector<EffectRecord>& effects);

}  // namespace litmeta
