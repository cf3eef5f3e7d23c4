#pragma once

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace litmeta {

struct Corpus;
struct Partition;

enum class Onset { slow, fast };
const char* to_string(Onset o);
Onset onset_from_string(const std::string& s);

/// Partial correlation coefficient and its standard error from a t-value and
/// degrees of freedom: pcc = t/sqrt(t^2+df), se = sqrt((1-pcc^2)/df).
struct PccResult {
  double pcc;
  double se;
};
PccResult pcc_from_t(double t, long df);

/// Same conversion with t = coef / coef_se.
PccResult pcc_from_coef(double coef, double coef_se, long df);

/// Fisher z transform of a partial correlation. The standard error follows
/// the 1/sqrt(df-1) convention (documented in the README); requires df >= 2.
struct FisherZ {
  double z;
  double se_z;
};
FisherZ fisher_z(double pcc, long df);

/// Study/regression characteristics coded per estimate. Values are kept in
/// the order the effects CSV declares them; that column order is the
/// canonical moderator order used for tie-breaking everywhere downstream.
struct ModeratorVector {
  std::vector<std::string> names;  // shared across a loaded table
  std::vector<double> values;

  double value(const std::string& name) const;
  bool operator==(const ModeratorVector&) const = default;
};

/// Display grouping for regression tables; unknown names land in "other".
/// Groups are ordered the way moderated-regression reports print them.
const std::vector<std::pair<std::string, std::vector<std::string>>>&
moderator_taxonomy();
std::string moderator_group(const std::string& name);
int moderator_group_rank(const std::string& name);

/// True for taxonomy names that must hold 0/1 values.
bool moderator_is_dummy(const std::string& name);

/// Mutually exclusive dummy groups (corridor, measurement, unit, source).
const std::vector<std::vector<std::string>>& moderator_mutex_groups();

/// One reported estimate, standardized. pcc/se are always recomputed from
/// (t, df) so they can never drift out of sync.
struct EffectRecord {
  std::string study_id;
  std::string estimate_id;
  double t_value = 0.0;
  long df = 0;
  double pcc = 0.0;
  double se = 0.0;
  Onset onset = Onset::slow;
  int cluster = -1;  // community label; -1 = unassigned
  ModeratorVector moderators;
  std::optional<double> original_coef;  // source-scale metadata when supplied
  std::optional<double> original_coef_se;

  static EffectRecord make(std::string study_id, std::string estimate_id, double t,
                           long df, Onset onset);
};

struct EffectLoadResult {
  std::vector<EffectRecord> effects;
  std::vector<std::string> moderator_names;       // canonical order
  std::map<std::string, long> raw_counts;         // per onset, before validation
  std::map<std::string, long> validated_counts;   // per onset, after validation
  std::vector<std::pair<size_t, std::string>> rejected;  // (row number, reason)
};

/// Loads the effects CSV (schema in the README): header
/// `study_id,estimate_id,onset,coef,coef_se,t,df,<moderators...>`, exactly one
/// of {t} or {coef,coef_se} non-empty per row. Rows failing row-level checks
/// are rejected and recorded; unresolvable study ids abort with the full
/// offender list. Cluster labels come from the partition.
EffectLoadResult load_effects(std::istream& in, const Corpus& corpus,
                              const Partition& partition);

/// Round-trips validated effects (schema adds cluster,pcc,se columns).
std::string effects_to_csv(const EffectLoadResult& loaded);
EffectLoadResult effects_from_csv(std::istream& in);

/// Deterministic grouping used by pooling and the regression battery:
/// per onset, an overall group followed by clusters ascending, any
/// unassigned estimates last. Group names look like "slow_overall",
/// "fast_cluster_2", "slow_cluster_unassigned".
std::vector<std::pair<std::string, std::vector<EffectRecord>>>
group_by_onset_cluster(const std::vector<EffectRecord>& effects);

}  // namespace litmeta
