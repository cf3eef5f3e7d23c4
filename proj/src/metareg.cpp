#include "litmeta/metareg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "litmeta/error.hpp"
#include "litmeta/log.hpp"
#include "litmeta/numerics.hpp"
#include "litmeta/text.hpp"

namespace litmeta {

const char* to_string(RegSpec s) {
  switch (s) {
    case RegSpec::FAT_PET: return "FAT_PET";
    case RegSpec::PEESE: return "PEESE";
    case RegSpec::MULTIPLE_MRA: return "MULTIPLE_MRA";
  }
  return "?";
}

const char* to_string(SeKind s) {
  return s == SeKind::classical ? "classical" : "cluster_robust";
}

const Coefficient& RegressionResult::coef(const std::string& name) const {
  for (const auto& c : coefficients)
    if (c.name == name) return c;
  throw ValidationError("no coefficient named '" + name + "'");
}

RegressionResult wls(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                     const std::vector<std::string>& names,
                     const Eigen::VectorXd& weights,
                     const std::optional<std::vector<int>>& cluster_ids) {
  const Eigen::Index n = X.rows();
  const Eigen::Index k = X.cols();
  if (y.size() != n || weights.size() != n ||
      names.size() != static_cast<size_t>(k))
    throw ValidationError("wls: dimension mismatch between y, X, weights, names");
  if (n <= k)
    throw ValidationError("wls: need more observations than columns (n=" +
                          std::to_string(n) + ", k=" + std::to_string(k) + ")");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(weights[i] > 0.0)) throw ValidationError("wls: weights must be positive");

  Eigen::VectorXd sqrt_w = weights.array().sqrt();
  Eigen::MatrixXd B = sqrt_w.asDiagonal() * X;
  Eigen::VectorXd z = sqrt_w.asDiagonal() * y;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B);
  if (qr.rank() < k) {
    const auto& perm = qr.colsPermutation().indices();
    std::string cols;
    for (Eigen::Index p = qr.rank(); p < k; ++p)
      cols += (cols.empty() ? "" : ", ") + names[perm[p]];
    throw RankError("wls: design matrix is rank deficient; collinear columns: " + cols);
  }

  Eigen::VectorXd beta = qr.solve(z);
  Eigen::VectorXd resid = y - X * beta;

  // (X'WX)^-1 = P R^-1 R^-T P' from the pivoted factorization.
  Eigen::MatrixXd r_inv =
      qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(
          Eigen::MatrixXd::Identity(k, k));
  Eigen::MatrixXd a = qr.colsPermutation() * r_inv;
  Eigen::MatrixXd xtwx_inv = a * a.transpose();

  RegressionResult out;
  out.n_obs = static_cast<long>(n);

  Eigen::MatrixXd vcov;
  double crit;
  long dof_t = 0;
  if (cluster_ids) {
    if (cluster_ids->size() != static_cast<size_t>(n))
      throw ValidationError("wls: cluster_ids length mismatch");
    std::map<int, Eigen::VectorXd> scores;
    for (Eigen::Index i = 0; i < n; ++i) {
      auto [it, inserted] =
          scores.try_emplace((*cluster_ids)[i], Eigen::VectorXd::Zero(k));
      it->second += weights[i] * resid[i] * X.row(i).transpose();
      (void)inserted;
    }
    const long g = static_cast<long>(scores.size());
    if (g < 2)
      throw ValidationError("wls: cluster-robust errors require at least 2 clusters");
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
    for (const auto& [cid, s] : scores) {
      (void)cid;
      meat += s * s.transpose();
    }
    double correction = (static_cast<double>(g) / (g - 1.0)) *
                        ((n - 1.0) / static_cast<double>(n - k));
    vcov = correction * xtwx_inv * meat * xtwx_inv;
    out.se_kind = SeKind::cluster_robust;
    dof_t = g - 1;
    crit = num::student_t_quantile(0.975, static_cast<double>(dof_t));
  } else {
    double rss_w = (weights.array() * resid.array().square()).sum();
    double sigma2 = rss_w / static_cast<double>(n - k);
    vcov = sigma2 * xtwx_inv;
    out.se_kind = SeKind::classical;
    crit = num::kZ975;
  }

  for (Eigen::Index j = 0; j < k; ++j) {
    Coefficient c;
    c.name = names[j];
    c.estimate = beta[j];
    c.se = std::sqrt(std::max(0.0, vcov(j, j)));
    if (c.se > 0.0) {
      double stat = c.estimate / c.se;
      c.p_value = cluster_ids
                      ? num::student_t_two_sided_p(stat, static_cast<double>(dof_t))
                      : num::normal_two_sided_p(stat);
    } else {
      c.p_value = c.estimate == 0.0 ? 1.0 : 0.0;
    }
    c.ci_low = c.estimate - crit * c.se;
    c.ci_high = c.estimate + crit * c.se;
    out.coefficients.push_back(std::move(c));
  }
  return out;
}

namespace {

long count_studies(const std::vector<EffectRecord>& effects) {
  std::set<std::string> s;
  for (const auto& e : effects) s.insert(e.study_id);
  return static_cast<long>(s.size());
}

std::vector<int> study_cluster_ids(const std::vector<EffectRecord>& effects) {
  std::map<std::string, int> index;
  std::vector<int> ids;
  ids.reserve(effects.size());
  for (const auto& e : effects)
    ids.push_back(index.try_emplace(e.study_id, static_cast<int>(index.size()))
                      .first->second);
  return ids;
}

void check_effects(const std::vector<EffectRecord>& effects, size_t min_k,
                   const char* who) {
  if (effects.size() < min_k)
    throw ValidationError(std::string(who) + ": requires at least " +
                          std::to_string(min_k) + " estimates, got " +
                          std::to_string(effects.size()));
  for (const auto& e : effects)
    if (!(e.se > 0.0))
      throw ValidationError(std::string(who) + ": non-positive se for '" + e.study_id +
                            "/" + e.estimate_id + "'");
}

// Core design for the transformed equation; moderator m enters as m/se.
struct Design {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::vector<std::string> names;
  Eigen::VectorXd weights;
};

Design build_design(const std::vector<EffectRecord>& effects,
                    const std::vector<std::string>& moderators, bool peese_form) {
  const Eigen::Index n = static_cast<Eigen::Index>(effects.size());
  Design d;
  d.y.resize(n);
  d.X.resize(n, 2 + static_cast<Eigen::Index>(moderators.size()));
  d.weights = Eigen::VectorXd::Ones(n);

  if (peese_form) {
    d.names = {"peese_beta0", "peese_beta1"};
  } else {
    d.names = {"pet_beta0", "fat_beta1"};
  }
  d.names.insert(d.names.end(), moderators.begin(), moderators.end());

  for (Eigen::Index i = 0; i < n; ++i) {
    const EffectRecord& e = effects[i];
    d.y[i] = e.t_value;
    d.X(i, 0) = 1.0 / e.se;
    d.X(i, 1) = peese_form ? e.se : 1.0;
    for (size_t m = 0; m < moderators.size(); ++m)
      d.X(i, 2 + static_cast<Eigen::Index>(m)) =
          e.moderators.value(moderators[m]) / e.se;
  }
  return d;
}

RegressionResult fit_design(const Design& d, const std::vector<EffectRecord>& effects,
                            bool cluster_robust) {
  std::optional<std::vector<int>> clusters;
  if (cluster_robust) clusters = study_cluster_ids(effects);
  RegressionResult r = wls(d.y, d.X, d.names, d.weights, clusters);
  r.weights_kind = "1/se^2 (estimated in WLS-transformed form)";
  r.n_studies = count_studies(effects);
  return r;
}

}  // namespace

RegressionResult fat_pet(const std::vector<EffectRecord>& effects, bool cluster_robust) {
  check_effects(effects, 3, "fat_pet");
  RegressionResult r =
      fit_design(build_design(effects, {}, /*peese_form=*/false), effects,
                 cluster_robust);
  r.spec = RegSpec::FAT_PET;
  return r;
}

RegressionResult peese(const std::vector<EffectRecord>& effects, bool cluster_robust) {
  check_effects(effects, 3, "peese");
  RegressionResult r = fit_design(build_design(effects, {}, /*peese_form=*/true),
                                  effects, cluster_robust);
  r.spec = RegSpec::PEESE;
  return r;
}

RegressionResult multiple_mra(const std::vector<EffectRecord>& effects,
                              const std::vector<std::string>& moderators,
                              bool cluster_robust) {
  check_effects(effects, 3, "multiple_mra");
  for (const auto& name : moderators)
    for (const auto& e : effects)
      if (std::find(e.moderators.names.begin(), e.moderators.names.end(), name) ==
          e.moderators.names.end())
        throw ValidationError("multiple_mra: moderator '" + name +
                              "' missing from estimate '" + e.study_id + "/" +
                              e.estimate_id + "'");

  std::vector<std::string> active = moderators;
  std::vector<std::string> warnings;

  // Reference categories and other all-constant columns carry no contrast.
  for (auto it = active.begin(); it != active.end();) {
    double first = effects.front().moderators.value(*it);
    bool constant = std::all_of(effects.begin(), effects.end(), [&](const auto& e) {
      return e.moderators.value(*it) == first;
    });
    if (constant) {
      warnings.push_back("dropped all-constant moderator '" + *it + "'");
      it = active.erase(it);
    } else {
      ++it;
    }
  }

  while (true) {
    try {
      RegressionResult r = fit_design(build_design(effects, active, false), effects,
                                      cluster_robust);
      r.spec = RegSpec::MULTIPLE_MRA;
      r.included_moderators = active;
      r.warnings = warnings;
      for (const auto& w : r.warnings) log::warn("multiple_mra: " + w);
      return r;
    } catch (const RankError& err) {
      if (active.empty()) throw;
      warnings.push_back("dropped moderator '" + active.back() +
                         "' to restore full rank (" + err.what() + ")");
      active.pop_back();
    }
  }
}

StepwiseResult stepwise(const std::vector<EffectRecord>& effects,
                        const std::vector<std::string>& candidate_moderators,
                        double enter_p, double remove_p, bool cluster_robust) {
  if (!(enter_p > 0.0 && enter_p <= remove_p && remove_p < 1.0))
    throw ValidationError("stepwise: thresholds must satisfy 0 < enter_p <= remove_p < 1");
  check_effects(effects, 3, "stepwise");

  auto canonical_rank = [&](const std::string& name) {
    auto it = std::find(candidate_moderators.begin(), candidate_moderators.end(), name);
    return std::distance(candidate_moderators.begin(), it);
  };

  std::vector<std::string> included;
  StepwiseTrace trace;
  int step = 0;
  const int max_steps = 10 * std::max<int>(1, static_cast<int>(candidate_moderators.size()));

  auto overflow = [&]() {
    std::string msg = "stepwise: no convergence after " + std::to_string(max_steps) +
                      " steps; trace:";
    for (const auto& s : trace.steps)
      msg += std::string(" ") + (s.action == StepwiseTrace::Action::add ? "+" : "-") +
             s.moderator;
    throw Error(msg);
  };

  // Fits base + included (+ trial) with strict rank checking; a trial that
  // breaks the design is simply ineligible this round.
  auto try_fit = [&](const std::vector<std::string>& mods)
      -> std::optional<RegressionResult> {
    try {
      return fit_design(build_design(effects, mods, false), effects, cluster_robust);
    } catch (const RankError&) {
      return std::nullopt;
    } catch (const ValidationError&) {
      return std::nullopt;
    }
  };

  bool changed = true;
  while (changed) {
    changed = false;

    // Forward: best candidate below enter_p; canonical order breaks ties.
    std::string best_name;
    double best_p = 1.0;
    for (const auto& cand : candidate_moderators) {
      if (std::find(included.begin(), included.end(), cand) != included.end())
        continue;
      std::vector<std::string> mods = included;
      mods.push_back(cand);
      std::sort(mods.begin(), mods.end(), [&](const auto& a, const auto& b) {
        return canonical_rank(a) < canonical_rank(b);
      });
      auto fit = try_fit(mods);
      if (!fit) continue;
      double p = fit->coef(cand).p_value;
      if (p < best_p) {
        best_p = p;
        best_name = cand;
      }
    }
    if (!best_name.empty() && best_p < enter_p) {
      included.push_back(best_name);
      std::sort(included.begin(), included.end(), [&](const auto& a, const auto& b) {
        return canonical_rank(a) < canonical_rank(b);
      });
      trace.steps.push_back({++step, StepwiseTrace::Action::add, best_name, best_p,
                             enter_p});
      changed = true;
      if (step > max_steps) overflow();
    }

    // Backward: prune anything whose p drifted above remove_p, largest first.
    while (!included.empty()) {
      auto fit = try_fit(included);
      if (!fit) break;  // cannot happen for a design that was just fitted
      std::string worst_name;
      double worst_p = remove_p;
      for (const auto& name : included) {
        double p = fit->coef(name).p_value;
        if (p > worst_p) {
          worst_p = p;
          worst_name = name;
        }
      }
      if (worst_name.empty()) break;
      included.erase(std::find(included.begin(), included.end(), worst_name));
      trace.steps.push_back({++step, StepwiseTrace::Action::drop, worst_name, worst_p,
                             remove_p});
      changed = true;
      if (step > max_steps) overflow();
    }
  }

  StepwiseResult out;
  out.model = multiple_mra(effects, included, cluster_robust);
  out.trace = trace;
  return out;
}

std::vector<GroupReport> run_paper_battery(const std::vector<EffectRecord>& effects,
                                           const BatteryOptions& options) {
  std::vector<GroupReport> reports;
  for (const auto& [name, recs] : group_by_onset_cluster(effects)) {
    GroupReport report;
    report.name = name;
    report.k = static_cast<long>(recs.size());
    report.n_studies = count_studies(recs);
    if (report.k < options.min_group_k) {
      report.skipped = true;
      report.skip_reason = "k = " + std::to_string(report.k) + " < " +
                           std::to_string(options.min_group_k);
      reports.push_back(std::move(report));
      continue;
    }
    if (options.run_bias) {
      try {
        report.fat_pet = fat_pet(recs, options.cluster_robust);
      } catch (const Error& e) {
        report.errors.push_back(std::string("fat_pet: ") + e.what());
      }
      try {
        report.peese = peese(recs, options.cluster_robust);
      } catch (const Error& e) {
        report.errors.push_back(std::string("peese: ") + e.what());
      }
    }
    if (options.run_mra) {
      try {
        auto sw = stepwise(recs, recs.front().moderators.names, options.enter_p,
                           options.remove_p, options.cluster_robust);
        report.mra = std::move(sw.model);
        report.trace = std::move(sw.trace);
      } catch (const Error& e) {
        report.errors.push_back(std::string("stepwise: ") + e.what());
      }
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

namespace {

void append_coef_row(std::ostringstream& out, const Coefficient& c) {
  out << c.name << ',' << format_real(c.estimate) << ',' << format_real(c.se) << ','
      << format_real(c.p_value) << ',' << format_real(c.ci_low) << ','
      << format_real(c.ci_high) << '\n';
}

}  // namespace

std::string regression_to_csv(const RegressionResult& result) {
  std::ostringstream out;
  out << "term,estimate,se,p,ci_low,ci_high\n";
  for (const auto& c : result.coefficients) append_coef_row(out, c);
  return out.str();
}

std::string fatpet_peese_to_csv(const GroupReport& report) {
  std::ostringstream out;
  out << "term,estimate,se,p,ci_low,ci_high\n";
  if (report.fat_pet) {
    append_coef_row(out, report.fat_pet->coef("pet_beta0"));
    append_coef_row(out, report.fat_pet->coef("fat_beta1"));
  }
  if (report.peese) {
    append_coef_row(out, report.peese->coef("peese_beta0"));
    append_coef_row(out, report.peese->coef("peese_beta1"));
  }
  return out.str();
}

std::string mra_to_csv(const GroupReport& report) {
  std::ostringstream out;
  out << "term,estimate,se,p,ci_low,ci_high\n";
  if (!report.mra) return out.str();
  const RegressionResult& r = *report.mra;
  append_coef_row(out, r.coef("pet_beta0"));
  append_coef_row(out, r.coef("fat_beta1"));

  // Moderator rows grouped by taxonomy, canonical order within a group.
  std::vector<std::string> mods = r.included_moderators;
  std::stable_sort(mods.begin(), mods.end(), [](const auto& a, const auto& b) {
    return moderator_group_rank(a) < moderator_group_rank(b);
  });
  for (const auto& name : mods) append_coef_row(out, r.coef(name));
  return out.str();
}

std::string funnel_data_csv(const std::vector<EffectRecord>& effects) {
  std::ostringstream out;
  out << "pcc,se,precision\n";
  for (const auto& e : effects)
    out << format_real(e.pcc) << ',' << format_real(e.se) << ','
        << format_real(1.0 / e.se) << '\n';
  return out.str();
}

}  // namespace litmeta
