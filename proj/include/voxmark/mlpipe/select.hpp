#ifndef VOXMARK_MLPIPE_SELECT_HPP
#define VOXMARK_MLPIPE_SELECT_HPP

#include <numeric>

#include "voxmark/mlpipe/models.hpp"

namespace voxmark::ml {

struct SelectionResult {
  std::vector<std::string> kept_columns;         // ranking order for rankers, column order for filters
  std::vector<std::string> ranking;              // ranking[i] has rank i + 1; empty for filters
  std::vector<std::pair<std::string, double>> scores;  // input column order

  std::optional<std::size_t> rank_of(std::string_view name) const {
    for (std::size_t i = 0; i < ranking.size(); ++i) {
      if (ranking[i] == name) return i + 1;
    }
    return std::nullopt;
  }
  std::optional<double> score_of(std::string_view name) const {
    for (const auto& [n, s] : scores) {
      if (n == name) return s;
    }
    return std::nullopt;
  }
  /// Input columns not kept, in input order.
  std::vector<std::string> dropped(const std::vector<std::string>& columns) const {
    std::unordered_set<std::string> keep(kept_columns.begin(), kept_columns.end());
    std::vector<std::string> out;
    for (const auto& c : columns) {
      if (!keep.count(c)) out.push_back(c);
    }
    return out;
  }
};

namespace detail {

/// Indices ordered by descending score; ties keep column order.
inline std::vector<std::size_t> order_desc(const std::vector<double>& scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return idx;
}

inline SelectionResult ranked_result(const FeatureTable& t, const std::vector<double>& scores, std::size_t k) {
  SelectionResult r;
  const auto order = order_desc(scores);
  for (std::size_t i = 0; i < order.size(); ++i) {
    r.ranking.push_back(t.column_names[order[i]]);
    if (i < k) r.kept_columns.push_back(t.column_names[order[i]]);
  }
  for (std::size_t j = 0; j < t.n_cols(); ++j) r.scores.emplace_back(t.column_names[j], scores[j]);
  return r;
}

inline void check_k(std::size_t k, std::size_t n_cols, const char* what) {
  if (k < 1 || k > n_cols) throw Error(ErrorCode::InvalidK, std::string(what) + ": k must lie in [1, columns]");
}

}  // namespace detail

/// Population variance of the imputed (not standardized) columns; drops variance <= threshold.
inline SelectionResult low_variance_filter(const FeatureTable& t, double threshold = 0.0) {
  if (!(threshold >= 0.0)) throw Error(ErrorCode::InvalidArgument, "low_variance_filter: threshold must be >= 0");
  const Eigen::MatrixXd x = impute_mean(t.data);
  SelectionResult r;
  for (std::size_t j = 0; j < t.n_cols(); ++j) {
    const double var = t.n_rows() ? pvariance(x.col(static_cast<Eigen::Index>(j))) : 0.0;
    r.scores.emplace_back(t.column_names[j], var);
    if (var > threshold) r.kept_columns.push_back(t.column_names[j]);
  }
  return r;
}

/// Greedy scan in column order; score = max |r| against an earlier kept column.
inline SelectionResult high_correlation_filter(const FeatureTable& t, double threshold) {
  if (t.n_cols() < 2) throw Error(ErrorCode::TooFewColumns, "high_correlation_filter: needs at least 2 columns");
  if (!(threshold > 0.0 && threshold < 1.0)) throw Error(ErrorCode::InvalidArgument, "high_correlation_filter: threshold must lie in (0, 1)");
  const Eigen::MatrixXd x = impute_mean(t.data);
  SelectionResult r;
  std::vector<Eigen::Index> kept;
  for (std::size_t j = 0; j < t.n_cols(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    double worst = 0.0;
    for (auto k : kept) worst = std::max(worst, std::abs(pearson(x.col(jj), x.col(k))));
    r.scores.emplace_back(t.column_names[j], worst);
    if (worst <= threshold) {
      kept.push_back(jj);
      r.kept_columns.push_back(t.column_names[j]);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// ANOVA F

/// One-way ANOVA F per column on imputed data; +inf for a perfect separator, 0 for a constant column.
inline std::vector<double> anova_f_values(const FeatureTable& t) {
  require_classification(t);
  const Eigen::VectorXd& y = *t.target;
  const auto classes = class_labels(y);
  if (classes.size() < 2) throw Error(ErrorCode::DegenerateClasses, "anova_f: needs at least 2 classes");
  std::vector<std::vector<Eigen::Index>> groups(classes.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const auto c = std::lower_bound(classes.begin(), classes.end(), y[i]) - classes.begin();
    groups[static_cast<std::size_t>(c)].push_back(i);
  }
  for (std::size_t c = 0; c < groups.size(); ++c) {
    if (groups[c].size() < 2) throw Error(ErrorCode::DegenerateClasses, "anova_f: every class needs at least 2 rows");
  }
  const Eigen::MatrixXd x = impute_mean(t.data);
  const double df_between = static_cast<double>(classes.size() - 1);
  const double df_within = static_cast<double>(t.n_rows() - classes.size());
  std::vector<double> f(t.n_cols());
  for (std::size_t j = 0; j < t.n_cols(); ++j) {
    const auto col = x.col(static_cast<Eigen::Index>(j));
    if (col.maxCoeff() == col.minCoeff()) {
      f[j] = 0.0;
      continue;
    }
    const double grand = col.mean();
    double ssb = 0.0, ssw = 0.0;
    for (const auto& g : groups) {
      double m = 0.0;
      for (auto i : g) m += col[i];
      m /= static_cast<double>(g.size());
      ssb += static_cast<double>(g.size()) * (m - grand) * (m - grand);
      for (auto i : g) ssw += (col[i] - m) * (col[i] - m);
    }
    if (ssw == 0.0) f[j] = ssb > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    else f[j] = (ssb / df_between) / (ssw / df_within);
  }
  return f;
}

inline SelectionResult anova_f_select(const FeatureTable& t, std::size_t k) {
  const auto f = anova_f_values(t);
  detail::check_k(k, t.n_cols(), "anova_f_select");
  return detail::ranked_result(t, f, k);
}

// ---------------------------------------------------------------------------
// RFE

/// Step removed per round: max(1, floor(remaining / 10)), never past k.
inline std::size_t rfe_step(std::size_t remaining, std::size_t k) {
  return std::min(std::max<std::size_t>(1, remaining / 10), remaining - k);
}

/// Fits on standardized data; ranks 1..k are the survivors by final |coef|,
/// later ranks follow reverse elimination order.
inline SelectionResult rfe_select(const FeatureTable& t, std::size_t k, Estimator estimator) {
  require_target(t);
  check_estimator(estimator, t.task);
  detail::check_k(k, t.n_cols(), "rfe_select");
  const Eigen::MatrixXd x = fit_standardize(t.data).apply(t.data);
  std::vector<std::size_t> remaining(t.n_cols());
  std::iota(remaining.begin(), remaining.end(), 0);
  std::vector<double> last_score(t.n_cols(), 0.0);
  std::vector<std::vector<std::size_t>> eliminated_rounds;
  while (true) {
    Eigen::MatrixXd sub(x.rows(), static_cast<Eigen::Index>(remaining.size()));
    for (std::size_t j = 0; j < remaining.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = x.col(static_cast<Eigen::Index>(remaining[j]));
    const Eigen::VectorXd imp = fit_estimator(estimator, sub, *t.target).importance();
    std::vector<double> scores(remaining.size());
    for (std::size_t j = 0; j < remaining.size(); ++j) {
      scores[j] = imp[static_cast<Eigen::Index>(j)];
      last_score[remaining[j]] = scores[j];
    }
    const auto order = detail::order_desc(scores);  // best first, ties favour earlier columns
    if (remaining.size() == k) {
      std::vector<std::size_t> sorted;
      for (auto o : order) sorted.push_back(remaining[o]);
      remaining = sorted;
      break;
    }
    const std::size_t step = rfe_step(remaining.size(), k);
    std::vector<std::size_t> keep, drop;
    for (std::size_t i = 0; i < order.size(); ++i) (i + step < order.size() ? keep : drop).push_back(remaining[order[i]]);
    eliminated_rounds.push_back(drop);  // best-to-worst within the round
    std::sort(keep.begin(), keep.end());
    remaining = keep;
  }
  SelectionResult r;
  for (auto j : remaining) {
    r.kept_columns.push_back(t.column_names[j]);
    r.ranking.push_back(t.column_names[j]);
  }
  for (auto it = eliminated_rounds.rbegin(); it != eliminated_rounds.rend(); ++it) {
    for (auto j : *it) r.ranking.push_back(t.column_names[j]);
  }
  for (std::size_t j = 0; j < t.n_cols(); ++j) r.scores.emplace_back(t.column_names[j], last_score[j]);
  return r;
}

// ---------------------------------------------------------------------------
// Model-based importance

struct ImportanceThreshold {
  bool use_mean = true;
  double value = 0.0;

  static ImportanceThreshold mean() { return {}; }
  static ImportanceThreshold at(double v) { return {false, v}; }
};

/// |coef| of LASSO (regression) or L2 logistic (classification) on standardized data.
inline std::vector<double> model_importance(const FeatureTable& t, const LassoOptions& lasso = {}) {
  require_target(t);
  const Eigen::MatrixXd x = fit_standardize(t.data).apply(t.data);
  const Eigen::VectorXd imp = t.task == TaskKind::classification ? fit_logistic(x, *t.target).importance()
                                                                 : Eigen::VectorXd(fit_lasso(x, *t.target, lasso).coef.cwiseAbs());
  return {imp.data(), imp.data() + imp.size()};
}

/// Keeps importance >= threshold; under "mean", zero importances never pass.
inline SelectionResult importance_select(const FeatureTable& t, ImportanceThreshold threshold = ImportanceThreshold::mean(),
                                         const LassoOptions& lasso = {}) {
  const auto imp = model_importance(t, lasso);
  const double cut = threshold.use_mean
                         ? (imp.empty() ? 0.0 : std::accumulate(imp.begin(), imp.end(), 0.0) / static_cast<double>(imp.size()))
                         : threshold.value;
  SelectionResult r = detail::ranked_result(t, imp, 0);
  for (const auto& name : r.ranking) {
    const double s = *r.score_of(name);
    if (s >= cut && !(threshold.use_mean && s == 0.0)) r.kept_columns.push_back(name);
  }
  return r;
}

/// Top k by model importance.
inline SelectionResult importance_top_k(const FeatureTable& t, std::size_t k, const LassoOptions& lasso = {}) {
  detail::check_k(k, t.n_cols(), "importance_top_k");
  return detail::ranked_result(t, model_importance(t, lasso), k);
}

// ---------------------------------------------------------------------------
// MRMR

/// |pearson(feature, target)|; with more than two classes, max over one-vs-rest indicators.
inline std::vector<double> relevance(const FeatureTable& t, const Eigen::MatrixXd& x) {
  require_target(t);
  const Eigen::VectorXd& y = *t.target;
  std::vector<Eigen::VectorXd> targets;
  const auto classes = t.task == TaskKind::classification ? class_labels(y) : std::vector<double>{};
  if (classes.size() > 2) {
    for (double c : classes) targets.emplace_back((y.array() == c).cast<double>());
  } else {
    targets.push_back(y);
  }
  std::vector<double> rel(static_cast<std::size_t>(x.cols()), 0.0);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (const auto& tg : targets) rel[static_cast<std::size_t>(j)] = std::max(rel[static_cast<std::size_t>(j)], std::abs(pearson(x.col(j), tg)));
  }
  return rel;
}

/// Greedy forward selection of relevance minus mean |r| to the already selected.
/// Equal scores prefer the lower redundancy, then the earlier column.
inline SelectionResult mrmr_rank(const FeatureTable& t, std::size_t k) {
  require_target(t);
  detail::check_k(k, t.n_cols(), "mrmr_rank");
  const Eigen::MatrixXd x = impute_mean(t.data);
  const auto rel = relevance(t, x);
  const std::size_t p = t.n_cols();
  std::vector<double> redundancy_sum(p, 0.0);
  std::vector<bool> chosen(p, false);
  std::vector<double> pick_score(p, kNaNd);
  SelectionResult r;
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t best = p;
    double best_score = -std::numeric_limits<double>::infinity(), best_red = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      if (chosen[j]) continue;
      const double red = step == 0 ? 0.0 : redundancy_sum[j] / static_cast<double>(step);
      const double s = rel[j] - red;
      if (best == p || s > best_score || (s == best_score && red < best_red)) {
        best = j;
        best_score = s;
        best_red = red;
      }
    }
    chosen[best] = true;
    pick_score[best] = best_score;
    r.ranking.push_back(t.column_names[best]);
    r.kept_columns.push_back(t.column_names[best]);
    for (std::size_t j = 0; j < p; ++j) {
      if (!chosen[j]) redundancy_sum[j] += std::abs(pearson(x.col(static_cast<Eigen::Index>(j)), x.col(static_cast<Eigen::Index>(best))));
    }
  }
  for (std::size_t j = 0; j < p; ++j) r.scores.emplace_back(t.column_names[j], pick_score[j]);
  return r;
}

// ---------------------------------------------------------------------------
// Uniform top-k interface for the cross-validation curve

enum class Selector { anova, rfe, mrmr, importance };

inline std::string to_string(Selector s) {
  switch (s) {
    case Selector::anova: return "anova";
    case Selector::rfe: return "rfe";
    case Selector::mrmr: return "mrmr";
    case Selector::importance: return "importance";
  }
  return "?";
}

inline Selector parse_selector(std::string_view s) {
  if (s == "anova" || s == "anova_f") return Selector::anova;
  if (s == "rfe") return Selector::rfe;
  if (s == "mrmr") return Selector::mrmr;
  if (s == "importance") return Selector::importance;
  throw Error(ErrorCode::InvalidArgument, "unknown selector '" + std::string(s) + "'");
}

inline SelectionResult select_k(const FeatureTable& t, Selector s, std::size_t k, Estimator estimator) {
  switch (s) {
    case Selector::anova: return anova_f_select(t, k);
    case Selector::rfe: return rfe_select(t, k, estimator);
    case Selector::mrmr: return mrmr_rank(t, k);
    case Selector::importance: return importance_top_k(t, k);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown selector");
}

}  // namespace voxmark::ml

#endif
