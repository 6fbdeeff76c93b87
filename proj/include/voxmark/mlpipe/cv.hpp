#ifndef VOXMARK_MLPIPE_CV_HPP
#define VOXMARK_MLPIPE_CV_HPP

#include <random>

#include "voxmark/mlpipe/select.hpp"

namespace voxmark::ml {

namespace detail {

// Fisher-Yates over raw engine output so the permutation is identical on every standard library.
inline void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

}  // namespace detail

/// Validation row indices per fold (each sorted). Classification: stratified round-robin over
/// shuffled classes. Otherwise: shuffled rows cut into contiguous blocks.
inline std::vector<std::vector<std::size_t>> make_folds(const FeatureTable& t, std::size_t n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw Error(ErrorCode::InvalidArgument, "cross-validation needs at least 2 folds");
  if (n_folds > t.n_rows()) throw Error(ErrorCode::InvalidArgument, "more folds than rows");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> folds(n_folds);
  if (t.task == TaskKind::classification) {
    const Eigen::VectorXd& y = *t.target;
    std::size_t next = 0;
    for (double c : class_labels(y)) {
      std::vector<std::size_t> rows;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] == c) rows.push_back(static_cast<std::size_t>(i));
      }
      detail::shuffle(rows, rng);
      for (auto r : rows) folds[next++ % n_folds].push_back(r);
    }
  } else {
    std::vector<std::size_t> rows(t.n_rows());
    std::iota(rows.begin(), rows.end(), 0);
    detail::shuffle(rows, rng);
    const std::size_t base = rows.size() / n_folds, extra = rows.size() % n_folds;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < n_folds; ++f) {
      const std::size_t len = base + (f < extra ? 1 : 0);
      folds[f].assign(rows.begin() + static_cast<std::ptrdiff_t>(pos), rows.begin() + static_cast<std::ptrdiff_t>(pos + len));
      pos += len;
    }
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

struct CvSpec {
  Selector selector = Selector::mrmr;
  std::optional<Estimator> estimator = std::nullopt;  // default follows the task
  std::vector<std::size_t> k_values;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
};

struct CvPoint {
  std::size_t k = 0;
  double mean_score = kNaNd;
  double std_score = kNaNd;  // population over folds
  std::vector<double> fold_scores;
  std::vector<std::vector<std::string>> fold_selections;  // columns chosen inside each training fold
};

struct CvCurve {
  std::string metric;  // "accuracy" or "r2"
  std::vector<CvPoint> points;
};

/// Selection and standardization are refit on each training fold; validation rows are only predicted.
inline CvCurve cv_score_curve(const FeatureTable& t, const CvSpec& spec) {
  require_target(t);
  const Estimator est = spec.estimator.value_or(default_estimator(t.task));
  check_estimator(est, t.task);
  if (spec.k_values.empty()) throw Error(ErrorCode::InvalidArgument, "cv_score_curve: no k values");
  for (auto k : spec.k_values) detail::check_k(k, t.n_cols(), "cv_score_curve");
  const auto folds = make_folds(t, spec.folds, spec.seed);
  CvCurve curve;
  curve.metric = t.task == TaskKind::classification ? "accuracy" : "r2";

  std::vector<FeatureTable> train_tables, valid_tables;
  for (const auto& fold : folds) {
    std::vector<bool> in_fold(t.n_rows(), false);
    for (auto r : fold) in_fold[r] = true;
    std::vector<std::size_t> train;
    for (std::size_t i = 0; i < t.n_rows(); ++i) {
      if (!in_fold[i]) train.push_back(i);
    }
    train_tables.push_back(t.select_rows(train));
    valid_tables.push_back(t.select_rows(fold));
  }

  for (auto k : spec.k_values) {
    CvPoint pt;
    pt.k = k;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      const auto kept = select_k(train_tables[f], spec.selector, k, est).kept_columns;
      const FeatureTable tr = train_tables[f].select_columns(kept);
      const FeatureTable va = valid_tables[f].select_columns(kept);
      const StandardizeParams params = fit_standardize(tr.data);
      const FittedModel model = fit_estimator(est, params.apply(tr.data), *tr.target);
      const Eigen::VectorXd pred = model.predict(params.apply(va.data));
      pt.fold_scores.push_back(t.task == TaskKind::classification ? accuracy(*va.target, pred) : r_squared(*va.target, pred));
      pt.fold_selections.push_back(kept);
    }
    const Eigen::Map<const Eigen::VectorXd> s(pt.fold_scores.data(), static_cast<Eigen::Index>(pt.fold_scores.size()));
    pt.mean_score = s.mean();
    pt.std_score = std::sqrt((s.array() - pt.mean_score).square().mean());
    curve.points.push_back(std::move(pt));
  }
  return curve;
}

}  // namespace voxmark::ml

#endif
