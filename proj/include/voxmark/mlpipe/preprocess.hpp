#ifndef VOXMARK_MLPIPE_PREPROCESS_HPP
#define VOXMARK_MLPIPE_PREPROCESS_HPP

#include "voxmark/mlpipe/table.hpp"

namespace voxmark::ml {

/// Per-column parameters fitted on one table and reusable on another (held-out folds).
struct StandardizeParams {
  Eigen::VectorXd means;   // imputation value and centering offset
  Eigen::VectorXd scales;  // population stddev; 0 marks a constant column

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const {
    if (x.cols() != means.size()) throw Error(ErrorCode::DimensionMismatch, "standardize: column count mismatch");
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double v = std::isnan(x(i, j)) ? means[j] : x(i, j);
        out(i, j) = scales[j] > 0.0 ? (v - means[j]) / scales[j] : 0.0;
      }
    }
    return out;
  }

  FeatureTable apply(const FeatureTable& t) const {
    FeatureTable out = t;
    out.data = apply(t.data);
    return out;
  }
};

/// NaN -> column mean (all-NaN column -> 0).
inline Eigen::MatrixXd impute_mean(const Eigen::MatrixXd& x, Eigen::VectorXd* means_out = nullptr) {
  Eigen::MatrixXd out = x;
  Eigen::VectorXd means(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    double m = nan_mean(x.col(j));
    if (std::isnan(m)) m = 0.0;
    means[j] = m;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (std::isnan(out(i, j))) out(i, j) = m;
    }
  }
  if (means_out) *means_out = means;
  return out;
}

inline StandardizeParams fit_standardize(const Eigen::MatrixXd& x) {
  StandardizeParams p;
  const Eigen::MatrixXd imputed = impute_mean(x, &p.means);
  p.scales.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    // recompute the mean on the imputed column so centering is exact
    const double var = pvariance(imputed.col(j));
    if (x.rows() > 0 && var > 0.0) p.means[j] = imputed.col(j).mean();
    p.scales[j] = x.rows() > 0 ? std::sqrt(var) : 0.0;
  }
  return p;
}

struct Standardized {
  FeatureTable table;
  StandardizeParams params;
};

inline Standardized impute_and_standardize(const FeatureTable& t) {
  Standardized s;
  s.params = fit_standardize(t.data);
  s.table = s.params.apply(t);
  return s;
}

}  // namespace voxmark::ml

#endif
