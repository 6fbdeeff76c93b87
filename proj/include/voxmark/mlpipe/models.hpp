#ifndef VOXMARK_MLPIPE_MODELS_HPP
#define VOXMARK_MLPIPE_MODELS_HPP

#include "voxmark/mlpipe/preprocess.hpp"

namespace voxmark::ml {

enum class Estimator { ols, logistic };

inline std::string to_string(Estimator e) { return e == Estimator::ols ? "ols" : "logistic"; }

inline Estimator parse_estimator(std::string_view s) {
  if (s == "ols" || s == "ridge" || s == "linear") return Estimator::ols;
  if (s == "logistic") return Estimator::logistic;
  throw Error(ErrorCode::InvalidArgument, "unknown estimator '" + std::string(s) + "'");
}

inline Estimator default_estimator(TaskKind task) {
  return task == TaskKind::classification ? Estimator::logistic : Estimator::ols;
}

struct LinearModel {
  double intercept = 0.0;
  Eigen::VectorXd coef;

  Eigen::VectorXd decision(const Eigen::MatrixXd& x) const {
    return (x * coef).array() + intercept;
  }
};

/// Least squares with optional L2 penalty on the coefficients (intercept unpenalized).
inline LinearModel fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double ridge = 0.0) {
  if (x.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "fit_ols: row count mismatch");
  LinearModel m;
  if (x.rows() == 0) {
    m.coef = Eigen::VectorXd::Zero(x.cols());
    return m;
  }
  const Eigen::RowVectorXd mx = x.colwise().mean();
  const double my = y.mean();
  const Eigen::MatrixXd xc = x.rowwise() - mx;
  const Eigen::VectorXd yc = y.array() - my;
  if (ridge > 0.0) {
    Eigen::MatrixXd a = xc.transpose() * xc;
    a.diagonal().array() += ridge;
    m.coef = a.ldlt().solve(xc.transpose() * yc);
  } else {
    m.coef = xc.colPivHouseholderQr().solve(yc);
  }
  m.intercept = my - mx.dot(m.coef);
  return m;
}

struct LogisticOptions {
  double l2 = 1.0;
  std::size_t max_iter = 100;
  double tol = 1e-10;
};

/// Binary L2-penalized logistic regression by Newton/IRLS; y in {0, 1}.
inline LinearModel fit_binary_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LogisticOptions& opt = {}) {
  if (x.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "fit_logistic: row count mismatch");
  const auto n = x.rows(), p = x.cols();
  Eigen::MatrixXd a(n, p + 1);
  a.col(0).setOnes();
  a.rightCols(p) = x;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p + 1);
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(p + 1, opt.l2);
  penalty[0] = 0.0;
  for (std::size_t it = 0; it < opt.max_iter; ++it) {
    const Eigen::ArrayXd eta = a * beta;
    const Eigen::ArrayXd mu = 1.0 / (1.0 + (-eta).exp());
    const Eigen::ArrayXd wts = (mu * (1.0 - mu)).max(1e-12);
    const Eigen::VectorXd grad = a.transpose() * (y.array() - mu).matrix() - penalty.cwiseProduct(beta);
    Eigen::MatrixXd hess = a.transpose() * wts.matrix().asDiagonal() * a;
    hess.diagonal() += penalty;
    hess.diagonal().array() += 1e-12;
    const Eigen::VectorXd step = hess.ldlt().solve(grad);
    beta += step;
    if (step.cwiseAbs().maxCoeff() < opt.tol) break;
  }
  LinearModel m;
  m.intercept = beta[0];
  m.coef = beta.tail(p);
  return m;
}

/// One binary model for two classes, one-vs-rest models otherwise.
struct LogisticModel {
  std::vector<double> classes;
  std::vector<LinearModel> models;

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const {
    Eigen::VectorXd out(x.rows());
    if (models.size() == 1) {
      const Eigen::VectorXd d = models[0].decision(x);
      for (Eigen::Index i = 0; i < x.rows(); ++i) out[i] = d[i] > 0.0 ? classes[1] : classes[0];
      return out;
    }
    Eigen::MatrixXd scores(x.rows(), static_cast<Eigen::Index>(models.size()));
    for (std::size_t c = 0; c < models.size(); ++c) scores.col(static_cast<Eigen::Index>(c)) = models[c].decision(x);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      Eigen::Index best = 0;
      scores.row(i).maxCoeff(&best);
      out[i] = classes[static_cast<std::size_t>(best)];
    }
    return out;
  }

  /// Sum of |coefficient| across the binary models.
  Eigen::VectorXd importance() const {
    Eigen::VectorXd imp = Eigen::VectorXd::Zero(models.empty() ? 0 : models[0].coef.size());
    for (const auto& m : models) imp += m.coef.cwiseAbs();
    return imp;
  }
};

inline LogisticModel fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LogisticOptions& opt = {}) {
  LogisticModel m;
  m.classes = class_labels(y);
  if (m.classes.size() < 2) throw Error(ErrorCode::DegenerateClasses, "logistic regression needs at least 2 classes");
  auto indicator = [&](double label) {
    return Eigen::VectorXd((y.array() == label).cast<double>());
  };
  if (m.classes.size() == 2) {
    m.models.push_back(fit_binary_logistic(x, indicator(m.classes[1]), opt));
  } else {
    for (double c : m.classes) m.models.push_back(fit_binary_logistic(x, indicator(c), opt));
  }
  return m;
}

struct LassoOptions {
  double alpha = 0.01;
  std::size_t max_iter = 10000;
  double tol = 1e-10;
};

/// Coordinate descent on (1/2n)||y - b0 - Xb||^2 + alpha ||b||_1.
inline LinearModel fit_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LassoOptions& opt = {}) {
  if (x.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "fit_lasso: row count mismatch");
  const auto n = x.rows(), p = x.cols();
  LinearModel m;
  m.coef = Eigen::VectorXd::Zero(p);
  if (n == 0) return m;
  const Eigen::RowVectorXd mx = x.colwise().mean();
  const Eigen::MatrixXd xc = x.rowwise() - mx;
  const double my = y.mean();
  Eigen::VectorXd resid = y.array() - my;
  const Eigen::VectorXd col_sq = xc.colwise().squaredNorm().transpose() / static_cast<double>(n);
  for (std::size_t it = 0; it < opt.max_iter; ++it) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (col_sq[j] <= 0.0) continue;
      const double old = m.coef[j];
      const double rho = xc.col(j).dot(resid) / static_cast<double>(n) + col_sq[j] * old;
      const double updated = rho > opt.alpha ? (rho - opt.alpha) / col_sq[j]
                             : rho < -opt.alpha ? (rho + opt.alpha) / col_sq[j]
                                                : 0.0;
      if (updated != old) {
        resid -= xc.col(j) * (updated - old);
        m.coef[j] = updated;
        max_change = std::max(max_change, std::abs(updated - old));
      }
    }
    if (max_change < opt.tol) break;
  }
  m.intercept = my - mx.dot(m.coef);
  return m;
}

/// Fitted estimator of either kind behind one interface.
struct FittedModel {
  Estimator kind = Estimator::ols;
  LinearModel linear;
  LogisticModel logistic;

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const {
    return kind == Estimator::ols ? linear.decision(x) : logistic.predict(x);
  }
  Eigen::VectorXd importance() const {
    return kind == Estimator::ols ? Eigen::VectorXd(linear.coef.cwiseAbs()) : logistic.importance();
  }
};

/// Estimator kind must match the task: logistic needs classification, ols needs regression.
inline void check_estimator(Estimator e, TaskKind task) {
  if (e == Estimator::logistic && task != TaskKind::classification) {
    throw Error(ErrorCode::NotClassification, "logistic estimator requires a classification target");
  }
  if (e == Estimator::ols && task == TaskKind::classification) {
    throw Error(ErrorCode::InvalidArgument, "ols estimator requires a regression target");
  }
}

inline FittedModel fit_estimator(Estimator e, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  FittedModel f;
  f.kind = e;
  if (e == Estimator::ols) f.linear = fit_ols(x, y);
  else f.logistic = fit_logistic(x, y);
  return f;
}

inline double accuracy(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred) {
  if (truth.size() == 0) return kNaNd;
  return (truth.array() == pred.array()).cast<double>().mean();
}

/// 1 - SS_res / SS_tot; a constant truth scores 1 when predicted exactly, else 0.
inline double r_squared(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred) {
  if (truth.size() == 0) return kNaNd;
  const double ss_res = (truth - pred).squaredNorm();
  const double ss_tot = (truth.array() - truth.mean()).square().sum();
  if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
  return 1.0 - ss_res / ss_tot;
}

}  // namespace voxmark::ml

#endif
