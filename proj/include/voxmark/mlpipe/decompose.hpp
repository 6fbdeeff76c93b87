#ifndef VOXMARK_MLPIPE_DECOMPOSE_HPP
#define VOXMARK_MLPIPE_DECOMPOSE_HPP

#include <random>

#include "voxmark/mlpipe/preprocess.hpp"

namespace voxmark::ml {

namespace detail {

inline FeatureTable with_columns(const FeatureTable& src, const std::string& prefix, Eigen::MatrixXd data) {
  FeatureTable out;
  out.row_ids = src.row_ids;
  out.target = src.target;
  out.task = src.task;
  for (Eigen::Index j = 0; j < data.cols(); ++j) out.column_names.push_back(prefix + std::to_string(j + 1));
  out.data = std::move(data);
  return out;
}

/// Flip each row so its largest-magnitude entry is positive (first one on ties).
inline void orient_rows(Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < m.cols(); ++c) {
      if (std::abs(m(r, c)) > std::abs(m(r, best))) best = c;
    }
    if (m(r, best) < 0.0) m.row(r) *= -1.0;
  }
}

/// (W W^T)^(-1/2) W
inline Eigen::MatrixXd symmetric_decorrelation(const Eigen::MatrixXd& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w * w.transpose());
  const Eigen::VectorXd inv_sqrt = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose() * w;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// PCA

struct PcaResult {
  FeatureTable transformed;                // columns pc1..pck
  Eigen::MatrixXd components;              // k x n_cols, orthonormal rows
  Eigen::VectorXd explained_variance;      // population variance of each score column
  Eigen::VectorXd explained_variance_ratio;
  StandardizeParams params;

  Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const { return params.apply(x) * components.transpose(); }
};

/// Operates on the imputed, standardized copy of the table.
inline PcaResult pca(const FeatureTable& t, std::size_t k) {
  if (k < 1 || k > std::min(t.n_rows(), t.n_cols())) {
    throw Error(ErrorCode::InvalidK, "pca: k must lie in [1, min(rows, cols)]");
  }
  PcaResult r;
  r.params = fit_standardize(t.data);
  const Eigen::MatrixXd x = r.params.apply(t.data);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  const auto kk = static_cast<Eigen::Index>(k);
  r.components = svd.matrixV().leftCols(kk).transpose();
  detail::orient_rows(r.components);
  const double n = static_cast<double>(t.n_rows());
  const double total = s.squaredNorm();
  r.explained_variance = s.head(kk).array().square() / n;
  r.explained_variance_ratio = total > 0.0 ? Eigen::VectorXd(s.head(kk).array().square() / total) : Eigen::VectorXd::Zero(kk);
  r.transformed = detail::with_columns(t, "pc", x * r.components.transpose());
  return r;
}

// ---------------------------------------------------------------------------
// ICA

struct IcaOptions {
  std::size_t max_iter = 500;
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

struct IcaResult {
  FeatureTable transformed;  // columns ic1..ick, unit variance
  Eigen::MatrixXd unmixing;  // k x n_cols, maps standardized data to sources
  bool converged = false;
  std::size_t iterations = 0;
};

/// FastICA, log-cosh contrast, symmetric decorrelation, PCA whitening.
/// Convergence: max_i | |<w_i new, w_i old>| - 1 | < tol (sign flips are not change).
/// Non-convergence is reported through the flag with the last iterate returned.
inline IcaResult ica(const FeatureTable& t, std::size_t k, const IcaOptions& opt = {}) {
  if (k < 1 || k > t.n_cols()) throw Error(ErrorCode::InvalidK, "ica: k must lie in [1, cols]");
  if (t.n_rows() < 2) throw Error(ErrorCode::InvalidK, "ica: needs at least 2 rows");
  const StandardizeParams params = fit_standardize(t.data);
  const Eigen::MatrixXd x = params.apply(t.data);
  const auto kk = static_cast<Eigen::Index>(k);
  const double n = static_cast<double>(t.n_rows());

  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  if (s.size() < kk || s[kk - 1] * s[kk - 1] / n < 1e-12) throw Error(ErrorCode::InvalidK, "ica: k exceeds the data rank");
  // whitening: z = x V_k diag(sqrt(n) / s_k), unit population variance
  const Eigen::MatrixXd whitening =
      svd.matrixV().leftCols(kk) * (std::sqrt(n) * s.head(kk).cwiseInverse()).asDiagonal();
  const Eigen::MatrixXd z = x * whitening;  // n x k

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd w(kk, kk);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = gauss(rng);
  w = detail::symmetric_decorrelation(w);

  IcaResult r;
  for (r.iterations = 1; r.iterations <= opt.max_iter; ++r.iterations) {
    const Eigen::ArrayXXd proj = (z * w.transpose()).array();  // n x k
    const Eigen::ArrayXXd g = proj.tanh();
    const Eigen::ArrayXd g_prime_mean = (1.0 - g.square()).colwise().mean().transpose();
    Eigen::MatrixXd w_new = (g.matrix().transpose() * z) / n - g_prime_mean.matrix().asDiagonal() * w;
    w_new = detail::symmetric_decorrelation(w_new);
    const double change = ((w_new * w.transpose()).diagonal().cwiseAbs().array() - 1.0).abs().maxCoeff();
    w = w_new;
    if (change < opt.tol) {
      r.converged = true;
      break;
    }
  }
  if (!r.converged) r.iterations = opt.max_iter;
  r.unmixing = w * whitening.transpose();
  r.transformed = detail::with_columns(t, "ic", z * w.transpose());
  return r;
}

// ---------------------------------------------------------------------------
// Factor analysis

struct FactorOptions {
  std::size_t max_iter = 200;
  double tol = 1e-5;
};

struct FactorResult {
  Eigen::MatrixXd loadings;      // n_cols x k
  Eigen::VectorXd uniquenesses;  // psi, clamped to [0.005, 1]
  Eigen::MatrixXd correlation;   // sample correlation the fit targets
  std::size_t iterations = 0;

  Eigen::MatrixXd reconstructed() const {
    Eigen::MatrixXd m = loadings * loadings.transpose();
    m.diagonal() += uniquenesses;
    return m;
  }
};

inline Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& x) {
  const auto p = x.cols();
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) r(i, j) = r(j, i) = pearson(x.col(i), x.col(j));
  }
  return r;
}

inline constexpr double kMinUniqueness = 0.005;

/// Iterated principal-axis factoring on the correlation matrix of the imputed data.
inline FactorResult factor_analysis(const FeatureTable& t, std::size_t k, const FactorOptions& opt = {}) {
  if (k < 1 || k >= t.n_cols()) throw Error(ErrorCode::InvalidK, "factor_analysis: k must lie in [1, cols)");
  FactorResult r;
  r.correlation = correlation_matrix(impute_mean(t.data));
  const auto p = r.correlation.rows();
  const auto kk = static_cast<Eigen::Index>(k);
  Eigen::VectorXd psi(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    double h = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (j != i) h = std::max(h, std::abs(r.correlation(i, j)));
    }
    psi[i] = std::clamp(1.0 - h, kMinUniqueness, 1.0);
  }
  for (r.iterations = 1; r.iterations <= opt.max_iter; ++r.iterations) {
    Eigen::MatrixXd reduced = r.correlation;
    reduced.diagonal() = Eigen::VectorXd::Ones(p) - psi;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(reduced);
    // eigenvalues ascend; take the last k
    const Eigen::VectorXd lambda = es.eigenvalues().tail(kk).reverse().cwiseMax(0.0);
    const Eigen::MatrixXd vecs = es.eigenvectors().rightCols(kk).rowwise().reverse();
    r.loadings = vecs * lambda.cwiseSqrt().asDiagonal();
    const Eigen::VectorXd psi_new =
        (Eigen::VectorXd::Ones(p) - r.loadings.rowwise().squaredNorm()).cwiseMax(kMinUniqueness).cwiseMin(1.0);
    const double change = (psi_new - psi).cwiseAbs().maxCoeff();
    psi = psi_new;
    if (change < opt.tol) {
      r.uniquenesses = psi;
      Eigen::MatrixXd lt = r.loadings.transpose();
      detail::orient_rows(lt);
      r.loadings = lt.transpose();
      return r;
    }
  }
  throw Error(ErrorCode::ConvergenceFailure,
              "factor_analysis: no convergence within " + std::to_string(opt.max_iter) + " iterations");
}

}  // namespace voxmark::ml

#endif
