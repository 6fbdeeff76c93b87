#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "test_util.hpp"
#include "voxmark/mlpipe.hpp"

using namespace voxmark;
using namespace voxmark::ml;
using voxmark::testing::naive_corr;

namespace {

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = g(rng);
  }
  return m;
}

std::vector<std::string> names(std::size_t n, const std::string& prefix = "x") {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace

TEST(FeatureTable, TaskInference) {
  Eigen::VectorXd cls(4);
  cls << 0, 1, 1, 0;
  EXPECT_EQ(infer_task(cls), TaskKind::classification);
  Eigen::VectorXd reg(3);
  reg << 0.5, 1, 2;
  EXPECT_EQ(infer_task(reg), TaskKind::regression);
  Eigen::VectorXd many = Eigen::VectorXd::LinSpaced(21, 0, 20);
  EXPECT_EQ(infer_task(many), TaskKind::regression);
  EXPECT_EQ(infer_task(Eigen::VectorXd::LinSpaced(20, 0, 19)), TaskKind::classification);
}

TEST(FeatureTable, ValidateRejectsDuplicates) {
  EXPECT_THROW(make_table({"a", "a"}, Eigen::MatrixXd::Zero(2, 2)), Error);
  EXPECT_THROW(make_table({"a"}, Eigen::MatrixXd::Zero(2, 1), {"r", "r"}), Error);
  EXPECT_THROW(make_table({"a", "b"}, Eigen::MatrixXd::Zero(2, 1)), Error);
}

TEST(Csv, RoundTripExact) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  Eigen::MatrixXd d(20, 4);
  for (Eigen::Index i = 0; i < d.size(); ++i) d.data()[i] = u(rng) / 7.0;
  d(0, 0) = kNaNd;
  d(1, 1) = std::numeric_limits<double>::infinity();
  d(2, 2) = -std::numeric_limits<double>::infinity();
  d(3, 3) = 5e-324;
  d(4, 0) = 0.1 + 0.2;
  std::vector<std::string> ids;
  for (int i = 0; i < 20; ++i) ids.push_back("rec, \"" + std::to_string(i) + "\"");
  Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(20, 0.25, 5.0);
  const auto t = make_table({"a", "b,c", "d", "e"}, d, ids, y);
  const auto csv = table_to_csv(t);
  const auto back = parse_table_csv(csv);
  EXPECT_EQ(back.column_names, t.column_names);
  EXPECT_EQ(back.row_ids, t.row_ids);
  EXPECT_EQ(back.task, TaskKind::regression);
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double a = d.data()[i], b = back.data.data()[i];
    if (std::isnan(a)) {
      EXPECT_TRUE(std::isnan(b));
    } else {
      EXPECT_EQ(a, b);
    }
  }
  EXPECT_EQ(*back.target, y);
  EXPECT_EQ(table_to_csv(back), csv);
}

TEST(Csv, SchemaErrors) {
  auto code_of = [](const std::string& s) {
    try {
      parse_table_csv(s);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code_of(""), ErrorCode::SchemaError);
  EXPECT_EQ(code_of("id,a\nr1,1\n"), ErrorCode::SchemaError);
  EXPECT_EQ(code_of("row_id,a\nr1,1,2\n"), ErrorCode::SchemaError);
  EXPECT_EQ(code_of("row_id,a\nr1,abc\n"), ErrorCode::SchemaError);
  EXPECT_EQ(code_of("row_id,a,target\nr1,1,nan\n"), ErrorCode::SchemaError);
  const auto t = parse_table_csv("row_id,a,target\r\nr1,,1\r\nr2,2,0\r\n");
  EXPECT_TRUE(std::isnan(t.data(0, 0)));
  EXPECT_EQ(t.task, TaskKind::classification);
}

TEST(Pearson, ZeroVarianceAndSign) {
  Eigen::VectorXd a(4), b(4), c = Eigen::VectorXd::Constant(4, 2.0);
  a << 1, 2, 3, 4;
  b << 2, 4, 6, 8.5;
  EXPECT_EQ(pearson(a, c), 0.0);
  EXPECT_NEAR(pearson(a, b), naive_corr(a, b), 1e-14);
  EXPECT_EQ(pearson(a, a), 1.0);
  EXPECT_EQ(pearson(a, -a), -1.0);
}

TEST(Standardize, HandArithmetic) {
  Eigen::MatrixXd d(3, 2);
  d << 1, 5, kNaNd, 5, 3, 5;
  const auto s = impute_and_standardize(make_table({"a", "b"}, d));
  EXPECT_NEAR(s.table.data(0, 0), -1.224744871391589, 1e-12);
  EXPECT_NEAR(s.table.data(1, 0), 0.0, 1e-15);
  EXPECT_NEAR(s.table.data(2, 0), 1.224744871391589, 1e-12);
  EXPECT_EQ(s.table.data.col(1), Eigen::VectorXd::Zero(3));
  // params reuse on held-out data
  Eigen::MatrixXd held(1, 2);
  held << kNaNd, 7;
  const Eigen::MatrixXd z = s.params.apply(held);
  EXPECT_EQ(z(0, 0), 0.0);
  EXPECT_EQ(z(0, 1), 0.0);
  const auto empty = impute_and_standardize(make_table({}, Eigen::MatrixXd(0, 0)));
  EXPECT_EQ(empty.table.n_rows(), 0u);
  EXPECT_EQ(empty.table.n_cols(), 0u);
  Eigen::MatrixXd all_nan(2, 1);
  all_nan << kNaNd, kNaNd;
  EXPECT_EQ(impute_and_standardize(make_table({"a"}, all_nan)).table.data, Eigen::MatrixXd::Zero(2, 1));
}

TEST(Pca, RankOneAndErrors) {
  Eigen::MatrixXd d(50, 2);
  d.col(0) = gaussian(50, 1, 1);
  d.col(1) = 2.0 * d.col(0);
  const auto t = make_table({"a", "b"}, d);
  const auto r = pca(t, 1);
  EXPECT_GE(r.explained_variance_ratio[0], 1.0 - 1e-9);
  EXPECT_THROW(pca(t, 0), Error);
  EXPECT_THROW(pca(t, 3), Error);
  try {
    pca(t, 0);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidK);
  }
}

TEST(Pca, IsotropicMatchesCovarianceEigenOracle) {
  const auto d = gaussian(1000, 2, 17);
  const auto r = pca(make_table({"a", "b"}, d), 2);
  // oracle: eigenvalues of the sample covariance of the standardized data
  Eigen::MatrixXd z = d;
  for (Eigen::Index j = 0; j < 2; ++j) {
    z.col(j).array() -= z.col(j).mean();
    z.col(j) /= std::sqrt(z.col(j).squaredNorm() / 1000.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(z.transpose() * z / 1000.0);
  const Eigen::VectorXd ev = es.eigenvalues().reverse();
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(r.explained_variance_ratio[i], ev[i] / ev.sum(), 1e-10);
    EXPECT_NEAR(r.explained_variance_ratio[i], 0.5, 0.1);
  }
}

TEST(Pca, Properties) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Eigen::MatrixXd d = gaussian(40, 6, seed);
    d.col(3) += 0.8 * d.col(1);
    const auto t = make_table(names(6), d);
    const auto r = pca(t, 4);
    const Eigen::MatrixXd gram = r.components * r.components.transpose();
    EXPECT_LT((gram - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-8);
    for (int i = 1; i < 4; ++i) EXPECT_LE(r.explained_variance_ratio[i], r.explained_variance_ratio[i - 1]);
    EXPECT_LE(r.explained_variance_ratio.sum(), 1.0 + 1e-12);
    for (int i = 0; i < 4; ++i) {
      const Eigen::VectorXd col = r.transformed.data.col(i);
      const double var = (col.array() - col.mean()).square().mean();
      EXPECT_NEAR(var, r.explained_variance[i], 1e-8);
      Eigen::Index arg = 0;
      r.components.row(i).cwiseAbs().maxCoeff(&arg);
      EXPECT_GT(r.components(i, arg), 0.0);
    }
    EXPECT_LT((r.transform(t.data) - r.transformed.data).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Ica, RecoversUniformSources) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Eigen::Index n = 5000;
  Eigen::MatrixXd s(n, 2);
  for (Eigen::Index i = 0; i < s.size(); ++i) s.data()[i] = u(rng);
  Eigen::Matrix2d mix;
  mix << 1.0, 0.5, 0.5, 1.0;
  const Eigen::MatrixXd x = s * mix.transpose();
  const auto r = ica(make_table({"m1", "m2"}, x), 2);
  EXPECT_TRUE(r.converged);
  for (int src = 0; src < 2; ++src) {
    double best = 0.0;
    for (int c = 0; c < 2; ++c) best = std::max(best, std::abs(naive_corr(s.col(src), r.transformed.data.col(c))));
    EXPECT_GT(best, 0.95);
  }
}

TEST(Ica, SingleColumnAndErrors) {
  const auto d = gaussian(100, 1, 5);
  const auto r = ica(make_table({"a"}, d), 1);
  EXPECT_NEAR(std::abs(naive_corr(d.col(0), r.transformed.data.col(0))), 1.0, 1e-12);
  EXPECT_THROW(ica(make_table({"a"}, d), 2), Error);
  // Gaussian sources: convergence is not guaranteed, but a result is always returned
  const auto g = ica(make_table({"a", "b"}, gaussian(500, 2, 8)), 2, {.max_iter = 5});
  EXPECT_EQ(g.transformed.n_cols(), 2u);
  EXPECT_LE(g.iterations, 5u);
}

TEST(Ica, Deterministic) {
  const auto t = make_table({"a", "b", "c"}, gaussian(300, 3, 4).array().cube().matrix());
  EXPECT_EQ(ica(t, 2).transformed.data, ica(t, 2).transformed.data);
}

TEST(FactorAnalysis, OneFactorReconstruction) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g;
  const Eigen::Index n = 2000;
  const std::vector<double> l0 = {0.9, 0.8, 0.7, 0.6, 0.5};
  Eigen::MatrixXd d(n, 5);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double f = g(rng);
    for (Eigen::Index j = 0; j < 5; ++j) d(i, j) = l0[static_cast<std::size_t>(j)] * f + std::sqrt(1 - l0[static_cast<std::size_t>(j)] * l0[static_cast<std::size_t>(j)]) * g(rng);
  }
  const auto r = factor_analysis(make_table(names(5), d), 1);
  Eigen::MatrixXd sample(5, 5);
  for (Eigen::Index i = 0; i < 5; ++i) {
    for (Eigen::Index j = 0; j < 5; ++j) sample(i, j) = i == j ? 1.0 : naive_corr(d.col(i), d.col(j));
  }
  EXPECT_LT((r.reconstructed() - sample).norm(), 0.1);
  for (Eigen::Index j = 0; j < 5; ++j) EXPECT_NEAR(r.loadings(j, 0), l0[static_cast<std::size_t>(j)], 0.08);
  for (Eigen::Index j = 0; j < 5; ++j) {
    EXPECT_GE(r.uniquenesses[j], 0.005);
    EXPECT_LE(r.uniquenesses[j], 1.0);
  }
}

TEST(FactorAnalysis, UncorrelatedAndErrors) {
  const auto t = make_table(names(4), gaussian(3000, 4, 9));
  const auto r = factor_analysis(t, 1);
  EXPECT_LT(r.loadings.cwiseAbs().maxCoeff(), 0.2);
  EXPECT_GT(r.uniquenesses.minCoeff(), 0.95);
  try {
    factor_analysis(t, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidK);
  }
  EXPECT_THROW(factor_analysis(t, 2, {.max_iter = 1, .tol = 1e-30}), Error);
}

TEST(Models, ExactOlsAndLogistic) {
  const auto x = gaussian(60, 3, 10);
  const Eigen::VectorXd y = (2.0 * x.col(0) - 3.0 * x.col(2)).array() + 1.5;
  const auto m = fit_ols(x, y);
  EXPECT_NEAR(m.coef[0], 2.0, 1e-10);
  EXPECT_NEAR(m.coef[1], 0.0, 1e-10);
  EXPECT_NEAR(m.coef[2], -3.0, 1e-10);
  EXPECT_NEAR(m.intercept, 1.5, 1e-10);
  EXPECT_NEAR(r_squared(y, m.decision(x)), 1.0, 1e-12);

  Eigen::VectorXd labels(60);
  Eigen::MatrixXd margin = x;
  for (Eigen::Index i = 0; i < 60; ++i) {
    labels[i] = x(i, 1) > 0 ? 1 : 0;
    margin(i, 1) += x(i, 1) > 0 ? 1.0 : -1.0;
  }
  const auto lm = fit_logistic(margin, labels);
  EXPECT_EQ(accuracy(labels, lm.predict(margin)), 1.0);
  Eigen::VectorXd three(60);
  for (Eigen::Index i = 0; i < 60; ++i) three[i] = x(i, 1) < -0.5 ? 0 : x(i, 1) < 0.5 ? 1 : 2;
  EXPECT_GT(accuracy(three, fit_logistic(x, three).predict(x)), 0.8);
  EXPECT_THROW(fit_logistic(x, Eigen::VectorXd::Zero(60)), Error);
}

TEST(Models, LassoShrinksToSparse) {
  const auto x = gaussian(200, 5, 12);
  const Eigen::VectorXd y = 3.0 * x.col(1);
  const auto m = fit_lasso(x, y, {.alpha = 0.05});
  EXPECT_GT(m.coef[1], 2.5);
  for (int j : {0, 2, 3, 4}) EXPECT_LT(std::abs(m.coef[j]), 0.05);
  EXPECT_EQ(fit_lasso(x, Eigen::VectorXd::Zero(200)).coef, Eigen::VectorXd::Zero(5));
}
