#ifndef VOXMARK_MLPIPE_VIZ_HPP
#define VOXMARK_MLPIPE_VIZ_HPP

#include <random>

#include "voxmark/mlpipe/decompose.hpp"

namespace voxmark::ml {

struct Histogram {
  std::vector<double> edges;  // bins + 1
  std::vector<std::size_t> counts;
};

/// Equal-width bins over the finite values; a constant sample gets the unit interval around it.
inline Histogram histogram(const std::vector<double>& values, std::size_t bins = 10) {
  if (bins == 0) throw Error(ErrorCode::InvalidArgument, "histogram: bins must be >= 1");
  Histogram h;
  h.counts.assign(bins, 0);
  std::vector<double> finite;
  for (double v : values) {
    if (std::isfinite(v)) finite.push_back(v);
  }
  double lo = 0.0, hi = 1.0;
  if (!finite.empty()) {
    const auto [mn, mx] = std::minmax_element(finite.begin(), finite.end());
    lo = *mn;
    hi = *mx;
    if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b <= bins; ++b) h.edges.push_back(b == bins ? hi : lo + width * static_cast<double>(b));
  for (double v : finite) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    h.counts[std::min(b, bins - 1)]++;
  }
  return h;
}

struct Scatter {
  std::string x_name, y_name;
  std::vector<double> x, y;  // rows where both are defined
  Histogram x_hist, y_hist;
  double slope = kNaNd, intercept = kNaNd;  // OLS fit of y on x
};

inline Scatter scatter(const std::string& x_name, const Eigen::VectorXd& xv, const std::string& y_name, const Eigen::VectorXd& yv,
                       std::size_t bins = 10) {
  Scatter s;
  s.x_name = x_name;
  s.y_name = y_name;
  for (Eigen::Index i = 0; i < xv.size(); ++i) {
    if (std::isfinite(xv[i]) && std::isfinite(yv[i])) {
      s.x.push_back(xv[i]);
      s.y.push_back(yv[i]);
    }
  }
  s.x_hist = histogram(s.x, bins);
  s.y_hist = histogram(s.y, bins);
  if (!s.x.empty()) {
    const double n = static_cast<double>(s.x.size());
    const double mx = std::accumulate(s.x.begin(), s.x.end(), 0.0) / n;
    const double my = std::accumulate(s.y.begin(), s.y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      sxy += (s.x[i] - mx) * (s.y[i] - my);
      sxx += (s.x[i] - mx) * (s.x[i] - mx);
    }
    if (sxx > 0.0) {
      s.slope = sxy / sxx;
      s.intercept = my - s.slope * mx;
    }
  }
  return s;
}

inline Scatter scatter(const FeatureTable& t, const std::string& x, const std::string& y, std::size_t bins = 10) {
  auto col = [&](const std::string& name) -> Eigen::VectorXd {
    if (name == kTargetHeader && t.target) return *t.target;
    const auto j = t.column_index(name);
    if (!j) throw Error(ErrorCode::SchemaError, "scatter: unknown column '" + name + "'");
    return t.column(*j);
  };
  return scatter(x, col(x), y, col(y), bins);
}

struct ScatterMatrix {
  std::vector<std::string> names;
  std::vector<Histogram> diagonal;
  std::vector<Scatter> pairs;  // (i, j) for i < j in row-major order
};

inline ScatterMatrix scatter_matrix(const FeatureTable& t, std::size_t bins = 10) {
  ScatterMatrix m;
  m.names = t.column_names;
  for (std::size_t i = 0; i < t.n_cols(); ++i) {
    const Eigen::VectorXd c = t.column(i);
    m.diagonal.push_back(histogram({c.data(), c.data() + c.size()}, bins));
    for (std::size_t j = i + 1; j < t.n_cols(); ++j) m.pairs.push_back(scatter(t, t.column_names[i], t.column_names[j], bins));
  }
  return m;
}

struct SwarmPoint {
  std::string feature;
  std::size_t row = 0;
  double class_label = 0.0;
  double value = 0.0;   // standardized
  double offset = 0.0;  // horizontal jitter in [-0.4, 0.4]
};

struct Swarm {
  std::vector<std::string> features;
  std::vector<double> classes;
  std::vector<SwarmPoint> points;
};

/// Standardized values per feature grouped by class, with seeded jitter.
inline Swarm swarm(const FeatureTable& t, std::uint64_t seed = 0) {
  require_classification(t);
  Swarm s;
  s.features = t.column_names;
  s.classes = class_labels(*t.target);
  const Eigen::MatrixXd z = fit_standardize(t.data).apply(t.data);
  std::mt19937_64 rng(seed);
  for (std::size_t j = 0; j < t.n_cols(); ++j) {
    for (std::size_t i = 0; i < t.n_rows(); ++i) {
      if (std::isnan(t.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))) continue;
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      s.points.push_back({t.column_names[j], i, (*t.target)[static_cast<Eigen::Index>(i)],
                          z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), 0.8 * u - 0.4});
    }
  }
  return s;
}

struct Heatmap {
  std::vector<std::string> names;
  Eigen::MatrixXd r;  // pearson, diagonal exactly 1
};

inline Heatmap corr_heatmap(const FeatureTable& t) {
  if (t.n_cols() < 2) throw Error(ErrorCode::TooFewColumns, "heatmap: needs at least 2 columns");
  return {t.column_names, correlation_matrix(impute_mean(t.data))};
}

struct VizExports {
  std::optional<Scatter> scatter;  // most target-correlated feature vs target, else first two columns
  std::optional<ScatterMatrix> scatter_matrix;
  std::optional<Swarm> swarm;
  std::optional<Heatmap> heatmap;
};

/// Every export whose precondition holds; scatter matrix limited to the first max_matrix columns.
inline VizExports viz_exports(const FeatureTable& t, std::size_t max_matrix = 8, std::uint64_t seed = 0) {
  VizExports v;
  if (t.n_cols() >= 1 && t.target) {
    const Eigen::MatrixXd x = impute_mean(t.data);
    std::size_t best = 0;
    double best_r = -1.0;
    for (std::size_t j = 0; j < t.n_cols(); ++j) {
      const double r = std::abs(pearson(x.col(static_cast<Eigen::Index>(j)), *t.target));
      if (r > best_r) {
        best_r = r;
        best = j;
      }
    }
    v.scatter = scatter(t, t.column_names[best], std::string(kTargetHeader));
  } else if (t.n_cols() >= 2) {
    v.scatter = scatter(t, t.column_names[0], t.column_names[1]);
  }
  if (t.n_cols() >= 2) {
    v.heatmap = corr_heatmap(t);
    std::vector<std::string> sub(t.column_names.begin(),
                                 t.column_names.begin() + static_cast<std::ptrdiff_t>(std::min(max_matrix, t.n_cols())));
    v.scatter_matrix = scatter_matrix(t.select_columns(sub));
  }
  if (t.task == TaskKind::classification && t.n_cols() >= 1) v.swarm = swarm(t, seed);
  return v;
}

}  // namespace voxmark::ml

#endif
