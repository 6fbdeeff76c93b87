#ifndef VOXMARK_CLI_ANALYZE_HPP
#define VOXMARK_CLI_ANALYZE_HPP

#include "voxmark/cli/extract.hpp"
#include "voxmark/cli/svg.hpp"
#include "voxmark/mlpipe.hpp"

namespace voxmark::cli {

struct StageSpec {
  std::size_t index = 0;  // 1-based
  std::string type;
  json params;

  std::string label() const { return "stage " + std::to_string(index) + " (" + type + ")"; }
};

struct AnalyzeSpec {
  std::optional<ml::TaskKind> task;  // nullopt = infer from the target
  std::vector<StageSpec> stages;
  bool plots = true;
};

namespace detail {

/// Allowed parameters and defaults per stage type.
inline const std::map<std::string, json>& stage_schema() {
  static const std::map<std::string, json> s = {
      {"low_variance_filter", {{"threshold", 0.0}}},
      {"high_correlation_filter", {{"threshold", 0.95}}},
      {"pca", {{"k", nullptr}}},
      {"ica", {{"k", nullptr}, {"max_iter", 500}, {"tol", 1e-6}}},
      {"factor_analysis", {{"k", nullptr}, {"max_iter", 200}, {"tol", 1e-5}}},
      {"anova_f_select", {{"k", nullptr}}},
      {"rfe_select", {{"k", nullptr}, {"estimator", nullptr}}},
      {"importance_select", {{"threshold", "mean"}}},
      {"mrmr_rank", {{"k", nullptr}}},
      {"cv_score_curve", {{"selector", "mrmr"}, {"estimator", nullptr}, {"k_values", nullptr}, {"folds", 5}}},
  };
  return s;
}

inline bool needs_target(const std::string& type) {
  return type == "anova_f_select" || type == "rfe_select" || type == "importance_select" || type == "mrmr_rank" ||
         type == "cv_score_curve";
}

[[noreturn]] inline void schema_error(const StageSpec& s, const std::string& msg) {
  throw Error(ErrorCode::SchemaError, s.label() + ": " + msg);
}

inline std::size_t positive_int(const StageSpec& s, const char* key) {
  const json& v = s.params.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 1) schema_error(s, std::string("'") + key + "' must be a positive integer");
  return v.get<std::size_t>();
}

inline double real(const StageSpec& s, const char* key) {
  const json& v = s.params.at(key);
  if (!v.is_number()) schema_error(s, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

inline std::optional<ml::Estimator> estimator_param(const StageSpec& s) {
  const json& v = s.params.at("estimator");
  if (v.is_null()) return std::nullopt;
  if (!v.is_string()) schema_error(s, "'estimator' must be a string");
  try {
    return ml::parse_estimator(v.get<std::string>());
  } catch (const Error& e) {
    schema_error(s, e.what());
  }
}

inline std::vector<std::size_t> k_values_param(const StageSpec& s, std::size_t n_cols) {
  const json& v = s.params.at("k_values");
  std::vector<std::size_t> ks;
  if (v.is_null()) {
    for (std::size_t k = 1; k <= n_cols; ++k) ks.push_back(k);
    return ks;
  }
  if (!v.is_array() || v.empty()) schema_error(s, "'k_values' must be a nonempty array of positive integers");
  for (const auto& k : v) {
    if (!k.is_number_integer() || k.get<std::int64_t>() < 1) schema_error(s, "'k_values' must contain positive integers");
    ks.push_back(k.get<std::size_t>());
  }
  return ks;
}

}  // namespace detail

/// Structural validation only; data-dependent checks happen when the table is known.
inline AnalyzeSpec parse_analyze_spec(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "stage spec must be a JSON object");
  AnalyzeSpec spec;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "task" && it.key() != "stages" && it.key() != "plots") {
      throw Error(ErrorCode::SchemaError, "unknown stage spec key '" + it.key() + "'");
    }
  }
  if (j.contains("task")) {
    const std::string t = j["task"].is_string() ? j["task"].get<std::string>() : "";
    if (t == "classification") spec.task = ml::TaskKind::classification;
    else if (t == "regression") spec.task = ml::TaskKind::regression;
    else if (t != "auto") throw Error(ErrorCode::SchemaError, "'task' must be auto, classification or regression");
  }
  if (j.contains("plots")) {
    if (!j["plots"].is_boolean()) throw Error(ErrorCode::SchemaError, "'plots' must be true or false");
    spec.plots = j["plots"].get<bool>();
  }
  const json stages = j.value("stages", json::array());
  if (!stages.is_array()) throw Error(ErrorCode::SchemaError, "'stages' must be an array");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    StageSpec s;
    s.index = i + 1;
    s.type = "?";
    const json& sj = stages[i];
    if (!sj.is_object() || !sj.contains("type") || !sj["type"].is_string()) detail::schema_error(s, "each stage needs a string 'type'");
    s.type = sj["type"].get<std::string>();
    const auto schema = detail::stage_schema().find(s.type);
    if (schema == detail::stage_schema().end()) detail::schema_error(s, "unknown stage type");
    s.params = schema->second;
    for (auto it = sj.begin(); it != sj.end(); ++it) {
      if (it.key() == "type") continue;
      if (!s.params.contains(it.key())) detail::schema_error(s, "unknown parameter '" + it.key() + "'");
      s.params[it.key()] = *it;
    }
    if (s.params.contains("k")) detail::positive_int(s, "k");
    if (s.type == "low_variance_filter" && detail::real(s, "threshold") < 0) detail::schema_error(s, "'threshold' must be >= 0");
    if (s.type == "high_correlation_filter") {
      const double t = detail::real(s, "threshold");
      if (!(t > 0 && t < 1)) detail::schema_error(s, "'threshold' must lie in (0, 1)");
    }
    if (s.type == "importance_select") {
      const json& t = s.params["threshold"];
      if (!(t.is_number() || (t.is_string() && t.get<std::string>() == "mean"))) detail::schema_error(s, "'threshold' must be a number or \"mean\"");
    }
    if (s.params.contains("estimator")) detail::estimator_param(s);
    if (s.type == "ica" || s.type == "factor_analysis") {
      detail::positive_int(s, "max_iter");
      if (detail::real(s, "tol") <= 0) detail::schema_error(s, "'tol' must be positive");
    }
    if (s.type == "cv_score_curve") {
      if (!s.params["selector"].is_string()) detail::schema_error(s, "'selector' must be a string");
      try {
        ml::parse_selector(s.params["selector"].get<std::string>());
      } catch (const Error& e) {
        detail::schema_error(s, e.what());
      }
      if (detail::positive_int(s, "folds") < 2) detail::schema_error(s, "'folds' must be >= 2");
      detail::k_values_param(s, 1);
    }
    spec.stages.push_back(std::move(s));
  }
  return spec;
}

struct AnalyzeResult {
  json report;
  std::vector<std::string> final_columns;
  std::vector<std::string> files;  // written, relative to out_dir, in write order
};

namespace detail {

inline std::string csv_row(std::initializer_list<std::string> fields) {
  std::string out;
  bool first = true;
  for (const auto& f : fields) {
    if (!first) out += ',';
    out += ml::csv_quote(f);
    first = false;
  }
  return out + '\n';
}

inline std::string ranking_csv(const ml::SelectionResult& r, const std::vector<std::string>& columns) {
  std::unordered_set<std::string> kept(r.kept_columns.begin(), r.kept_columns.end());
  std::string out;
  if (!r.ranking.empty()) {
    out = "rank,feature,score,kept\n";
    for (std::size_t i = 0; i < r.ranking.size(); ++i) {
      const auto score = r.score_of(r.ranking[i]);
      out += csv_row({std::to_string(i + 1), r.ranking[i], ml::format_double(score.value_or(kNaN)), kept.count(r.ranking[i]) ? "1" : "0"});
    }
  } else {
    out = "feature,score,kept\n";
    for (const auto& c : columns) out += csv_row({c, ml::format_double(r.score_of(c).value_or(kNaN)), kept.count(c) ? "1" : "0"});
  }
  return out;
}

inline std::string matrix_csv(const std::vector<std::string>& row_names, const std::vector<std::string>& col_names,
                              const Eigen::MatrixXd& m, const std::string& corner) {
  std::string out = ml::csv_quote(corner);
  for (const auto& c : col_names) out += "," + ml::csv_quote(c);
  out += '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out += ml::csv_quote(row_names[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < m.cols(); ++j) out += "," + ml::format_double(m(i, j));
    out += '\n';
  }
  return out;
}

inline std::string stage_file(const StageSpec& s, const std::string& ext) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "stage%02zu_", s.index);
  return buf + s.type + ext;
}

}  // namespace detail

/// Runs the filter -> transform -> select -> cv chain over the table, writing reports and plots to out_dir.
inline AnalyzeResult cmd_analyze(const ml::FeatureTable& input, const AnalyzeSpec& spec, const std::filesystem::path& out_dir,
                                 std::uint64_t seed = 0) {
  for (const auto& s : spec.stages) {
    if (detail::needs_target(s.type) && !input.has_target()) detail::schema_error(s, "requires a 'target' column in the feature table");
    if ((s.type == "anova_f_select" || (s.type == "cv_score_curve" && s.params["selector"] == "anova")) &&
        input.task != ml::TaskKind::classification) {
      detail::schema_error(s, "ANOVA selection requires a classification target");
    }
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (!std::filesystem::is_directory(out_dir)) throw Error(ErrorCode::UnwritableOutput, "cannot create output directory " + out_dir.string());

  AnalyzeResult res;
  auto write = [&](const std::string& name, const std::string& content) {
    write_atomic(out_dir / name, content);
    res.files.push_back(name);
  };

  ml::FeatureTable table = input;
  json& rep = res.report;
  rep["input"] = {{"rows", input.n_rows()}, {"columns", input.n_cols()}, {"task", ml::to_string(input.task)}};
  rep["stages"] = json::array();

  for (const auto& s : spec.stages) {
    json sr = {{"stage", s.index}, {"type", s.type}, {"params", s.params}, {"columns_in", table.column_names}};
    try {
      const auto& p = s.params;
      auto apply_selection = [&](const ml::SelectionResult& r) {
        sr["kept"] = r.kept_columns;
        sr["dropped"] = r.dropped(table.column_names);
        write(detail::stage_file(s, ".csv"), detail::ranking_csv(r, table.column_names));
        table = table.select_columns(r.kept_columns);
      };
      if (s.type == "low_variance_filter") {
        apply_selection(ml::low_variance_filter(table, p["threshold"].get<double>()));
      } else if (s.type == "high_correlation_filter") {
        apply_selection(ml::high_correlation_filter(table, p["threshold"].get<double>()));
      } else if (s.type == "anova_f_select") {
        apply_selection(ml::anova_f_select(table, p["k"].get<std::size_t>()));
      } else if (s.type == "rfe_select") {
        apply_selection(ml::rfe_select(table, p["k"].get<std::size_t>(),
                                       detail::estimator_param(s).value_or(ml::default_estimator(table.task))));
      } else if (s.type == "importance_select") {
        const auto th = p["threshold"].is_string() ? ml::ImportanceThreshold::mean() : ml::ImportanceThreshold::at(p["threshold"].get<double>());
        apply_selection(ml::importance_select(table, th));
      } else if (s.type == "mrmr_rank") {
        apply_selection(ml::mrmr_rank(table, p["k"].get<std::size_t>()));
      } else if (s.type == "pca") {
        const auto r = ml::pca(table, p["k"].get<std::size_t>());
        std::vector<std::string> comps = r.transformed.column_names;
        Eigen::MatrixXd m(r.components.rows(), r.components.cols() + 2);
        m << r.explained_variance, r.explained_variance_ratio, r.components;
        std::vector<std::string> cols = {"explained_variance", "explained_variance_ratio"};
        cols.insert(cols.end(), table.column_names.begin(), table.column_names.end());
        write(detail::stage_file(s, ".csv"), detail::matrix_csv(comps, cols, m, "component"));
        sr["explained_variance_ratio"] = std::vector<double>(r.explained_variance_ratio.data(), r.explained_variance_ratio.data() + r.explained_variance_ratio.size());
        table = r.transformed;
      } else if (s.type == "ica") {
        const auto r = ml::ica(table, p["k"].get<std::size_t>(),
                               {.max_iter = p["max_iter"].get<std::size_t>(), .tol = p["tol"].get<double>(), .seed = seed});
        write(detail::stage_file(s, ".csv"), detail::matrix_csv(r.transformed.column_names, table.column_names, r.unmixing, "component"));
        sr["converged"] = r.converged;
        sr["iterations"] = r.iterations;
        if (!r.converged) sr["warning"] = s.label() + ": " + std::string(to_string(ErrorCode::ConvergenceFailure)) + " after " + std::to_string(r.iterations) + " iterations; partial result kept";
        table = r.transformed;
      } else if (s.type == "factor_analysis") {
        const auto r = ml::factor_analysis(table, p["k"].get<std::size_t>(),
                                           {.max_iter = p["max_iter"].get<std::size_t>(), .tol = p["tol"].get<double>()});
        Eigen::MatrixXd m(r.loadings.rows(), r.loadings.cols() + 1);
        m << r.uniquenesses, r.loadings;
        std::vector<std::string> cols = {"uniqueness"};
        for (Eigen::Index f = 0; f < r.loadings.cols(); ++f) cols.push_back("factor" + std::to_string(f + 1));
        write(detail::stage_file(s, ".csv"), detail::matrix_csv(table.column_names, cols, m, "feature"));
        sr["iterations"] = r.iterations;
      } else if (s.type == "cv_score_curve") {
        ml::CvSpec cv;
        cv.selector = ml::parse_selector(p["selector"].get<std::string>());
        cv.estimator = detail::estimator_param(s);
        cv.k_values = detail::k_values_param(s, table.n_cols());
        cv.folds = p["folds"].get<std::size_t>();
        cv.seed = seed;
        const auto curve = ml::cv_score_curve(table, cv);
        std::string csv = "k,mean_score,std_score";
        for (std::size_t f = 0; f < cv.folds; ++f) csv += ",fold" + std::to_string(f + 1);
        csv += '\n';
        json pts = json::array();
        for (const auto& pt : curve.points) {
          csv += std::to_string(pt.k) + "," + ml::format_double(pt.mean_score) + "," + ml::format_double(pt.std_score);
          for (double v : pt.fold_scores) csv += "," + ml::format_double(v);
          csv += '\n';
          pts.push_back({{"k", pt.k}, {"mean_score", pt.mean_score}, {"std_score", pt.std_score}, {"fold_selections", pt.fold_selections}});
        }
        write(detail::stage_file(s, ".csv"), csv);
        if (spec.plots) write(detail::stage_file(s, ".svg"), svg::curve(curve, "CV " + curve.metric + " vs k (" + to_string(cv.selector) + ")"));
        sr["metric"] = curve.metric;
        sr["points"] = pts;
      }
    } catch (const Error& e) {
      throw Error(e.code(), s.label() + ": " + e.what());
    }
    sr["columns_out"] = table.column_names;
    rep["stages"].push_back(sr);
  }

  res.final_columns = table.column_names;
  rep["final_columns"] = table.column_names;
  std::string kept;
  for (const auto& c : table.column_names) kept += c + "\n";
  write("kept_features.txt", kept);

  if (spec.plots) {
    const auto v = ml::viz_exports(input, 8, seed);
    if (v.scatter) write("scatter.svg", svg::scatter(*v.scatter));
    if (v.heatmap) {
      write("heatmap.csv", detail::matrix_csv(v.heatmap->names, v.heatmap->names, v.heatmap->r, "feature"));
      write("heatmap.svg", svg::heatmap(*v.heatmap));
    }
    if (v.scatter_matrix) write("scatter_matrix.svg", svg::scatter_matrix(*v.scatter_matrix));
    if (v.swarm) write("swarm.svg", svg::swarm(*v.swarm));
  }
  write("report.json", rep.dump(2) + "\n");
  return res;
}

}  // namespace voxmark::cli

#endif
