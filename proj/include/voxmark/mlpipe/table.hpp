#ifndef VOXMARK_MLPIPE_TABLE_HPP
#define VOXMARK_MLPIPE_TABLE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "voxmark/error.hpp"
#include "voxmark/series.hpp"

namespace voxmark::ml {

enum class TaskKind { none, regression, classification };

inline std::string to_string(TaskKind k) {
  switch (k) {
    case TaskKind::none: return "none";
    case TaskKind::regression: return "regression";
    case TaskKind::classification: return "classification";
  }
  return "?";
}

inline constexpr std::size_t kMaxInferredClasses = 20;

/// Classification when every target is a finite integer and there are at most 20 distinct values.
inline TaskKind infer_task(const Eigen::VectorXd& y) {
  std::set<double> distinct;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i]) || y[i] != std::round(y[i])) return TaskKind::regression;
    distinct.insert(y[i]);
    if (distinct.size() > kMaxInferredClasses) return TaskKind::regression;
  }
  return TaskKind::classification;
}

struct FeatureTable {
  std::vector<std::string> column_names;
  Eigen::MatrixXd data;  // n_rows x n_cols, NaN allowed
  std::vector<std::string> row_ids;
  std::optional<Eigen::VectorXd> target;
  TaskKind task = TaskKind::none;

  std::size_t n_rows() const { return static_cast<std::size_t>(data.rows()); }
  std::size_t n_cols() const { return static_cast<std::size_t>(data.cols()); }
  bool has_target() const { return target.has_value(); }

  std::optional<std::size_t> column_index(std::string_view name) const {
    for (std::size_t j = 0; j < column_names.size(); ++j) {
      if (column_names[j] == name) return j;
    }
    return std::nullopt;
  }

  /// Throws SchemaError on any broken invariant.
  void validate() const {
    if (column_names.size() != n_cols()) throw Error(ErrorCode::SchemaError, "column name count differs from data width");
    if (row_ids.size() != n_rows()) throw Error(ErrorCode::SchemaError, "row id count differs from data height");
    std::unordered_set<std::string> seen;
    for (const auto& c : column_names) {
      if (!seen.insert(c).second) throw Error(ErrorCode::SchemaError, "duplicate column '" + c + "'");
    }
    seen.clear();
    for (const auto& r : row_ids) {
      if (!seen.insert(r).second) throw Error(ErrorCode::SchemaError, "duplicate row id '" + r + "'");
    }
    if (target) {
      if (static_cast<std::size_t>(target->size()) != n_rows()) throw Error(ErrorCode::SchemaError, "target length differs from row count");
      for (Eigen::Index i = 0; i < target->size(); ++i) {
        if (!std::isfinite((*target)[i])) throw Error(ErrorCode::SchemaError, "target must be finite (row '" + row_ids[i] + "')");
      }
      if (task == TaskKind::none) throw Error(ErrorCode::SchemaError, "table has a target but no task kind");
    } else if (task != TaskKind::none) {
      throw Error(ErrorCode::SchemaError, "task kind set without a target");
    }
  }

  Eigen::VectorXd column(std::size_t j) const { return data.col(static_cast<Eigen::Index>(j)); }

  FeatureTable select_columns(const std::vector<std::string>& names) const {
    FeatureTable out;
    out.row_ids = row_ids;
    out.target = target;
    out.task = task;
    out.column_names = names;
    out.data.resize(data.rows(), static_cast<Eigen::Index>(names.size()));
    for (std::size_t j = 0; j < names.size(); ++j) {
      const auto idx = column_index(names[j]);
      if (!idx) throw Error(ErrorCode::SchemaError, "unknown column '" + names[j] + "'");
      out.data.col(static_cast<Eigen::Index>(j)) = data.col(static_cast<Eigen::Index>(*idx));
    }
    return out;
  }

  FeatureTable select_rows(const std::vector<std::size_t>& rows) const {
    FeatureTable out;
    out.column_names = column_names;
    out.task = task;
    out.data.resize(static_cast<Eigen::Index>(rows.size()), data.cols());
    if (target) out.target = Eigen::VectorXd(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(rows[i]);
      out.data.row(static_cast<Eigen::Index>(i)) = data.row(r);
      out.row_ids.push_back(row_ids[rows[i]]);
      if (target) (*out.target)[static_cast<Eigen::Index>(i)] = (*target)[r];
    }
    return out;
  }
};

/// Builds a validated table; task is inferred from the target unless given.
inline FeatureTable make_table(std::vector<std::string> names, Eigen::MatrixXd data, std::vector<std::string> row_ids = {},
                               std::optional<Eigen::VectorXd> target = std::nullopt,
                               std::optional<TaskKind> task = std::nullopt) {
  FeatureTable t;
  if (row_ids.empty()) {
    for (Eigen::Index i = 0; i < data.rows(); ++i) row_ids.push_back("r" + std::to_string(i));
  }
  t.column_names = std::move(names);
  t.data = std::move(data);
  t.row_ids = std::move(row_ids);
  t.target = std::move(target);
  if (t.target) t.task = task ? *task : infer_task(*t.target);
  t.validate();
  return t;
}

inline void require_target(const FeatureTable& t) {
  if (!t.has_target()) throw Error(ErrorCode::SchemaError, "operation requires a target column");
}

inline void require_classification(const FeatureTable& t) {
  require_target(t);
  if (t.task != TaskKind::classification) throw Error(ErrorCode::NotClassification, "operation requires a classification target");
}

/// Sorted distinct labels of a classification target.
inline std::vector<double> class_labels(const Eigen::VectorXd& y) {
  std::set<double> s(y.data(), y.data() + y.size());
  return {s.begin(), s.end()};
}

// ---------------------------------------------------------------------------
// Column statistics

inline constexpr double kNaNd = std::numeric_limits<double>::quiet_NaN();

/// Population mean over non-NaN entries; NaN when none.
inline double nan_mean(const Eigen::Ref<const Eigen::VectorXd>& v) {
  double s = 0.0;
  std::size_t n = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isnan(v[i])) {
      s += v[i];
      ++n;
    }
  }
  return n ? s / static_cast<double>(n) : kNaNd;
}

/// Population variance; exactly 0 when all entries are equal.
inline double pvariance(const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() == 0) return kNaNd;
  if (v.maxCoeff() == v.minCoeff()) return 0.0;
  const double m = v.mean();
  return (v.array() - m).square().mean();
}

/// Pearson correlation; 0 when either side has zero variance.
inline double pearson(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "pearson: length mismatch");
  if (a.size() == 0) return 0.0;
  if (a.maxCoeff() == a.minCoeff() || b.maxCoeff() == b.minCoeff()) return 0.0;
  const Eigen::ArrayXd da = a.array() - a.mean();
  const Eigen::ArrayXd db = b.array() - b.mean();
  const double sab = (da * db).sum();
  const double saa = da.square().sum();
  const double sbb = db.square().sum();
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr std::string_view kRowIdHeader = "row_id";
inline constexpr std::string_view kTargetHeader = "target";

/// Shortest representation that round-trips exactly; "nan", "inf", "-inf" for non-finite.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

/// Empty field parses as NaN.
inline std::optional<double> parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return kNaNd;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::string csv_quote(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

/// RFC 4180 records: quoted fields may contain commas, doubled quotes and newlines.
inline std::vector<std::vector<std::string>> parse_csv_records(std::string_view content) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false, field_started = false;
  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    bool blank = record.size() == 1 && record[0].empty();
    if (!blank) records.push_back(std::move(record));
    record.clear();
    field_started = false;
  };
  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && !field_started) {
      quoted = field_started = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      field_started = false;
    } else if (c == '\n') {
      end_record();
    } else if (c == '\r') {
      // tolerated before '\n'
    } else {
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw Error(ErrorCode::SchemaError, "unterminated quoted CSV field");
  if (!field.empty() || !record.empty()) end_record();
  return records;
}

/// Header: row_id, feature names..., optional trailing "target".
inline FeatureTable parse_table_csv(std::string_view content, std::optional<TaskKind> task = std::nullopt) {
  const auto records = parse_csv_records(content);
  if (records.empty()) throw Error(ErrorCode::SchemaError, "CSV has no header");
  const auto& header = records[0];
  if (header.empty() || header[0] != kRowIdHeader) throw Error(ErrorCode::SchemaError, "first CSV column must be 'row_id'");
  const bool has_target = header.size() >= 2 && header.back() == kTargetHeader;
  const std::size_t n_cols = header.size() - 1 - (has_target ? 1 : 0);
  std::vector<std::string> names(header.begin() + 1, header.begin() + 1 + static_cast<std::ptrdiff_t>(n_cols));
  const auto n_rows = static_cast<Eigen::Index>(records.size() - 1);
  Eigen::MatrixXd data(n_rows, static_cast<Eigen::Index>(n_cols));
  Eigen::VectorXd y(n_rows);
  std::vector<std::string> ids;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != header.size()) {
      throw Error(ErrorCode::SchemaError, "CSV record " + std::to_string(r + 1) + " has " + std::to_string(rec.size()) +
                                              " fields, header has " + std::to_string(header.size()));
    }
    ids.push_back(rec[0]);
    for (std::size_t j = 1; j < rec.size(); ++j) {
      const auto v = parse_double(rec[j]);
      if (!v) throw Error(ErrorCode::SchemaError, "CSV record " + std::to_string(r + 1) + ": '" + rec[j] + "' is not a number");
      if (has_target && j + 1 == rec.size()) y[static_cast<Eigen::Index>(r - 1)] = *v;
      else data(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(j - 1)) = *v;
    }
  }
  std::optional<Eigen::VectorXd> target;
  if (has_target) target = y;
  return make_table(std::move(names), std::move(data), std::move(ids), std::move(target), task);
}

inline std::string table_to_csv(const FeatureTable& t) {
  std::string out(kRowIdHeader);
  for (const auto& c : t.column_names) out += "," + csv_quote(c);
  if (t.target) out += "," + std::string(kTargetHeader);
  out += '\n';
  for (std::size_t i = 0; i < t.n_rows(); ++i) {
    out += csv_quote(t.row_ids[i]);
    for (std::size_t j = 0; j < t.n_cols(); ++j) {
      out += ',';
      out += format_double(t.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    if (t.target) {
      out += ',';
      out += format_double((*t.target)[static_cast<Eigen::Index>(i)]);
    }
    out += '\n';
  }
  return out;
}

inline FeatureTable load_table_csv(const std::filesystem::path& path, std::optional<TaskKind> task = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_table_csv(ss.str(), task);
}

}  // namespace voxmark::ml

#endif
