#ifndef VOXMARK_CLI_SVG_HPP
#define VOXMARK_CLI_SVG_HPP

// Static, self-contained SVG renderings of the mlpipe exports. No scripts, no external assets.

#include <cstdio>
#include <string>

#include "voxmark/mlpipe/cv.hpp"
#include "voxmark/mlpipe/viz.hpp"

namespace voxmark::cli::svg {

inline std::string num(double v) {
  if (!std::isfinite(v)) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

class Canvas {
 public:
  Canvas(double w, double h) : w_(w), h_(h) {}

  void rect(double x, double y, double w, double h, const std::string& fill, const std::string& extra = "") {
    body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"" +
             extra + "/>\n";
  }
  void circle(double cx, double cy, double r, const std::string& fill) {
    body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) + "\" fill=\"" + fill + "\" fill-opacity=\"0.7\"/>\n";
  }
  void line(double x1, double y1, double x2, double y2, const std::string& stroke, double width = 1.0) {
    body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke +
             "\" stroke-width=\"" + num(width) + "\"/>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke) {
    body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) body_ += num(x) + "," + num(y) + " ";
    body_ += "\"/>\n";
  }
  void text(double x, double y, std::string_view s, double size = 11, const std::string& anchor = "start", double rotate = 0) {
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"" + num(size) +
             "\" text-anchor=\"" + anchor + "\"";
    if (rotate != 0) body_ += " transform=\"rotate(" + num(rotate) + " " + num(x) + " " + num(y) + ")\"";
    body_ += ">" + escape(s) + "</text>\n";
  }
  std::string str() const {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w_) + "\" height=\"" + num(h_) + "\" viewBox=\"0 0 " + num(w_) +
           " " + num(h_) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n" + body_ + "</svg>\n";
  }

 private:
  double w_, h_;
  std::string body_;
};

/// Affine map of [lo, hi] onto [a, b]; degenerate ranges map to the midpoint.
struct Scale {
  double lo, hi, a, b;
  double operator()(double v) const { return hi > lo ? a + (v - lo) / (hi - lo) * (b - a) : (a + b) / 2; }
};

inline std::pair<double, double> range_of(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 1.0};
  auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  return {*mn, *mx};
}

/// Blue (-1) through white (0) to red (+1).
inline std::string diverging(double r) {
  if (!std::isfinite(r)) return "#cccccc";
  r = std::clamp(r, -1.0, 1.0);
  const auto mix = [](double t) { return static_cast<int>(std::lround(255.0 * (1.0 - t))); };
  char buf[8];
  if (r >= 0) std::snprintf(buf, sizeof buf, "#ff%02x%02x", mix(r), mix(r));
  else std::snprintf(buf, sizeof buf, "#%02x%02xff", mix(-r), mix(-r));
  return buf;
}

inline void axes(Canvas& c, double x0, double y0, double x1, double y1) {
  c.line(x0, y1, x1, y1, "#333333");
  c.line(x0, y0, x0, y1, "#333333");
}

/// Main panel with marginal histograms on top and right, OLS line overlaid.
inline std::string scatter(const ml::Scatter& s) {
  Canvas c(560, 560);
  const double x0 = 60, y0 = 120, x1 = 440, y1 = 500;
  const auto [xlo, xhi] = range_of(s.x);
  const auto [ylo, yhi] = range_of(s.y);
  const Scale sx{xlo, xhi, x0, x1}, sy{ylo, yhi, y1, y0};
  axes(c, x0, y0, x1, y1);
  for (std::size_t i = 0; i < s.x.size(); ++i) c.circle(sx(s.x[i]), sy(s.y[i]), 3, "#1f77b4");
  if (std::isfinite(s.slope)) c.line(sx(xlo), sy(s.intercept + s.slope * xlo), sx(xhi), sy(s.intercept + s.slope * xhi), "#d62728", 2);
  auto bars = [&](const ml::Histogram& h, bool horizontal) {
    const std::size_t peak = h.counts.empty() ? 1 : std::max<std::size_t>(1, *std::max_element(h.counts.begin(), h.counts.end()));
    const double n = static_cast<double>(h.counts.size());
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      const double frac = static_cast<double>(h.counts[b]) / static_cast<double>(peak);
      if (!horizontal) {
        const double w = (x1 - x0) / n;
        c.rect(x0 + w * static_cast<double>(b), y0 - 10 - 80 * frac, w - 1, 80 * frac, "#9ecae1");
      } else {
        const double hgt = (y1 - y0) / n;
        c.rect(x1 + 10, y1 - hgt * static_cast<double>(b + 1), 80 * frac, hgt - 1, "#9ecae1");
      }
    }
  };
  bars(s.x_hist, false);
  bars(s.y_hist, true);
  c.text((x0 + x1) / 2, 535, s.x_name, 12, "middle");
  c.text(20, (y0 + y1) / 2, s.y_name, 12, "middle", -90);
  c.text(x0, 525, num(xlo), 10);
  c.text(x1, 525, num(xhi), 10, "end");
  c.text(x0 - 5, y1, num(ylo), 10, "end");
  c.text(x0 - 5, y0 + 10, num(yhi), 10, "end");
  if (std::isfinite(s.slope)) c.text(x0, 20, "OLS: y = " + num(s.slope) + " x + " + num(s.intercept), 12);
  return c.str();
}

inline std::string heatmap(const ml::Heatmap& h, std::size_t max_columns = 60) {
  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(h.r.rows()), max_columns);
  const double cell = std::max(6.0, 480.0 / static_cast<double>(std::max<std::size_t>(n, 1)));
  const double margin = 160;
  Canvas c(margin + cell * static_cast<double>(n) + 20, margin + cell * static_cast<double>(n) + 40);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double r = h.r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      c.rect(margin + cell * static_cast<double>(j), margin + cell * static_cast<double>(i), cell, cell, diverging(r));
    }
    const double fs = std::min(11.0, cell * 0.9);
    c.text(margin - 4, margin + cell * (static_cast<double>(i) + 0.75), h.names[i], fs, "end");
    c.text(margin + cell * (static_cast<double>(i) + 0.75), margin - 4, h.names[i], fs, "start", -90);
  }
  if (n < static_cast<std::size_t>(h.r.rows())) {
    c.text(10, margin + cell * static_cast<double>(n) + 25,
           "first " + std::to_string(n) + " of " + std::to_string(h.r.rows()) + " columns shown; full matrix in heatmap.csv", 11);
  }
  return c.str();
}

inline std::string curve(const ml::CvCurve& cv, const std::string& title) {
  Canvas c(560, 400);
  const double x0 = 60, y0 = 40, x1 = 530, y1 = 340;
  std::vector<double> ks, lo_hi;
  for (const auto& p : cv.points) {
    ks.push_back(static_cast<double>(p.k));
    lo_hi.push_back(p.mean_score - p.std_score);
    lo_hi.push_back(p.mean_score + p.std_score);
  }
  auto [klo, khi] = range_of(ks);
  auto [ylo, yhi] = range_of(lo_hi);
  if (cv.metric == "accuracy") {
    ylo = std::min(ylo, 0.0);
    yhi = std::max(yhi, 1.0);
  }
  const Scale sx{klo, khi, x0, x1}, sy{ylo, yhi, y1, y0};
  axes(c, x0, y0, x1, y1);
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : cv.points) {
    const double x = sx(static_cast<double>(p.k));
    c.line(x, sy(p.mean_score - p.std_score), x, sy(p.mean_score + p.std_score), "#999999");
    c.circle(x, sy(p.mean_score), 4, "#2ca02c");
    pts.emplace_back(x, sy(p.mean_score));
    c.text(x, y1 + 15, std::to_string(p.k), 10, "middle");
  }
  c.polyline(pts, "#2ca02c");
  c.text((x0 + x1) / 2, 385, "number of selected features", 12, "middle");
  c.text(15, (y0 + y1) / 2, "CV " + cv.metric, 12, "middle", -90);
  c.text(x0 - 5, y1, num(ylo), 10, "end");
  c.text(x0 - 5, y0 + 5, num(yhi), 10, "end");
  c.text(x0, 25, title, 12);
  return c.str();
}

inline std::string scatter_matrix(const ml::ScatterMatrix& m) {
  const std::size_t n = m.names.size();
  const double cell = 110, margin = 30;
  Canvas c(margin + cell * static_cast<double>(n) + 10, margin + cell * static_cast<double>(n) + 10);
  std::size_t pair = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++pair) {
      const auto& s = m.pairs[pair];
      // lower triangle: row j, column i shows x = names[i], y = names[j]
      const double ox = margin + cell * static_cast<double>(i), oy = margin + cell * static_cast<double>(j);
      c.rect(ox + 2, oy + 2, cell - 4, cell - 4, "none", " stroke=\"#cccccc\"");
      const auto [xlo, xhi] = range_of(s.x);
      const auto [ylo, yhi] = range_of(s.y);
      const Scale sx{xlo, xhi, ox + 6, ox + cell - 6}, sy{ylo, yhi, oy + cell - 6, oy + 6};
      for (std::size_t k = 0; k < s.x.size(); ++k) c.circle(sx(s.x[k]), sy(s.y[k]), 1.5, "#1f77b4");
    }
    const auto& h = m.diagonal[i];
    const double ox = margin + cell * static_cast<double>(i), oy = margin + cell * static_cast<double>(i);
    const std::size_t peak = std::max<std::size_t>(1, *std::max_element(h.counts.begin(), h.counts.end()));
    const double w = (cell - 8) / static_cast<double>(h.counts.size());
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      const double hh = (cell - 20) * static_cast<double>(h.counts[b]) / static_cast<double>(peak);
      c.rect(ox + 4 + w * static_cast<double>(b), oy + cell - 4 - hh, w - 1, hh, "#9ecae1");
    }
    c.text(ox + cell / 2, margin - 8, m.names[i], 10, "middle");
  }
  return c.str();
}

inline std::string swarm(const ml::Swarm& s, std::size_t max_features = 20) {
  const std::size_t nf = std::min(max_features, s.features.size());
  const double lane = 70, margin = 60;
  Canvas c(margin + lane * static_cast<double>(nf * s.classes.size()) + 20, 420);
  double zlo = -3, zhi = 3;
  for (const auto& p : s.points) {
    zlo = std::min(zlo, p.value);
    zhi = std::max(zhi, p.value);
  }
  const Scale sy{zlo, zhi, 370, 30};
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
  for (const auto& p : s.points) {
    const auto f = static_cast<std::size_t>(std::find(s.features.begin(), s.features.end(), p.feature) - s.features.begin());
    if (f >= nf) continue;
    const auto k = static_cast<std::size_t>(std::lower_bound(s.classes.begin(), s.classes.end(), p.class_label) - s.classes.begin());
    const double cx = margin + lane * (static_cast<double>(f * s.classes.size() + k) + 0.5 + p.offset);
    c.circle(cx, sy(p.value), 2.5, palette[k % 6]);
  }
  for (std::size_t f = 0; f < nf; ++f) {
    const double mid = margin + lane * (static_cast<double>(f * s.classes.size()) + static_cast<double>(s.classes.size()) / 2);
    c.text(mid, 395, s.features[f], 10, "middle");
  }
  for (std::size_t k = 0; k < s.classes.size(); ++k) {
    c.circle(margin + 90 * static_cast<double>(k), 12, 4, palette[k % 6]);
    c.text(margin + 90 * static_cast<double>(k) + 8, 16, "class " + ml::format_double(s.classes[k]), 10);
  }
  c.text(20, 200, "standardized value", 11, "middle", -90);
  return c.str();
}

}  // namespace voxmark::cli::svg

#endif
