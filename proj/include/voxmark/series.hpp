#ifndef VOXMARK_SERIES_HPP
#define VOXMARK_SERIES_HPP

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace voxmark {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// One low-level descriptor sampled per analysis frame. NaN marks undefined frames.
struct FrameSeries {
  std::string name;
  std::vector<double> values;
  double hop_seconds = 0.0;
  double window_seconds = 0.0;

  std::size_t size() const noexcept { return values.size(); }
  std::size_t defined_count() const noexcept {
    std::size_t n = 0;
    for (double v : values) n += std::isnan(v) ? 0 : 1;
    return n;
  }
};

}  // namespace voxmark

#endif  // VOXMARK_SERIES_HPP
