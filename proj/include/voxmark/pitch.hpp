#ifndef VOXMARK_PITCH_HPP
#define VOXMARK_PITCH_HPP

// F0 tracking (cumulative-mean-normalized difference function) and
// cycle-level voice quality: local jitter, local shimmer, autocorrelation HNR.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "voxmark/audio_io.hpp"
#include "voxmark/error.hpp"
#include "voxmark/series.hpp"

namespace voxmark {

struct PitchConfig {
  double hop_ms = 10.0;
  /// Integration window; widened to one f_min period when shorter.
  double window_ms = 25.0;
  double threshold = 0.15;
};

namespace detail {

struct PitchGeometry {
  std::size_t tau_min = 0;
  std::size_t tau_max = 0;
  std::size_t integration = 0;
  std::size_t span = 0;
  std::size_t hop = 0;
};

inline PitchGeometry pitch_geometry(int sample_rate, double f_min, double f_max, const PitchConfig& cfg) {
  PitchGeometry g;
  g.tau_min = std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(sample_rate / f_max)));
  g.tau_max = static_cast<std::size_t>(std::ceil(sample_rate / f_min));
  g.integration = std::max(ms_to_samples(cfg.window_ms, sample_rate), g.tau_max);
  g.span = g.integration + g.tau_max + 1;
  g.hop = std::max<std::size_t>(1, ms_to_samples(cfg.hop_ms, sample_rate));
  return g;
}

/// Offset (in [-1, 1]) of the vertex of the parabola through (-1,a), (0,b), (1,c).
inline double parabolic_offset(double a, double b, double c) {
  const double denom = a - 2.0 * b + c;
  if (denom == 0.0) return 0.0;
  return std::clamp(0.5 * (a - c) / denom, -1.0, 1.0);
}

/// Lag estimate for one frame, or nullopt when unvoiced.
inline std::optional<double> yin_lag(const double* x, const PitchGeometry& g, double threshold,
                                     std::vector<double>& diff) {
  diff.assign(g.tau_max + 2, 0.0);
  for (std::size_t tau = 1; tau <= g.tau_max + 1; ++tau) {
    double acc = 0.0;
    for (std::size_t j = 0; j < g.integration; ++j) {
      const double d = x[j] - x[j + tau];
      acc += d * d;
    }
    diff[tau] = acc;
  }
  // cumulative mean normalization, in place
  double running = 0.0;
  diff[0] = 1.0;
  for (std::size_t tau = 1; tau < diff.size(); ++tau) {
    running += diff[tau];
    diff[tau] = running > 0.0 ? diff[tau] * static_cast<double>(tau) / running : 1.0;
  }
  for (std::size_t tau = g.tau_min; tau <= g.tau_max; ++tau) {
    if (diff[tau] < threshold) {
      while (tau + 1 <= g.tau_max && diff[tau + 1] < diff[tau]) ++tau;
      return static_cast<double>(tau) + parabolic_offset(diff[tau - 1], diff[tau], diff[tau + 1]);
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Per-frame F0 in Hz; NaN for unvoiced frames and for estimates outside [f_min, f_max].
/// Frame i starts at sample i * hop and spans window_seconds.
inline FrameSeries f0_track(const AudioBuffer& buf, double f_min, double f_max, const PitchConfig& cfg = {}) {
  if (!(f_min > 0.0) || !(f_min < f_max) || !(f_max < 0.5 * buf.sample_rate_hz)) {
    throw Error(ErrorCode::InvalidRange, "need 0 < f_min < f_max < sample_rate/2");
  }
  const auto g = detail::pitch_geometry(buf.sample_rate_hz, f_min, f_max, cfg);
  FrameSeries out;
  out.name = "f0";
  out.hop_seconds = static_cast<double>(g.hop) / buf.sample_rate_hz;
  out.window_seconds = static_cast<double>(g.span) / buf.sample_rate_hz;
  const std::size_t n_frames = frame_count(buf.samples.size(), g.span, g.hop);
  out.values.assign(n_frames, kNaN);
  std::vector<double> scratch;
  for (std::size_t i = 0; i < n_frames; ++i) {
    const auto lag = detail::yin_lag(buf.samples.data() + i * g.hop, g, cfg.threshold, scratch);
    if (!lag || !(*lag > 0.0)) continue;
    const double f0 = buf.sample_rate_hz / *lag;
    if (f0 >= f_min && f0 <= f_max) out.values[i] = f0;
  }
  return out;
}

struct JitterShimmerReport {
  double jitter_local = kNaN;
  double shimmer_local = kNaN;
  double hnr_db = kNaN;
  std::size_t n_cycles = 0;
  double f0_mean_hz = kNaN;
  /// |T_i - T_(i-1)| / mean period, for consecutive periods inside voiced runs.
  std::vector<double> jitter_cycles;
  /// |A_i - A_(i-1)| / mean amplitude, for consecutive peaks inside voiced runs.
  std::vector<double> shimmer_cycles;
  /// Per-frame HNR in dB, aligned with the F0 series (NaN where unvoiced).
  FrameSeries hnr_frames;
};

namespace detail {

struct Peak {
  double position;
  double amplitude;
};

inline Peak refine_peak(std::span<const double> x, std::size_t i) {
  if (i == 0 || i + 1 >= x.size()) return {static_cast<double>(i), x[i]};
  const double a = x[i - 1], b = x[i], c = x[i + 1];
  const double off = parabolic_offset(a, b, c);
  return {static_cast<double>(i) + off, b - 0.25 * (a - c) * off};
}

inline std::size_t argmax_in(std::span<const double> x, std::size_t lo, std::size_t hi) {
  std::size_t best = lo;
  for (std::size_t i = lo; i < hi; ++i) {
    if (x[i] > x[best]) best = i;
  }
  return best;
}

inline double normalized_autocorrelation(std::span<const double> x, std::size_t lag) {
  if (lag == 0 || lag >= x.size()) return kNaN;
  double xy = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t j = 0; j + lag < x.size(); ++j) {
    xy += x[j] * x[j + lag];
    xx += x[j] * x[j];
    yy += x[j + lag] * x[j + lag];
  }
  if (!(xx > 0.0) || !(yy > 0.0)) return kNaN;
  return xy / std::sqrt(xx * yy);
}

}  // namespace detail

/// Glottal cycles are located by F0-guided peak picking inside runs of voiced frames.
/// Degenerate input (fewer than two comparable cycles, no voicing) yields NaN fields.
inline JitterShimmerReport jitter_shimmer_hnr(const AudioBuffer& buf, const FrameSeries& f0) {
  JitterShimmerReport rep;
  rep.hnr_frames.name = "hnr";
  rep.hnr_frames.hop_seconds = f0.hop_seconds;
  rep.hnr_frames.window_seconds = f0.window_seconds;
  rep.hnr_frames.values.assign(f0.values.size(), kNaN);
  const std::span<const double> x(buf.samples);
  const double sr = buf.sample_rate_hz;
  if (x.empty() || !(f0.hop_seconds > 0.0)) return rep;

  const double hop = f0.hop_seconds * sr;
  const double span = f0.window_seconds * sr;
  auto frame_centre = [&](std::size_t i) { return static_cast<double>(i) * hop + 0.5 * span; };

  // HNR per voiced frame
  double f0_sum = 0.0, hnr_sum = 0.0;
  std::size_t voiced = 0;
  for (std::size_t i = 0; i < f0.values.size(); ++i) {
    const double f = f0.values[i];
    if (std::isnan(f)) continue;
    ++voiced;
    f0_sum += f;
    const auto start = static_cast<std::size_t>(std::llround(static_cast<double>(i) * hop));
    const auto len = std::min(static_cast<std::size_t>(std::llround(span)), x.size() - std::min(start, x.size()));
    const auto frame = x.subspan(std::min(start, x.size()), len);
    const double lag = sr / f;
    double r = kNaN;
    for (auto l : {static_cast<std::size_t>(std::floor(lag)), static_cast<std::size_t>(std::ceil(lag))}) {
      const double v = detail::normalized_autocorrelation(frame, l);
      if (!std::isnan(v) && (std::isnan(r) || v > r)) r = v;
    }
    if (std::isnan(r)) r = 0.0;
    r = std::clamp(r, 1e-10, 1.0 - 1e-10);
    const double hnr = 10.0 * std::log10(r / (1.0 - r));
    rep.hnr_frames.values[i] = hnr;
    hnr_sum += hnr;
  }
  if (voiced == 0) return rep;
  rep.f0_mean_hz = f0_sum / static_cast<double>(voiced);
  rep.hnr_db = hnr_sum / static_cast<double>(voiced);

  // cycle peaks per voiced run
  std::vector<std::vector<detail::Peak>> runs;
  std::size_t i = 0;
  while (i < f0.values.size()) {
    if (std::isnan(f0.values[i])) {
      ++i;
      continue;
    }
    std::size_t a = i;
    while (i < f0.values.size() && !std::isnan(f0.values[i])) ++i;
    const std::size_t b = i - 1;
    const double lo = std::max(0.0, frame_centre(a) - 0.5 * hop);
    const double hi = std::min(static_cast<double>(x.size()), frame_centre(b) + 0.5 * hop);
    auto period_at = [&](double pos) {
      const double idx = std::round((pos - 0.5 * span) / hop);
      const auto k = static_cast<std::size_t>(std::clamp(idx, static_cast<double>(a), static_cast<double>(b)));
      return sr / f0.values[k];
    };
    std::vector<detail::Peak> peaks;
    auto begin = static_cast<std::size_t>(std::ceil(lo));
    const auto end = static_cast<std::size_t>(std::floor(hi));
    double period = period_at(static_cast<double>(begin));
    if (begin + static_cast<std::size_t>(std::ceil(period)) >= end) continue;
    std::size_t pos = detail::argmax_in(x, begin, begin + static_cast<std::size_t>(std::ceil(period)));
    peaks.push_back(detail::refine_peak(x, pos));
    while (true) {
      period = period_at(static_cast<double>(pos));
      const auto search_lo = pos + static_cast<std::size_t>(std::floor(0.7 * period));
      const auto search_hi = pos + static_cast<std::size_t>(std::ceil(1.3 * period)) + 1;
      if (search_hi > end || search_lo <= pos) break;
      pos = detail::argmax_in(x, search_lo, search_hi);
      peaks.push_back(detail::refine_peak(x, pos));
    }
    if (peaks.size() >= 2) runs.push_back(std::move(peaks));
  }

  std::vector<double> periods_all, amps_all;
  std::vector<double> period_deltas, amp_deltas;
  for (const auto& peaks : runs) {
    double prev_period = kNaN;
    for (std::size_t k = 0; k < peaks.size(); ++k) {
      amps_all.push_back(peaks[k].amplitude);
      if (k > 0) {
        amp_deltas.push_back(std::abs(peaks[k].amplitude - peaks[k - 1].amplitude));
        const double t = peaks[k].position - peaks[k - 1].position;
        periods_all.push_back(t);
        if (!std::isnan(prev_period)) period_deltas.push_back(std::abs(t - prev_period));
        prev_period = t;
      }
    }
  }
  rep.n_cycles = periods_all.size();
  if (rep.n_cycles < 2 || period_deltas.empty()) return rep;

  auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); };
  const double mean_period = mean(periods_all);
  const double mean_amp = mean(amps_all);
  for (double d : period_deltas) rep.jitter_cycles.push_back(d / mean_period);
  rep.jitter_local = mean(period_deltas) / mean_period;
  if (std::abs(mean_amp) > 0.0) {
    for (double d : amp_deltas) rep.shimmer_cycles.push_back(d / std::abs(mean_amp));
    rep.shimmer_local = mean(amp_deltas) / std::abs(mean_amp);
  }
  return rep;
}

}  // namespace voxmark

#endif  // VOXMARK_PITCH_HPP
