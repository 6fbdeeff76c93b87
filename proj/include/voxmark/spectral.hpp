#ifndef VOXMARK_SPECTRAL_HPP
#define VOXMARK_SPECTRAL_HPP

// Spectrum-domain and frame-domain low-level descriptors.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "voxmark/audio_io.hpp"
#include "voxmark/error.hpp"
#include "voxmark/fft.hpp"
#include "voxmark/series.hpp"

namespace voxmark {

/// Floor applied before every logarithm so silence yields finite values.
inline constexpr double kSpectralFloor = 1e-10;

/// Non-negative DFT magnitudes. Bin k sits at (first_bin + k) * bin_hz.
struct Spectrum {
  std::vector<double> magnitudes;
  double bin_hz = 0.0;
  std::size_t first_bin = 0;

  std::size_t size() const noexcept { return magnitudes.size(); }
  double frequency(std::size_t k) const noexcept { return static_cast<double>(first_bin + k) * bin_hz; }

  /// Sub-spectrum with bins whose frequency lies in [lo_hz, hi_hz].
  Spectrum band(double lo_hz, double hi_hz) const {
    Spectrum out;
    out.bin_hz = bin_hz;
    std::size_t k = 0;
    while (k < magnitudes.size() && frequency(k) < lo_hz) ++k;
    out.first_bin = first_bin + k;
    for (; k < magnitudes.size() && frequency(k) <= hi_hz; ++k) out.magnitudes.push_back(magnitudes[k]);
    return out;
  }
};

/// Magnitudes at bins 0..n_fft/2 of the zero-padded frame.
inline Spectrum power_spectrum(std::span<const double> frame, std::size_t n_fft, double sample_rate_hz) {
  if (!is_power_of_two(n_fft) || n_fft < frame.size() || n_fft < 2) {
    throw Error(ErrorCode::InvalidFftSize,
                "n_fft=" + std::to_string(n_fft) + " must be a power of two >= frame length " +
                    std::to_string(frame.size()));
  }
  const auto full = rfft_full(frame, n_fft);
  Spectrum spec;
  spec.bin_hz = sample_rate_hz / static_cast<double>(n_fft);
  spec.magnitudes.resize(n_fft / 2 + 1);
  for (std::size_t k = 0; k <= n_fft / 2; ++k) spec.magnitudes[k] = std::abs(full[k]);
  return spec;
}

/// Spectrogram of every frame in a FrameMatrix.
inline std::vector<Spectrum> spectrogram(const FrameMatrix& frames, std::size_t n_fft) {
  std::vector<Spectrum> out;
  out.reserve(frames.n_frames);
  for (std::size_t i = 0; i < frames.n_frames; ++i) {
    out.push_back(power_spectrum(frames.frame(i), n_fft, frames.sample_rate_hz));
  }
  return out;
}

// ---------------------------------------------------------------------------
// MFCC

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Orthonormal DCT-II of `x`, first `n_out` coefficients.
inline std::vector<double> dct_ortho(std::span<const double> x, std::size_t n_out) {
  const std::size_t n = x.size();
  std::vector<double> out(n_out, 0.0);
  const double nd = static_cast<double>(n);
  for (std::size_t k = 0; k < n_out; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += x[i] * std::cos(std::numbers::pi * static_cast<double>(k) * (2.0 * static_cast<double>(i) + 1.0) / (2.0 * nd));
    }
    out[k] = acc * (k == 0 ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd));
  }
  return out;
}

/// Triangular HTK-mel filterbank laid over a fixed bin grid.
class MelFilterbank {
 public:
  MelFilterbank(std::size_t n_bins, double bin_hz, std::size_t n_mels, double fmin_hz, double fmax_hz)
      : n_bins_(n_bins), n_mels_(n_mels), weights_(n_mels, std::vector<double>(n_bins, 0.0)) {
    const double nyquist = bin_hz * static_cast<double>(n_bins - 1);
    if (n_mels < 1 || n_bins < 2 || fmin_hz < 0.0 || fmax_hz <= fmin_hz || fmax_hz > nyquist * (1.0 + 1e-12)) {
      throw Error(ErrorCode::InvalidBandConfig, "mel band [" + std::to_string(fmin_hz) + ", " +
                                                    std::to_string(fmax_hz) + "] Hz with " +
                                                    std::to_string(n_mels) + " filters is invalid");
    }
    const double mlo = hz_to_mel(fmin_hz);
    const double mhi = hz_to_mel(fmax_hz);
    std::vector<double> edges(n_mels + 2);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      edges[i] = mel_to_hz(mlo + (mhi - mlo) * static_cast<double>(i) / static_cast<double>(n_mels + 1));
    }
    for (std::size_t m = 0; m < n_mels; ++m) {
      const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
      for (std::size_t k = 0; k < n_bins; ++k) {
        const double f = bin_hz * static_cast<double>(k);
        double w = 0.0;
        if (f >= lo && f <= mid) w = (f - lo) / (mid - lo);
        else if (f > mid && f <= hi) w = (hi - f) / (hi - mid);
        weights_[m][k] = w;
      }
    }
  }

  std::size_t n_mels() const noexcept { return n_mels_; }

  /// Natural log of floored filter energies computed on the power spectrum.
  std::vector<double> log_energies(const Spectrum& spec) const {
    if (spec.size() != n_bins_) throw Error(ErrorCode::InvalidBandConfig, "spectrum size does not match filterbank");
    std::vector<double> out(n_mels_);
    for (std::size_t m = 0; m < n_mels_; ++m) {
      double e = 0.0;
      for (std::size_t k = 0; k < n_bins_; ++k) e += weights_[m][k] * spec.magnitudes[k] * spec.magnitudes[k];
      out[m] = std::log(std::max(e, kSpectralFloor));
    }
    return out;
  }

  std::vector<double> mfcc(const Spectrum& spec, std::size_t n_coeffs) const {
    if (n_coeffs > n_mels_) throw Error(ErrorCode::InvalidBandConfig, "n_coeffs exceeds n_mels");
    return dct_ortho(log_energies(spec), n_coeffs);
  }

 private:
  std::size_t n_bins_;
  std::size_t n_mels_;
  std::vector<std::vector<double>> weights_;
};

inline std::vector<double> mfcc(const Spectrum& spec, std::size_t n_mels, std::size_t n_coeffs, double fmin_hz,
                                double fmax_hz) {
  if (n_coeffs > n_mels) throw Error(ErrorCode::InvalidBandConfig, "n_coeffs exceeds n_mels");
  return MelFilterbank(spec.size(), spec.bin_hz, n_mels, fmin_hz, fmax_hz).mfcc(spec, n_coeffs);
}

// ---------------------------------------------------------------------------
// Spectral shape

struct SpectralShape {
  double centroid_hz = kNaN;
  double bandwidth_hz = kNaN;
  double rolloff_hz = kNaN;
  double flatness = kNaN;
};

inline constexpr double kRolloffFraction = 0.85;

/// Centroid/bandwidth weight by magnitude; rolloff and flatness work on power.
/// A spectrum with no nonzero magnitude yields all-NaN.
inline SpectralShape spectral_shape(const Spectrum& spec, double rolloff_fraction = kRolloffFraction) {
  SpectralShape out;
  const auto& m = spec.magnitudes;
  double mag_sum = 0.0, power_sum = 0.0;
  for (double v : m) {
    mag_sum += v;
    power_sum += v * v;
  }
  if (!(mag_sum > 0.0)) return out;

  double weighted = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) weighted += spec.frequency(k) * m[k];
  out.centroid_hz = weighted / mag_sum;

  double spread = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    const double d = spec.frequency(k) - out.centroid_hz;
    spread += m[k] * d * d;
  }
  out.bandwidth_hz = std::sqrt(spread / mag_sum);

  const double target = rolloff_fraction * power_sum;
  double cumulative = 0.0;
  out.rolloff_hz = spec.frequency(m.size() - 1);
  for (std::size_t k = 0; k < m.size(); ++k) {
    cumulative += m[k] * m[k];
    if (cumulative >= target) {
      out.rolloff_hz = spec.frequency(k);
      break;
    }
  }

  double pmin = std::numeric_limits<double>::infinity(), pmax = 0.0;
  double log_sum = 0.0, lin_sum = 0.0;
  for (double v : m) {
    const double p = std::max(v * v, kSpectralFloor);
    pmin = std::min(pmin, p);
    pmax = std::max(pmax, p);
    log_sum += std::log(p);
    lin_sum += p;
  }
  if (pmin == pmax) {
    out.flatness = 1.0;
  } else {
    const double n = static_cast<double>(m.size());
    out.flatness = std::clamp(std::exp(log_sum / n) / (lin_sum / n), 0.0, 1.0);
  }
  return out;
}

/// Band b covers [0, 200) for b = 0 and [200 * 2^(b-1), 200 * 2^b) afterwards; the last band
/// extends to the top bin. Contrast is the log ratio of the mean top-quantile magnitude to
/// the mean bottom-quantile magnitude (at least one bin each). Empty bands give NaN.
inline std::vector<double> spectral_contrast(const Spectrum& spec, std::size_t n_bands, double quantile = 0.02) {
  if (n_bands < 1) throw Error(ErrorCode::InvalidBandConfig, "n_bands must be >= 1");
  std::vector<double> out(n_bands, kNaN);
  const double top = spec.size() ? spec.frequency(spec.size() - 1) : 0.0;
  std::vector<double> band;
  for (std::size_t b = 0; b < n_bands; ++b) {
    const double lo = b == 0 ? 0.0 : 200.0 * std::pow(2.0, static_cast<double>(b) - 1.0);
    const double hi = 200.0 * std::pow(2.0, static_cast<double>(b));
    const bool last = b + 1 == n_bands;
    band.clear();
    for (std::size_t k = 0; k < spec.size(); ++k) {
      const double f = spec.frequency(k);
      if (f >= lo && (f < hi || (last && f <= top))) band.push_back(spec.magnitudes[k]);
    }
    if (band.empty()) continue;
    std::sort(band.begin(), band.end());
    const auto q = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(quantile * static_cast<double>(band.size()))));
    const double valley = std::accumulate(band.begin(), band.begin() + static_cast<std::ptrdiff_t>(q), 0.0) / static_cast<double>(q);
    const double peak = std::accumulate(band.end() - static_cast<std::ptrdiff_t>(q), band.end(), 0.0) / static_cast<double>(q);
    out[b] = std::log(std::max(peak, kSpectralFloor)) - std::log(std::max(valley, kSpectralFloor));
  }
  return out;
}

/// Least-squares polynomial fit of magnitude against bin frequency.
/// Coefficients are returned lowest order first: {intercept, slope, curvature}.
inline std::vector<double> poly_features(const Spectrum& spec, int order) {
  if (order < 0 || order > 2) throw Error(ErrorCode::InvalidOrder, "order must be 0, 1 or 2");
  const auto n = static_cast<Eigen::Index>(spec.size());
  if (n < order + 1) throw Error(ErrorCode::InvalidOrder, "need at least order+1 bins");
  double scale = 0.0;
  for (std::size_t k = 0; k < spec.size(); ++k) scale = std::max(scale, std::abs(spec.frequency(k)));
  if (scale == 0.0) scale = 1.0;
  Eigen::MatrixXd design(n, order + 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = spec.frequency(static_cast<std::size_t>(i)) / scale;
    double p = 1.0;
    for (int j = 0; j <= order; ++j, p *= u) design(i, j) = p;
    y(i) = spec.magnitudes[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(y);
  std::vector<double> out(static_cast<std::size_t>(order) + 1);
  double s = 1.0;
  for (int j = 0; j <= order; ++j, s *= scale) out[static_cast<std::size_t>(j)] = beta(j) / s;
  return out;
}

// ---------------------------------------------------------------------------
// Frame-domain scalars

struct FrameScalars {
  FrameSeries zcr;
  FrameSeries rms;
};

/// zcr counts sign changes of the unwindowed samples (zero counts as positive);
/// rms is taken over the windowed samples.
inline FrameScalars frame_scalars(const FrameMatrix& frames) {
  FrameScalars out;
  out.zcr.name = "zcr";
  out.rms.name = "rms";
  for (auto* s : {&out.zcr, &out.rms}) {
    s->hop_seconds = frames.hop_seconds();
    s->window_seconds = static_cast<double>(frames.frame_len) / frames.sample_rate_hz;
    s->values.resize(frames.n_frames);
  }
  const double denom = static_cast<double>(frames.frame_len - 1);
  for (std::size_t i = 0; i < frames.n_frames; ++i) {
    const auto raw = frames.raw_frame(i);
    std::size_t changes = 0;
    for (std::size_t j = 1; j < raw.size(); ++j) changes += (raw[j] >= 0.0) != (raw[j - 1] >= 0.0);
    out.zcr.values[i] = static_cast<double>(changes) / denom;
    const auto w = frames.frame(i);
    double sq = 0.0;
    for (double v : w) sq += v * v;
    out.rms.values[i] = std::sqrt(sq / static_cast<double>(w.size()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Onset strength and tempo

/// Mean half-wave-rectified increase of log magnitude between consecutive frames.
inline FrameSeries spectral_flux_onset(std::span<const Spectrum> spectrogram, double hop_seconds = 0.0) {
  if (spectrogram.size() < 2) throw Error(ErrorCode::TooFewFrames, "onset strength needs at least 2 frames");
  FrameSeries out;
  out.name = "flux_onset";
  out.hop_seconds = hop_seconds;
  out.values.assign(spectrogram.size(), 0.0);
  for (std::size_t t = 1; t < spectrogram.size(); ++t) {
    const auto& cur = spectrogram[t].magnitudes;
    const auto& prev = spectrogram[t - 1].magnitudes;
    const std::size_t n = std::min(cur.size(), prev.size());
    if (n == 0) continue;
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double d = std::log(std::max(cur[k], kSpectralFloor)) - std::log(std::max(prev[k], kSpectralFloor));
      acc += std::max(0.0, d);
    }
    out.values[t] = acc / static_cast<double>(n);
  }
  return out;
}

struct TempoEstimate {
  double tempo_bpm = kNaN;
  /// rows = lag (0..window-1), columns = onset frames
  Eigen::MatrixXd tempogram;
};

inline constexpr std::size_t kTempogramWindow = 384;

/// Hann-windowed local autocorrelation of the onset envelope, normalized at lag 0.
/// The tempo lag maximizes the frame-averaged autocorrelation within [min_bpm, max_bpm].
inline TempoEstimate tempogram_tempo(const FrameSeries& onset, double hop_seconds,
                                     std::size_t window = kTempogramWindow, double min_bpm = 30.0,
                                     double max_bpm = 300.0) {
  TempoEstimate out;
  const std::size_t n = onset.values.size();
  if (n == 0 || !(hop_seconds > 0.0)) return out;
  const std::size_t win = std::max<std::size_t>(2, std::min(window, n));
  const auto taper = make_window(WindowKind::hann, win);
  out.tempogram = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(win), static_cast<Eigen::Index>(n));
  std::vector<double> aggregate(win, 0.0);
  std::vector<double> seg(win);
  std::size_t valid = 0;
  const auto half = static_cast<std::ptrdiff_t>(win / 2);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t i = 0; i < win; ++i) {
      const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t) - half + static_cast<std::ptrdiff_t>(i);
      const double v = (src >= 0 && src < static_cast<std::ptrdiff_t>(n)) ? onset.values[static_cast<std::size_t>(src)] : 0.0;
      seg[i] = std::isnan(v) ? 0.0 : v * taper[i];
    }
    double zero_lag = 0.0;
    for (double v : seg) zero_lag += v * v;
    if (!(zero_lag > 0.0)) continue;
    ++valid;
    for (std::size_t lag = 0; lag < win; ++lag) {
      double acc = 0.0;
      for (std::size_t i = 0; i + lag < win; ++i) acc += seg[i] * seg[i + lag];
      const double r = acc / zero_lag;
      out.tempogram(static_cast<Eigen::Index>(lag), static_cast<Eigen::Index>(t)) = r;
      aggregate[lag] += r;
    }
  }
  if (valid == 0) return out;
  for (double& v : aggregate) v /= static_cast<double>(valid);

  const auto lag_lo = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(60.0 / (max_bpm * hop_seconds))));
  const auto lag_hi = std::min<std::size_t>(win - 1, static_cast<std::size_t>(std::floor(60.0 / (min_bpm * hop_seconds))));
  if (lag_lo > lag_hi) return out;
  std::size_t best = lag_lo;
  for (std::size_t lag = lag_lo; lag <= lag_hi; ++lag) {
    if (aggregate[lag] > aggregate[best]) best = lag;
  }
  if (!(aggregate[best] > 0.0)) return out;
  double refined = static_cast<double>(best);
  if (best > lag_lo && best < lag_hi) {
    const double a = aggregate[best - 1], b = aggregate[best], c = aggregate[best + 1];
    const double denom = a - 2.0 * b + c;
    if (denom < 0.0) refined += 0.5 * (a - c) / denom;
  }
  out.tempo_bpm = 60.0 / (refined * hop_seconds);
  return out;
}

}  // namespace voxmark

#endif  // VOXMARK_SPECTRAL_HPP
