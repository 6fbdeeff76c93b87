#ifndef VOXMARK_FUNCTIONALS_HPP
#define VOXMARK_FUNCTIONALS_HPP

// Statistics bank over frame series, and the two utterance-level acoustic feature sets.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "voxmark/audio_io.hpp"
#include "voxmark/error.hpp"
#include "voxmark/pitch.hpp"
#include "voxmark/series.hpp"
#include "voxmark/spectral.hpp"

namespace voxmark {

struct Stat {
  enum class Kind { mean, stddev, min, max, median, percentile, range, slope, delta_mean_abs };
  Kind kind = Kind::mean;
  double p = 0.0;

  std::string name() const {
    switch (kind) {
      case Kind::mean: return "mean";
      case Kind::stddev: return "stddev";
      case Kind::min: return "min";
      case Kind::max: return "max";
      case Kind::median: return "median";
      case Kind::range: return "range";
      case Kind::slope: return "slope";
      case Kind::delta_mean_abs: return "delta_mean_abs";
      case Kind::percentile: {
        char buf[32];
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, p);
        return "p" + std::string(buf, end);
      }
    }
    return "?";
  }

  /// Accepts "mean", "stddev", ..., and "pNN" / "percentile(NN)".
  static Stat parse(std::string_view s) {
    if (s == "mean") return {Kind::mean};
    if (s == "stddev") return {Kind::stddev};
    if (s == "min") return {Kind::min};
    if (s == "max") return {Kind::max};
    if (s == "median") return {Kind::median};
    if (s == "range") return {Kind::range};
    if (s == "slope") return {Kind::slope};
    if (s == "delta_mean_abs") return {Kind::delta_mean_abs};
    std::string_view num;
    if (s.starts_with("percentile(") && s.ends_with(")")) num = s.substr(11, s.size() - 12);
    else if (s.starts_with("p")) num = s.substr(1);
    double p = 0.0;
    if (!num.empty()) {
      auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), p);
      if (ec == std::errc() && ptr == num.data() + num.size()) {
        if (!(p > 0.0 && p < 100.0)) throw Error(ErrorCode::InvalidArgument, "percentile must lie in (0, 100)");
        return {Kind::percentile, p};
      }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown statistic '" + std::string(s) + "'");
  }
};

/// Ordered, nonempty set of statistics.
class FunctionalBank {
 public:
  FunctionalBank(std::initializer_list<Stat> stats) : FunctionalBank(std::vector<Stat>(stats)) {}
  explicit FunctionalBank(std::vector<Stat> stats) : stats_(std::move(stats)) {
    if (stats_.empty()) throw Error(ErrorCode::InvalidArgument, "functional bank must not be empty");
    std::unordered_set<std::string> seen;
    for (const auto& s : stats_) {
      if (!seen.insert(s.name()).second) throw Error(ErrorCode::InvalidArgument, "duplicate statistic " + s.name());
    }
  }
  static FunctionalBank parse(const std::vector<std::string>& names) {
    std::vector<Stat> stats;
    for (const auto& n : names) stats.push_back(Stat::parse(n));
    return FunctionalBank(std::move(stats));
  }

  const std::vector<Stat>& stats() const noexcept { return stats_; }
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& s : stats_) out.push_back(s.name());
    return out;
  }

 private:
  std::vector<Stat> stats_;
};

inline FunctionalBank mean_std_bank() { return {{Stat::Kind::mean}, {Stat::Kind::stddev}}; }

struct FeatureVector {
  std::vector<std::string> names;
  std::vector<double> values;
  std::string source_id;

  void push(std::string name, double value) {
    names.push_back(std::move(name));
    values.push_back(value);
  }
  void append(const FeatureVector& other) {
    names.insert(names.end(), other.names.begin(), other.names.end());
    values.insert(values.end(), other.values.begin(), other.values.end());
  }
  std::size_t size() const noexcept { return names.size(); }
  std::optional<double> get(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return values[i];
    }
    return std::nullopt;
  }
};

namespace stats {

/// Linear interpolation between order statistics of a sorted sample.
inline double percentile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) return kNaN;
  const double pos = p / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double mean(std::span<const double> v) {
  if (v.empty()) return kNaN;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Population standard deviation (divides by n).
inline double pstddev(std::span<const double> v) {
  if (v.empty()) return kNaN;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace stats

/// Evaluate one statistic over the series, skipping NaN frames.
inline double evaluate(const Stat& stat, std::span<const double> values) {
  std::vector<double> defined;
  defined.reserve(values.size());
  for (double v : values) {
    if (!std::isnan(v)) defined.push_back(v);
  }
  if (defined.empty()) return kNaN;
  switch (stat.kind) {
    case Stat::Kind::mean: return stats::mean(defined);
    case Stat::Kind::stddev: return stats::pstddev(defined);
    case Stat::Kind::min: return *std::min_element(defined.begin(), defined.end());
    case Stat::Kind::max: return *std::max_element(defined.begin(), defined.end());
    case Stat::Kind::range: {
      auto [lo, hi] = std::minmax_element(defined.begin(), defined.end());
      return *hi - *lo;
    }
    case Stat::Kind::median:
    case Stat::Kind::percentile: {
      std::sort(defined.begin(), defined.end());
      return stats::percentile_sorted(defined, stat.kind == Stat::Kind::median ? 50.0 : stat.p);
    }
    case Stat::Kind::slope: {
      double sx = 0.0, sy = 0.0;
      std::size_t n = 0;
      for (std::size_t t = 0; t < values.size(); ++t) {
        if (std::isnan(values[t])) continue;
        sx += static_cast<double>(t);
        sy += values[t];
        ++n;
      }
      if (n < 2) return kNaN;
      const double mx = sx / static_cast<double>(n), my = sy / static_cast<double>(n);
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t t = 0; t < values.size(); ++t) {
        if (std::isnan(values[t])) continue;
        const double dx = static_cast<double>(t) - mx;
        sxy += dx * (values[t] - my);
        sxx += dx * dx;
      }
      return sxy / sxx;
    }
    case Stat::Kind::delta_mean_abs: {
      double acc = 0.0;
      std::size_t n = 0;
      for (std::size_t t = 1; t < values.size(); ++t) {
        if (std::isnan(values[t]) || std::isnan(values[t - 1])) continue;
        acc += std::abs(values[t] - values[t - 1]);
        ++n;
      }
      return n ? acc / static_cast<double>(n) : kNaN;
    }
  }
  return kNaN;
}

inline std::vector<std::string> bank_feature_names(std::string_view series, const FunctionalBank& bank) {
  std::vector<std::string> out;
  for (const auto& s : bank.stats()) out.push_back(std::string(series) + "_" + s.name());
  return out;
}

/// One feature per statistic, named "<series>_<stat>".
inline FeatureVector apply_bank(std::string_view name, std::span<const double> values, const FunctionalBank& bank) {
  FeatureVector out;
  for (const auto& s : bank.stats()) out.push(std::string(name) + "_" + s.name(), evaluate(s, values));
  return out;
}

inline FeatureVector apply_bank(const FrameSeries& series, const FunctionalBank& bank) {
  return apply_bank(series.name, series.values, bank);
}

// ---------------------------------------------------------------------------
// Acoustic feature sets

struct AcousticConfig {
  double frame_ms = 25.0;
  double hop_ms = 10.0;
  WindowKind window = WindowKind::hann;
  double f0_min_hz = 60.0;
  double f0_max_hz = 600.0;
  std::size_t n_mels = 26;
  std::size_t contrast_bands = 7;
  /// Bank applied to every spectral-set descriptor except rms, whose bank is fixed.
  FunctionalBank bank = mean_std_bank();
};

inline FunctionalBank rms_bank() {
  return {{Stat::Kind::mean}, {Stat::Kind::stddev}, {Stat::Kind::min}, {Stat::Kind::max}, {Stat::Kind::median}};
}

inline const std::vector<std::string>& gemaps_series_names() {
  static const std::vector<std::string> names = {
      "f0_semitone",   "loudness_rms",   "jitter_cycle", "shimmer_cycle", "hnr_frame",
      "slope_0_500",   "slope_500_1500", "alpha_ratio",  "hammarberg",    "mfcc1",
      "mfcc2",         "mfcc3",          "mfcc4"};
  return names;
}

inline const std::vector<std::string>& gemaps_scalar_names() {
  static const std::vector<std::string> names = {"voiced_fraction", "jitter_local", "shimmer_local", "hnr_db"};
  return names;
}

/// 13 descriptors x {mean, stddev} followed by 4 scalars: 30 features in fixed order.
inline std::vector<std::string> gemaps_feature_names() {
  std::vector<std::string> out;
  const auto bank = mean_std_bank();
  for (const auto& s : gemaps_series_names()) {
    auto n = bank_feature_names(s, bank);
    out.insert(out.end(), n.begin(), n.end());
  }
  out.insert(out.end(), gemaps_scalar_names().begin(), gemaps_scalar_names().end());
  return out;
}

inline std::vector<std::string> spectral_series_names(const AcousticConfig& cfg) {
  std::vector<std::string> out = {"centroid", "bandwidth"};
  for (std::size_t b = 0; b < cfg.contrast_bands; ++b) out.push_back("contrast_b" + std::to_string(b));
  for (const char* s : {"flatness", "rolloff", "flux_onset", "zcr", "poly_c0", "poly_c1"}) out.emplace_back(s);
  return out;
}

inline std::vector<std::string> spectral_feature_names(const AcousticConfig& cfg) {
  std::vector<std::string> out;
  for (const auto& s : spectral_series_names(cfg)) {
    auto n = bank_feature_names(s, cfg.bank);
    out.insert(out.end(), n.begin(), n.end());
  }
  auto r = bank_feature_names("rms", rms_bank());
  out.insert(out.end(), r.begin(), r.end());
  out.emplace_back("tempo_bpm");
  return out;
}

namespace detail {

struct FrameAnalysis {
  FrameMatrix frames;
  std::vector<Spectrum> spectra;
};

inline FrameAnalysis analyze_frames(const AudioBuffer& buf, const AcousticConfig& cfg) {
  const auto frame_len = ms_to_samples(cfg.frame_ms, buf.sample_rate_hz);
  const auto hop = std::max<std::size_t>(1, ms_to_samples(cfg.hop_ms, buf.sample_rate_hz));
  FrameAnalysis a{frame_signal(buf, frame_len, hop, cfg.window), {}};
  a.spectra = spectrogram(a.frames, next_power_of_two(frame_len));
  return a;
}

inline double band_energy(const Spectrum& s, double lo, double hi) {
  double e = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double f = s.frequency(k);
    if (f >= lo && f < hi) e += s.magnitudes[k] * s.magnitudes[k];
  }
  return e;
}

inline double band_peak(const Spectrum& s, double lo, double hi) {
  double m = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double f = s.frequency(k);
    if (f >= lo && f < hi) m = std::max(m, s.magnitudes[k]);
  }
  return m;
}

inline double band_slope(const Spectrum& s, double lo, double hi) {
  const Spectrum band = s.band(lo, hi);
  return band.size() >= 2 ? poly_features(band, 1)[1] : kNaN;
}

}  // namespace detail

/// Compact voice-quality/prosody set: F0 in semitones re 27.5 Hz, loudness proxy,
/// cycle jitter/shimmer, HNR, two spectral slopes, alpha ratio, Hammarberg index and MFCC 1-4.
inline FeatureVector gemaps_core(const AudioBuffer& buf, const AcousticConfig& cfg = {}) {
  auto analysis = detail::analyze_frames(buf, cfg);
  const auto n = analysis.frames.n_frames;
  const double nyquist = 0.5 * buf.sample_rate_hz;

  PitchConfig pcfg;
  pcfg.hop_ms = cfg.hop_ms;
  pcfg.window_ms = cfg.frame_ms;
  const auto f0 = f0_track(buf, cfg.f0_min_hz, std::min(cfg.f0_max_hz, 0.5 * nyquist), pcfg);
  const auto voice = jitter_shimmer_hnr(buf, f0);

  std::vector<double> semitone(f0.values.size());
  std::transform(f0.values.begin(), f0.values.end(), semitone.begin(),
                 [](double f) { return std::isnan(f) ? kNaN : 12.0 * std::log2(f / 27.5); });

  const auto scalars = frame_scalars(analysis.frames);
  std::vector<double> slope_lo(n), slope_hi(n), alpha(n), hammarberg(n);
  std::array<std::vector<double>, 4> mfccs;
  for (auto& m : mfccs) m.resize(n);
  const MelFilterbank bank(analysis.spectra.front().size(), analysis.spectra.front().bin_hz, cfg.n_mels, 20.0, nyquist);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = analysis.spectra[i];
    slope_lo[i] = detail::band_slope(s, 0.0, 500.0);
    slope_hi[i] = detail::band_slope(s, 500.0, 1500.0);
    alpha[i] = 10.0 * std::log10(std::max(detail::band_energy(s, 50.0, 1000.0), kSpectralFloor) /
                                 std::max(detail::band_energy(s, 1000.0, 5000.0), kSpectralFloor));
    hammarberg[i] = 20.0 * std::log10(std::max(detail::band_peak(s, 0.0, 2000.0), kSpectralFloor) /
                                      std::max(detail::band_peak(s, 2000.0, 5000.0), kSpectralFloor));
    const auto c = bank.mfcc(s, 5);
    for (std::size_t k = 0; k < 4; ++k) mfccs[k][i] = c[k + 1];
  }

  const auto ms = mean_std_bank();
  FeatureVector out;
  out.source_id = buf.source_id;
  out.append(apply_bank("f0_semitone", semitone, ms));
  out.append(apply_bank("loudness_rms", scalars.rms.values, ms));
  out.append(apply_bank("jitter_cycle", voice.jitter_cycles, ms));
  out.append(apply_bank("shimmer_cycle", voice.shimmer_cycles, ms));
  out.append(apply_bank("hnr_frame", voice.hnr_frames.values, ms));
  out.append(apply_bank("slope_0_500", slope_lo, ms));
  out.append(apply_bank("slope_500_1500", slope_hi, ms));
  out.append(apply_bank("alpha_ratio", alpha, ms));
  out.append(apply_bank("hammarberg", hammarberg, ms));
  for (std::size_t k = 0; k < 4; ++k) out.append(apply_bank("mfcc" + std::to_string(k + 1), mfccs[k], ms));
  out.push("voiced_fraction", f0.values.empty() ? 0.0
                                                : static_cast<double>(f0.defined_count()) / static_cast<double>(f0.size()));
  out.push("jitter_local", voice.jitter_local);
  out.push("shimmer_local", voice.shimmer_local);
  out.push("hnr_db", voice.hnr_db);
  return out;
}

/// Spectral shape, contrast, onset, energy, zero-crossing, polynomial and tempo descriptors.
inline FeatureVector spectral_set(const AudioBuffer& buf, const AcousticConfig& cfg = {}) {
  auto analysis = detail::analyze_frames(buf, cfg);
  const auto n = analysis.frames.n_frames;
  const auto& spectra = analysis.spectra;

  std::vector<double> centroid(n), bandwidth(n), flatness(n), rolloff(n), poly0(n), poly1(n);
  std::vector<std::vector<double>> contrast(cfg.contrast_bands, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto shape = spectral_shape(spectra[i]);
    centroid[i] = shape.centroid_hz;
    bandwidth[i] = shape.bandwidth_hz;
    flatness[i] = shape.flatness;
    rolloff[i] = shape.rolloff_hz;
    const auto c = spectral_contrast(spectra[i], cfg.contrast_bands);
    for (std::size_t b = 0; b < cfg.contrast_bands; ++b) contrast[b][i] = c[b];
    const auto p = poly_features(spectra[i], 1);
    poly0[i] = p[0];
    poly1[i] = p[1];
  }
  const double hop_s = analysis.frames.hop_seconds();
  FrameSeries onset;
  if (n >= 2) {
    onset = spectral_flux_onset(spectra, hop_s);
  } else {
    onset.values.assign(n, kNaN);
  }
  const auto scalars = frame_scalars(analysis.frames);
  const auto tempo = tempogram_tempo(onset, hop_s);

  FeatureVector out;
  out.source_id = buf.source_id;
  out.append(apply_bank("centroid", centroid, cfg.bank));
  out.append(apply_bank("bandwidth", bandwidth, cfg.bank));
  for (std::size_t b = 0; b < cfg.contrast_bands; ++b) {
    out.append(apply_bank("contrast_b" + std::to_string(b), contrast[b], cfg.bank));
  }
  out.append(apply_bank("flatness", flatness, cfg.bank));
  out.append(apply_bank("rolloff", rolloff, cfg.bank));
  out.append(apply_bank("flux_onset", onset.values, cfg.bank));
  out.append(apply_bank("zcr", scalars.zcr.values, cfg.bank));
  out.append(apply_bank("poly_c0", poly0, cfg.bank));
  out.append(apply_bank("poly_c1", poly1, cfg.bank));
  out.append(apply_bank("rms", scalars.rms.values, rms_bank()));
  out.push("tempo_bpm", tempo.tempo_bpm);
  return out;
}

}  // namespace voxmark

#endif  // VOXMARK_FUNCTIONALS_HPP
