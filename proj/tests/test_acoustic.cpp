#include <gtest/gtest.h>

#include <complex>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "test_util.hpp"
#include "voxmark/pitch.hpp"
#include "voxmark/spectral.hpp"

using namespace voxmark;
using voxmark::testing::direct_dft_energy;
using voxmark::testing::full_energy_from_half;
using voxmark::testing::sine;

namespace {

Spectrum flat_spectrum(std::size_t n, double value, double bin_hz) {
  Spectrum s;
  s.bin_hz = bin_hz;
  s.magnitudes.assign(n, value);
  return s;
}

}  // namespace

TEST(PowerSpectrum, ZeroFrame) {
  const std::vector<double> frame(64, 0.0);
  const auto s = power_spectrum(frame, 64, 16000);
  ASSERT_EQ(s.size(), 33u);
  for (double m : s.magnitudes) EXPECT_EQ(m, 0.0);
  EXPECT_DOUBLE_EQ(s.bin_hz, 250.0);
}

TEST(PowerSpectrum, CosineLandsInOneBin) {
  const std::size_t n = 128, k = 9;
  std::vector<double> frame(n);
  for (std::size_t i = 0; i < n; ++i) frame[i] = std::cos(2.0 * std::numbers::pi * k * i / n);
  const auto s = power_spectrum(frame, n, 1.0);
  const double peak = s.magnitudes[k];
  EXPECT_NEAR(peak, n / 2.0, 1e-9);
  for (std::size_t b = 0; b < s.size(); ++b) {
    if (b != k) {
      EXPECT_LT(s.magnitudes[b], 1e-10 * peak);
    }
  }
}

TEST(PowerSpectrum, ParsevalAgainstDirectDft) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g;
  std::vector<double> frame(64);
  for (auto& v : frame) v = g(rng);
  const std::size_t n_fft = 128;
  const auto s = power_spectrum(frame, n_fft, 1.0);
  double time_energy = 0.0;
  for (double v : frame) time_energy += v * v;
  const double oracle = direct_dft_energy(frame, n_fft);
  EXPECT_NEAR(oracle / (n_fft * time_energy), 1.0, 1e-9);
  EXPECT_NEAR(full_energy_from_half(s) / oracle, 1.0, 1e-9);
}

TEST(PowerSpectrum, InvalidSize) {
  const std::vector<double> frame(100, 0.0);
  EXPECT_THROW(power_spectrum(frame, 96, 1.0), Error);
  EXPECT_THROW(power_spectrum(frame, 64, 1.0), Error);
}

TEST(F0Track, PureSine440) {
  const auto buf = sine(440.0, 1.0);
  const auto f0 = f0_track(buf, 60.0, 600.0);
  ASSERT_GT(f0.size(), 50u);
  std::size_t voiced = 0;
  for (double f : f0.values) {
    if (std::isnan(f)) continue;
    ++voiced;
    EXPECT_NEAR(f, 440.0, 2.0);
  }
  EXPECT_EQ(voiced, f0.size());
}

TEST(F0Track, WhiteNoiseIsMostlyUnvoiced) {
  const auto buf = voxmark::testing::white_noise(1.0, 5);
  const auto f0 = f0_track(buf, 60.0, 600.0);
  const double nan_fraction = 1.0 - static_cast<double>(f0.defined_count()) / f0.size();
  EXPECT_GE(nan_fraction, 0.9);
}

TEST(F0Track, RespectsRangeContract) {
  const auto buf = sine(100.0, 1.0);
  const auto f0 = f0_track(buf, 150.0, 600.0);
  for (double f : f0.values) {
    if (!std::isnan(f)) {
      EXPECT_GE(f, 150.0);
      EXPECT_LE(f, 600.0);
    }
  }
}

TEST(F0Track, InvalidRange) {
  const auto buf = sine(100.0, 0.2);
  try {
    f0_track(buf, 300.0, 200.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidRange);
  }
}

TEST(F0Track, AmplitudeInvariance) {
  auto buf = sine(220.0, 0.5);
  for (std::size_t i = 0; i < buf.samples.size(); ++i) buf.samples[i] += 0.05 * std::sin(0.37 * static_cast<double>((i * i) % 1000));
  const auto ref = f0_track(buf, 60.0, 600.0);
  for (double c : {0.5, 2.0}) {
    auto scaled = buf;
    for (auto& s : scaled.samples) s *= c;
    const auto f = f0_track(scaled, 60.0, 600.0);
    ASSERT_EQ(f.size(), ref.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      EXPECT_EQ(std::isnan(f.values[i]), std::isnan(ref.values[i]));
      if (!std::isnan(f.values[i])) {
        EXPECT_EQ(f.values[i], ref.values[i]);
      }
    }
  }
}

TEST(F0Track, Deterministic) {
  const auto buf = voxmark::testing::white_noise(0.3, 9);
  const auto a = f0_track(buf, 60.0, 600.0);
  const auto b = f0_track(buf, 60.0, 600.0);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE((std::isnan(a.values[i]) && std::isnan(b.values[i])) || a.values[i] == b.values[i]);
  }
}

TEST(JitterShimmer, PerfectSine) {
  const auto buf = sine(200.0, 1.0);
  const auto rep = jitter_shimmer_hnr(buf, f0_track(buf, 60.0, 600.0));
  EXPECT_GT(rep.n_cycles, 100u);
  EXPECT_LT(rep.jitter_local, 0.001);
  EXPECT_LT(rep.shimmer_local, 0.01);
  EXPECT_NEAR(rep.f0_mean_hz, 200.0, 1.0);
  EXPECT_GT(rep.hnr_db, 20.0);
}

TEST(JitterShimmer, AlternatingPeriods) {
  // cosine cycles whose lengths alternate T and 1.05 T; each cycle peaks at its start
  const int sr = 16000;
  const double t_short = 80.0, t_long = 84.0;
  std::vector<double> periods;
  AudioBuffer buf;
  buf.sample_rate_hz = sr;
  double start = 0.0;
  for (int c = 0; start < sr; ++c) {
    const double period = c % 2 == 0 ? t_short : t_long;
    periods.push_back(period);
    for (auto i = static_cast<std::size_t>(std::ceil(start)); i < start + period; ++i) {
      buf.samples.push_back(0.5 * std::cos(2.0 * std::numbers::pi * (i - start) / period));
    }
    start += period;
  }
  // oracle: mean |T_i - T_{i-1}| / mean T over the constructed sequence
  double diff = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < periods.size(); ++i) {
    sum += periods[i];
    if (i > 0) diff += std::abs(periods[i] - periods[i - 1]);
  }
  const double expected = (diff / (periods.size() - 1)) / (sum / periods.size());
  EXPECT_NEAR(expected, 0.0488, 1e-3);
  const auto rep = jitter_shimmer_hnr(buf, f0_track(buf, 60.0, 600.0));
  EXPECT_NEAR(rep.jitter_local, expected, 0.01);
  EXPECT_NEAR(rep.jitter_local, 0.05, 0.01);
}

TEST(JitterShimmer, NoiseIsDegenerate) {
  const auto buf = voxmark::testing::white_noise(0.5, 17);
  const auto rep = jitter_shimmer_hnr(buf, f0_track(buf, 60.0, 600.0));
  EXPECT_TRUE(std::isnan(rep.jitter_local));
  EXPECT_TRUE(std::isnan(rep.shimmer_local));
  EXPECT_EQ(rep.n_cycles, 0u);
}

TEST(JitterShimmer, SilenceAndEmptyTrack) {
  const auto buf = voxmark::testing::silence(0.5);
  const auto rep = jitter_shimmer_hnr(buf, f0_track(buf, 60.0, 600.0));
  EXPECT_TRUE(std::isnan(rep.jitter_local));
  EXPECT_TRUE(std::isnan(rep.hnr_db));
  EXPECT_EQ(rep.n_cycles, 0u);
  FrameSeries empty;
  EXPECT_EQ(jitter_shimmer_hnr(buf, empty).n_cycles, 0u);
}

TEST(Mfcc, ZeroSpectrumGivesDctOfFloor) {
  const auto spec = flat_spectrum(257, 0.0, 31.25);
  const std::size_t n_mels = 26;
  const auto c = mfcc(spec, n_mels, 13, 0.0, 8000.0);
  ASSERT_EQ(c.size(), 13u);
  EXPECT_NEAR(c[0], std::sqrt(static_cast<double>(n_mels)) * std::log(1e-10), 1e-9);
  for (std::size_t k = 1; k < c.size(); ++k) EXPECT_NEAR(c[k], 0.0, 1e-9);
}

TEST(Mfcc, DeterministicForIdenticalFrames) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  Spectrum s = flat_spectrum(257, 0.0, 31.25);
  for (auto& m : s.magnitudes) m = u(rng);
  EXPECT_EQ(mfcc(s, 40, 13, 20.0, 8000.0), mfcc(s, 40, 13, 20.0, 8000.0));
}

TEST(Mfcc, InverseDctRecoversLogMel) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(0, 2);
  Spectrum s = flat_spectrum(257, 0.0, 31.25);
  for (auto& m : s.magnitudes) m = u(rng);
  const std::size_t n_mels = 24;
  const MelFilterbank fb(s.size(), s.bin_hz, n_mels, 0.0, 8000.0);
  const auto log_mel = fb.log_energies(s);
  const auto c = fb.mfcc(s, n_mels);
  // explicit orthonormal DCT-II matrix; its transpose is the inverse
  for (std::size_t i = 0; i < n_mels; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n_mels; ++k) {
      const double scale = k == 0 ? std::sqrt(1.0 / n_mels) : std::sqrt(2.0 / n_mels);
      acc += scale * std::cos(std::numbers::pi * k * (2.0 * i + 1.0) / (2.0 * n_mels)) * c[k];
    }
    EXPECT_NEAR(acc, log_mel[i], 1e-9);
  }
}

TEST(Mfcc, GlobalScaleShiftsOnlyC0) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.1, 2);
  Spectrum s = flat_spectrum(257, 0.0, 31.25);
  for (auto& m : s.magnitudes) m = u(rng);
  Spectrum scaled = s;
  for (auto& m : scaled.magnitudes) m *= 3.0;
  const auto a = mfcc(s, 26, 13, 20.0, 8000.0);
  const auto b = mfcc(scaled, 26, 13, 20.0, 8000.0);
  EXPECT_NEAR(b[0] - a[0], std::sqrt(26.0) * 2.0 * std::log(3.0), 1e-6);
  for (std::size_t k = 1; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-6);
}

TEST(Mfcc, InvalidConfig) {
  const auto s = flat_spectrum(257, 1.0, 31.25);
  EXPECT_THROW(mfcc(s, 10, 11, 0.0, 8000.0), Error);
  EXPECT_THROW(mfcc(s, 10, 5, 0.0, 9000.0), Error);
  EXPECT_THROW(mfcc(s, 10, 5, 500.0, 400.0), Error);
}

TEST(SpectralShape, PointMass) {
  Spectrum s = flat_spectrum(257, 0.0, 31.25);
  s.magnitudes[32] = 2.0;  // 1000 Hz
  const auto shape = spectral_shape(s);
  EXPECT_DOUBLE_EQ(shape.centroid_hz, 1000.0);
  EXPECT_DOUBLE_EQ(shape.bandwidth_hz, 0.0);
  EXPECT_DOUBLE_EQ(shape.rolloff_hz, 1000.0);
  EXPECT_NEAR(shape.flatness, 0.0, 1e-6);
}

TEST(SpectralShape, FlatSpectrum) {
  const auto s = flat_spectrum(129, 0.3, 62.5);
  const auto shape = spectral_shape(s);
  EXPECT_EQ(shape.flatness, 1.0);
  double mean_f = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) mean_f += s.frequency(k);
  EXPECT_NEAR(shape.centroid_hz, mean_f / s.size(), 1e-9);
}

TEST(SpectralShape, TwoEqualBins) {
  Spectrum s = flat_spectrum(65, 0.0, 100.0);
  s.magnitudes[5] = 1.0;
  s.magnitudes[15] = 1.0;
  const auto shape = spectral_shape(s);
  EXPECT_DOUBLE_EQ(shape.centroid_hz, 1000.0);
  EXPECT_DOUBLE_EQ(shape.bandwidth_hz, 500.0);
}

TEST(SpectralShape, SilenceIsNaN) {
  const auto shape = spectral_shape(flat_spectrum(65, 0.0, 100.0));
  EXPECT_TRUE(std::isnan(shape.centroid_hz));
  EXPECT_TRUE(std::isnan(shape.bandwidth_hz));
  EXPECT_TRUE(std::isnan(shape.rolloff_hz));
  EXPECT_TRUE(std::isnan(shape.flatness));
}

TEST(SpectralShape, RangeProperties) {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  std::bernoulli_distribution sparse(0.3);
  for (int trial = 0; trial < 200; ++trial) {
    Spectrum s = flat_spectrum(129, 0.0, 62.5);
    for (auto& m : s.magnitudes) m = sparse(rng) ? u(rng) : 0.0;
    s.magnitudes[trial % 129] = 0.5;
    const auto shape = spectral_shape(s);
    EXPECT_GE(shape.flatness, 0.0);
    EXPECT_LE(shape.flatness, 1.0);
    EXPECT_GE(shape.bandwidth_hz, 0.0);
    EXPECT_LE(shape.rolloff_hz, 8000.0);
  }
}

TEST(SpectralContrast, FlatAndZero) {
  for (double v : {0.7, 0.0}) {
    const auto c = spectral_contrast(flat_spectrum(257, v, 31.25), 7);
    ASSERT_EQ(c.size(), 7u);
    for (double x : c) EXPECT_NEAR(x, 0.0, 1e-12);
  }
}

TEST(SpectralContrast, SingleLargeBin) {
  Spectrum s = flat_spectrum(257, 1e-6, 31.25);
  s.magnitudes[20] = 1.0;  // 625 Hz, band 2 = [400, 800)
  const auto c = spectral_contrast(s, 7);
  EXPECT_NEAR(c[2], std::log(1.0 / 1e-6), 1e-9);
  EXPECT_NEAR(c[2], 13.8, 0.05);
  EXPECT_NEAR(c[1], 0.0, 1e-12);
}

TEST(FrameScalars, ZcrAndRms) {
  AudioBuffer buf;
  buf.sample_rate_hz = 8;
  buf.samples = {1, -1, 1, -1, 1, -1, 1, -1};
  auto fm = frame_signal(buf, 8, 8, WindowKind::rectangular);
  EXPECT_DOUBLE_EQ(frame_scalars(fm).zcr.values[0], 1.0);

  buf.samples.assign(8, 0.4);
  fm = frame_signal(buf, 8, 8, WindowKind::hann);
  EXPECT_EQ(frame_scalars(fm).zcr.values[0], 0.0);

  buf.samples = {3, 4};
  fm = frame_signal(buf, 2, 1, WindowKind::rectangular);
  EXPECT_NEAR(frame_scalars(fm).rms.values[0], std::sqrt(12.5), 1e-12);
  EXPECT_NEAR(frame_scalars(fm).rms.values[0], 3.5355, 1e-4);
}

TEST(FluxOnset, Contracts) {
  std::vector<Spectrum> constant(5, flat_spectrum(9, 0.5, 10.0));
  for (double v : spectral_flux_onset(constant).values) EXPECT_EQ(v, 0.0);

  std::vector<Spectrum> step(6, flat_spectrum(9, 0.0, 10.0));
  for (std::size_t t = 3; t < step.size(); ++t) step[t].magnitudes[4] = 1.0;
  const auto onset = spectral_flux_onset(step).values;
  for (std::size_t t = 0; t < onset.size(); ++t) {
    if (t == 3) {
      EXPECT_GT(onset[t], 0.0);
    } else {
      EXPECT_EQ(onset[t], 0.0);
    }
  }

  std::vector<Spectrum> decaying;
  for (int t = 0; t < 5; ++t) decaying.push_back(flat_spectrum(9, std::pow(0.5, t), 10.0));
  for (double v : spectral_flux_onset(decaying).values) EXPECT_EQ(v, 0.0);

  std::vector<Spectrum> one(1, flat_spectrum(9, 1.0, 10.0));
  EXPECT_THROW(spectral_flux_onset(one), Error);
}

TEST(Tempo, ImpulseTrains) {
  const double hop = 0.01;
  for (auto [period_s, bpm] : {std::pair{0.5, 120.0}, std::pair{1.0, 60.0}}) {
    FrameSeries onset;
    onset.values.assign(1000, 0.0);
    const auto step = static_cast<std::size_t>(std::lround(period_s / hop));
    for (std::size_t t = 0; t < onset.values.size(); t += step) onset.values[t] = 1.0;
    const auto est = tempogram_tempo(onset, hop);
    EXPECT_NEAR(est.tempo_bpm, bpm, 1.0);
    EXPECT_EQ(est.tempogram.rows(), 384);
    EXPECT_EQ(est.tempogram.cols(), 1000);
  }
}

TEST(Tempo, SilentEnvelopeAndShortInput) {
  FrameSeries onset;
  onset.values.assign(200, 0.0);
  EXPECT_TRUE(std::isnan(tempogram_tempo(onset, 0.01).tempo_bpm));
  onset.values.assign(150, 0.0);
  for (std::size_t t = 0; t < 150; t += 50) onset.values[t] = 1.0;
  const auto est = tempogram_tempo(onset, 0.01);
  EXPECT_EQ(est.tempogram.rows(), 150);
  EXPECT_NEAR(est.tempo_bpm, 120.0, 1.0);
}

TEST(PolyFeatures, Fits) {
  const auto flat = flat_spectrum(65, 0.25, 125.0);
  const auto c = poly_features(flat, 1);
  EXPECT_NEAR(c[0], 0.25, 1e-12);
  EXPECT_NEAR(c[1], 0.0, 1e-15);

  Spectrum lin = flat_spectrum(65, 0.0, 125.0);
  for (std::size_t k = 0; k < lin.size(); ++k) lin.magnitudes[k] = 0.3 + 2e-4 * lin.frequency(k);
  const auto l = poly_features(lin, 1);
  EXPECT_NEAR(l[0], 0.3, 1e-9);
  EXPECT_NEAR(l[1], 2e-4, 1e-9);

  Spectrum quad = flat_spectrum(65, 0.0, 125.0);
  for (std::size_t k = 0; k < quad.size(); ++k) {
    const double f = quad.frequency(k);
    quad.magnitudes[k] = 1.0 - 3e-4 * f + 5e-8 * f * f;
  }
  const auto q = poly_features(quad, 2);
  double residual = 0.0;
  for (std::size_t k = 0; k < quad.size(); ++k) {
    const double f = quad.frequency(k);
    residual = std::max(residual, std::abs(q[0] + q[1] * f + q[2] * f * f - quad.magnitudes[k]));
  }
  EXPECT_LT(residual, 1e-9);
  EXPECT_THROW(poly_features(quad, 3), Error);
  EXPECT_THROW(poly_features(flat_spectrum(2, 1.0, 1.0), 2), Error);
}
