#ifndef VOXMARK_AUDIO_IO_HPP
#define VOXMARK_AUDIO_IO_HPP

// WAV decoding/encoding and frame segmentation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "voxmark/error.hpp"

namespace voxmark {

/// Decoded mono PCM. Samples lie in [-1, 1).
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate_hz = 0;
  std::string source_id;

  std::size_t size() const noexcept { return samples.size(); }
  double duration_seconds() const noexcept {
    return sample_rate_hz > 0 ? static_cast<double>(samples.size()) / sample_rate_hz : 0.0;
  }
};

enum class WindowKind { rectangular, hann, hamming, gaussian };

inline std::string_view to_string(WindowKind kind) {
  switch (kind) {
    case WindowKind::rectangular: return "rectangular";
    case WindowKind::hann: return "hann";
    case WindowKind::hamming: return "hamming";
    case WindowKind::gaussian: return "gaussian";
  }
  return "unknown";
}

inline WindowKind parse_window_kind(std::string_view name) {
  if (name == "rectangular") return WindowKind::rectangular;
  if (name == "hann") return WindowKind::hann;
  if (name == "hamming") return WindowKind::hamming;
  if (name == "gaussian") return WindowKind::gaussian;
  throw Error(ErrorCode::InvalidArgument, "unknown window kind '" + std::string(name) + "'");
}

/// Periodic (DFT-even) window coefficients. The gaussian uses sigma = 0.4 of the half-length.
inline std::vector<double> make_window(WindowKind kind, std::size_t length) {
  std::vector<double> w(length, 1.0);
  const double n_len = static_cast<double>(length);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t n = 0; n < length; ++n) {
    const double x = static_cast<double>(n);
    switch (kind) {
      case WindowKind::rectangular: break;
      case WindowKind::hann: w[n] = 0.5 - 0.5 * std::cos(two_pi * x / n_len); break;
      case WindowKind::hamming: w[n] = 0.54 - 0.46 * std::cos(two_pi * x / n_len); break;
      case WindowKind::gaussian: {
        const double half = 0.5 * (n_len - 1.0);
        const double z = half > 0.0 ? (x - half) / (0.4 * half) : 0.0;
        w[n] = std::exp(-0.5 * z * z);
        break;
      }
    }
  }
  return w;
}

/// Row-major matrix of analysis frames. `raw` holds the samples before windowing.
struct FrameMatrix {
  std::vector<double> windowed;
  std::vector<double> raw;
  std::size_t n_frames = 0;
  std::size_t frame_len = 0;
  std::size_t hop = 0;
  int sample_rate_hz = 0;
  WindowKind window_kind = WindowKind::rectangular;

  std::span<const double> frame(std::size_t i) const {
    return {windowed.data() + i * frame_len, frame_len};
  }
  std::span<const double> raw_frame(std::size_t i) const {
    return {raw.data() + i * frame_len, frame_len};
  }
  double hop_seconds() const { return static_cast<double>(hop) / sample_rate_hz; }
};

constexpr std::size_t frame_count(std::size_t n_samples, std::size_t frame_len, std::size_t hop) {
  return n_samples < frame_len ? 0 : 1 + (n_samples - frame_len) / hop;
}

inline FrameMatrix frame_signal(const AudioBuffer& buf, std::size_t frame_len, std::size_t hop,
                                WindowKind window_kind) {
  if (frame_len < 2 || hop < 1 || hop > frame_len) {
    throw Error(ErrorCode::InvalidArgument, "frame_len must be >= 2 and 1 <= hop <= frame_len");
  }
  if (buf.samples.size() < frame_len) {
    throw Error(ErrorCode::SignalTooShort, "signal has " + std::to_string(buf.samples.size()) +
                                               " samples, frame needs " + std::to_string(frame_len));
  }
  FrameMatrix fm;
  fm.frame_len = frame_len;
  fm.hop = hop;
  fm.sample_rate_hz = buf.sample_rate_hz;
  fm.window_kind = window_kind;
  fm.n_frames = frame_count(buf.samples.size(), frame_len, hop);
  fm.windowed.resize(fm.n_frames * frame_len);
  fm.raw.resize(fm.n_frames * frame_len);
  const auto window = make_window(window_kind, frame_len);
  for (std::size_t i = 0; i < fm.n_frames; ++i) {
    const double* src = buf.samples.data() + i * hop;
    double* raw = fm.raw.data() + i * frame_len;
    double* out = fm.windowed.data() + i * frame_len;
    for (std::size_t j = 0; j < frame_len; ++j) {
      raw[j] = src[j];
      out[j] = src[j] * window[j];
    }
  }
  return fm;
}

inline std::size_t ms_to_samples(double ms, int sample_rate_hz) {
  return static_cast<std::size_t>(std::lround(ms * 1e-3 * sample_rate_hz));
}

namespace detail {

inline std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
inline std::uint16_t read_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
inline void put_u32le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline void put_u16le(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

}  // namespace detail

/// Decode a RIFF/WAVE PCM16 byte image. Unknown chunks (LIST, fact, ...) are skipped.
inline AudioBuffer decode_wav(std::span<const unsigned char> bytes, std::string source_id = {}) {
  using detail::read_u16le;
  using detail::read_u32le;
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorCode::MalformedContainer, "missing RIFF/WAVE header");
  }
  bool have_fmt = false;
  int channels = 0;
  int sample_rate = 0;
  int bits = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::size_t size = read_u32le(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || size > available) throw Error(ErrorCode::MalformedContainer, "truncated fmt chunk");
      const unsigned char* f = bytes.data() + body;
      std::uint16_t format = read_u16le(f);
      channels = read_u16le(f + 2);
      sample_rate = static_cast<int>(read_u32le(f + 4));
      bits = read_u16le(f + 14);
      if (format == 0xFFFE && size >= 40) format = read_u16le(f + 24);  // WAVE_FORMAT_EXTENSIBLE subformat
      if (format != 1) {
        throw Error(ErrorCode::UnsupportedFormat, "format code " + std::to_string(format) + " is not PCM");
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = std::min(size, available);  // tolerate writers that leave the size field stale
      break;
    }
    if (size > available) break;
    pos = body + size + (size & 1U);
  }
  if (!have_fmt) throw Error(ErrorCode::MalformedContainer, "no fmt chunk");
  if (data == nullptr) throw Error(ErrorCode::MalformedContainer, "no data chunk");
  if (bits != 16) throw Error(ErrorCode::UnsupportedFormat, "bit depth " + std::to_string(bits) + " (need 16)");
  if (channels != 1 && channels != 2) {
    throw Error(ErrorCode::UnsupportedFormat, std::to_string(channels) + " channels (need 1 or 2)");
  }
  if (sample_rate <= 0) throw Error(ErrorCode::MalformedContainer, "sample rate must be positive");

  const std::size_t frame_bytes = 2 * static_cast<std::size_t>(channels);
  const std::size_t n = data_size / frame_bytes;
  if (n == 0) throw Error(ErrorCode::EmptyAudio, "no samples in data chunk");

  AudioBuffer buf;
  buf.sample_rate_hz = sample_rate;
  buf.source_id = std::move(source_id);
  buf.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char* p = data + i * frame_bytes;
    const auto left = static_cast<std::int16_t>(read_u16le(p));
    if (channels == 1) {
      buf.samples[i] = left / 32768.0;
    } else {
      const auto right = static_cast<std::int16_t>(read_u16le(p + 2));
      buf.samples[i] = (static_cast<double>(left) + static_cast<double>(right)) / 65536.0;
    }
  }
  return buf;
}

inline AudioBuffer load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_wav(bytes, path.stem().string());
}

inline std::int16_t to_pcm16(double x) {
  const double scaled = std::round(x * 32768.0);
  return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

/// Encode interleaved PCM16 channels (1 or 2) as a canonical 44-byte-header WAV image.
inline std::string encode_wav(std::span<const std::int16_t> interleaved, int channels, int sample_rate_hz) {
  using detail::put_u16le;
  using detail::put_u32le;
  const auto data_bytes = static_cast<std::uint32_t>(interleaved.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32le(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put_u32le(out, 16);
  put_u16le(out, 1);
  put_u16le(out, static_cast<std::uint16_t>(channels));
  put_u32le(out, static_cast<std::uint32_t>(sample_rate_hz));
  put_u32le(out, static_cast<std::uint32_t>(sample_rate_hz * channels * 2));
  put_u16le(out, static_cast<std::uint16_t>(channels * 2));
  put_u16le(out, 16);
  out += "data";
  put_u32le(out, data_bytes);
  for (std::int16_t s : interleaved) put_u16le(out, static_cast<std::uint16_t>(s));
  return out;
}

inline void write_wav(const AudioBuffer& buf, const std::filesystem::path& path) {
  std::vector<std::int16_t> pcm(buf.samples.size());
  std::transform(buf.samples.begin(), buf.samples.end(), pcm.begin(), to_pcm16);
  const std::string bytes = encode_wav(pcm, 1, buf.sample_rate_hz);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::UnwritableOutput, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace voxmark

#endif  // VOXMARK_AUDIO_IO_HPP
