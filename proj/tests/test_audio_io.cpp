#include <gtest/gtest.h>

#include <cstdint>
#include <fstream>
#include <random>

#include "test_util.hpp"
#include "voxmark/audio_io.hpp"

using namespace voxmark;

namespace {

AudioBuffer decode(const std::string& bytes) {
  return decode_wav(std::span(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()));
}

std::string mono_wav(std::vector<std::int16_t> pcm, int sr = 16000) { return encode_wav(pcm, 1, sr); }

}  // namespace

TEST(LoadWav, ZeroSignal) {
  const auto buf = decode(mono_wav({0, 0, 0}));
  ASSERT_EQ(buf.samples.size(), 3u);
  for (double s : buf.samples) EXPECT_EQ(s, 0.0);
}

TEST(LoadWav, HalfScaleSampleIsExact) {
  const auto buf = decode(mono_wav({16384}, 16000));
  ASSERT_EQ(buf.samples.size(), 1u);
  EXPECT_EQ(buf.samples[0], 0.5);
  EXPECT_EQ(buf.sample_rate_hz, 16000);
}

TEST(LoadWav, StereoIsAveraged) {
  const std::vector<std::int16_t> interleaved = {32767, -32768, 0, 0};
  const auto buf = decode(encode_wav(interleaved, 2, 8000));
  ASSERT_EQ(buf.samples.size(), 2u);
  // (32767 - 32768) / 2 / 32768
  EXPECT_DOUBLE_EQ(buf.samples[0], -1.0 / 65536.0);
  EXPECT_NEAR(buf.samples[0], -0.0000153, 1e-7);
  EXPECT_EQ(buf.samples[1], 0.0);
}

TEST(LoadWav, IdenticalChannelsMixToEitherChannel) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> d(-32768, 32767);
  std::vector<std::int16_t> mono(500), stereo;
  for (auto& s : mono) {
    s = static_cast<std::int16_t>(d(rng));
    stereo.push_back(s);
    stereo.push_back(s);
  }
  const auto a = decode(encode_wav(mono, 1, 16000));
  const auto b = decode(encode_wav(stereo, 2, 16000));
  EXPECT_EQ(a.samples, b.samples);
}

TEST(LoadWav, SkipsExtraChunks) {
  std::string wav = mono_wav({100, -100});
  // insert a LIST chunk (odd size -> pad byte) between fmt and data
  std::string list = "LIST";
  list += std::string("\x05\x00\x00\x00", 4);
  list += "abcde";
  list.push_back('\0');
  wav.insert(36, list);
  const auto riff_size = static_cast<std::uint32_t>(wav.size() - 8);
  for (int i = 0; i < 4; ++i) wav[4 + i] = static_cast<char>((riff_size >> (8 * i)) & 0xFF);
  const auto buf = decode(wav);
  ASSERT_EQ(buf.samples.size(), 2u);
  EXPECT_DOUBLE_EQ(buf.samples[0], 100.0 / 32768.0);
}

TEST(LoadWav, ErrorPaths) {
  auto code_of = [](const std::string& bytes) {
    try {
      decode(bytes);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code_of("RIFX0000WAVE"), ErrorCode::MalformedContainer);
  EXPECT_EQ(code_of("short"), ErrorCode::MalformedContainer);

  std::string wav = mono_wav({1, 2, 3});
  std::string float_fmt = wav;
  float_fmt[20] = 3;  // IEEE float
  EXPECT_EQ(code_of(float_fmt), ErrorCode::UnsupportedFormat);
  std::string bits8 = wav;
  bits8[34] = 8;
  EXPECT_EQ(code_of(bits8), ErrorCode::UnsupportedFormat);
  EXPECT_EQ(code_of(mono_wav({})), ErrorCode::EmptyAudio);
}

TEST(LoadWav, RoundTripWithinOneLsb) {
  voxmark::testing::TempDir dir("wav");
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 0.99996);
  AudioBuffer buf;
  buf.sample_rate_hz = 22050;
  buf.samples.resize(1000);
  for (auto& s : buf.samples) s = u(rng);
  const auto path = dir.path() / "rt.wav";
  write_wav(buf, path);
  const auto back = load_wav(path);
  ASSERT_EQ(back.samples.size(), buf.samples.size());
  EXPECT_EQ(back.sample_rate_hz, 22050);
  EXPECT_EQ(back.source_id, "rt");
  for (std::size_t i = 0; i < buf.samples.size(); ++i) EXPECT_LE(std::abs(back.samples[i] - buf.samples[i]), 1.0 / 32768.0);
}

TEST(FrameSignal, CountsAndOffsets) {
  AudioBuffer buf;
  buf.sample_rate_hz = 10;
  for (int i = 0; i < 10; ++i) buf.samples.push_back(i);
  const auto fm = frame_signal(buf, 4, 2, WindowKind::rectangular);
  ASSERT_EQ(fm.n_frames, 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(fm.frame(i)[0], static_cast<double>(2 * i));
}

TEST(FrameSignal, ConstantInputReproducesWindow) {
  AudioBuffer buf;
  buf.sample_rate_hz = 8;
  buf.samples.assign(12, 1.0);
  const auto fm = frame_signal(buf, 4, 4, WindowKind::hann);
  const auto w = make_window(WindowKind::hann, 4);
  for (std::size_t i = 0; i < fm.n_frames; ++i) {
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(fm.frame(i)[j], w[j]);
  }
  EXPECT_DOUBLE_EQ(w[2], 1.0);
}

TEST(FrameSignal, TooShort) {
  AudioBuffer buf;
  buf.sample_rate_hz = 8;
  buf.samples.assign(3, 0.1);
  try {
    frame_signal(buf, 4, 2, WindowKind::rectangular);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SignalTooShort);
  }
}

TEST(FrameSignal, CountFormulaProperty) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t frame_len = std::uniform_int_distribution<std::size_t>(2, 64)(rng);
    const std::size_t hop = std::uniform_int_distribution<std::size_t>(1, frame_len)(rng);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(frame_len, 600)(rng);
    AudioBuffer buf;
    buf.sample_rate_hz = 1000;
    buf.samples.assign(n, 0.25);
    const auto fm = frame_signal(buf, frame_len, hop, WindowKind::hamming);
    EXPECT_EQ(fm.n_frames, 1 + (n - frame_len) / hop);
    // last frame lies fully inside the signal
    EXPECT_LE((fm.n_frames - 1) * hop + frame_len, n);
  }
}
