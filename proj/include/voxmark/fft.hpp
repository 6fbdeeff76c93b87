#ifndef VOXMARK_FFT_HPP
#define VOXMARK_FFT_HPP

#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace voxmark {

constexpr bool is_power_of_two(std::size_t n) noexcept { return n > 0 && std::has_single_bit(n); }

constexpr std::size_t next_power_of_two(std::size_t n) noexcept { return n <= 1 ? 1 : std::bit_ceil(n); }

/// In-place iterative radix-2 Cooley-Tukey transform (forward, unscaled).
/// The size must be a power of two; callers validate.
inline void fft_inplace(std::span<std::complex<double>> x) {
  const std::size_t n = x.size();
  if (n < 2) return;
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      // twiddles evaluated directly to avoid error accumulation from repeated multiplication
      const std::complex<double> w(std::cos(ang * static_cast<double>(k)), std::sin(ang * static_cast<double>(k)));
      for (std::size_t i = k; i < n; i += len) {
        const std::complex<double> u = x[i];
        const std::complex<double> v = x[i + half] * w;
        x[i] = u + v;
        x[i + half] = u - v;
      }
    }
  }
}

/// Full complex DFT of a real frame zero-padded to n_fft.
inline std::vector<std::complex<double>> rfft_full(std::span<const double> frame, std::size_t n_fft) {
  std::vector<std::complex<double>> buf(n_fft);
  for (std::size_t i = 0; i < frame.size() && i < n_fft; ++i) buf[i] = frame[i];
  fft_inplace(buf);
  return buf;
}

}  // namespace voxmark

#endif  // VOXMARK_FFT_HPP
