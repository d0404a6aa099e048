#pragma once

// Test-side reference implementations, kept independent of the library
// code paths they are used to check.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace oracles {

// Transposed direct form II recursion of a normalized biquad.
inline std::vector<double> tdf2_filter(double b0, double b1, double b2,
                                       double a1, double a2,
                                       std::span<const double> x) {
  std::vector<double> y(x.size());
  double z1 = 0.0, z2 = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double yn = b0 * x[n] + z1;
    z1 = b1 * x[n] - a1 * yn + z2;
    z2 = b2 * x[n] - a2 * yn;
    y[n] = yn;
  }
  return y;
}

// One-pole bilinear lowpass g(1 + z^-1) / ((1+g) - (1-g) z^-1), run as a
// plain difference equation.
inline std::vector<double> onepole_bilinear(double g, std::span<const double> x) {
  std::vector<double> y(x.size());
  double x1 = 0.0, y1 = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double yn = (g * (x[n] + x1) + (1.0 - g) * y1) / (1.0 + g);
    x1 = x[n];
    y1 = yn;
    y[n] = yn;
  }
  return y;
}

// Direct-summation DFT, O(n^2); for validating the FFT on small sizes.
inline std::vector<std::complex<double>> naive_dft(std::span<const double> x,
                                                   std::size_t n_fft) {
  std::vector<std::complex<double>> out(n_fft / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) *
                         static_cast<double>(n) / static_cast<double>(n_fft);
      acc += x[n] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

// Reproducible white noise in [-1, 1); raw engine output scaled directly so
// the stream does not depend on distribution internals.
inline std::vector<double> noise(std::uint32_t seed, std::size_t n) {
  std::mt19937 rng(seed);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = static_cast<double>(rng()) * (2.0 / 4294967296.0) - 1.0;
  return x;
}

}  // namespace oracles
