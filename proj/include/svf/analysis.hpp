#pragma once

// Closed-form response evaluation and measurement helpers: biquad
// coefficients for each topology, unit-circle and s-plane evaluation,
// impulse-response spectra and peak location.

#include "svf/core.hpp"

#include <algorithm>
#include <complex>
#include <cstddef>
#include <vector>

namespace svf {

enum class Output { hp, bp, lp, br, ap };

// Normalized second-order section, a0 == 1.
struct BiquadCoeffs {
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  // Triangle condition: both poles strictly inside the unit circle.
  bool stable() const { return std::abs(a2) < 1.0 && std::abs(a1) < 1.0 + a2; }
};

// Magnitude/phase samples over a frequency grid.
struct ResponseCurve {
  std::vector<double> freqs;
  std::vector<double> mag;
  std::vector<double> phase;
};

// -------------------------------------------------------- transfer functions

// Analog prototype evaluated at s = j*omega. Shared denominator
// s^2 + (K/Q)s + K^2; q must be > 0.
inline std::complex<double> analog_tf(double k, double q, double omega, Output out) {
  const std::complex<double> s(0.0, omega);
  const std::complex<double> den = s * s + (k / q) * s + k * k;
  switch (out) {
    case Output::hp: return s * s / den;
    case Output::bp: return k * s / den;
    case Output::lp: return k * k / den;
    default: throw std::invalid_argument("analog_tf: output must be hp, bp or lp");
  }
}

// Equivalent biquad of the classic topology.
inline BiquadCoeffs chamberlin_biquad(const FilterParams& p, Output out) {
  const double k = p.k;
  const double kq = k / p.q;
  BiquadCoeffs c;
  c.a1 = -(2.0 - kq - k * k);
  c.a2 = 1.0 - kq;
  switch (out) {
    case Output::hp: c.b0 = 1.0; c.b1 = -2.0; c.b2 = 1.0; break;
    case Output::bp: c.b0 = k;   c.b1 = -k;   c.b2 = 0.0; break;
    case Output::lp: c.b0 = k * k; c.b1 = 0.0; c.b2 = 0.0; break;
    default: throw std::invalid_argument("chamberlin_biquad: output must be hp, bp or lp");
  }
  return c;
}

// Equivalent biquad of the improved topology, a0-normalized.
inline BiquadCoeffs improved_biquad(const FilterParams& p, Output out) {
  const double k = p.k;
  const double kq = k / p.q;
  const double a0 = 1.0 + kq + k * k;
  BiquadCoeffs c;
  c.a1 = -2.0 * (1.0 - k * k) / a0;
  c.a2 = (1.0 - kq + k * k) / a0;
  switch (out) {
    case Output::hp:
      c.b0 = 1.0 / a0; c.b1 = -2.0 / a0; c.b2 = 1.0 / a0;
      break;
    case Output::bp:
      c.b0 = k / a0; c.b1 = 0.0; c.b2 = -k / a0;
      break;
    case Output::lp:
      c.b0 = k * k / a0; c.b1 = 2.0 * k * k / a0; c.b2 = k * k / a0;
      break;
    default: throw std::invalid_argument("improved_biquad: output must be hp, bp or lp");
  }
  return c;
}

// Unit-circle evaluation at omega radians/sample. Poles on the circle
// produce non-finite values rather than trapping.
inline std::complex<double> eval_tf(const BiquadCoeffs& c, double omega) {
  const std::complex<double> z1 = std::exp(std::complex<double>(0.0, -omega));
  const std::complex<double> z2 = z1 * z1;
  return (c.b0 + c.b1 * z1 + c.b2 * z2) / (1.0 + c.a1 * z1 + c.a2 * z2);
}

// Power spectrum of the order-n digital Butterworth lowpass with cutoff at
// tan(omega/2) = 1: 1 / (1 + tan^{2n}(omega/2)).
inline double butterworth_power_spectrum(int n, double omega) {
  if (n < 1)
    throw std::domain_error("butterworth_power_spectrum: n must be >= 1");
  if (!(omega >= 0.0 && omega < std::numbers::pi))
    throw std::domain_error("butterworth_power_spectrum: omega must satisfy 0 <= omega < pi");
  const double t = std::tan(0.5 * omega);
  return 1.0 / (1.0 + std::pow(t * t, n));
}

// ------------------------------------------------------------- measurement

// Impulse response of the selected topology from zero state. For the leaky
// topology, params.k carries the integrator gain g.
inline BlockOutputs impulse_response(Topology t, const FilterParams& p, std::size_t n) {
  if (n < 1) throw std::invalid_argument("impulse_response: n must be >= 1");
  std::vector<double> x(n, 0.0);
  x[0] = 1.0;
  if (t == Topology::leaky) {
    LeakyState st;
    return process_block(st, p.k, x);
  }
  SvfState st;
  return process_block(t, st, p, x);
}

namespace detail {

// Iterative radix-2 FFT, decimation in time. Size must be a power of two.
inline void fft_radix2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> w = std::polar(1.0, ang * static_cast<double>(k));
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

}  // namespace detail

// Zero-padded DFT magnitude/phase on bins 0..n_fft/2, freqs = bin*fs/n_fft.
inline ResponseCurve dft_magnitude(std::span<const double> x, double fs, std::size_t n_fft) {
  if (n_fft == 0 || (n_fft & (n_fft - 1)) != 0)
    throw std::invalid_argument("dft_magnitude: n_fft must be a power of two");
  if (n_fft < x.size())
    throw std::invalid_argument("dft_magnitude: n_fft must be >= input length");

  std::vector<std::complex<double>> buf(n_fft);
  std::copy(x.begin(), x.end(), buf.begin());
  detail::fft_radix2(buf);

  const std::size_t bins = n_fft / 2 + 1;
  ResponseCurve c;
  c.freqs.resize(bins);
  c.mag.resize(bins);
  c.phase.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    c.freqs[i] = static_cast<double>(i) * fs / static_cast<double>(n_fft);
    c.mag[i] = std::abs(buf[i]);
    c.phase[i] = std::arg(buf[i]);
  }
  return c;
}

// Frequency of maximum magnitude, refined by parabolic interpolation on the
// log magnitude over the peak bin and its neighbors. A maximum on the grid
// boundary (monotone curves) is returned as-is.
inline double peak_frequency(const ResponseCurve& curve) {
  if (curve.freqs.empty() || curve.mag.size() != curve.freqs.size())
    throw std::invalid_argument("peak_frequency: empty curve");

  const std::size_t k = static_cast<std::size_t>(
      std::max_element(curve.mag.begin(), curve.mag.end()) - curve.mag.begin());
  if (k == 0 || k + 1 == curve.mag.size()) return curve.freqs[k];

  const double m0 = curve.mag[k - 1], m1 = curve.mag[k], m2 = curve.mag[k + 1];
  if (!(m0 > 0.0 && m1 > 0.0 && m2 > 0.0)) return curve.freqs[k];
  const double y0 = std::log(m0), y1 = std::log(m1), y2 = std::log(m2);
  const double den = y0 - 2.0 * y1 + y2;
  if (den == 0.0) return curve.freqs[k];
  double delta = 0.5 * (y0 - y2) / den;
  delta = std::clamp(delta, -0.5, 0.5);
  return delta >= 0.0
             ? curve.freqs[k] + delta * (curve.freqs[k + 1] - curve.freqs[k])
             : curve.freqs[k] + delta * (curve.freqs[k] - curve.freqs[k - 1]);
}

}  // namespace svf
