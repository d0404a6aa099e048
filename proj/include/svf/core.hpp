#pragma once

// Discrete-time state variable filter kernels. Three topologies are
// provided: the classic two-integrator design with allpole integrators,
// a re-arranged form of it that restores the straight signal path, and a
// corrected design whose integrators carry a feedforward zero so the
// response stays anchored at Nyquist. A single-pole leaky-integrator
// lowpass built the same way is included as well.
//
// All samples and state are double precision. Ticks mutate the passed
// state in place; a state value must be owned by one execution context at
// a time. The pure helpers (tuning maps, stability limit) are reentrant.

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace svf {

// Frequency coefficient K and quality factor Q. The sample rate is carried
// for the tuning maps; the ticks never look at it.
struct FilterParams {
  double k = 0.0;
  double q = 0.7071067811865476;
  double sample_rate_hz = 44100.0;
};

inline void validate_params(const FilterParams& p) {
  if (!(std::isfinite(p.k) && p.k > 0.0))
    throw std::domain_error("params: k must be finite and > 0");
  if (!(std::isfinite(p.q) && p.q > 0.0))
    throw std::domain_error("params: q must be finite and > 0");
}

// Integrator delays. s1 follows the bandpass path, s2 the lowpass path.
struct SvfState {
  double s1 = 0.0;
  double s2 = 0.0;
  void reset() { s1 = s2 = 0.0; }
};

// Single integration state of the leaky lowpass.
struct LeakyState {
  double s = 0.0;
  void reset() { s = 0.0; }
};

// Simultaneous per-sample outputs. ap is only produced by the improved
// topology; the classic design has no phase-aligned pair to build it from.
struct SvfFrame {
  double hp = 0.0;
  double bp = 0.0;
  double lp = 0.0;
  double br = 0.0;
  std::optional<double> ap;
};

enum class Topology { chamberlin, rearranged, improved, leaky };

// ---------------------------------------------------------------- tuning

// Sine map for the classic topology: K = 2 sin(pi f / fs).
inline double k_chamberlin(double f_hz, double fs_hz) {
  if (!(std::isfinite(fs_hz) && fs_hz > 0.0))
    throw std::domain_error("k_chamberlin: fs must be finite and > 0");
  if (!(std::isfinite(f_hz) && f_hz >= 0.0 && f_hz < 0.5 * fs_hz))
    throw std::domain_error("k_chamberlin: f must satisfy 0 <= f < fs/2");
  return 2.0 * std::sin(std::numbers::pi * f_hz / fs_hz);
}

// Tangent map for the improved topology: K = tan(pi f / fs). Rejects
// f > 0.49 fs outright; tan is singular at fs/2.
inline double k_bilinear(double f_hz, double fs_hz) {
  if (!(std::isfinite(fs_hz) && fs_hz > 0.0))
    throw std::domain_error("k_bilinear: fs must be finite and > 0");
  if (!(std::isfinite(f_hz) && f_hz >= 0.0 && f_hz <= 0.49 * fs_hz))
    throw std::domain_error("k_bilinear: f must satisfy 0 <= f <= 0.49*fs");
  return std::tan(std::numbers::pi * f_hz / fs_hz);
}

// Largest usable K for the classic topology at a given Q, per Dattorro's
// envelope. Terms that go negative (heavy damping, Q below 1/sqrt 2) mean
// there is no usable resonant range, reported as 0.
inline double stability_limit_chamberlin(double q) {
  if (!(std::isfinite(q) && q > 0.0))
    throw std::domain_error("stability_limit_chamberlin: q must be finite and > 0");
  const double iq = 1.0 / q;
  const double m = std::min(std::min(q, 2.0 - iq),
                            std::min(2.0 * q - iq,
                                     0.5 * (-iq + std::sqrt(8.0 + iq * iq))));
  return std::max(0.0, m);
}

// ----------------------------------------------------------------- ticks

// Classic tick: lowpass first from the previous states, then highpass and
// bandpass. The damping term is folded into the highpass sum before the
// lowpass so the re-arranged form computes bit-identical hp/bp streams.
inline SvfFrame chamberlin_tick(SvfState& st, const FilterParams& p, double x) {
  const double inv_q = 1.0 / p.q;
  const double lp = p.k * st.s1 + st.s2;
  const double hp = x - inv_q * st.s1 - lp;
  const double bp = p.k * hp + st.s1;
  st.s1 = bp;
  st.s2 = lp;
  return {hp, bp, lp, hp + lp, std::nullopt};
}

// Re-arranged tick: the band-reject tap comes first, then the integrators
// run in the original signal order. hp/bp match the classic tick exactly;
// lp leads it by one sample.
inline SvfFrame rearranged_tick(SvfState& st, const FilterParams& p, double x) {
  const double inv_q = 1.0 / p.q;
  const double br = x - inv_q * st.s1;
  const double hp = br - st.s2;
  const double bp = p.k * hp + st.s1;
  const double lp = p.k * bp + st.s2;
  st.s1 = bp;
  st.s2 = lp;
  return {hp, bp, lp, br, std::nullopt};
}

// Improved tick: one-pole one-zero integrators, scaled highpass sum, and
// the state recirculation doubled through the feedforward path. Use
// k_bilinear for tuning. The allpass combines br with the 1/Q-normalized
// bandpass.
inline SvfFrame improved_tick(SvfState& st, const FilterParams& p, double x) {
  const double inv_q = 1.0 / p.q;
  const double div = 1.0 + p.k * inv_q + p.k * p.k;
  const double hp = (x - (inv_q + p.k) * st.s1 - st.s2) / div;
  const double u1 = p.k * hp;
  const double bp = u1 + st.s1;
  st.s1 = bp + u1;
  const double u2 = p.k * bp;
  const double lp = u2 + st.s2;
  st.s2 = lp + u2;
  const double br = hp + lp;
  return {hp, bp, lp, br, br - bp * inv_q};
}

// First-order lowpass with the delay-free loop resolved algebraically:
// u is the pre-integration tap, y the output, and the state recirculates
// u once more.
inline double leaky_lowpass_tick(LeakyState& st, double g, double x) {
  if (!(std::isfinite(g) && g > 0.0))
    throw std::domain_error("leaky_lowpass_tick: g must be finite and > 0");
  const double u = g * (x - st.s) / (1.0 + g);
  const double y = u + st.s;
  st.s = y + u;
  return y;
}

// ---------------------------------------------------------------- blocks

// |y| beyond this raises the advisory flag in BlockOutputs.
inline constexpr double large_output_threshold = 1e6;

// Per-output streams of a block run. Streams not produced by the topology
// stay empty (ap for the classic forms, everything but lp for the leaky
// filter). first_non_finite is the instability report; first_large flags
// the first sample whose magnitude exceeded large_output_threshold.
struct BlockOutputs {
  std::vector<double> hp, bp, lp, br, ap;
  std::optional<std::size_t> first_non_finite;
  std::optional<std::size_t> first_large;
};

namespace detail {
inline void scan_outputs(BlockOutputs& out, std::size_t i,
                         std::initializer_list<double> ys) {
  for (double y : ys) {
    if (!out.first_non_finite && !std::isfinite(y)) out.first_non_finite = i;
    if (!out.first_large && std::abs(y) > large_output_threshold) out.first_large = i;
  }
}
}  // namespace detail

// Runs the selected SVF tick over a buffer. State carries across calls, so
// splitting a buffer into consecutive calls is bit-identical to one call.
inline BlockOutputs process_block(Topology topology, SvfState& state,
                                  const FilterParams& params,
                                  std::span<const double> input) {
  if (topology == Topology::leaky)
    throw std::invalid_argument("process_block: leaky topology takes a LeakyState");
  validate_params(params);

  BlockOutputs out;
  out.hp.reserve(input.size());
  out.bp.reserve(input.size());
  out.lp.reserve(input.size());
  out.br.reserve(input.size());
  if (topology == Topology::improved) out.ap.reserve(input.size());

  for (std::size_t i = 0; i < input.size(); ++i) {
    SvfFrame f;
    switch (topology) {
      case Topology::chamberlin: f = chamberlin_tick(state, params, input[i]); break;
      case Topology::rearranged: f = rearranged_tick(state, params, input[i]); break;
      case Topology::improved:   f = improved_tick(state, params, input[i]); break;
      case Topology::leaky:      break;
    }
    out.hp.push_back(f.hp);
    out.bp.push_back(f.bp);
    out.lp.push_back(f.lp);
    out.br.push_back(f.br);
    if (f.ap) {
      out.ap.push_back(*f.ap);
      detail::scan_outputs(out, i, {f.hp, f.bp, f.lp, f.br, *f.ap});
    } else {
      detail::scan_outputs(out, i, {f.hp, f.bp, f.lp, f.br});
    }
  }
  return out;
}

// Leaky-integrator block; only the lp stream is produced.
inline BlockOutputs process_block(LeakyState& state, double g,
                                  std::span<const double> input) {
  BlockOutputs out;
  out.lp.reserve(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    const double y = leaky_lowpass_tick(state, g, input[i]);
    out.lp.push_back(y);
    detail::scan_outputs(out, i, {y});
  }
  return out;
}

}  // namespace svf
