#pragma once

// Command-line front end. Subcommands:
//   response   closed-form and measured frequency response as CSV
//   process    filter a mono WAV file
//   stability  usable-K table for the classic topology
//   compare    measured peak frequency of both topologies per target f
//
// Exit codes: 0 ok, 2 parameter error, 3 input-format error, 4 instability.
// CSV goes to stdout (or --output); diagnostics go to stderr. Output is
// deterministic: identical flags and input bytes give identical bytes.

#include "svf/analysis.hpp"
#include "svf/wav.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <complex>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace svf::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_param = 2;
inline constexpr int exit_input = 3;
inline constexpr int exit_unstable = 4;

struct RunConfig {
  Topology topology = Topology::improved;
  std::vector<Output> outputs{Output::lp};
  double f_hz = 1000.0;
  double q = 0.7071067811865476;
  double fs_hz = 44100.0;
  std::size_t n_fft = 8192;
  std::size_t grid_points = 1024;
  std::string output_path;  // empty: stdout
};

namespace detail {

inline const char* topology_name(Topology t) {
  switch (t) {
    case Topology::chamberlin: return "chamberlin";
    case Topology::rearranged: return "rearranged";
    case Topology::improved: return "improved";
    case Topology::leaky: return "leaky";
  }
  return "?";
}

inline const char* output_name(Output o) {
  switch (o) {
    case Output::hp: return "hp";
    case Output::bp: return "bp";
    case Output::lp: return "lp";
    case Output::br: return "br";
    case Output::ap: return "ap";
  }
  return "?";
}

inline Topology parse_topology(const std::string& s) {
  if (s == "chamberlin") return Topology::chamberlin;
  if (s == "rearranged") return Topology::rearranged;
  if (s == "improved") return Topology::improved;
  if (s == "leaky") return Topology::leaky;
  throw std::domain_error("unknown topology '" + s +
                          "' (chamberlin, rearranged, improved, leaky)");
}

inline Output parse_output(const std::string& s) {
  if (s == "hp") return Output::hp;
  if (s == "bp") return Output::bp;
  if (s == "lp") return Output::lp;
  if (s == "br") return Output::br;
  if (s == "ap") return Output::ap;
  throw std::domain_error("unknown output '" + s + "' (hp, bp, lp, br, ap)");
}

inline bool output_available(Topology t, Output o) {
  switch (t) {
    case Topology::improved: return true;
    case Topology::leaky: return o == Output::lp;
    default: return o != Output::ap;  // no allpass in the classic forms
  }
}

// K for the topology's own tuning map; the leaky gain g warps the same way
// as the bilinear designs.
inline double tuning_k(Topology t, double f_hz, double fs_hz) {
  switch (t) {
    case Topology::chamberlin:
    case Topology::rearranged: return k_chamberlin(f_hz, fs_hz);
    default: return k_bilinear(f_hz, fs_hz);
  }
}

// Locale-independent number formatting.
inline std::string fmt_general(double v, int precision) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, precision);
  return std::string(buf, res.ptr);
}

inline std::string fmt_fixed(double v, int decimals) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::fixed, decimals);
  return std::string(buf, res.ptr);
}

inline double to_db(double mag) {
  if (!(mag > 0.0)) return -300.0;
  return std::max(-300.0, 20.0 * std::log10(mag));
}

// Closed-form response of any topology/output at omega rad/sample.
inline std::complex<double> closed_response(Topology t, Output o,
                                            const FilterParams& p, double omega) {
  using cd = std::complex<double>;
  switch (t) {
    case Topology::improved: {
      auto h = [&](Output oo) { return eval_tf(improved_biquad(p, oo), omega); };
      switch (o) {
        case Output::br: return h(Output::hp) + h(Output::lp);
        case Output::ap:
          return h(Output::hp) + h(Output::lp) - h(Output::bp) / p.q;
        default: return h(o);
      }
    }
    case Topology::chamberlin:
    case Topology::rearranged: {
      auto h = [&](Output oo) { return eval_tf(chamberlin_biquad(p, oo), omega); };
      switch (o) {
        case Output::br: return h(Output::hp) + h(Output::lp);
        case Output::ap:
          throw std::invalid_argument("allpass not available for this topology");
        case Output::lp:
          // the re-arranged lp stream leads the classic one by one sample
          return t == Topology::rearranged
                     ? std::exp(cd(0.0, omega)) * h(Output::lp)
                     : h(Output::lp);
        default: return h(o);
      }
    }
    case Topology::leaky: {
      const double g = p.k;
      const BiquadCoeffs c{g / (1.0 + g), g / (1.0 + g), 0.0,
                           -(1.0 - g) / (1.0 + g), 0.0};
      return eval_tf(c, omega);
    }
  }
  return {};
}

inline const std::vector<double>& stream_of(const BlockOutputs& b, Output o) {
  switch (o) {
    case Output::hp: return b.hp;
    case Output::bp: return b.bp;
    case Output::lp: return b.lp;
    case Output::br: return b.br;
    case Output::ap: return b.ap;
  }
  return b.lp;
}

inline void validate_response_config(const RunConfig& cfg) {
  if (!(std::isfinite(cfg.f_hz) && cfg.f_hz > 0.0))
    throw std::domain_error("f must be > 0 for a resonant response");
  if (cfg.n_fft == 0 || (cfg.n_fft & (cfg.n_fft - 1)) != 0)
    throw std::domain_error("n-fft must be a power of two");
  if (cfg.grid_points < 2) throw std::domain_error("points must be >= 2");
  if (cfg.outputs.empty()) throw std::domain_error("at least one output is required");
  for (Output o : cfg.outputs)
    if (!output_available(cfg.topology, o))
      throw std::domain_error(std::string("output '") + output_name(o) +
                              "' not available for topology '" +
                              topology_name(cfg.topology) + "'");
}

}  // namespace detail

// CSV rows `output,source,freq_hz,mag_db,phase_rad`. Closed-form rows are
// evaluated on a log grid of grid_points from 10 Hz to 0.49 fs; measured
// rows are DFT bins of the n_fft-sample impulse response within the same
// range. mag_db is floored at -300 dB.
inline int cmd_response(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  FilterParams params;
  try {
    params.k = detail::tuning_k(cfg.topology, cfg.f_hz, cfg.fs_hz);
    params.q = cfg.q;
    params.sample_rate_hz = cfg.fs_hz;
    validate_params(params);
    detail::validate_response_config(cfg);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_param;
  }

  const double f_lo = 10.0;
  const double f_hi = 0.49 * cfg.fs_hz;
  const double ratio = f_hi / f_lo;

  std::string csv = "output,source,freq_hz,mag_db,phase_rad\n";
  auto add_row = [&](Output o, const char* source, double freq, double mag, double phase) {
    csv += detail::output_name(o);
    csv += ',';
    csv += source;
    csv += ',';
    csv += detail::fmt_general(freq, 12);
    csv += ',';
    csv += detail::fmt_fixed(detail::to_db(mag), 6);
    csv += ',';
    csv += detail::fmt_fixed(phase, 6);
    csv += '\n';
  };

  BlockOutputs measured = impulse_response(cfg.topology, params, cfg.n_fft);
  if (measured.first_non_finite || measured.first_large) {
    const std::size_t at = measured.first_non_finite
                               ? std::min(*measured.first_non_finite,
                                          measured.first_large.value_or(SIZE_MAX))
                               : *measured.first_large;
    err << "error: instability detected at sample " << at << "\n";
    return exit_unstable;
  }

  for (Output o : cfg.outputs) {
    for (std::size_t i = 0; i < cfg.grid_points; ++i) {
      const double frac = static_cast<double>(i) / static_cast<double>(cfg.grid_points - 1);
      const double f = f_lo * std::pow(ratio, frac);
      const double omega = 2.0 * std::numbers::pi * f / cfg.fs_hz;
      const std::complex<double> h = detail::closed_response(cfg.topology, o, params, omega);
      add_row(o, "closed", f, std::abs(h), std::arg(h));
    }
    const ResponseCurve c = dft_magnitude(detail::stream_of(measured, o), cfg.fs_hz, cfg.n_fft);
    for (std::size_t i = 0; i < c.freqs.size(); ++i) {
      if (c.freqs[i] < f_lo || c.freqs[i] > f_hi) continue;
      add_row(o, "measured", c.freqs[i], c.mag[i], c.phase[i]);
    }
  }

  if (cfg.output_path.empty()) {
    out << csv;
  } else {
    std::ofstream f(cfg.output_path, std::ios::binary);
    if (!f) {
      err << "error: cannot open " << cfg.output_path << " for writing\n";
      return exit_input;
    }
    f << csv;
  }
  return exit_ok;
}

// Filters in_wav through one selected output and writes a float32 WAV of
// the same length and rate. The input file's rate becomes fs.
inline int cmd_process(const RunConfig& cfg, const std::string& in_wav,
                       const std::string& out_wav, std::ostream& err) {
  WavData wav;
  try {
    wav = read_wav(in_wav);
  } catch (const WavError& e) {
    err << "error: " << e.what() << "\n";
    return exit_input;
  }

  FilterParams params;
  Output sel = Output::lp;
  try {
    if (cfg.outputs.size() != 1)
      throw std::domain_error("process takes exactly one output");
    sel = cfg.outputs.front();
    if (!detail::output_available(cfg.topology, sel))
      throw std::domain_error(std::string("output '") + detail::output_name(sel) +
                              "' not available for topology '" +
                              detail::topology_name(cfg.topology) + "'");
    const double fs = static_cast<double>(wav.sample_rate);
    params.k = detail::tuning_k(cfg.topology, cfg.f_hz, fs);
    params.q = cfg.q;
    params.sample_rate_hz = fs;
    validate_params(params);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_param;
  }

  BlockOutputs res;
  if (cfg.topology == Topology::leaky) {
    LeakyState st;
    res = process_block(st, params.k, wav.samples);
  } else {
    SvfState st;
    res = process_block(cfg.topology, st, params, wav.samples);
  }
  if (res.first_non_finite || res.first_large) {
    const std::size_t at = std::min(res.first_non_finite.value_or(SIZE_MAX),
                                    res.first_large.value_or(SIZE_MAX));
    err << "error: instability detected at sample " << at << "\n";
    return exit_unstable;
  }

  try {
    write_wav_float32(out_wav, detail::stream_of(res, sel), wav.sample_rate);
  } catch (const WavError& e) {
    err << "error: " << e.what() << "\n";
    return exit_input;
  }
  return exit_ok;
}

// CSV rows `q,kmax,fmax_chamberlin_hz`: the usable-K limit and the cutoff
// it maps back to through the sine map (capped at fs/2).
inline int cmd_stability(std::span<const double> q_grid, double fs,
                         std::ostream& out, std::ostream& err) {
  std::string csv = "q,kmax,fmax_chamberlin_hz\n";
  try {
    if (!(std::isfinite(fs) && fs > 0.0))
      throw std::domain_error("fs must be finite and > 0");
    if (q_grid.empty()) throw std::domain_error("at least one q is required");
    for (double q : q_grid) {
      const double kmax = stability_limit_chamberlin(q);
      const double fmax = kmax >= 2.0 ? 0.5 * fs
                                      : fs / std::numbers::pi * std::asin(0.5 * kmax);
      csv += detail::fmt_general(q, 12);
      csv += ',';
      csv += detail::fmt_general(kmax, 12);
      csv += ',';
      csv += detail::fmt_general(fmax, 12);
      csv += '\n';
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_param;
  }
  out << csv;
  return exit_ok;
}

// CSV rows `f_hz,topology,peak_hz,peak_err_pct` for the classic and the
// improved topology at each target frequency, each with its own tuning map.
inline int cmd_compare(const RunConfig& cfg, std::span<const double> f_list,
                       std::ostream& out, std::ostream& err) {
  std::string csv = "f_hz,topology,peak_hz,peak_err_pct\n";
  try {
    if (f_list.empty()) throw std::domain_error("at least one f is required");
    if (cfg.n_fft == 0 || (cfg.n_fft & (cfg.n_fft - 1)) != 0)
      throw std::domain_error("n-fft must be a power of two");
    for (double f : f_list) {
      if (!(std::isfinite(f) && f > 0.0))
        throw std::domain_error("f must be > 0");
      for (Topology t : {Topology::chamberlin, Topology::improved}) {
        FilterParams p{detail::tuning_k(t, f, cfg.fs_hz), cfg.q, cfg.fs_hz};
        validate_params(p);
        const BlockOutputs r = impulse_response(t, p, cfg.n_fft);
        if (r.first_non_finite || r.first_large) {
          err << "error: instability detected for topology "
              << detail::topology_name(t) << " at f=" << f << "\n";
          return exit_unstable;
        }
        const double peak = peak_frequency(dft_magnitude(r.lp, cfg.fs_hz, cfg.n_fft));
        csv += detail::fmt_general(f, 12);
        csv += ',';
        csv += detail::topology_name(t);
        csv += ',';
        csv += detail::fmt_general(peak, 12);
        csv += ',';
        csv += detail::fmt_fixed(std::abs(peak - f) / f * 100.0, 6);
        csv += '\n';
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_param;
  }
  out << csv;
  return exit_ok;
}

// Parses argv-style arguments (without the program name) and dispatches.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"state variable filter toolkit"};
  app.require_subcommand(1);

  std::string topology = "improved";
  std::vector<std::string> outs{"lp"};
  RunConfig cfg;
  std::vector<double> q_list;
  std::vector<double> f_list;
  std::string in_path, out_path;

  CLI::App* response = app.add_subcommand("response", "emit frequency-response CSV");
  response->add_option("--topology", topology, "chamberlin|rearranged|improved|leaky");
  response->add_option("--out", outs, "outputs: hp bp lp br ap")->delimiter(',');
  response->add_option("--f", cfg.f_hz, "cutoff/centre frequency in Hz")->required();
  response->add_option("--q", cfg.q, "quality factor");
  response->add_option("--fs", cfg.fs_hz, "sample rate in Hz");
  response->add_option("--n-fft", cfg.n_fft, "FFT size (power of two)");
  response->add_option("--points", cfg.grid_points, "closed-form grid points");
  response->add_option("-o,--output", cfg.output_path, "CSV file (default stdout)");

  CLI::App* process = app.add_subcommand("process", "filter a mono WAV file");
  process->add_option("input", in_path, "input WAV (mono PCM16 or float32)")->required();
  process->add_option("output", out_path, "output WAV (float32)")->required();
  process->add_option("--topology", topology, "chamberlin|rearranged|improved|leaky");
  process->add_option("--out", outs, "single output: hp bp lp br ap")->delimiter(',');
  process->add_option("--f", cfg.f_hz, "cutoff/centre frequency in Hz")->required();
  process->add_option("--q", cfg.q, "quality factor");

  CLI::App* stability = app.add_subcommand("stability", "usable-K table for the classic topology");
  stability->add_option("--q", q_list, "q values")->required()->delimiter(',');
  stability->add_option("--fs", cfg.fs_hz, "sample rate in Hz");

  CLI::App* compare = app.add_subcommand("compare", "peak tuning error of both topologies");
  compare->add_option("--f", f_list, "target frequencies in Hz")->required()->delimiter(',');
  compare->add_option("--q", cfg.q, "quality factor");
  compare->add_option("--fs", cfg.fs_hz, "sample rate in Hz");
  compare->add_option("--n-fft", cfg.n_fft, "FFT size (power of two)");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? exit_ok : exit_param;
  }

  try {
    cfg.topology = detail::parse_topology(topology);
    cfg.outputs.clear();
    for (const std::string& s : outs) cfg.outputs.push_back(detail::parse_output(s));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_param;
  }

  if (response->parsed()) return cmd_response(cfg, out, err);
  if (process->parsed()) return cmd_process(cfg, in_path, out_path, err);
  if (stability->parsed()) return cmd_stability(q_list, cfg.fs_hz, out, err);
  if (compare->parsed()) return cmd_compare(cfg, f_list, out, err);
  return exit_param;
}

}  // namespace svf::cli
