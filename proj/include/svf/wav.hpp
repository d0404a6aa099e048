#pragma once

// Minimal RIFF/WAVE reader and writer. Reads mono 16-bit PCM or 32-bit
// IEEE float; writes mono 32-bit float. Little-endian byte layout is
// assembled explicitly, unknown chunks are skipped (with the odd-size pad
// byte), and stereo or other sample formats are rejected.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace svf {

class WavError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WavData {
  std::uint32_t sample_rate = 0;
  std::vector<double> samples;  // 16-bit input scaled by 1/32768
};

namespace detail {

inline std::uint16_t read_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void append_u16le(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

inline void append_u32le(std::string& s, std::uint32_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 24) & 0xff));
}

}  // namespace detail

inline WavData read_wav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw WavError("wav: cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw WavError("wav: not a RIFF/WAVE file: " + path);

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t data_off = 0, data_len = 0;
  bool have_data = false;

  std::size_t off = 12;
  while (off + 8 <= bytes.size()) {
    const unsigned char* hdr = bytes.data() + off;
    const std::uint32_t sz = detail::read_u32le(hdr + 4);
    const std::size_t body = off + 8;
    if (body + sz > bytes.size()) throw WavError("wav: truncated chunk in " + path);

    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (sz < 16) throw WavError("wav: fmt chunk too short in " + path);
      format = detail::read_u16le(bytes.data() + body);
      channels = detail::read_u16le(bytes.data() + body + 2);
      rate = detail::read_u32le(bytes.data() + body + 4);
      bits = detail::read_u16le(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data_off = body;
      data_len = sz;
      have_data = true;
    }
    off = body + sz + (sz & 1);  // chunks are word-aligned
  }

  if (!have_fmt) throw WavError("wav: missing fmt chunk in " + path);
  if (!have_data) throw WavError("wav: missing data chunk in " + path);
  if (channels != 1)
    throw WavError("wav: only mono input is supported (" + std::to_string(channels) +
                   " channels in " + path + ")");
  if (rate == 0) throw WavError("wav: zero sample rate in " + path);

  WavData out;
  out.sample_rate = rate;
  const unsigned char* d = bytes.data() + data_off;

  if (format == 1 && bits == 16) {
    if (data_len % 2 != 0) throw WavError("wav: odd 16-bit data size in " + path);
    out.samples.resize(data_len / 2);
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
      const auto u = detail::read_u16le(d + 2 * i);
      out.samples[i] = static_cast<std::int16_t>(u) / 32768.0;
    }
  } else if (format == 3 && bits == 32) {
    if (data_len % 4 != 0) throw WavError("wav: bad float32 data size in " + path);
    out.samples.resize(data_len / 4);
    for (std::size_t i = 0; i < out.samples.size(); ++i)
      out.samples[i] = std::bit_cast<float>(detail::read_u32le(d + 4 * i));
  } else {
    throw WavError("wav: unsupported sample format (need 16-bit PCM or 32-bit float) in " + path);
  }
  return out;
}

inline void write_wav_float32(const std::string& path, std::span<const double> samples,
                              std::uint32_t sample_rate) {
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 4);

  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  detail::append_u32le(out, 36 + data_bytes);
  out += "WAVE";
  out += "fmt ";
  detail::append_u32le(out, 16);
  detail::append_u16le(out, 3);  // IEEE float
  detail::append_u16le(out, 1);  // mono
  detail::append_u32le(out, sample_rate);
  detail::append_u32le(out, sample_rate * 4);
  detail::append_u16le(out, 4);
  detail::append_u16le(out, 32);
  out += "data";
  detail::append_u32le(out, data_bytes);
  for (double s : samples)
    detail::append_u32le(out, std::bit_cast<std::uint32_t>(static_cast<float>(s)));

  std::ofstream f(path, std::ios::binary);
  if (!f) throw WavError("wav: cannot open " + path + " for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw WavError("wav: write failed for " + path);
}

}  // namespace svf
