#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lugasr/errors.hpp"

namespace lugasr {

class NotRiff : public Error {
 public:
  explicit NotRiff(const std::string& what) : Error(what) {}
};

class UnsupportedEncoding : public Error {
 public:
  UnsupportedEncoding(int format_code, const std::string& name)
      : Error("unsupported WAV encoding: " + name + " (format " +
              std::to_string(format_code) + "); only 16-bit PCM is supported"),
        format_code(format_code) {}
  int format_code;
};

inline constexpr int kPipelineSampleRate = 16000;

// Mono 16-bit PCM audio. Everything downstream of read_wav runs at 16 kHz;
// `resampled` marks buffers that were not 16 kHz on disk.
struct AudioBuffer {
  std::vector<int16_t> samples;
  int sample_rate = kPipelineSampleRate;
  bool resampled = false;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Reads a RIFF/WAVE file with 16-bit PCM samples. Multi-channel audio is
// downmixed by averaging channels (integer mean, truncated toward zero).
// Rates other than 16 kHz are linearly resampled: output length is
// floor((N-1) * 16000 / rate) + 1, i.e. interpolation only, no
// extrapolation past the last input sample.
AudioBuffer read_wav(const std::string& path);
AudioBuffer parse_wav(const std::vector<uint8_t>& bytes);

void write_wav(const AudioBuffer& audio, const std::string& path);
std::vector<uint8_t> format_wav(const AudioBuffer& audio);

// Exposed for tests: the exact resampling convention used by read_wav.
std::vector<int16_t> resample_linear(const std::vector<int16_t>& in,
                                     int src_rate, int dst_rate);

}  // namespace lugasr
