#include "lugasr/wav.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace lugasr {

namespace {

uint32_t read_u32(const uint8_t* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (uint32_t(p[3]) << 24);
}
uint16_t read_u16(const uint8_t* p) { return p[0] | (p[1] << 8); }

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(v & 0xFF);
  out.push_back((v >> 8) & 0xFF);
  out.push_back((v >> 16) & 0xFF);
  out.push_back((v >> 24) & 0xFF);
}
void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(v & 0xFF);
  out.push_back((v >> 8) & 0xFF);
}

const char* format_name(int code) {
  switch (code) {
    case 3: return "IEEE float";
    case 6: return "A-law";
    case 7: return "mu-law";
    case 0xFFFE: return "WAVE_FORMAT_EXTENSIBLE";
    default: return "non-PCM";
  }
}

}  // namespace

std::vector<int16_t> resample_linear(const std::vector<int16_t>& in,
                                     int src_rate, int dst_rate) {
  if (in.empty()) return {};
  if (src_rate == dst_rate) return in;
  const size_t n_out =
      static_cast<size_t>((in.size() - 1) * static_cast<uint64_t>(dst_rate) /
                          src_rate) + 1;
  std::vector<int16_t> out(n_out);
  const double step = static_cast<double>(src_rate) / dst_rate;
  for (size_t k = 0; k < n_out; ++k) {
    double pos = k * step;
    size_t i = static_cast<size_t>(pos);
    if (i >= in.size() - 1) {
      out[k] = in.back();
      continue;
    }
    double frac = pos - i;
    double v = (1.0 - frac) * in[i] + frac * in[i + 1];
    out[k] = static_cast<int16_t>(std::lrint(v));
  }
  return out;
}

AudioBuffer parse_wav(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw NotRiff("not a RIFF/WAVE file");

  bool have_fmt = false;
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const uint8_t* data = nullptr;
  uint32_t data_size = 0;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint8_t* chunk = bytes.data() + pos;
    uint32_t size = read_u32(chunk + 4);
    const uint8_t* body = chunk + 8;
    if (pos + 8 + size > bytes.size())
      throw NotRiff("truncated chunk in WAV file");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw NotRiff("fmt chunk too small");
      format = read_u16(body);
      channels = read_u16(body + 2);
      rate = read_u32(body + 4);
      bits = read_u16(body + 14);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = body;
      data_size = size;
    }
    pos += 8 + size + (size & 1);  // chunks are word-aligned
  }
  if (!have_fmt || data == nullptr) throw NotRiff("missing fmt or data chunk");
  if (format != 1) throw UnsupportedEncoding(format, format_name(format));
  if (bits != 16)
    throw UnsupportedEncoding(format, std::to_string(bits) + "-bit PCM");
  if (channels == 0 || rate == 0) throw NotRiff("invalid fmt chunk");

  const size_t frame_bytes = 2u * channels;
  const size_t n_frames = data_size / frame_bytes;
  std::vector<int16_t> mono(n_frames);
  for (size_t f = 0; f < n_frames; ++f) {
    int32_t acc = 0;
    for (size_t c = 0; c < channels; ++c) {
      const uint8_t* s = data + f * frame_bytes + 2 * c;
      acc += static_cast<int16_t>(read_u16(s));
    }
    mono[f] = static_cast<int16_t>(acc / channels);
  }

  AudioBuffer out;
  if (rate == kPipelineSampleRate) {
    out.samples = std::move(mono);
  } else {
    out.samples = resample_linear(mono, static_cast<int>(rate), kPipelineSampleRate);
    out.resampled = true;
  }
  out.sample_rate = kPipelineSampleRate;
  return out;
}

AudioBuffer read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open wav file: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return parse_wav(bytes);
}

std::vector<uint8_t> format_wav(const AudioBuffer& audio) {
  std::vector<uint8_t> out;
  const uint32_t data_size = static_cast<uint32_t>(audio.samples.size() * 2);
  out.reserve(44 + data_size);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_size);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<uint32_t>(audio.sample_rate));
  put_u32(out, static_cast<uint32_t>(audio.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_size);
  for (int16_t s : audio.samples) put_u16(out, static_cast<uint16_t>(s));
  return out;
}

void write_wav(const AudioBuffer& audio, const std::string& path) {
  auto bytes = format_wav(audio);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write wav file: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace lugasr
