#include "lugasr/vad.hpp"

#include <cmath>

#include "lugasr/errors.hpp"

namespace lugasr {

std::vector<double> frame_rms_db(const AudioBuffer& audio, int frame_ms) {
  const size_t frame_len =
      static_cast<size_t>(audio.sample_rate) * frame_ms / 1000;
  if (frame_len == 0) throw Error("frame length must be positive");
  const size_t n_frames = audio.samples.size() / frame_len;
  std::vector<double> out(n_frames);
  for (size_t f = 0; f < n_frames; ++f) {
    double acc = 0.0;
    for (size_t i = 0; i < frame_len; ++i) {
      double s = audio.samples[f * frame_len + i];
      acc += s * s;
    }
    double rms = std::sqrt(acc / frame_len);
    out[f] = rms > 0.0 ? 20.0 * std::log10(rms / 32768.0) : -320.0;
  }
  return out;
}

std::vector<Segment> vad_segments(const AudioBuffer& audio, const VadConfig& cfg) {
  if (cfg.frame_ms != 10 && cfg.frame_ms != 20 && cfg.frame_ms != 30)
    throw Error("VAD frame_ms must be 10, 20 or 30");
  if (!std::isfinite(cfg.energy_threshold_db))
    throw Error("VAD threshold must be finite");
  if (audio.samples.empty()) return {};

  const size_t frame_len =
      static_cast<size_t>(audio.sample_rate) * cfg.frame_ms / 1000;
  auto levels = frame_rms_db(audio, cfg.frame_ms);
  const size_t n_frames = levels.size();

  std::vector<char> speech(n_frames, 0);
  for (size_t f = 0; f < n_frames; ++f)
    speech[f] = levels[f] > cfg.energy_threshold_db;

  // hangover: keep up to cfg.hangover_frames frames alive after speech
  int keep = 0;
  for (size_t f = 0; f < n_frames; ++f) {
    if (speech[f]) {
      keep = cfg.hangover_frames;
    } else if (keep > 0) {
      speech[f] = 1;
      --keep;
    }
  }

  const size_t min_samples =
      static_cast<size_t>(audio.sample_rate) * cfg.min_segment_ms / 1000;
  std::vector<Segment> segments;
  size_t f = 0;
  while (f < n_frames) {
    if (!speech[f]) {
      ++f;
      continue;
    }
    size_t g = f;
    while (g < n_frames && speech[g]) ++g;
    Segment seg{f * frame_len, g * frame_len};
    if (seg.length() >= min_samples) segments.push_back(seg);
    f = g;
  }
  return segments;
}

std::vector<AudioBuffer> slice_to_clips(const AudioBuffer& audio,
                                        const std::vector<Segment>& segments,
                                        double max_clip_s) {
  if (max_clip_s <= 0) throw Error("max_clip_s must be positive");
  const size_t max_len =
      static_cast<size_t>(std::llround(max_clip_s * audio.sample_rate));
  std::vector<AudioBuffer> clips;
  for (const auto& seg : segments) {
    if (seg.start >= seg.end || seg.end > audio.samples.size())
      throw Error("segment out of range");
    size_t pos = seg.start;
    while (pos < seg.end) {
      size_t len = std::min(max_len, seg.end - pos);
      AudioBuffer clip;
      clip.sample_rate = audio.sample_rate;
      clip.resampled = audio.resampled;
      clip.samples.assign(audio.samples.begin() + pos,
                          audio.samples.begin() + pos + len);
      clips.push_back(std::move(clip));
      pos += len;
    }
  }
  return clips;
}

}  // namespace lugasr
