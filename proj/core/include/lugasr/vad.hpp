#pragma once

#include <cstdint>
#include <vector>

#include "lugasr/wav.hpp"

namespace lugasr {

// Half-open sample range [start, end) within one AudioBuffer.
struct Segment {
  size_t start = 0;
  size_t end = 0;

  size_t length() const { return end - start; }
  bool operator==(const Segment&) const = default;
};

// Energy-gated voice activity detection. A frame is speech when its RMS
// level in dBFS (full scale = 32768) exceeds the threshold; speech runs are
// extended by `hangover_frames` trailing frames, merged, and dropped when
// shorter than `min_segment_ms`. Frame boundaries quantize segment edges.
struct VadConfig {
  int frame_ms = 30;              // one of 10, 20, 30
  double energy_threshold_db = -35.0;
  int hangover_frames = 8;
  int min_segment_ms = 300;
};

std::vector<Segment> vad_segments(const AudioBuffer& audio, const VadConfig& cfg);

// Per-frame RMS level in dBFS; silence clamps to -320 dB. Exposed so tests
// can pin the frame classification analytically.
std::vector<double> frame_rms_db(const AudioBuffer& audio, int frame_ms);

// Cuts each segment into clips of at most max_clip_s seconds; concatenating
// a segment's clips reproduces its samples exactly.
std::vector<AudioBuffer> slice_to_clips(const AudioBuffer& audio,
                                        const std::vector<Segment>& segments,
                                        double max_clip_s);

}  // namespace lugasr
