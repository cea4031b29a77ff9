#pragma once

#include <cstdint>
#include <vector>

#include "director/frame.hpp"

namespace director {

struct PerceptualHash {
    std::uint64_t bits = 0;

    bool operator==(const PerceptualHash&) const = default;
};

// 64-bit DCT hash: 601 luma, bilinear 32x32, 2-D DCT-II, top-left 8x8 block,
// bit set where the coefficient exceeds the median of the block's AC terms.
PerceptualHash phash(const Frame& frame);

// 1 - hamming/64, in [0, 1].
double similarity(PerceptualHash a, PerceptualHash b);

struct VideoSegment {
    int start_frame = 0;
    int end_frame = 0; // inclusive
    int keyframe_index = 0;
};

// Splits a frame sequence into shots: a new segment opens when the sampled
// frame falls below `threshold` similarity against the open segment's first
// sampled frame. The keyframe is the sampled frame nearest the segment's
// temporal midpoint.
std::vector<VideoSegment> segment_video(const std::vector<Frame>& frames,
                                        double threshold = 0.6,
                                        int sample_stride = 1);

// Hash-level segmentation used by segment_video; exposed for property tests
// over synthetic hash sequences. sampled_indices[i] is the frame index of
// hashes[i]; last_frame is the final frame index of the video.
std::vector<VideoSegment> segment_hashes(const std::vector<PerceptualHash>& hashes,
                                         const std::vector<int>& sampled_indices,
                                         int last_frame, double threshold);

// About two hash evaluations per second of video.
int default_sample_stride(double frame_rate);

} // namespace director
