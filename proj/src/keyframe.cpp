#include "director/keyframe.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cassert>
#include <cmath>

#include "director/common.hpp"

namespace director {

namespace {

constexpr int kHashSize = 32;
constexpr int kBlockSize = 8;

// Coefficients below this are numerical dust (a uniform frame's AC terms),
// snapped to zero so the median comparison is stable.
constexpr double kCoeffEpsilon = 1e-8;

struct DctMatrix {
    std::array<std::array<double, kHashSize>, kHashSize> m{};

    DctMatrix() {
        const double n = kHashSize;
        for (int i = 0; i < kHashSize; ++i) m[0][i] = std::sqrt(1.0 / n);
        const double c = std::sqrt(2.0 / n);
        for (int k = 1; k < kHashSize; ++k) {
            for (int i = 0; i < kHashSize; ++i) {
                m[k][i] = c * std::cos(M_PI * k * (2.0 * i + 1.0) / (2.0 * n));
            }
        }
    }
};

const DctMatrix& dct_matrix() {
    static const DctMatrix matrix;
    return matrix;
}

} // namespace

PerceptualHash phash(const Frame& frame) {
    if (frame.empty()) throw Error("phash: empty frame");

    Frame small = resize_bilinear(frame, kHashSize, kHashSize);
    std::array<std::array<double, kHashSize>, kHashSize> gray{};
    for (int y = 0; y < kHashSize; ++y) {
        for (int x = 0; x < kHashSize; ++x) {
            const std::uint8_t* p = small.at(x, y);
            gray[y][x] = luma601(p[0], p[1], p[2]);
        }
    }

    // C = T * A * T^t, evaluated only for the top-left block.
    const auto& t = dct_matrix().m;
    std::array<std::array<double, kHashSize>, kBlockSize> rows{};
    for (int u = 0; u < kBlockSize; ++u) {
        for (int x = 0; x < kHashSize; ++x) {
            double acc = 0.0;
            for (int y = 0; y < kHashSize; ++y) acc += t[u][y] * gray[y][x];
            rows[u][x] = acc;
        }
    }
    std::array<double, kBlockSize * kBlockSize> coeffs{};
    for (int u = 0; u < kBlockSize; ++u) {
        for (int v = 0; v < kBlockSize; ++v) {
            double acc = 0.0;
            for (int x = 0; x < kHashSize; ++x) acc += rows[u][x] * t[v][x];
            if (std::fabs(acc) < kCoeffEpsilon) acc = 0.0;
            coeffs[u * kBlockSize + v] = acc;
        }
    }

    std::array<double, kBlockSize * kBlockSize - 1> ac{};
    std::copy(coeffs.begin() + 1, coeffs.end(), ac.begin());
    std::nth_element(ac.begin(), ac.begin() + ac.size() / 2, ac.end());
    const double median = ac[ac.size() / 2];

    PerceptualHash hash;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i] > median) hash.bits |= (1ull << i);
    }
    return hash;
}

double similarity(PerceptualHash a, PerceptualHash b) {
    int distance = std::popcount(a.bits ^ b.bits);
    return 1.0 - distance / 64.0;
}

std::vector<VideoSegment> segment_hashes(const std::vector<PerceptualHash>& hashes,
                                         const std::vector<int>& sampled_indices,
                                         int last_frame, double threshold) {
    assert(hashes.size() == sampled_indices.size());
    if (hashes.empty()) throw Error("segment_hashes: empty sequence");

    std::vector<std::size_t> cut_points; // index into hashes where a segment opens
    cut_points.push_back(0);
    PerceptualHash anchor = hashes[0];
    for (std::size_t i = 1; i < hashes.size(); ++i) {
        if (similarity(hashes[i], anchor) < threshold) {
            cut_points.push_back(i);
            anchor = hashes[i];
        }
    }

    std::vector<VideoSegment> segments;
    segments.reserve(cut_points.size());
    for (std::size_t s = 0; s < cut_points.size(); ++s) {
        std::size_t first = cut_points[s];
        std::size_t last =
            (s + 1 < cut_points.size()) ? cut_points[s + 1] - 1 : hashes.size() - 1;
        VideoSegment seg;
        seg.start_frame = sampled_indices[first];
        seg.end_frame = (s + 1 < cut_points.size())
                            ? sampled_indices[cut_points[s + 1]] - 1
                            : last_frame;
        double midpoint = 0.5 * (seg.start_frame + seg.end_frame);
        std::size_t best = first;
        double best_dist = std::fabs(sampled_indices[first] - midpoint);
        for (std::size_t i = first + 1; i <= last; ++i) {
            double d = std::fabs(sampled_indices[i] - midpoint);
            if (d < best_dist - 1e-12) {
                best = i;
                best_dist = d;
            }
        }
        seg.keyframe_index = sampled_indices[best];
        segments.push_back(seg);
    }
    return segments;
}

std::vector<VideoSegment> segment_video(const std::vector<Frame>& frames, double threshold,
                                        int sample_stride) {
    if (frames.empty()) throw Error("segment_video: empty frame sequence");
    if (threshold <= 0.0 || threshold > 1.0)
        throw Error("segment_video: threshold must be in (0, 1]");
    if (sample_stride < 1) throw Error("segment_video: stride must be >= 1");

    std::vector<PerceptualHash> hashes;
    std::vector<int> sampled;
    for (int i = 0; i < static_cast<int>(frames.size()); i += sample_stride) {
        hashes.push_back(phash(frames[i]));
        sampled.push_back(i);
    }
    return segment_hashes(hashes, sampled, static_cast<int>(frames.size()) - 1, threshold);
}

int default_sample_stride(double frame_rate) {
    return std::max(1, static_cast<int>(std::lround(frame_rate / 2.0)));
}

} // namespace director
