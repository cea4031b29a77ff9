#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace director {

// Interleaved PCM16 audio.
struct AudioBuffer {
    int sample_rate = 0;
    int channels = 0;
    std::vector<std::int16_t> samples;

    std::size_t frame_count() const {
        return channels > 0 ? samples.size() / channels : 0;
    }
    double duration() const {
        return sample_rate > 0 ? static_cast<double>(frame_count()) / sample_rate : 0.0;
    }
};

AudioBuffer read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const AudioBuffer& audio);

// Channel-averaged mono in [-1, 1].
std::vector<float> to_mono(const AudioBuffer& audio);

std::vector<float> resample_linear(const std::vector<float>& mono, int from_rate, int to_rate);

} // namespace director
