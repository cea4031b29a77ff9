#include "director/audio_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "director/common.hpp"

namespace director {

namespace {

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

} // namespace

AudioBuffer read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open audio: " + path.string());
    std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (data.size() < 44 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
        std::memcmp(data.data() + 8, "WAVE", 4) != 0)
        throw Error("not a RIFF/WAVE file: " + path.string());

    AudioBuffer audio;
    int bits_per_sample = 0;
    bool have_fmt = false;

    std::size_t pos = 12;
    while (pos + 8 <= data.size()) {
        const unsigned char* chunk = data.data() + pos;
        std::uint32_t size = read_u32(chunk + 4);
        std::size_t body = pos + 8;
        if (body + size > data.size()) size = static_cast<std::uint32_t>(data.size() - body);

        if (std::memcmp(chunk, "fmt ", 4) == 0 && size >= 16) {
            std::uint16_t format = read_u16(data.data() + body);
            audio.channels = read_u16(data.data() + body + 2);
            audio.sample_rate = static_cast<int>(read_u32(data.data() + body + 4));
            bits_per_sample = read_u16(data.data() + body + 14);
            if (format != 1)
                throw Error("unsupported WAV encoding (PCM only): " + path.string());
            have_fmt = true;
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            if (!have_fmt) throw Error("WAV data before fmt chunk: " + path.string());
            if (bits_per_sample != 16)
                throw Error("unsupported WAV bit depth (16-bit only): " + path.string());
            std::size_t count = size / 2;
            audio.samples.resize(count);
            for (std::size_t i = 0; i < count; ++i) {
                std::uint16_t raw = read_u16(data.data() + body + i * 2);
                audio.samples[i] = static_cast<std::int16_t>(raw);
            }
        }
        pos = body + size + (size & 1); // chunks are word-aligned
    }

    if (!have_fmt || audio.samples.empty())
        throw Error("WAV missing fmt or data chunk: " + path.string());
    if (audio.channels != 1 && audio.channels != 2)
        throw Error("unsupported channel count (mono/stereo only): " + path.string());
    return audio;
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& audio) {
    if (audio.sample_rate <= 0 || (audio.channels != 1 && audio.channels != 2))
        throw Error("invalid audio buffer for " + path.string());

    std::string out;
    std::uint32_t data_bytes = static_cast<std::uint32_t>(audio.samples.size() * 2);
    out.reserve(44 + data_bytes);
    out.append("RIFF");
    put_u32(out, 36 + data_bytes);
    out.append("WAVE");
    out.append("fmt ");
    put_u32(out, 16);
    put_u16(out, 1); // PCM
    put_u16(out, static_cast<std::uint16_t>(audio.channels));
    put_u32(out, static_cast<std::uint32_t>(audio.sample_rate));
    put_u32(out, static_cast<std::uint32_t>(audio.sample_rate * audio.channels * 2));
    put_u16(out, static_cast<std::uint16_t>(audio.channels * 2));
    put_u16(out, 16);
    out.append("data");
    put_u32(out, data_bytes);
    for (std::int16_t s : audio.samples) {
        put_u16(out, static_cast<std::uint16_t>(s));
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write audio: " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw Error("short write: " + path.string());
}

std::vector<float> to_mono(const AudioBuffer& audio) {
    std::vector<float> mono(audio.frame_count());
    const float scale = 1.0f / 32768.0f;
    if (audio.channels == 1) {
        for (std::size_t i = 0; i < mono.size(); ++i) mono[i] = audio.samples[i] * scale;
    } else {
        for (std::size_t i = 0; i < mono.size(); ++i) {
            int sum = audio.samples[i * 2] + audio.samples[i * 2 + 1];
            mono[i] = (sum * 0.5f) * scale;
        }
    }
    return mono;
}

std::vector<float> resample_linear(const std::vector<float>& mono, int from_rate, int to_rate) {
    if (from_rate == to_rate || mono.empty()) return mono;
    double ratio = static_cast<double>(from_rate) / to_rate;
    std::size_t out_len =
        static_cast<std::size_t>(std::floor((mono.size() - 1) / ratio)) + 1;
    std::vector<float> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) {
        double src = i * ratio;
        std::size_t i0 = static_cast<std::size_t>(src);
        double frac = src - i0;
        std::size_t i1 = std::min(i0 + 1, mono.size() - 1);
        out[i] = static_cast<float>(mono[i0] * (1.0 - frac) + mono[i1] * frac);
    }
    return out;
}

} // namespace director
