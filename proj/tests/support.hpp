#pragma once

// Shared fixture builders for the test suites: synthetic frames, directory
// assets, click tracks, and scratch directories.

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "director/assets.hpp"
#include "director/audio_io.hpp"
#include "director/frame.hpp"
#include "director/image_io.hpp"
#include "director/rng.hpp"

namespace testsupport {

namespace fs = std::filesystem;

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("director_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

// Low-frequency sinusoid mix for one scene index. Each scene draws its own
// component set, giving the hash strong, well-separated coefficients: frames
// of a scene stay close in hash space, different scenes land far apart.
inline double scene_pattern(int scene, double gx, double gy) {
    director::Rng pattern_rng(9000 + scene);
    double v = 0.0;
    for (int k = 0; k < 6; ++k) {
        double fx = static_cast<double>(pattern_rng.next_below(4));
        double fy = static_cast<double>(pattern_rng.next_below(4));
        if (fx == 0.0 && fy == 0.0) fx = 1.0;
        double amp = 0.4 + 0.6 * pattern_rng.next_double();
        double phase = 2.0 * M_PI * pattern_rng.next_double();
        v += amp * std::cos(2.0 * M_PI * (fx * gx + fy * gy) + phase);
    }
    return 0.5 + v / 8.0; // roughly [0, 1]
}

inline director::Frame scene_frame(int scene, int width, int height, director::Rng& rng) {
    director::Frame f(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double gx = static_cast<double>(x) / std::max(1, width - 1);
            double gy = static_cast<double>(y) / std::max(1, height - 1);
            double v = std::clamp(scene_pattern(scene, gx, gy), 0.0, 1.0);
            int base = static_cast<int>(30 + 195 * v);
            int noise = static_cast<int>(rng.next_below(9)) - 4;
            int lum = std::clamp(base + noise, 0, 255);
            std::uint8_t* p = f.at(x, y);
            p[scene % 3] = static_cast<std::uint8_t>(lum);
            p[(scene + 1) % 3] = static_cast<std::uint8_t>(lum / 3);
            p[(scene + 2) % 3] = static_cast<std::uint8_t>(lum / 3);
        }
    }
    return f;
}

// Synthetic photograph with rich low-frequency texture on a gradient.
inline director::Frame photo_frame(int width, int height) {
    director::Frame f(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double gx = static_cast<double>(x) / width;
            double gy = static_cast<double>(y) / height;
            double texture = scene_pattern(71, gx, gy) + 0.35 * scene_pattern(72, gy, gx);
            double r = 70 + 90 * gx + 70 * texture;
            double g = 50 + 110 * gy + 55 * texture;
            double b = 160 - 90 * gx * gy + 40 * texture;
            std::uint8_t* p = f.at(x, y);
            p[0] = static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
            p[1] = static_cast<std::uint8_t>(std::clamp(g, 0.0, 255.0));
            p[2] = static_cast<std::uint8_t>(std::clamp(b, 0.0, 255.0));
        }
    }
    return f;
}

// Scene indices 100..102 were checked for hash separation: frames within a
// scene stay >= 0.87 similar to the scene anchor while frames of the next
// scene fall <= 0.50 against it, well clear of the 0.6 cut threshold.
inline std::vector<director::Frame> three_scene_frames(int per_scene = 20, int width = 96,
                                                       int height = 72,
                                                       std::uint64_t seed = 11) {
    director::Rng rng(seed);
    std::vector<director::Frame> frames;
    for (int scene = 0; scene < 3; ++scene)
        for (int i = 0; i < per_scene; ++i)
            frames.push_back(scene_frame(100 + scene, width, height, rng));
    return frames;
}

// Writes a directory asset (frame_%06d.ppm + meta) and returns its path.
inline fs::path write_directory_asset(const fs::path& dir,
                                      const std::vector<director::Frame>& frames,
                                      double fps, int declared_frames = -1) {
    fs::create_directories(dir);
    for (std::size_t i = 0; i < frames.size(); ++i)
        director::write_ppm(director::frame_file_path(dir, static_cast<int>(i)), frames[i]);
    std::ofstream meta(dir / "meta", std::ios::trunc);
    meta << "fps=" << fps << "\n";
    meta << "frames=" << (declared_frames >= 0 ? declared_frames
                                               : static_cast<int>(frames.size()))
         << "\n";
    return dir;
}

// Click track: 2 ms 1 kHz bursts every `interval` seconds, first click at
// `interval`, silence elsewhere.
inline director::AudioBuffer click_track(double duration, double interval,
                                         int sample_rate = 22050) {
    director::AudioBuffer audio;
    audio.sample_rate = sample_rate;
    audio.channels = 1;
    audio.samples.assign(static_cast<std::size_t>(duration * sample_rate), 0);
    for (double t = interval; t < duration - 0.01; t += interval) {
        auto start = static_cast<std::size_t>(t * sample_rate);
        int burst = sample_rate / 500; // 2 ms
        for (int i = 0; i < burst && start + i < audio.samples.size(); ++i) {
            double envelope = 1.0 - static_cast<double>(i) / burst;
            double v = 0.8 * envelope * std::sin(2.0 * M_PI * 1000.0 * i / sample_rate);
            audio.samples[start + i] = static_cast<std::int16_t>(v * 32767.0);
        }
    }
    return audio;
}

inline std::vector<double> click_times(double duration, double interval) {
    std::vector<double> times;
    for (double t = interval; t < duration - 0.01; t += interval) times.push_back(t);
    return times;
}

// Full compose fixture: three distinct images, one two-scene video (2 s at
// 10 fps), and a click-track library whose single title matches the mock
// chat's recommendation.
inline fs::path write_project_fixture(const fs::path& root, int width, int height,
                                      double fps, std::uint64_t seed) {
    director::Rng rng(123);
    fs::create_directories(root);
    for (int i = 0; i < 3; ++i)
        director::write_ppm(root / ("photo" + std::to_string(i) + ".ppm"),
                            scene_frame(100 + i, 320, 240, rng));

    std::vector<director::Frame> clip;
    for (int i = 0; i < 10; ++i) clip.push_back(scene_frame(100, 160, 120, rng));
    for (int i = 0; i < 10; ++i) clip.push_back(scene_frame(101, 160, 120, rng));
    write_directory_asset(root / "clip", clip, 10.0);

    fs::create_directories(root / "music");
    director::write_wav(root / "music" / "River Flows in You.wav",
                        click_track(20.0, 0.5, 22050));

    fs::path manifest = root / "project.manifest";
    std::ofstream out(manifest);
    out << "[requirements]\n";
    out << "theme = a short journey\n";
    out << "width = " << width << "\nheight = " << height << "\n";
    out << "fps = " << fps << "\nseed = " << seed << "\n";
    out << "[assets]\n";
    out << "photo0.ppm\nphoto1.ppm\nphoto2.ppm\nclip\n";
    out << "[music]\nlibrary_path = music\n";
    return manifest;
}

inline std::string random_word(director::Rng& rng) {
    static const char* kWords[] = {
        "lake",   "forest", "mountain", "stream",  "meadow", "harbor", "sunset",
        "wave",   "stone",  "cloud",    "valley",  "garden", "bridge", "window",
        "shadow", "light",  "journey",  "morning", "winter", "summer", "river",
        "path",   "field",  "island",   "storm",   "quiet",  "golden", "distant"};
    return kWords[rng.next_below(std::size(kWords))];
}

inline std::string random_sentence(director::Rng& rng, int words) {
    std::string out;
    for (int i = 0; i < words; ++i) {
        if (i) out += " ";
        out += random_word(rng);
    }
    return out;
}

} // namespace testsupport
