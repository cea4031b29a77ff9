#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "director/audio_io.hpp"
#include "director/common.hpp"

namespace director {

struct MusicTrack {
    std::string title;
    std::filesystem::path path;
    double duration = 0.0;
    int sample_rate = 0;
    int channels = 0;
};

struct MusicIndex {
    std::vector<MusicTrack> tracks; // sorted by normalized title
    Warnings warnings;

    bool empty() const { return tracks.empty(); }
};

// Scans a directory of WAV files. Display titles come from an optional
// titles.tsv sidecar (filename<TAB>title), else the filename stem.
MusicIndex index_library(const std::filesystem::path& dir);

enum class MatchTier { Exact = 1, Containment = 2, EditDistance = 3 };

struct MusicMatch {
    MusicTrack track;
    MatchTier tier = MatchTier::Exact;
    double distance = 0.0; // normalized edit distance of the winning pair
};

// Best match for a recommended name: exact normalized equality, then
// substring containment either direction, then minimum normalized edit
// distance (ties go to the lexicographically smaller title). Throws
// "no plausible match" when the best distance exceeds 0.7.
MusicMatch retrieve_music(const std::string& name, const MusicIndex& index);

struct BeatGrid {
    std::vector<double> beats; // strictly increasing, seconds
    double tempo = 0.0;        // beats per minute
    bool silent = false;       // true when the tracker saw no onsets
};

// Dynamic-programming beat tracker over a spectral-flux onset envelope
// (mono 22050 Hz, STFT 2048/512, log magnitude, autocorrelation tempo with a
// log-Gaussian prior at 120 BPM). Requires at least 5 seconds of audio.
BeatGrid detect_beats(const std::vector<float>& samples, int sample_rate);
BeatGrid detect_beats(const AudioBuffer& audio);

// Evenly spaced fallback grid for silent tracks.
BeatGrid fallback_beat_grid(double duration, double spacing = 4.0);

} // namespace director
