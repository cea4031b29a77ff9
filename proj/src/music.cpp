#include "director/music.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <map>

#include "director/fft.hpp"
#include "director/strings.hpp"

namespace director {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Library indexing and retrieval

MusicIndex index_library(const fs::path& dir) {
    if (!fs::is_directory(dir))
        throw Error("music library is not a directory: " + dir.string());

    // Optional display-title sidecar.
    std::map<std::string, std::string> titles;
    {
        std::ifstream tsv(dir / "titles.tsv");
        std::string line;
        while (tsv && std::getline(tsv, line)) {
            auto tab = line.find('\t');
            if (tab == std::string::npos) continue;
            titles[trim(line.substr(0, tab))] = trim(line.substr(tab + 1));
        }
    }

    MusicIndex index;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    for (const fs::path& file : files) {
        std::string ext = to_lower(file.extension().string());
        if (ext != ".wav") continue;
        MusicTrack track;
        try {
            AudioBuffer probe = read_wav(file);
            track.duration = probe.duration();
            track.sample_rate = probe.sample_rate;
            track.channels = probe.channels;
        } catch (const Error& e) {
            index.warnings.push_back(std::string("skipped undecodable track: ") + e.what());
            continue;
        }
        auto it = titles.find(file.filename().string());
        track.title = it != titles.end() ? it->second : file.stem().string();
        track.path = file;
        index.tracks.push_back(std::move(track));
    }

    std::sort(index.tracks.begin(), index.tracks.end(),
              [](const MusicTrack& a, const MusicTrack& b) {
                  return normalize_title(a.title) < normalize_title(b.title);
              });
    return index;
}

MusicMatch retrieve_music(const std::string& name, const MusicIndex& index) {
    if (index.empty()) throw Error("no music available");
    std::string query = normalize_title(name);
    if (query.empty()) throw Error("empty music name");

    const MusicTrack* best = nullptr;
    MatchTier best_tier = MatchTier::EditDistance;
    double best_distance = 2.0;
    std::string best_norm;

    for (const MusicTrack& track : index.tracks) {
        std::string norm = normalize_title(track.title);
        MatchTier tier;
        if (norm == query) {
            tier = MatchTier::Exact;
        } else if (!norm.empty() && (norm.find(query) != std::string::npos ||
                                     query.find(norm) != std::string::npos)) {
            tier = MatchTier::Containment;
        } else {
            tier = MatchTier::EditDistance;
        }
        double distance = normalized_levenshtein(query, norm);

        bool better = false;
        if (!best) {
            better = true;
        } else if (tier != best_tier) {
            better = tier < best_tier;
        } else if (std::fabs(distance - best_distance) > 1e-12) {
            better = distance < best_distance;
        } else {
            better = norm < best_norm;
        }
        if (better) {
            best = &track;
            best_tier = tier;
            best_distance = distance;
            best_norm = norm;
        }
    }

    if (best_tier == MatchTier::EditDistance && best_distance > 0.7)
        throw Error("no plausible match for music name: " + name);

    MusicMatch match;
    match.track = *best;
    match.tier = best_tier;
    match.distance = best_distance;
    return match;
}

// ---------------------------------------------------------------------------
// Beat tracking

namespace {

constexpr int kTrackerRate = 22050;
constexpr int kWindowSize = 2048;
constexpr int kHopSize = 512;
constexpr double kTempoPriorBpm = 120.0;
constexpr double kTempoPriorOctaves = 1.0;
constexpr double kTightness = 100.0;
constexpr double kMinBpm = 30.0;
constexpr double kMaxBpm = 300.0;

std::vector<double> onset_envelope(const std::vector<float>& mono) {
    std::vector<double> window(kWindowSize);
    for (int i = 0; i < kWindowSize; ++i)
        window[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * i / (kWindowSize - 1)));

    int n_frames =
        std::max(0, static_cast<int>((mono.size() - kWindowSize) / kHopSize) + 1);
    std::vector<double> envelope(static_cast<std::size_t>(std::max(n_frames, 0)), 0.0);

    std::vector<double> prev_log(kWindowSize / 2 + 1, 0.0);
    std::vector<double> cur_log(kWindowSize / 2 + 1, 0.0);
    std::vector<std::complex<double>> spec(kWindowSize);

    for (int f = 0; f < n_frames; ++f) {
        const float* src = mono.data() + static_cast<std::size_t>(f) * kHopSize;
        for (int i = 0; i < kWindowSize; ++i)
            spec[i] = std::complex<double>(src[i] * window[i], 0.0);
        fft_inplace(spec);
        double flux = 0.0;
        for (int k = 0; k <= kWindowSize / 2; ++k) {
            cur_log[k] = std::log1p(std::abs(spec[k]));
            double diff = cur_log[k] - prev_log[k];
            if (f > 0 && diff > 0.0) flux += diff;
        }
        envelope[f] = flux;
        std::swap(prev_log, cur_log);
    }
    return envelope;
}

double frame_period_seconds() { return static_cast<double>(kHopSize) / kTrackerRate; }

// Tempo lag via onset autocorrelation under a log-Gaussian prior, with
// parabolic peak refinement.
double estimate_period_frames(const std::vector<double>& envelope) {
    const double fp = frame_period_seconds();
    int min_lag = std::max(2, static_cast<int>(std::floor(60.0 / (kMaxBpm * fp))));
    int max_lag = static_cast<int>(std::ceil(60.0 / (kMinBpm * fp)));
    max_lag = std::min<int>(max_lag, static_cast<int>(envelope.size()) - 1);
    if (max_lag <= min_lag) return 60.0 / (kTempoPriorBpm * fp);

    std::vector<double> weighted(max_lag + 1, 0.0);
    for (int lag = min_lag; lag <= max_lag; ++lag) {
        double acc = 0.0;
        for (std::size_t t = 0; t + lag < envelope.size(); ++t)
            acc += envelope[t] * envelope[t + lag];
        double bpm = 60.0 / (lag * fp);
        double octaves = std::log2(bpm / kTempoPriorBpm) / kTempoPriorOctaves;
        weighted[lag] = acc * std::exp(-0.5 * octaves * octaves);
    }

    int best = min_lag;
    for (int lag = min_lag + 1; lag <= max_lag; ++lag)
        if (weighted[lag] > weighted[best]) best = lag;

    double period = best;
    if (best > min_lag && best < max_lag) {
        double y0 = weighted[best - 1], y1 = weighted[best], y2 = weighted[best + 1];
        double denom = y0 - 2.0 * y1 + y2;
        if (std::fabs(denom) > 1e-12) {
            double shift = 0.5 * (y0 - y2) / denom;
            if (std::fabs(shift) <= 1.0) period += shift;
        }
    }
    return period;
}

std::vector<int> track_beats_dp(const std::vector<double>& envelope, double period) {
    const int n = static_cast<int>(envelope.size());
    std::vector<double> cumscore(n, 0.0);
    std::vector<int> backlink(n, -1);

    const int lo = std::max(1, static_cast<int>(std::lround(period / 2.0)));
    const int hi = static_cast<int>(std::lround(period * 2.0));

    for (int t = 0; t < n; ++t) {
        double best = 0.0;
        int best_prev = -1;
        for (int d = lo; d <= hi && d <= t; ++d) {
            double ratio = std::log(static_cast<double>(d) / period);
            double score = cumscore[t - d] - kTightness * ratio * ratio;
            if (score > best) {
                best = score;
                best_prev = t - d;
            }
        }
        cumscore[t] = envelope[t] + best;
        backlink[t] = best_prev;
    }

    // Backtrace from the best-scoring frame in the final period.
    int start = std::max(0, n - static_cast<int>(std::lround(period)) - 1);
    int tail = start;
    for (int t = start + 1; t < n; ++t)
        if (cumscore[t] > cumscore[tail]) tail = t;

    std::vector<int> beats;
    for (int t = tail; t >= 0; t = backlink[t]) {
        beats.push_back(t);
        if (backlink[t] < 0) break;
    }
    std::reverse(beats.begin(), beats.end());
    return beats;
}

} // namespace

BeatGrid detect_beats(const std::vector<float>& samples, int sample_rate) {
    if (sample_rate <= 0) throw Error("detect_beats: invalid sample rate");
    double duration = static_cast<double>(samples.size()) / sample_rate;
    if (duration < 5.0) throw Error("track too short for tempo estimation");

    std::vector<float> mono = resample_linear(samples, sample_rate, kTrackerRate);
    std::vector<double> envelope = onset_envelope(mono);

    BeatGrid grid;
    double peak = 0.0;
    for (double v : envelope) peak = std::max(peak, v);
    if (envelope.size() < 4 || peak < 1e-6) {
        grid.silent = true;
        grid.tempo = 0.0;
        return grid; // caller falls back to a fixed grid
    }

    // Normalize so the DP tightness constant is scale-free.
    double mean = 0.0;
    for (double v : envelope) mean += v;
    mean /= static_cast<double>(envelope.size());
    double var = 0.0;
    for (double v : envelope) var += (v - mean) * (v - mean);
    double stddev = std::sqrt(var / static_cast<double>(envelope.size()));
    if (stddev > 1e-12)
        for (double& v : envelope) v /= stddev;

    const double fp = frame_period_seconds();
    double period = estimate_period_frames(envelope);
    std::vector<int> beat_frames = track_beats_dp(envelope, period);

    // Frame centers: the STFT window starting at f*hop is centered half a
    // window later.
    const double center = 0.5 * kWindowSize / kTrackerRate;
    for (int f : beat_frames) {
        double t = f * fp + center;
        if (t >= 0.0 && t <= duration) grid.beats.push_back(t);
    }
    std::sort(grid.beats.begin(), grid.beats.end());
    grid.beats.erase(std::unique(grid.beats.begin(), grid.beats.end()), grid.beats.end());

    if (grid.beats.size() >= 2) {
        double span = grid.beats.back() - grid.beats.front();
        grid.tempo = 60.0 * (grid.beats.size() - 1) / span;
    } else {
        grid.tempo = 60.0 / (period * fp);
    }
    return grid;
}

BeatGrid detect_beats(const AudioBuffer& audio) {
    return detect_beats(to_mono(audio), audio.sample_rate);
}

BeatGrid fallback_beat_grid(double duration, double spacing) {
    BeatGrid grid;
    grid.silent = true;
    grid.tempo = 60.0 / spacing;
    for (double t = spacing; t <= duration + 1e-9; t += spacing) grid.beats.push_back(t);
    return grid;
}

} // namespace director
