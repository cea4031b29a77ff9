#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "director/assets.hpp"
#include "director/music.hpp"
#include "director/narration.hpp"
#include "director/timeline.hpp"

namespace director {

// Pipeline stages in execution order. "style" is applied inside render and
// accepted as an alias for it in --stop-after / --resume-from.
const std::vector<std::string>& stage_names();
int stage_index(const std::string& name); // throws on unknown names

struct ComposeOptions {
    std::filesystem::path manifest_path;
    std::filesystem::path out_dir;
    bool mock_adapters = false;
    std::filesystem::path chat_fixture; // canned response for the mock chat
    std::string captioner_spec;         // overrides env DIRECTOR_CAPTIONER
    std::string chat_spec;              // overrides env DIRECTOR_CHAT
    std::string style_spec;             // overrides env DIRECTOR_STYLE
    std::optional<std::uint64_t> seed;  // overrides the manifest seed
    std::optional<std::string> style;   // overrides the manifest style
    std::string stop_after;
    std::string resume_from;
    std::string decode_cmd;    // container input decoder template
    std::string transcode_cmd; // container output encoder template
    std::filesystem::path container_path; // request a container output
    int threads = 0;
    double keyframe_threshold = 0.6;
    int keyframe_stride = 0; // 0: from the asset frame rate
};

struct SegmentSummary {
    std::string label; // "opening", asset id, or "closing"
    double start = 0.0;
    double end = 0.0;
    std::string transition;
    std::string caption;
};

struct RunReport {
    std::filesystem::path output_path;
    bool success = false;
    std::string failed_stage;
    std::string error;
    std::string plan_title;
    std::string plan_closing;
    std::string plan_music_request;
    std::vector<int> plan_order;
    std::string music_title;
    std::string music_tier;
    double tempo = 0.0;
    std::vector<SegmentSummary> segments;
    Warnings warnings; // deduplicated, in first-seen order
    double wall_time_seconds = 0.0;
};

// Runs load -> keyframes -> describe -> prompt -> plan -> parse -> retrieve
// -> beats -> timeline -> render, persisting each stage's artifact under
// out_dir. The report is written to out_dir/report.txt even on failure.
RunReport compose(const ComposeOptions& opts);

std::string format_report(const RunReport& report);

struct DatasetSampleResult {
    std::vector<std::filesystem::path> manifests;
    int total_clips = 0;
    Warnings warnings;
};

// One manifest per class directory, each referencing per_class uniformly
// sampled clips (all of them, with a warning, when a class is short).
DatasetSampleResult dataset_sample(const std::filesystem::path& class_root, int per_class,
                                   std::uint64_t seed, const std::filesystem::path& out_dir,
                                   const std::filesystem::path& music_library = {});

} // namespace director
