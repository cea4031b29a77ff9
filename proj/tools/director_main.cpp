#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "director/eval.hpp"
#include "director/pipeline.hpp"
#include "director/render.hpp"
#include "director/strings.hpp"

namespace fs = std::filesystem;
using namespace director;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_compose(const ComposeOptions& opts) {
    RunReport report = compose(opts);
    std::cout << format_report(report);
    return report.success ? 0 : 1;
}

int run_keyframes(const fs::path& asset_path, double threshold, int stride) {
    // Accept an image, a directory asset, or a container (with decoder).
    std::ostringstream manifest;
    manifest << "[requirements]\n[assets]\n" << fs::absolute(asset_path).string() << "\n";
    fs::path tmp = fs::temp_directory_path() /
                   ("director_keyframes_" + std::to_string(getpid()) + ".manifest");
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << manifest.str();
    }
    ProjectManifest project = load_manifest(tmp);
    fs::remove(tmp);
    const MediaAsset& asset = project.assets.front();

    DecodeResult decoded = decode_frames(asset);
    for (const std::string& w : decoded.warnings) std::cerr << "warning: " << w << "\n";
    int use_stride = stride > 0 ? stride
                     : asset.kind == AssetKind::Video
                         ? default_sample_stride(asset.frame_rate)
                         : 1;
    auto segments = segment_video(decoded.frames, threshold, use_stride);
    for (const VideoSegment& s : segments)
        std::cout << s.start_frame << " " << s.end_frame << " " << s.keyframe_index << "\n";
    return 0;
}

int run_beats(const fs::path& track) {
    AudioBuffer audio = read_wav(track);
    BeatGrid grid = detect_beats(audio);
    if (grid.silent) {
        std::cerr << "warning: no beats detected (silent track)\n";
        grid = fallback_beat_grid(audio.duration());
    }
    std::printf("tempo %.2f\n", grid.tempo);
    for (double b : grid.beats) std::printf("%.4f\n", b);
    return 0;
}

int run_eval_ttr(const std::vector<fs::path>& files, bool as_plan, bool captions_only) {
    std::vector<double> values;
    for (const fs::path& file : files) {
        std::string text = read_file(file);
        std::vector<std::string> texts;
        if (as_plan) {
            // Plan-format file: use the plan's text fields.
            std::vector<int> ids;
            for (const std::string& line : split_lines(text)) {
                std::string t = trim(line);
                std::size_t i = 0;
                while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
                if (i > 0 && i < t.size() && t[i] == ':')
                    ids.push_back(std::atoi(t.substr(0, i).c_str()));
            }
            if (ids.empty()) ids.push_back(1);
            DirectorPlan plan = parse_plan(text, ids);
            if (!captions_only) texts.push_back(plan.title);
            for (const auto& [id, caption] : plan.captions) texts.push_back(caption);
            if (!captions_only) texts.push_back(plan.closing);
        } else {
            texts.push_back(text);
        }
        double v = ttr(texts);
        values.push_back(v);
        std::printf("%s\t%.6f\n", file.string().c_str(), v);
    }
    std::printf("mean\t%.6f\n", mean_ttr(values));
    return 0;
}

int run_eval_judge(const fs::path& script_path, const fs::path& frames_dir,
                   const std::string& adapter_spec) {
    std::string script = trim(read_file(script_path));
    std::vector<std::string> refs;
    if (!frames_dir.empty() && fs::is_directory(frames_dir)) {
        std::vector<fs::path> frames;
        for (const auto& entry : fs::directory_iterator(frames_dir))
            if (entry.is_regular_file() &&
                entry.path().filename().string().rfind("frame_", 0) == 0)
                frames.push_back(entry.path());
        std::sort(frames.begin(), frames.end());
        for (const fs::path& f : frames) refs.push_back(f.filename().string());
    }
    Warnings warnings;
    std::string prompt = build_judge_prompt(script, refs, &warnings);
    for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";

    if (adapter_spec.empty()) {
        std::cout << prompt;
        return 0;
    }
    auto chat = make_chat_adapter(adapter_spec);
    JudgeScores scores = parse_judge_response(chat->complete(prompt));
    std::printf("consistency %d\nlogicality %d\nvividness %d\naesthetic %d\noverall %d\n",
                scores.consistency, scores.logicality, scores.vividness, scores.aesthetic,
                scores.overall);
    std::printf("average %.4f\n", scores.average());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"automatic video composition engine"};
    app.require_subcommand(1);

    // --- compose ---
    ComposeOptions compose_opts;
    std::string stop_after, resume_from, style_override;
    std::uint64_t seed_value = 0;
    auto* compose_cmd = app.add_subcommand("compose", "run the full pipeline");
    compose_cmd->add_option("manifest", compose_opts.manifest_path, "project manifest")
        ->required();
    compose_cmd->add_option("--out", compose_opts.out_dir, "output directory")->required();
    compose_cmd->add_flag("--mock-adapters", compose_opts.mock_adapters,
                          "use the deterministic in-tree adapters");
    compose_cmd->add_option("--chat-fixture", compose_opts.chat_fixture,
                            "canned response file for the mock chat adapter");
    compose_cmd->add_option("--captioner", compose_opts.captioner_spec,
                            "captioner endpoint (http://..., cmd:..., mock)");
    compose_cmd->add_option("--chat", compose_opts.chat_spec, "chat endpoint");
    compose_cmd->add_option("--style-adapter", compose_opts.style_spec,
                            "external style endpoint");
    auto* seed_opt =
        compose_cmd->add_option("--seed", seed_value, "override the manifest seed");
    compose_cmd->add_option("--style", style_override,
                            "override the manifest style (none|gray|sepia|external)");
    compose_cmd->add_option("--stop-after", stop_after, "halt after the named stage");
    compose_cmd->add_option("--resume-from", resume_from,
                            "resume from the named stage using saved artifacts");
    compose_cmd->add_option("--decode-cmd", compose_opts.decode_cmd,
                            "container decoder template ({in}, {outdir})");
    compose_cmd->add_option("--transcode-cmd", compose_opts.transcode_cmd,
                            "container encoder template ({frames}, {audio}, {fps}, {out})");
    compose_cmd->add_option("--container", compose_opts.container_path,
                            "also produce a container file via the transcoder");
    compose_cmd->add_option("--threads", compose_opts.threads, "render worker threads");
    compose_cmd->add_option("--keyframe-threshold", compose_opts.keyframe_threshold,
                            "segmentation similarity threshold");
    compose_cmd->add_option("--keyframe-stride", compose_opts.keyframe_stride,
                            "hash sampling stride in frames (0 = auto)");

    // --- keyframes ---
    fs::path kf_asset;
    double kf_threshold = 0.6;
    int kf_stride = 0;
    auto* keyframes_cmd =
        app.add_subcommand("keyframes", "segment a video and report keyframes");
    keyframes_cmd->add_option("asset", kf_asset, "video (directory asset) or image")
        ->required();
    keyframes_cmd->add_option("--threshold", kf_threshold, "similarity threshold");
    keyframes_cmd->add_option("--stride", kf_stride, "sampling stride (0 = auto)");

    // --- beats ---
    fs::path beats_track;
    auto* beats_cmd = app.add_subcommand("beats", "detect tempo and beat timestamps");
    beats_cmd->add_option("track", beats_track, "WAV file")->required();

    // --- eval ---
    auto* eval_cmd = app.add_subcommand("eval", "evaluation utilities");
    eval_cmd->require_subcommand(1);
    std::vector<fs::path> ttr_files;
    bool ttr_plan = false, ttr_captions_only = false;
    auto* ttr_cmd = eval_cmd->add_subcommand("ttr", "type-token ratio per file");
    ttr_cmd->add_option("files", ttr_files, "caption text files")->required();
    ttr_cmd->add_flag("--plan", ttr_plan, "parse files as plan artifacts");
    ttr_cmd->add_flag("--captions-only", ttr_captions_only,
                      "exclude the title and closing (with --plan)");

    fs::path judge_script, judge_frames;
    std::string judge_adapter;
    auto* judge_cmd = eval_cmd->add_subcommand("judge", "build or run the judge protocol");
    judge_cmd->add_option("--script", judge_script, "script text file")->required();
    judge_cmd->add_option("--frames-dir", judge_frames, "rendered frame directory");
    judge_cmd->add_option("--adapter", judge_adapter,
                          "judge endpoint; prints the prompt when absent");

    // --- dataset ---
    auto* dataset_cmd = app.add_subcommand("dataset", "dataset utilities");
    dataset_cmd->require_subcommand(1);
    fs::path ds_root, ds_out, ds_music;
    int ds_per_class = 8;
    std::uint64_t ds_seed = 0;
    auto* sample_cmd =
        dataset_cmd->add_subcommand("sample", "sample clips per class into manifests");
    sample_cmd->add_option("class_root", ds_root, "root of per-class clip directories")
        ->required();
    sample_cmd->add_option("--out", ds_out, "manifest output directory")->required();
    sample_cmd->add_option("--per-class", ds_per_class, "clips sampled per class");
    sample_cmd->add_option("--seed", ds_seed, "sampling seed");
    sample_cmd->add_option("--music-library", ds_music, "library path for the manifests");

    CLI11_PARSE(app, argc, argv);

    try {
        if (compose_cmd->parsed()) {
            if (*seed_opt) compose_opts.seed = seed_value;
            if (!style_override.empty()) compose_opts.style = style_override;
            compose_opts.stop_after = stop_after;
            compose_opts.resume_from = resume_from;
            return run_compose(compose_opts);
        }
        if (keyframes_cmd->parsed()) return run_keyframes(kf_asset, kf_threshold, kf_stride);
        if (beats_cmd->parsed()) return run_beats(beats_track);
        if (eval_cmd->parsed()) {
            if (ttr_cmd->parsed()) return run_eval_ttr(ttr_files, ttr_plan, ttr_captions_only);
            if (judge_cmd->parsed())
                return run_eval_judge(judge_script, judge_frames, judge_adapter);
        }
        if (dataset_cmd->parsed() && sample_cmd->parsed()) {
            DatasetSampleResult result =
                dataset_sample(ds_root, ds_per_class, ds_seed, ds_out, ds_music);
            for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";
            std::cout << result.manifests.size() << " manifests, " << result.total_clips
                      << " clips\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
