#include "director/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "director/eval.hpp"
#include "director/render.hpp"
#include "director/rng.hpp"
#include "director/strings.hpp"

namespace director {

namespace fs = std::filesystem;

const std::vector<std::string>& stage_names() {
    static const std::vector<std::string> kStages = {
        "load",     "keyframes", "describe", "prompt",   "plan",
        "parse",    "retrieve",  "beats",    "timeline", "render"};
    return kStages;
}

int stage_index(const std::string& name) {
    std::string n = to_lower(trim(name));
    if (n == "style") n = "render"; // style runs inside render
    const auto& stages = stage_names();
    for (std::size_t i = 0; i < stages.size(); ++i)
        if (stages[i] == n) return static_cast<int>(i);
    throw Error("unknown stage: " + name);
}

namespace {

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("missing stage artifact: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --- stage artifact formats -------------------------------------------------

void write_assets_tsv(const fs::path& path, const ProjectManifest& manifest) {
    std::ostringstream out;
    out << "id\tkind\tpath\twidth\theight\tduration\tfps\n";
    for (const MediaAsset& a : manifest.assets) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6f\t%.6f", a.duration, a.frame_rate);
        out << a.id << "\t" << (a.kind == AssetKind::Image ? "image" : "video") << "\t"
            << a.source_path.string() << "\t" << a.width << "\t" << a.height << "\t"
            << buf << "\n";
    }
    write_text(path, out.str());
}

void write_keyframes_file(const fs::path& path,
                          const std::map<int, std::vector<VideoSegment>>& segments) {
    std::ostringstream out;
    for (const auto& [id, segs] : segments) {
        for (const VideoSegment& s : segs)
            out << id << " " << s.start_frame << " " << s.end_frame << " "
                << s.keyframe_index << "\n";
    }
    write_text(path, out.str());
}

std::map<int, std::vector<VideoSegment>> read_keyframes_file(const fs::path& path) {
    std::map<int, std::vector<VideoSegment>> out;
    std::istringstream in(read_text(path));
    int id;
    VideoSegment seg;
    while (in >> id >> seg.start_frame >> seg.end_frame >> seg.keyframe_index)
        out[id].push_back(seg);
    return out;
}

std::string descriptions_to_text(const std::vector<AssetDescription>& descriptions) {
    std::ostringstream out;
    for (const AssetDescription& d : descriptions) {
        const char* label = d.kind == AssetKind::Image ? "Image " : "Video ";
        for (const std::string& line : d.lines)
            out << label << d.asset_id << ": " << line << "\n";
    }
    return out.str();
}

std::vector<AssetDescription> read_descriptions_file(const fs::path& path) {
    std::vector<AssetDescription> out;
    for (const std::string& raw : split_lines(read_text(path))) {
        std::string line = trim(raw);
        bool image = starts_with_ci(line, "Image ");
        bool video = starts_with_ci(line, "Video ");
        if (!image && !video) continue;
        std::size_t pos = 6;
        std::size_t digits = pos;
        while (digits < line.size() &&
               std::isdigit(static_cast<unsigned char>(line[digits])))
            ++digits;
        if (digits == pos || digits >= line.size() || line[digits] != ':') continue;
        int id = std::atoi(line.substr(pos, digits - pos).c_str());
        std::string text = trim(line.substr(digits + 1));
        if (out.empty() || out.back().asset_id != id) {
            AssetDescription d;
            d.asset_id = id;
            d.kind = image ? AssetKind::Image : AssetKind::Video;
            out.push_back(d);
        }
        out.back().lines.push_back(text);
    }
    if (out.empty()) throw Error("descriptions artifact is empty: " + path.string());
    return out;
}

void write_music_file(const fs::path& path, const MusicMatch& match) {
    std::ostringstream out;
    out << "title\t" << match.track.title << "\n";
    out << "path\t" << match.track.path.string() << "\n";
    out << "tier\t" << static_cast<int>(match.tier) << "\n";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", match.distance);
    out << "distance\t" << buf << "\n";
    write_text(path, out.str());
}

MusicMatch read_music_file(const fs::path& path) {
    MusicMatch match;
    for (const std::string& line : split_lines(read_text(path))) {
        auto tab = line.find('\t');
        if (tab == std::string::npos) continue;
        std::string key = line.substr(0, tab);
        std::string value = line.substr(tab + 1);
        if (key == "title") match.track.title = value;
        else if (key == "path") match.track.path = value;
        else if (key == "tier") match.tier = static_cast<MatchTier>(std::atoi(value.c_str()));
        else if (key == "distance") match.distance = std::strtod(value.c_str(), nullptr);
    }
    if (match.track.path.empty())
        throw Error("music artifact missing track path: " + path.string());
    AudioBuffer probe = read_wav(match.track.path);
    match.track.duration = probe.duration();
    match.track.sample_rate = probe.sample_rate;
    match.track.channels = probe.channels;
    return match;
}

void write_beats_file(const fs::path& path, const BeatGrid& grid) {
    std::ostringstream out;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "tempo %.6f", grid.tempo);
    out << buf << "\n";
    out << "silent " << (grid.silent ? 1 : 0) << "\n";
    for (double b : grid.beats) {
        std::snprintf(buf, sizeof(buf), "beat %.9f", b);
        out << buf << "\n";
    }
    write_text(path, out.str());
}

BeatGrid read_beats_file(const fs::path& path) {
    BeatGrid grid;
    std::istringstream in(read_text(path));
    std::string tag;
    while (in >> tag) {
        if (tag == "tempo") in >> grid.tempo;
        else if (tag == "silent") { int s; in >> s; grid.silent = s != 0; }
        else if (tag == "beat") { double b; in >> b; grid.beats.push_back(b); }
    }
    return grid;
}

void add_unique_warnings(RunReport& report, const Warnings& warnings) {
    for (const std::string& w : warnings) {
        if (std::find(report.warnings.begin(), report.warnings.end(), w) ==
            report.warnings.end())
            report.warnings.push_back(w);
    }
}

} // namespace

std::string format_report(const RunReport& report) {
    std::ostringstream out;
    if (report.success) out << "status: ok\n";
    else out << "status: failed at " << report.failed_stage << ": " << report.error << "\n";
    out << "output: " << report.output_path.string() << "\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "wall_time_seconds: %.3f", report.wall_time_seconds);
    out << buf << "\n";
    if (!report.plan_title.empty() || !report.plan_order.empty()) {
        out << "plan:\n";
        out << "  title: " << report.plan_title << "\n";
        out << "  order:";
        for (int id : report.plan_order) out << " " << id;
        out << "\n";
        out << "  closing: " << report.plan_closing << "\n";
        out << "  music_request: " << report.plan_music_request << "\n";
    }
    if (!report.music_title.empty())
        out << "music: " << report.music_title << " (" << report.music_tier << ")\n";
    if (report.tempo > 0.0) {
        std::snprintf(buf, sizeof(buf), "tempo: %.2f", report.tempo);
        out << buf << "\n";
    }
    if (!report.segments.empty()) {
        out << "segments:\n";
        for (const SegmentSummary& s : report.segments) {
            std::snprintf(buf, sizeof(buf), "%.3f %.3f", s.start, s.end);
            out << "  " << s.label << " " << buf << " " << s.transition;
            if (!s.caption.empty()) out << " \"" << s.caption << "\"";
            out << "\n";
        }
    }
    if (!report.warnings.empty()) {
        out << "warnings:\n";
        for (const std::string& w : report.warnings) out << "  - " << w << "\n";
    }
    return out.str();
}

RunReport compose(const ComposeOptions& opts) {
    using Clock = std::chrono::steady_clock;
    const auto started = Clock::now();

    RunReport report;
    report.output_path = opts.out_dir;

    const int stop_at =
        opts.stop_after.empty() ? static_cast<int>(stage_names().size()) - 1
                                : stage_index(opts.stop_after);
    const int resume_at = opts.resume_from.empty() ? 0 : stage_index(opts.resume_from);

    auto finish = [&](bool ok, const std::string& stage, const std::string& error) {
        report.success = ok;
        if (!ok) {
            report.failed_stage = stage;
            report.error = error;
        }
        report.wall_time_seconds =
            std::chrono::duration<double>(Clock::now() - started).count();
        std::error_code ec;
        fs::create_directories(opts.out_dir, ec);
        std::ofstream out(opts.out_dir / "report.txt", std::ios::trunc);
        if (out) out << format_report(report);
    };

    std::string stage = "load";
    try {
        fs::create_directories(opts.out_dir);
        const fs::path log_dir = opts.out_dir / "log";
        fs::create_directories(log_dir);

        auto runs = [&](const char* name) {
            return stage_index(name) >= resume_at;
        };
        auto done = [&](const char* name) { return stage_index(name) >= stop_at; };

        // ---- load (always executed; probing is required by later stages)
        LoadOptions load_opts;
        load_opts.decode_cmd = opts.decode_cmd;
        load_opts.cache_dir = opts.out_dir / "cache";
        ProjectManifest manifest = load_manifest(opts.manifest_path, load_opts);
        add_unique_warnings(report, manifest.warnings);
        write_assets_tsv(opts.out_dir / "assets.tsv", manifest);

        UserRequirements reqs = manifest.requirements;
        if (opts.seed) reqs.seed = *opts.seed;
        if (opts.style) reqs.style = parse_style_choice(*opts.style);

        std::vector<int> asset_ids;
        for (const MediaAsset& a : manifest.assets) asset_ids.push_back(a.id);
        if (done("load")) { finish(true, "", ""); return report; }

        // ---- keyframes
        stage = "keyframes";
        std::map<int, std::vector<VideoSegment>> segments;
        if (runs("keyframes")) {
            for (const MediaAsset& a : manifest.assets) {
                if (a.kind != AssetKind::Video) continue;
                DecodeResult decoded = decode_frames(a);
                add_unique_warnings(report, decoded.warnings);
                int stride = opts.keyframe_stride > 0 ? opts.keyframe_stride
                                                      : default_sample_stride(a.frame_rate);
                segments[a.id] =
                    segment_video(decoded.frames, opts.keyframe_threshold, stride);
            }
            write_keyframes_file(opts.out_dir / "keyframes.txt", segments);
        } else {
            segments = read_keyframes_file(opts.out_dir / "keyframes.txt");
        }
        if (done("keyframes")) { finish(true, "", ""); return report; }

        // ---- describe
        stage = "describe";
        std::vector<AssetDescription> descriptions;
        if (runs("describe")) {
            std::string spec = !opts.captioner_spec.empty()
                                   ? opts.captioner_spec
                                   : env_or("DIRECTOR_CAPTIONER",
                                            opts.mock_adapters ? "mock" : "");
            if (spec.empty())
                throw Error("no captioner adapter configured "
                            "(set DIRECTOR_CAPTIONER or use --mock-adapters)");
            auto captioner = make_caption_adapter(spec);
            Warnings warnings;
            descriptions = describe_assets(
                manifest.assets, segments, *captioner,
                [](const MediaAsset& a, int index) { return decode_frame_at(a, index); },
                warnings);
            add_unique_warnings(report, warnings);
            write_text(opts.out_dir / "descriptions.txt",
                       descriptions_to_text(descriptions));
            write_text(log_dir / "captioner.txt",
                       std::string("question: ") + kCaptionQuestion + "\n" +
                           descriptions_to_text(descriptions));
        } else {
            descriptions = read_descriptions_file(opts.out_dir / "descriptions.txt");
        }
        if (done("describe")) { finish(true, "", ""); return report; }

        // ---- prompt
        stage = "prompt";
        std::string prompt;
        if (runs("prompt")) {
            prompt = build_prompt(reqs, descriptions);
            write_text(opts.out_dir / "prompt.txt", prompt);
        } else {
            prompt = read_text(opts.out_dir / "prompt.txt");
        }
        if (done("prompt")) { finish(true, "", ""); return report; }

        // ---- plan
        stage = "plan";
        std::string response;
        if (runs("plan")) {
            std::string spec =
                !opts.chat_spec.empty()
                    ? opts.chat_spec
                    : env_or("DIRECTOR_CHAT",
                             opts.mock_adapters
                                 ? (opts.chat_fixture.empty()
                                        ? std::string("mock")
                                        : "mock:" + opts.chat_fixture.string())
                                 : "");
            if (spec.empty())
                throw Error("no chat adapter configured "
                            "(set DIRECTOR_CHAT or use --mock-adapters)");
            auto chat = make_chat_adapter(spec);
            response = plan_story(prompt, *chat, log_dir);
            write_text(opts.out_dir / "plan_response.txt", response);
        } else {
            response = read_text(opts.out_dir / "plan_response.txt");
        }
        if (done("plan")) { finish(true, "", ""); return report; }

        // ---- parse
        stage = "parse";
        DirectorPlan plan;
        if (runs("parse")) {
            plan = parse_plan(response, asset_ids);
            write_text(opts.out_dir / "plan.txt", format_plan_response(plan));
        } else {
            plan = parse_plan(read_text(opts.out_dir / "plan.txt"), asset_ids);
        }
        add_unique_warnings(report, plan.warnings);
        report.plan_title = plan.title;
        report.plan_closing = plan.closing;
        report.plan_music_request = plan.music_name;
        report.plan_order = plan.order;
        if (done("parse")) { finish(true, "", ""); return report; }

        // ---- retrieve
        stage = "retrieve";
        MusicMatch music;
        if (runs("retrieve")) {
            if (manifest.music_library_path.empty())
                throw Error("manifest has no [music] library_path");
            MusicIndex index = index_library(manifest.music_library_path);
            add_unique_warnings(report, index.warnings);
            try {
                music = retrieve_music(plan.music_name, index);
            } catch (const Error& e) {
                std::string reason = e.what();
                if (index.empty() || reason.find("no music available") != std::string::npos)
                    throw;
                music.track = index.tracks.front();
                music.tier = MatchTier::EditDistance;
                music.distance = 1.0;
                add_unique_warnings(report,
                                    {reason + "; falling back to the first track"});
            }
            write_music_file(opts.out_dir / "music.txt", music);
        } else {
            music = read_music_file(opts.out_dir / "music.txt");
        }
        report.music_title = music.track.title;
        report.music_tier = music.tier == MatchTier::Exact         ? "exact"
                            : music.tier == MatchTier::Containment ? "containment"
                                                                   : "edit-distance";
        if (done("retrieve")) { finish(true, "", ""); return report; }

        // ---- beats
        stage = "beats";
        BeatGrid grid;
        if (runs("beats")) {
            AudioBuffer audio = read_wav(music.track.path);
            grid = detect_beats(audio);
            if (grid.silent || grid.beats.empty()) {
                add_unique_warnings(
                    report, {"no beats detected; using a fixed 4-second grid"});
                grid = fallback_beat_grid(music.track.duration);
            }
            write_beats_file(opts.out_dir / "beats.txt", grid);
        } else {
            grid = read_beats_file(opts.out_dir / "beats.txt");
        }
        report.tempo = grid.tempo;
        if (done("beats")) { finish(true, "", ""); return report; }

        // ---- timeline
        stage = "timeline";
        TimelineConfig tl_cfg;
        tl_cfg.seed = reqs.seed;
        tl_cfg.target_width = reqs.target_width;
        tl_cfg.target_height = reqs.target_height;
        Timeline timeline;
        if (runs("timeline")) {
            timeline = assemble_timeline(plan, manifest.assets, grid, music.track, tl_cfg);
            write_timeline(timeline, opts.out_dir / "timeline.edl");
        } else {
            timeline = read_timeline(opts.out_dir / "timeline.edl", plan, manifest.assets,
                                     music.track, tl_cfg);
        }
        auto card_summary = [](const char* label, const TitleCard& c) {
            SegmentSummary s;
            s.label = label;
            s.start = c.start;
            s.end = c.end;
            s.transition = transition_name(c.transition_in);
            s.caption = c.text;
            return s;
        };
        report.segments.push_back(card_summary("opening", timeline.opening));
        for (const TimelineSegment& seg : timeline.segments) {
            SegmentSummary s;
            s.label = std::to_string(seg.asset_id);
            s.start = seg.start;
            s.end = seg.end;
            s.transition = transition_name(seg.transition_in);
            s.caption = seg.caption;
            report.segments.push_back(s);
        }
        report.segments.push_back(card_summary("closing", timeline.closing));
        if (done("timeline")) { finish(true, "", ""); return report; }

        // ---- render (style applied per frame)
        stage = "render";
        RenderConfig render_cfg;
        render_cfg.width = reqs.target_width;
        render_cfg.height = reqs.target_height;
        render_cfg.frame_rate = reqs.frame_rate;
        render_cfg.threads = opts.threads;
        if (!opts.container_path.empty()) {
            render_cfg.output = OutputKind::ContainerFile;
            render_cfg.container_path = opts.container_path;
            render_cfg.transcode_cmd = opts.transcode_cmd;
        }
        std::string style_spec = !opts.style_spec.empty() ? opts.style_spec
                                                          : env_or("DIRECTOR_STYLE", "");
        auto style = make_style(reqs.style, style_spec);
        FrameSource source(manifest.assets);
        RenderResult rendered = render_video(timeline, render_cfg, *style, source,
                                             opts.out_dir);
        add_unique_warnings(report, rendered.warnings);

        finish(true, "", "");
        return report;
    } catch (const std::exception& e) {
        finish(false, stage, e.what());
        return report;
    }
}

DatasetSampleResult dataset_sample(const fs::path& class_root, int per_class,
                                   std::uint64_t seed, const fs::path& out_dir,
                                   const fs::path& music_library) {
    if (!fs::is_directory(class_root))
        throw Error("dataset root is not a directory: " + class_root.string());
    if (per_class <= 0) throw Error("per_class must be positive");

    std::vector<fs::path> class_dirs;
    for (const auto& entry : fs::directory_iterator(class_root))
        if (entry.is_directory()) class_dirs.push_back(entry.path());
    std::sort(class_dirs.begin(), class_dirs.end());
    if (class_dirs.empty()) throw Error("dataset root has no class directories");

    fs::create_directories(out_dir);

    DatasetSampleResult result;
    for (const fs::path& dir : class_dirs) {
        std::vector<fs::path> clips;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file() || entry.is_directory()) clips.push_back(entry.path());
        std::sort(clips.begin(), clips.end());

        const std::string class_name = dir.filename().string();
        int take = per_class;
        if (static_cast<int>(clips.size()) < per_class) {
            result.warnings.push_back("class " + class_name + " has only " +
                                      std::to_string(clips.size()) + " clips (wanted " +
                                      std::to_string(per_class) + "); sampling all");
            take = static_cast<int>(clips.size());
        }

        Rng rng(seed ^ fnv1a64(class_name));
        rng.shuffle(clips);
        clips.resize(static_cast<std::size_t>(take));

        std::ostringstream manifest;
        manifest << "[requirements]\n";
        manifest << "theme = " << class_name << "\n";
        manifest << "width = 1280\n";
        manifest << "height = 720\n";
        manifest << "fps = 24\n";
        manifest << "seed = " << seed << "\n";
        manifest << "\n[assets]\n";
        for (const fs::path& clip : clips) manifest << clip.string() << "\n";
        if (!music_library.empty()) {
            manifest << "\n[music]\n";
            manifest << "library_path = " << music_library.string() << "\n";
        }

        fs::path manifest_path = out_dir / (class_name + ".manifest");
        write_text(manifest_path, manifest.str());
        result.manifests.push_back(manifest_path);
        result.total_clips += take;
    }
    return result;
}

} // namespace director
