#include "director/timeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "director/rng.hpp"
#include "director/strings.hpp"

namespace director {

Placement fit_material(int src_height, int src_width, int target_height, int target_width) {
    if (src_height <= 0 || src_width <= 0 || target_height <= 0 || target_width <= 0)
        throw Error("fit_material: dimensions must be positive");

    const int m1_width = static_cast<int>(
        std::llround(static_cast<double>(src_width) * target_height / src_height));
    const int m2_height = static_cast<int>(
        std::llround(static_cast<double>(src_height) * target_width / src_width));

    Placement p;
    p.bg_blur_sigma = target_width / 64.0;
    if (m1_width == target_width) {
        p.mode = FitMode::ExactFit;
        p.fg_width = target_width;
        p.fg_height = target_height;
        p.bg_width = 0;
        p.bg_height = 0;
        p.bg_blur_sigma = 0.0;
    } else if (m1_width < target_width) {
        p.mode = FitMode::FitWidthLimited;
        p.fg_width = m1_width;
        p.fg_height = target_height;
        p.fg_offset_x = (target_width - m1_width) / 2;
        p.fg_offset_y = 0;
        p.bg_width = target_width;  // M2
        p.bg_height = m2_height;
    } else {
        p.mode = FitMode::FitHeightLimited;
        p.fg_width = target_width; // M2
        p.fg_height = m2_height;
        p.fg_offset_x = 0;
        p.fg_offset_y = (target_height - m2_height) / 2;
        p.bg_width = m1_width; // M1
        p.bg_height = target_height;
    }
    return p;
}

const char* transition_name(Transition t) {
    switch (t) {
        case Transition::Cut: return "cut";
        case Transition::CrossfadeIn: return "crossfade_in";
        case Transition::CrossfadeOut: return "crossfade_out";
        case Transition::TranslateUp: return "translate_up";
        case Transition::TranslateLateral: return "translate_lateral";
    }
    return "cut";
}

Transition transition_from_name(const std::string& name) {
    if (name == "cut") return Transition::Cut;
    if (name == "crossfade_in") return Transition::CrossfadeIn;
    if (name == "crossfade_out") return Transition::CrossfadeOut;
    if (name == "translate_up") return Transition::TranslateUp;
    if (name == "translate_lateral") return Transition::TranslateLateral;
    throw Error("unknown transition: " + name);
}

namespace {

// Beat grid extended past the track end: when the timeline outruns the music
// the track loops, so the beat pattern repeats with the track's period.
std::vector<double> extend_beats(const BeatGrid& grid, double music_duration,
                                 double horizon) {
    std::vector<double> out;
    if (grid.beats.empty()) return out;
    double offset = 0.0;
    while (offset <= horizon) {
        for (double b : grid.beats) {
            double t = b + offset;
            if (t > horizon + music_duration) break;
            if (out.empty() || t > out.back() + 1e-9) out.push_back(t);
        }
        if (music_duration <= 1e-9) break;
        offset += music_duration;
    }
    return out;
}

// Nearest beat to `target` (ties to the earlier beat).
double nearest_beat(const std::vector<double>& beats, double target) {
    auto it = std::lower_bound(beats.begin(), beats.end(), target);
    if (it == beats.end()) return beats.back();
    if (it == beats.begin()) return beats.front();
    double later = *it;
    double earlier = *(it - 1);
    return (target - earlier <= later - target) ? earlier : later;
}

// First beat at or after `floor_time`, if any.
bool first_beat_at_or_after(const std::vector<double>& beats, double floor_time,
                            double& out) {
    auto it = std::lower_bound(beats.begin(), beats.end(), floor_time - 1e-9);
    if (it == beats.end()) return false;
    out = *it;
    return true;
}

double enforce_min_duration(const std::vector<double>& beats, double start, double end,
                            double nominal_end, double min_duration) {
    if (end - start >= min_duration - 1e-9) return end;
    double later;
    if (first_beat_at_or_after(beats, start + min_duration, later)) return later;
    return std::max(nominal_end, start + min_duration);
}

} // namespace

Timeline assemble_timeline(const DirectorPlan& plan, const std::vector<MediaAsset>& assets,
                           const BeatGrid& beats, const MusicTrack& music,
                           const TimelineConfig& cfg) {
    std::map<int, const MediaAsset*> by_id;
    for (const MediaAsset& a : assets) by_id[a.id] = &a;
    {
        std::set<int> plan_ids(plan.order.begin(), plan.order.end());
        if (plan.order.size() != assets.size() || plan_ids.size() != assets.size() ||
            !std::all_of(plan.order.begin(), plan.order.end(),
                         [&](int id) { return by_id.count(id) != 0; }))
            throw Error("plan order is not a permutation of the project assets");
    }

    double horizon = 2.0 * cfg.card_duration + 30.0;
    for (const MediaAsset& a : assets)
        horizon += (a.kind == AssetKind::Image ? cfg.image_duration : a.duration) +
                   cfg.min_duration + cfg.max_hold;
    std::vector<double> grid = extend_beats(beats, music.duration, horizon);
    if (grid.empty()) throw Error("no beats available and no fallback grid");

    Timeline timeline;
    timeline.music = music;
    timeline.tempo = beats.tempo;

    double t = 0.0;

    // Opening card.
    timeline.opening.text = plan.title;
    timeline.opening.start = t;
    double end = nearest_beat(grid, t + cfg.card_duration);
    end = enforce_min_duration(grid, t, end, t + cfg.card_duration, cfg.min_duration);
    timeline.opening.end = end;
    t = end;

    // Assets in plan order.
    for (int id : plan.order) {
        const MediaAsset& asset = *by_id.at(id);
        const bool is_image = asset.kind == AssetKind::Image;
        const double nominal_dur = is_image ? cfg.image_duration : asset.duration;
        const double nominal_end = t + nominal_dur;

        double seg_end = nearest_beat(grid, nominal_end);
        if (!is_image && seg_end - t > asset.duration + cfg.max_hold + 1e-9) {
            // Too much hold: re-snap within the trim/hold window around the
            // clip's own end, or keep the nominal end.
            double lower = std::max(cfg.min_duration, asset.duration - cfg.max_trim);
            double upper = asset.duration + cfg.max_hold;
            double best = 0.0;
            bool found = false;
            for (double b : grid) {
                double d = b - t;
                if (d < lower - 1e-9) continue;
                if (d > upper + 1e-9) break;
                if (!found || std::fabs(d - asset.duration) <
                                  std::fabs(best - t - asset.duration)) {
                    best = b;
                    found = true;
                }
            }
            seg_end = found ? best : nominal_end;
        }
        seg_end = enforce_min_duration(grid, t, seg_end, nominal_end, cfg.min_duration);

        TimelineSegment seg;
        seg.asset_id = id;
        seg.start = t;
        seg.end = seg_end;
        auto cap = plan.captions.find(id);
        seg.caption = cap != plan.captions.end() ? cap->second : std::string();
        seg.placement =
            fit_material(asset.height, asset.width, cfg.target_height, cfg.target_width);
        if (!is_image) {
            seg.trim_offset = 0.0;
            seg.trim_length = std::min(asset.duration, seg.duration());
        }
        timeline.segments.push_back(std::move(seg));
        t = seg_end;
    }

    // Closing card.
    timeline.closing.text = plan.closing;
    timeline.closing.start = t;
    end = nearest_beat(grid, t + cfg.card_duration);
    end = enforce_min_duration(grid, t, end, t + cfg.card_duration, cfg.min_duration);
    timeline.closing.end = end;
    timeline.total_duration = end;

    // Switching animations: one seeded draw per boundary, then clamp the
    // transition to half of either adjoining element.
    static const Transition kAnimations[] = {
        Transition::CrossfadeIn, Transition::CrossfadeOut, Transition::TranslateUp,
        Transition::TranslateLateral};
    Rng rng(cfg.seed);
    std::vector<double> durations;
    durations.push_back(timeline.opening.duration());
    for (const TimelineSegment& s : timeline.segments) durations.push_back(s.duration());
    durations.push_back(timeline.closing.duration());

    auto assign = [&](Transition& type, double& tdur, std::size_t boundary) {
        type = kAnimations[rng.next_below(4)];
        tdur = std::min({cfg.transition_duration, durations[boundary - 1] / 2.0,
                         durations[boundary] / 2.0});
    };
    for (std::size_t i = 0; i < timeline.segments.size(); ++i)
        assign(timeline.segments[i].transition_in,
               timeline.segments[i].transition_duration, i + 1);
    assign(timeline.closing.transition_in, timeline.closing.transition_duration,
           timeline.segments.size() + 1);

    return timeline;
}

// ---------------------------------------------------------------------------
// Serialization

void write_timeline(const Timeline& timeline, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write timeline: " + path.string());
    char buf[512];

    // %.17g survives the text round trip bit-exactly, which keeps a resumed
    // render byte-identical to the original one.
    out << "music " << timeline.music.path.string() << "\n";
    std::snprintf(buf, sizeof(buf), "tempo %.17g", timeline.tempo);
    out << buf << "\n";
    std::snprintf(buf, sizeof(buf), "total %.17g", timeline.total_duration);
    out << buf << "\n";

    auto card_line = [&](const char* tag, const TitleCard& card) {
        std::snprintf(buf, sizeof(buf), "%s %.17g %.17g %s %.17g %016llx", tag, card.start,
                      card.end, transition_name(card.transition_in),
                      card.transition_duration,
                      static_cast<unsigned long long>(fnv1a64(card.text)));
        out << buf << "\n";
    };
    card_line("opening", timeline.opening);
    for (const TimelineSegment& s : timeline.segments) {
        std::snprintf(buf, sizeof(buf),
                      "segment %d %.17g %.17g %s %.17g %.17g %.17g %016llx", s.asset_id,
                      s.start, s.end, transition_name(s.transition_in),
                      s.transition_duration, s.trim_offset, s.trim_length,
                      static_cast<unsigned long long>(fnv1a64(s.caption)));
        out << buf << "\n";
    }
    card_line("closing", timeline.closing);
}

Timeline read_timeline(const std::filesystem::path& path, const DirectorPlan& plan,
                       const std::vector<MediaAsset>& assets, const MusicTrack& music,
                       const TimelineConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open timeline: " + path.string());

    std::map<int, const MediaAsset*> by_id;
    for (const MediaAsset& a : assets) by_id[a.id] = &a;

    Timeline timeline;
    timeline.music = music;

    auto check_hash = [&](const std::string& text, const std::string& hex,
                          const std::string& what) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(text)));
        if (hex != buf)
            throw Error("timeline does not match plan (" + what + " hash mismatch)");
    };

    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "music" || tag == "tempo") {
            if (tag == "tempo") ss >> timeline.tempo;
        } else if (tag == "total") {
            ss >> timeline.total_duration;
        } else if (tag == "opening" || tag == "closing") {
            TitleCard card;
            std::string trans, hash;
            ss >> card.start >> card.end >> trans >> card.transition_duration >> hash;
            card.transition_in = transition_from_name(trans);
            card.text = tag == "opening" ? plan.title : plan.closing;
            check_hash(card.text, hash, tag);
            (tag == "opening" ? timeline.opening : timeline.closing) = card;
        } else if (tag == "segment") {
            TimelineSegment seg;
            std::string trans, hash;
            ss >> seg.asset_id >> seg.start >> seg.end >> trans >>
                seg.transition_duration >> seg.trim_offset >> seg.trim_length >> hash;
            seg.transition_in = transition_from_name(trans);
            auto it = by_id.find(seg.asset_id);
            if (it == by_id.end())
                throw Error("timeline references unknown asset " +
                            std::to_string(seg.asset_id));
            auto cap = plan.captions.find(seg.asset_id);
            seg.caption = cap != plan.captions.end() ? cap->second : std::string();
            check_hash(seg.caption, hash,
                       "segment " + std::to_string(seg.asset_id) + " caption");
            seg.placement = fit_material(it->second->height, it->second->width,
                                         cfg.target_height, cfg.target_width);
            timeline.segments.push_back(std::move(seg));
        } else {
            throw Error("unknown timeline record: " + tag);
        }
    }
    if (timeline.total_duration <= 0.0)
        throw Error("timeline missing total duration: " + path.string());
    return timeline;
}

} // namespace director
