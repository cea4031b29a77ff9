#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "director/assets.hpp"
#include "director/music.hpp"
#include "director/narration.hpp"

namespace director {

enum class FitMode { FitWidthLimited, FitHeightLimited, ExactFit };

// Resolved geometry for one asset inside the target frame: a foreground at
// the source aspect plus a blurred cover-fill background (absent for
// ExactFit).
struct Placement {
    int fg_width = 0;
    int fg_height = 0;
    int fg_offset_x = 0;
    int fg_offset_y = 0;
    int bg_width = 0;  // pre-crop
    int bg_height = 0; // pre-crop
    double bg_blur_sigma = 0.0;
    FitMode mode = FitMode::ExactFit;
};

// Two-scale fit: M1 = full target height, M2 = full target width; whichever
// fits inside the target becomes the foreground and the other, blurred and
// center-cropped, the background. Arguments are heights first.
Placement fit_material(int src_height, int src_width, int target_height, int target_width);

enum class Transition { Cut, CrossfadeIn, CrossfadeOut, TranslateUp, TranslateLateral };

const char* transition_name(Transition t);
Transition transition_from_name(const std::string& name);

struct TitleCard {
    std::string text;
    double start = 0.0;
    double end = 0.0;
    Transition transition_in = Transition::Cut;
    double transition_duration = 0.0;

    double duration() const { return end - start; }
};

struct TimelineSegment {
    int asset_id = 0;
    double start = 0.0;
    double end = 0.0;
    std::string caption;
    Transition transition_in = Transition::Cut;
    double transition_duration = 0.0;
    Placement placement;
    double trim_offset = 0.0; // seconds into the source clip
    double trim_length = 0.0; // seconds of source played (0 for images)

    double duration() const { return end - start; }
};

struct Timeline {
    TitleCard opening;
    std::vector<TimelineSegment> segments;
    TitleCard closing;
    MusicTrack music;
    double tempo = 0.0;
    double total_duration = 0.0;
};

struct TimelineConfig {
    double card_duration = 3.0;
    double image_duration = 4.0; // nominal pre-snap duration of stills
    double min_duration = 1.5;
    double max_hold = 0.5; // last-frame hold allowed past a clip's end
    double max_trim = 2.0; // tail trim allowed when re-snapping long clips
    double transition_duration = 0.5;
    std::uint64_t seed = 0;
    int target_width = 1280;
    int target_height = 720;
};

// Lays the plan's assets onto the beat grid: nominal ends snap to the
// nearest beat, a minimum duration is enforced, video tails are trimmed or
// held, and every boundary gets a seeded random switching animation. When
// the cut runs past the track the grid repeats with the looped music.
Timeline assemble_timeline(const DirectorPlan& plan, const std::vector<MediaAsset>& assets,
                           const BeatGrid& beats, const MusicTrack& music,
                           const TimelineConfig& cfg);

// Edit-decision text file: one line per segment with caption hashes. The
// reader reconstructs placements and captions from the plan and assets and
// refuses mismatched hashes.
void write_timeline(const Timeline& timeline, const std::filesystem::path& path);
Timeline read_timeline(const std::filesystem::path& path, const DirectorPlan& plan,
                       const std::vector<MediaAsset>& assets, const MusicTrack& music,
                       const TimelineConfig& cfg);

} // namespace director
