#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "director/adapters.hpp"
#include "director/timeline.hpp"

namespace director {

enum class OutputKind { FrameDirectory, ContainerFile };

struct RenderConfig {
    int width = 1280;
    int height = 720;
    double frame_rate = 24.0;
    double blur_sigma = -1.0; // < 0: use each placement's width/64 default
    OutputKind output = OutputKind::FrameDirectory;
    std::string transcode_cmd;          // template with {frames} {audio} {fps} {out}
    std::filesystem::path container_path;
    int threads = 0; // 0: hardware concurrency
};

// Separable Gaussian, kernel radius ceil(3*sigma), clamp-to-edge borders.
// sigma <= 0 returns the input untouched.
Frame gaussian_blur(const Frame& frame, double sigma);

// Built-in style transforms standing in for external stylization networks.
std::unique_ptr<StyleTransform> make_style(StyleChoice choice,
                                           const std::string& external_spec = "");

// Text rasterization (fixed-metrics bitmap font).
int text_width(const std::string& text, int scale);
void draw_text(Frame& frame, const std::string& text, int x, int y, int scale,
               std::uint8_t r, std::uint8_t g, std::uint8_t b);
// White fill with a dark outline, used for captions and cards.
void draw_outlined_text(Frame& frame, const std::string& text, int x, int y, int scale);

// Caption-style glyph scale for a target frame height (font size height/18).
int caption_scale(int frame_height);

// Decoded-frame access for the compositor: decodes each asset once and keeps
// it; safe to share across render workers.
class FrameSource {
public:
    explicit FrameSource(const std::vector<MediaAsset>& assets);

    const MediaAsset& asset(int id) const;
    // Source frame at `seconds` into the clip (clamped; images ignore time).
    const Frame& frame_at_time(int asset_id, double seconds);

private:
    const std::vector<Frame>& frames_for(int asset_id);

    std::map<int, MediaAsset> assets_;
    std::map<int, std::vector<Frame>> cache_;
    std::mutex mutex_;
};

// Rasterizes one timeline instant: active segment (plus its neighbor inside
// a transition window), placement, caption, and transition blend. Pure in
// (timeline, t).
Frame compose_frame(const Timeline& timeline, double t, FrameSource& source,
                    const RenderConfig& cfg);

struct RenderResult {
    std::filesystem::path frames_dir;
    std::filesystem::path container_path; // empty unless a container was written
    int frame_count = 0;
    Warnings warnings;
};

// Emits round(total_duration * fps) frames plus the muxed audio track and a
// meta sidecar. The style transform runs on every composited frame; a failing
// external style falls back to identity per frame with a warning.
RenderResult render_video(const Timeline& timeline, const RenderConfig& cfg,
                          StyleTransform& style, FrameSource& source,
                          const std::filesystem::path& out_dir);

// Music trimmed or looped (1 s crossfade at the seam) to the given length.
AudioBuffer render_audio(const AudioBuffer& track, double total_duration);

} // namespace director
