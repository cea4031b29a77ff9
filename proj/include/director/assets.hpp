#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "director/common.hpp"
#include "director/frame.hpp"

namespace director {

enum class AssetKind { Image, Video };

enum class StyleChoice { None, Gray, Sepia, External };

StyleChoice parse_style_choice(const std::string& name);
std::string style_choice_name(StyleChoice style);

struct MediaAsset {
    int id = 0; // 1-based, images first then videos
    AssetKind kind = AssetKind::Image;
    std::filesystem::path source_path;
    int width = 0;
    int height = 0;
    double duration = 0.0;   // seconds, videos only
    double frame_rate = 0.0; // fps, videos only
};

struct UserRequirements {
    std::string theme;
    std::string time;
    std::string location;
    std::string requirement;
    int target_width = 1280;
    int target_height = 720;
    double frame_rate = 24.0;
    std::uint64_t seed = 0;
    StyleChoice style = StyleChoice::None;
};

struct ProjectManifest {
    std::filesystem::path manifest_path;
    std::vector<MediaAsset> assets; // ids 1..n+m, images first
    UserRequirements requirements;
    std::filesystem::path music_library_path;
    Warnings warnings;
};

struct LoadOptions {
    // Shell template for container inputs, with {in} and {outdir} placeholders.
    // Empty means container files are rejected.
    std::string decode_cmd;
    std::filesystem::path cache_dir; // defaults to "<manifest>.cache"
};

// Parses the manifest and probes every referenced asset. Images are numbered
// before videos regardless of their interleaving in the [assets] section.
ProjectManifest load_manifest(const std::filesystem::path& path, const LoadOptions& opts = {});

struct DecodeResult {
    std::vector<Frame> frames;
    Warnings warnings;
};

// Image assets yield exactly one frame; video assets yield every frame in
// order. A truncated stream yields the frames decoded so far plus a warning.
DecodeResult decode_frames(const MediaAsset& asset);

// Single-frame access without decoding the whole asset.
Frame decode_frame_at(const MediaAsset& asset, int frame_index);

// Directory-asset frame naming, shared with the renderer's output layout.
std::filesystem::path frame_file_path(const std::filesystem::path& dir, int index);

} // namespace director
