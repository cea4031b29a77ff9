#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "director/adapters.hpp"
#include "director/assets.hpp"
#include "director/keyframe.hpp"

namespace director {

// The fixed question posed to the captioner for every image and keyframe.
inline constexpr const char* kCaptionQuestion = "What is the image about";

// Placeholder used when the captioner fails on a single asset.
inline constexpr const char* kCaptionFallback = "an unrecognized scene";

struct AssetDescription {
    int asset_id = 0;
    AssetKind kind = AssetKind::Image;
    // Images: exactly one line. Videos: one line per keyframe, each carrying
    // its "key frame k:" label.
    std::vector<std::string> lines;
};

struct DirectorPlan {
    std::vector<int> order; // permutation of asset ids after repair
    std::string title;
    std::map<int, std::string> captions;
    std::string closing;
    std::string music_name;
    Warnings warnings;
};

using FrameProvider = std::function<Frame(const MediaAsset&, int frame_index)>;

std::vector<AssetDescription> describe_assets(
    const std::vector<MediaAsset>& assets,
    const std::map<int, std::vector<VideoSegment>>& segments_by_asset,
    CaptionAdapter& captioner, const FrameProvider& frame_at, Warnings& warnings);

// Task description + input descriptions + detailed requirements. Empty slots
// drop their carrier sentence (the theme drops just its clause so the core
// instruction survives).
std::string build_prompt(const UserRequirements& reqs,
                         const std::vector<AssetDescription>& descriptions);

// Runs the chat adapter; persists prompt and raw response under log_dir when
// given. Fatal on unreachable adapter or empty response.
std::string plan_story(const std::string& prompt, ChatAdapter& chat,
                       const std::filesystem::path& log_dir = {});

// Tolerant parser with repair: the result's order is always a true
// permutation of expected_ids. Throws only when the Order or Captions
// section is missing outright.
DirectorPlan parse_plan(const std::string& response, const std::vector<int>& expected_ids);

// Serializes a plan in the response format parse_plan understands
// (parse_plan(format_plan_response(p)) reproduces p). Also used by the mock
// chat adapter.
std::string format_plan_response(const DirectorPlan& plan);

} // namespace director
