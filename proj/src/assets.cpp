#include "director/assets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>

#include "director/image_io.hpp"
#include "director/strings.hpp"

namespace director {

namespace fs = std::filesystem;

StyleChoice parse_style_choice(const std::string& name) {
    std::string n = to_lower(trim(name));
    if (n.empty() || n == "none" || n == "identity") return StyleChoice::None;
    if (n == "gray" || n == "grey" || n == "grayscale") return StyleChoice::Gray;
    if (n == "sepia") return StyleChoice::Sepia;
    if (n == "external") return StyleChoice::External;
    throw Error("unknown style: " + name);
}

std::string style_choice_name(StyleChoice style) {
    switch (style) {
        case StyleChoice::None: return "none";
        case StyleChoice::Gray: return "gray";
        case StyleChoice::Sepia: return "sepia";
        case StyleChoice::External: return "external";
    }
    return "none";
}

namespace {

struct DirectoryMeta {
    double fps = 0.0;
    double duration = 0.0;
    int frames = 0;
    int first_index = 0;
};

const char* kImageExtensions[] = {".ppm", ".pgm"};
const char* kContainerExtensions[] = {".mp4", ".avi", ".mov", ".mkv", ".webm", ".m4v"};

bool has_extension(const fs::path& p, const char* const* list, std::size_t n) {
    std::string ext = to_lower(p.extension().string());
    for (std::size_t i = 0; i < n; ++i) {
        if (ext == list[i]) return true;
    }
    return false;
}

bool is_image_file(const fs::path& p) {
    return has_extension(p, kImageExtensions, std::size(kImageExtensions));
}

bool is_container_file(const fs::path& p) {
    return has_extension(p, kContainerExtensions, std::size(kContainerExtensions));
}

std::map<std::string, std::string> read_key_values(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open metadata: " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        kv[to_lower(trim(line.substr(0, eq)))] = trim(line.substr(eq + 1));
    }
    return kv;
}

DirectoryMeta read_directory_meta(const fs::path& dir) {
    fs::path meta_path = dir / "meta";
    if (!fs::exists(meta_path))
        throw Error("directory asset missing meta sidecar: " + dir.string());
    auto kv = read_key_values(meta_path);

    DirectoryMeta meta;
    auto it = kv.find("fps");
    if (it == kv.end()) throw Error("meta sidecar missing fps: " + dir.string());
    meta.fps = std::strtod(it->second.c_str(), nullptr);
    if (meta.fps <= 0.0) throw Error("meta sidecar has invalid fps: " + dir.string());

    if (auto f = kv.find("frames"); f != kv.end()) meta.frames = std::atoi(f->second.c_str());
    if (auto d = kv.find("duration"); d != kv.end())
        meta.duration = std::strtod(d->second.c_str(), nullptr);

    meta.first_index = fs::exists(frame_file_path(dir, 0)) ? 0 : 1;
    if (!fs::exists(frame_file_path(dir, meta.first_index)))
        throw Error("directory asset has no frames: " + dir.string());

    if (meta.frames <= 0) {
        if (meta.duration > 0.0) {
            meta.frames = static_cast<int>(std::lround(meta.duration * meta.fps));
        } else {
            int count = 0;
            while (fs::exists(frame_file_path(dir, meta.first_index + count))) ++count;
            meta.frames = count;
        }
    }
    if (meta.duration <= 0.0) meta.duration = meta.frames / meta.fps;
    return meta;
}

MediaAsset probe_directory_asset(const fs::path& dir) {
    DirectoryMeta meta = read_directory_meta(dir);
    auto [w, h] = read_ppm_dimensions(frame_file_path(dir, meta.first_index));
    MediaAsset asset;
    asset.kind = AssetKind::Video;
    asset.source_path = dir;
    asset.width = w;
    asset.height = h;
    asset.duration = meta.duration;
    asset.frame_rate = meta.fps;
    return asset;
}

MediaAsset probe_image_asset(const fs::path& path) {
    auto [w, h] = read_ppm_dimensions(path);
    MediaAsset asset;
    asset.kind = AssetKind::Image;
    asset.source_path = path;
    asset.width = w;
    asset.height = h;
    return asset;
}

fs::path decode_container(const fs::path& input, const LoadOptions& opts,
                          const fs::path& cache_root) {
    if (opts.decode_cmd.empty())
        throw Error("container input requires a decode command: " + input.string());

    fs::path out_dir =
        cache_root / (input.stem().string() + "_" +
                      std::to_string(fnv1a64(input.string()) & 0xFFFFFF));
    if (!fs::exists(out_dir / "meta")) {
        fs::create_directories(out_dir);
        std::string cmd = opts.decode_cmd;
        auto replace_all = [](std::string& s, const std::string& from, const std::string& to) {
            for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos;
                 pos += to.size())
                s.replace(pos, from.size(), to);
        };
        replace_all(cmd, "{in}", input.string());
        replace_all(cmd, "{outdir}", out_dir.string());
        int rc = std::system(cmd.c_str());
        if (rc != 0)
            throw Error("decode command failed (" + std::to_string(rc) + "): " + cmd);
    }
    return out_dir;
}

std::uint64_t parse_seed(const std::string& text) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw Error("invalid seed value: " + text);
    return value;
}

} // namespace

std::filesystem::path frame_file_path(const fs::path& dir, int index) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%06d.ppm", index);
    return dir / name;
}

ProjectManifest load_manifest(const fs::path& path, const LoadOptions& opts) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open manifest: " + path.string());

    ProjectManifest manifest;
    manifest.manifest_path = path;
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    fs::path cache_root = opts.cache_dir.empty()
                              ? fs::path(path.string() + ".cache")
                              : opts.cache_dir;

    UserRequirements& reqs = manifest.requirements;
    std::vector<fs::path> asset_paths;

    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = to_lower(trim(line.substr(1, line.size() - 2)));
            if (section != "requirements" && section != "assets" && section != "music")
                manifest.warnings.push_back("unknown manifest section [" + section + "]");
            continue;
        }
        if (section == "assets") {
            fs::path p = line;
            if (p.is_relative()) p = base / p;
            asset_paths.push_back(p);
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            manifest.warnings.push_back("ignored malformed line " + std::to_string(line_no) +
                                        ": " + line);
            continue;
        }
        std::string key = to_lower(trim(line.substr(0, eq)));
        std::string value = trim(line.substr(eq + 1));
        if (section == "requirements") {
            if (key == "theme") reqs.theme = value;
            else if (key == "time") reqs.time = value;
            else if (key == "location") reqs.location = value;
            else if (key == "requirement") reqs.requirement = value;
            else if (key == "width") reqs.target_width = std::atoi(value.c_str());
            else if (key == "height") reqs.target_height = std::atoi(value.c_str());
            else if (key == "fps") reqs.frame_rate = std::strtod(value.c_str(), nullptr);
            else if (key == "seed") reqs.seed = parse_seed(value);
            else if (key == "style") reqs.style = parse_style_choice(value);
            else manifest.warnings.push_back("unknown requirements key: " + key);
        } else if (section == "music") {
            if (key == "library_path") {
                fs::path p = value;
                if (p.is_relative()) p = base / p;
                manifest.music_library_path = p;
            } else {
                manifest.warnings.push_back("unknown music key: " + key);
            }
        } else {
            manifest.warnings.push_back("key outside a known section: " + key);
        }
    }

    if (asset_paths.empty()) throw Error("empty project: manifest lists no assets");
    if (reqs.target_width <= 0 || reqs.target_height <= 0 ||
        reqs.target_width % 2 != 0 || reqs.target_height % 2 != 0)
        throw Error("target dimensions must be positive and even");
    if (reqs.frame_rate <= 0.0) throw Error("frame rate must be positive");

    std::vector<MediaAsset> images;
    std::vector<MediaAsset> videos;
    for (const fs::path& p : asset_paths) {
        if (!fs::exists(p)) throw Error("asset not found: " + p.string());
        if (fs::is_directory(p)) {
            videos.push_back(probe_directory_asset(p));
        } else if (is_image_file(p)) {
            images.push_back(probe_image_asset(p));
        } else if (is_container_file(p)) {
            fs::path decoded = decode_container(p, opts, cache_root);
            MediaAsset asset = probe_directory_asset(decoded);
            videos.push_back(asset);
        } else {
            throw Error("unreadable media (unsupported format): " + p.string());
        }
    }

    int next_id = 1;
    for (MediaAsset& a : images) {
        a.id = next_id++;
        manifest.assets.push_back(a);
    }
    for (MediaAsset& a : videos) {
        a.id = next_id++;
        manifest.assets.push_back(a);
    }
    return manifest;
}

DecodeResult decode_frames(const MediaAsset& asset) {
    DecodeResult result;
    if (asset.kind == AssetKind::Image) {
        result.frames.push_back(read_ppm(asset.source_path));
        return result;
    }

    DirectoryMeta meta = read_directory_meta(asset.source_path);
    int declared = static_cast<int>(std::lround(asset.duration * asset.frame_rate));
    result.frames.reserve(static_cast<std::size_t>(std::max(declared, 0)));
    for (int i = 0; i < declared; ++i) {
        fs::path p = frame_file_path(asset.source_path, meta.first_index + i);
        try {
            result.frames.push_back(read_ppm(p));
        } catch (const Error&) {
            result.warnings.push_back("truncated stream in " + asset.source_path.string() +
                                      ": decoded " + std::to_string(i) + " of " +
                                      std::to_string(declared) + " frames");
            break;
        }
    }
    return result;
}

Frame decode_frame_at(const MediaAsset& asset, int frame_index) {
    if (asset.kind == AssetKind::Image) return read_ppm(asset.source_path);
    DirectoryMeta meta = read_directory_meta(asset.source_path);
    return read_ppm(frame_file_path(asset.source_path, meta.first_index + frame_index));
}

} // namespace director
