#include "director/render.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "director/font8x8.hpp"
#include "director/image_io.hpp"

namespace director {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Gaussian blur

Frame gaussian_blur(const Frame& frame, double sigma) {
    if (sigma <= 0.0 || frame.empty()) return frame;

    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        kernel[i + radius] = v;
        sum += v;
    }
    for (double& v : kernel) v /= sum;

    const int w = frame.width;
    const int h = frame.height;
    std::vector<float> tmp(static_cast<std::size_t>(w) * h * 3);

    // Horizontal pass, clamp-to-edge.
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc[3] = {0, 0, 0};
            for (int k = -radius; k <= radius; ++k) {
                int xx = std::clamp(x + k, 0, w - 1);
                const std::uint8_t* p = frame.at(xx, y);
                double kv = kernel[k + radius];
                acc[0] += kv * p[0];
                acc[1] += kv * p[1];
                acc[2] += kv * p[2];
            }
            float* out = tmp.data() + (static_cast<std::size_t>(y) * w + x) * 3;
            out[0] = static_cast<float>(acc[0]);
            out[1] = static_cast<float>(acc[1]);
            out[2] = static_cast<float>(acc[2]);
        }
    }

    // Vertical pass.
    Frame result(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc[3] = {0, 0, 0};
            for (int k = -radius; k <= radius; ++k) {
                int yy = std::clamp(y + k, 0, h - 1);
                const float* p = tmp.data() + (static_cast<std::size_t>(yy) * w + x) * 3;
                double kv = kernel[k + radius];
                acc[0] += kv * p[0];
                acc[1] += kv * p[1];
                acc[2] += kv * p[2];
            }
            std::uint8_t* out = result.at(x, y);
            for (int c = 0; c < 3; ++c)
                out[c] = static_cast<std::uint8_t>(
                    std::lround(std::clamp(acc[c], 0.0, 255.0)));
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Styles

namespace {

class IdentityStyle : public StyleTransform {
public:
    Frame apply(const Frame& frame) override { return frame; }
    std::string name() const override { return "none"; }
};

class GrayStyle : public StyleTransform {
public:
    Frame apply(const Frame& frame) override {
        Frame out = frame;
        for (std::size_t i = 0; i + 2 < out.pixels.size(); i += 3) {
            auto y = static_cast<std::uint8_t>(std::lround(std::clamp(
                luma601(out.pixels[i], out.pixels[i + 1], out.pixels[i + 2]), 0.0, 255.0)));
            out.pixels[i] = y;
            out.pixels[i + 1] = y;
            out.pixels[i + 2] = y;
        }
        return out;
    }
    std::string name() const override { return "gray"; }
};

class SepiaStyle : public StyleTransform {
public:
    Frame apply(const Frame& frame) override {
        Frame out = frame;
        for (std::size_t i = 0; i + 2 < out.pixels.size(); i += 3) {
            double r = out.pixels[i], g = out.pixels[i + 1], b = out.pixels[i + 2];
            double nr = 0.393 * r + 0.769 * g + 0.189 * b;
            double ng = 0.349 * r + 0.686 * g + 0.168 * b;
            double nb = 0.272 * r + 0.534 * g + 0.131 * b;
            out.pixels[i] = static_cast<std::uint8_t>(std::lround(std::min(nr, 255.0)));
            out.pixels[i + 1] = static_cast<std::uint8_t>(std::lround(std::min(ng, 255.0)));
            out.pixels[i + 2] = static_cast<std::uint8_t>(std::lround(std::min(nb, 255.0)));
        }
        return out;
    }
    std::string name() const override { return "sepia"; }
};

} // namespace

std::unique_ptr<StyleTransform> make_style(StyleChoice choice,
                                           const std::string& external_spec) {
    switch (choice) {
        case StyleChoice::None: return std::make_unique<IdentityStyle>();
        case StyleChoice::Gray: return std::make_unique<GrayStyle>();
        case StyleChoice::Sepia: return std::make_unique<SepiaStyle>();
        case StyleChoice::External:
            if (external_spec.empty())
                throw Error("external style requires an adapter endpoint");
            return make_external_style(external_spec);
    }
    return std::make_unique<IdentityStyle>();
}

// ---------------------------------------------------------------------------
// Text

int text_width(const std::string& text, int scale) {
    return static_cast<int>(text.size()) * 8 * scale;
}

int caption_scale(int frame_height) {
    return std::max(1, static_cast<int>(std::lround(frame_height / 18.0 / 8.0)));
}

void draw_text(Frame& frame, const std::string& text, int x, int y, int scale,
               std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    int pen_x = x;
    for (char ch : text) {
        unsigned code = static_cast<unsigned char>(ch);
        if (code < 0x20 || code > 0x7F) code = '?';
        const unsigned char* glyph = kFont8x8[code - 0x20];
        for (int row = 0; row < 8; ++row) {
            unsigned char bits = glyph[row];
            if (!bits) continue;
            for (int col = 0; col < 8; ++col) {
                if (!(bits & (1u << col))) continue;
                for (int sy = 0; sy < scale; ++sy) {
                    int py = y + row * scale + sy;
                    if (py < 0 || py >= frame.height) continue;
                    for (int sx = 0; sx < scale; ++sx) {
                        int px = pen_x + col * scale + sx;
                        if (px < 0 || px >= frame.width) continue;
                        std::uint8_t* p = frame.at(px, py);
                        p[0] = r;
                        p[1] = g;
                        p[2] = b;
                    }
                }
            }
        }
        pen_x += 8 * scale;
    }
}

void draw_outlined_text(Frame& frame, const std::string& text, int x, int y, int scale) {
    const int outline = 2;
    for (int dy = -outline; dy <= outline; ++dy) {
        for (int dx = -outline; dx <= outline; ++dx) {
            if (dx == 0 && dy == 0) continue;
            draw_text(frame, text, x + dx, y + dy, scale, 16, 16, 16);
        }
    }
    draw_text(frame, text, x, y, scale, 255, 255, 255);
}

namespace {

std::vector<std::string> wrap_text(const std::string& text, int max_width, int scale) {
    std::vector<std::string> words;
    std::string cur;
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\n') {
            if (!cur.empty()) words.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) words.push_back(cur);

    std::vector<std::string> lines;
    std::string line;
    for (const std::string& word : words) {
        std::string candidate = line.empty() ? word : line + " " + word;
        if (!line.empty() && text_width(candidate, scale) > max_width) {
            lines.push_back(line);
            line = word;
        } else {
            line = candidate;
        }
    }
    if (!line.empty()) lines.push_back(line);
    return lines;
}

void draw_caption_block(Frame& frame, const std::string& text) {
    if (text.empty()) return;
    const int scale = caption_scale(frame.height);
    const int margin = static_cast<int>(std::lround(frame.height * 0.05));
    const int line_height = 8 * scale + scale; // one glyph row plus leading
    auto lines = wrap_text(text, frame.width * 9 / 10, scale);
    int y = frame.height - margin - static_cast<int>(lines.size()) * line_height;
    for (const std::string& line : lines) {
        int x = (frame.width - text_width(line, scale)) / 2;
        draw_outlined_text(frame, line, x, y, scale);
        y += line_height;
    }
}

Frame render_card(const std::string& text, int width, int height) {
    Frame card = make_solid(width, height, 18, 18, 24);
    if (text.empty()) return card;
    const int scale = std::max(1, static_cast<int>(std::lround(height / 12.0 / 8.0)));
    const int line_height = 8 * scale + scale;
    auto lines = wrap_text(text, width * 4 / 5, scale);
    int y = (height - static_cast<int>(lines.size()) * line_height) / 2;
    for (const std::string& line : lines) {
        int x = (width - text_width(line, scale)) / 2;
        draw_outlined_text(card, line, x, y, scale);
        y += line_height;
    }
    return card;
}

} // namespace

// ---------------------------------------------------------------------------
// FrameSource

FrameSource::FrameSource(const std::vector<MediaAsset>& assets) {
    for (const MediaAsset& a : assets) assets_[a.id] = a;
}

const MediaAsset& FrameSource::asset(int id) const {
    auto it = assets_.find(id);
    if (it == assets_.end()) throw Error("unknown asset id " + std::to_string(id));
    return it->second;
}

const std::vector<Frame>& FrameSource::frames_for(int asset_id) {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(asset_id);
        if (it != cache_.end()) return it->second;
    }
    DecodeResult decoded = decode_frames(asset(asset_id));
    if (decoded.frames.empty())
        throw Error("asset " + std::to_string(asset_id) + " decoded no frames");
    std::lock_guard<std::mutex> lock(mutex_);
    auto [it, inserted] = cache_.try_emplace(asset_id, std::move(decoded.frames));
    (void)inserted;
    return it->second;
}

const Frame& FrameSource::frame_at_time(int asset_id, double seconds) {
    const MediaAsset& a = asset(asset_id);
    const std::vector<Frame>& frames = frames_for(asset_id);
    if (a.kind == AssetKind::Image) return frames.front();
    int index = static_cast<int>(std::floor(seconds * a.frame_rate + 1e-9));
    index = std::clamp(index, 0, static_cast<int>(frames.size()) - 1);
    return frames[static_cast<std::size_t>(index)];
}

// ---------------------------------------------------------------------------
// Compositor

namespace {

struct Element {
    bool is_card = false;
    std::size_t segment_index = 0; // valid when !is_card
    const TitleCard* card = nullptr;
    double start = 0.0;
    double end = 0.0;
    Transition transition_in = Transition::Cut;
    double transition_duration = 0.0;
};

std::vector<Element> build_elements(const Timeline& timeline) {
    std::vector<Element> els;
    Element opening;
    opening.is_card = true;
    opening.card = &timeline.opening;
    opening.start = timeline.opening.start;
    opening.end = timeline.opening.end;
    opening.transition_in = timeline.opening.transition_in;
    opening.transition_duration = timeline.opening.transition_duration;
    els.push_back(opening);
    for (std::size_t i = 0; i < timeline.segments.size(); ++i) {
        const TimelineSegment& s = timeline.segments[i];
        Element e;
        e.segment_index = i;
        e.start = s.start;
        e.end = s.end;
        e.transition_in = s.transition_in;
        e.transition_duration = s.transition_duration;
        els.push_back(e);
    }
    Element closing;
    closing.is_card = true;
    closing.card = &timeline.closing;
    closing.start = timeline.closing.start;
    closing.end = timeline.closing.end;
    closing.transition_in = timeline.closing.transition_in;
    closing.transition_duration = timeline.closing.transition_duration;
    els.push_back(closing);
    return els;
}

double ease_in_out(double a) { return a * a * (3.0 - 2.0 * a); }

Frame blend_transition(const Frame& prev, const Frame& next, Transition type,
                       double alpha) {
    alpha = std::clamp(alpha, 0.0, 1.0);
    switch (type) {
        case Transition::Cut:
            return alpha < 0.5 ? prev : next;
        case Transition::CrossfadeIn:
            return blend(prev, next, alpha);
        case Transition::CrossfadeOut: {
            Frame black = make_solid(prev.width, prev.height, 0, 0, 0);
            if (alpha < 0.5) return blend(prev, black, alpha * 2.0);
            return blend(black, next, alpha * 2.0 - 1.0);
        }
        case Transition::TranslateUp: {
            int h = prev.height;
            int shift = static_cast<int>(std::lround(ease_in_out(alpha) * h));
            shift = std::clamp(shift, 0, h);
            Frame out(prev.width, h);
            for (int y = 0; y < h - shift; ++y) {
                const std::uint8_t* src = prev.at(0, y + shift);
                std::copy(src, src + static_cast<std::size_t>(prev.width) * 3, out.at(0, y));
            }
            for (int y = h - shift; y < h; ++y) {
                const std::uint8_t* src = next.at(0, y - (h - shift));
                std::copy(src, src + static_cast<std::size_t>(prev.width) * 3, out.at(0, y));
            }
            return out;
        }
        case Transition::TranslateLateral: {
            int w = prev.width;
            int shift = static_cast<int>(std::lround(ease_in_out(alpha) * w));
            shift = std::clamp(shift, 0, w);
            Frame out(w, prev.height);
            for (int y = 0; y < prev.height; ++y) {
                const std::uint8_t* prow = prev.at(0, y);
                const std::uint8_t* nrow = next.at(0, y);
                std::uint8_t* orow = out.at(0, y);
                if (shift < w)
                    std::copy(prow + static_cast<std::size_t>(shift) * 3,
                              prow + static_cast<std::size_t>(w) * 3, orow);
                if (shift > 0)
                    std::copy(nrow, nrow + static_cast<std::size_t>(shift) * 3,
                              orow + static_cast<std::size_t>(w - shift) * 3);
            }
            return out;
        }
    }
    return next;
}

class Compositor {
public:
    Compositor(const Timeline& timeline, const RenderConfig& cfg, FrameSource& source)
        : timeline_(timeline), cfg_(cfg), source_(source),
          elements_(build_elements(timeline)) {}

    Frame at(double t) {
        if (t < 0.0 || t >= timeline_.total_duration + 1e-9)
            throw Error("compose time out of range: " + std::to_string(t));

        std::size_t idx = 0;
        for (std::size_t i = 0; i < elements_.size(); ++i) {
            if (t >= elements_[i].start - 1e-12) idx = i;
        }
        const Element& el = elements_[idx];

        // Transition window straddles each boundary symmetrically.
        if (idx > 0 && el.transition_duration > 0.0 &&
            t < el.start + el.transition_duration / 2.0) {
            double alpha =
                (t - (el.start - el.transition_duration / 2.0)) / el.transition_duration;
            return blend_transition(base_frame(idx - 1, t), base_frame(idx, t),
                                    el.transition_in, alpha);
        }
        if (idx + 1 < elements_.size()) {
            const Element& next = elements_[idx + 1];
            if (next.transition_duration > 0.0 &&
                t >= next.start - next.transition_duration / 2.0) {
                double alpha = (t - (next.start - next.transition_duration / 2.0)) /
                               next.transition_duration;
                return blend_transition(base_frame(idx, t), base_frame(idx + 1, t),
                                        next.transition_in, alpha);
            }
        }
        return base_frame(idx, t);
    }

private:
    // Cache key: element index and the source frame index it resolves to.
    Frame base_frame(std::size_t idx, double t) {
        const Element& el = elements_[idx];
        long frame_index = 0;
        if (!el.is_card) {
            const TimelineSegment& seg = timeline_.segments[el.segment_index];
            const MediaAsset& asset = source_.asset(seg.asset_id);
            if (asset.kind == AssetKind::Video)
                frame_index = static_cast<long>(
                    std::floor(source_time(seg, t) * asset.frame_rate + 1e-9));
        }
        std::uint64_t key = (static_cast<std::uint64_t>(idx) << 32) ^
                            static_cast<std::uint64_t>(frame_index + 1);
        {
            std::lock_guard<std::mutex> lock(cache_mutex_);
            auto it = cache_.find(key);
            if (it != cache_.end()) return it->second;
        }
        Frame composed = el.is_card ? render_card(el.card->text, cfg_.width, cfg_.height)
                                    : compose_segment(el, t);
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto [it, inserted] = cache_.try_emplace(key, std::move(composed));
        (void)inserted;
        return it->second;
    }

    double source_time(const TimelineSegment& seg, double t) const {
        double rel = std::max(0.0, t - seg.start);
        if (seg.trim_length > 0.0) rel = std::min(rel, seg.trim_length - 1e-6);
        return seg.trim_offset + rel;
    }

    Frame compose_segment(const Element& el, double t) {
        const TimelineSegment& seg = timeline_.segments[el.segment_index];
        const Placement& p = seg.placement;
        const Frame& src = source_.frame_at_time(seg.asset_id, source_time(seg, t));

        Frame base;
        if (p.mode == FitMode::ExactFit) {
            base = resize_bilinear(src, cfg_.width, cfg_.height);
        } else {
            base = background_fill(src, p);
            Frame fg = resize_bilinear(src, p.fg_width, p.fg_height);
            for (int y = 0; y < p.fg_height; ++y) {
                const std::uint8_t* s = fg.at(0, y);
                std::copy(s, s + static_cast<std::size_t>(p.fg_width) * 3,
                          base.at(p.fg_offset_x, p.fg_offset_y + y));
            }
        }
        draw_caption_block(base, seg.caption);
        return base;
    }

    // Blurred center-crop of the cover-scale background. Blurring only the
    // crop plus one kernel radius of margin is pixel-identical to blurring
    // the whole image first.
    Frame background_fill(const Frame& src, const Placement& p) {
        double sigma = cfg_.blur_sigma >= 0.0 ? cfg_.blur_sigma : p.bg_blur_sigma;
        Frame bg = resize_bilinear(src, p.bg_width, p.bg_height);
        int cx = (p.bg_width - cfg_.width) / 2;
        int cy = (p.bg_height - cfg_.height) / 2;
        int radius = sigma > 0.0 ? static_cast<int>(std::ceil(3.0 * sigma)) : 0;
        int ex0 = std::max(0, cx - radius);
        int ey0 = std::max(0, cy - radius);
        int ex1 = std::min(p.bg_width, cx + cfg_.width + radius);
        int ey1 = std::min(p.bg_height, cy + cfg_.height + radius);
        Frame expanded = crop(bg, ex0, ey0, ex1 - ex0, ey1 - ey0);
        Frame blurred = gaussian_blur(expanded, sigma);
        return crop(blurred, cx - ex0, cy - ey0, cfg_.width, cfg_.height);
    }

    const Timeline& timeline_;
    const RenderConfig& cfg_;
    FrameSource& source_;
    std::vector<Element> elements_;
    std::map<std::uint64_t, Frame> cache_;
    std::mutex cache_mutex_;
};

} // namespace

Frame compose_frame(const Timeline& timeline, double t, FrameSource& source,
                    const RenderConfig& cfg) {
    Compositor compositor(timeline, cfg, source);
    return compositor.at(t);
}

// ---------------------------------------------------------------------------
// Audio

AudioBuffer render_audio(const AudioBuffer& track, double total_duration) {
    if (track.sample_rate <= 0 || track.channels <= 0 || track.samples.empty())
        throw Error("render_audio: empty music track");

    AudioBuffer out;
    out.sample_rate = track.sample_rate;
    out.channels = track.channels;

    const std::size_t needed_frames = static_cast<std::size_t>(
        std::llround(total_duration * track.sample_rate));
    const std::size_t track_frames = track.frame_count();
    const int ch = track.channels;

    out.samples = track.samples;
    std::size_t overlap = std::min<std::size_t>(track.sample_rate, track_frames / 2);
    while (out.samples.size() / ch < needed_frames) {
        // Loop with a crossfade at the seam.
        std::size_t seam = out.samples.size() / ch - overlap;
        for (std::size_t i = 0; i < overlap; ++i) {
            double w = static_cast<double>(i + 1) / static_cast<double>(overlap + 1);
            for (int c = 0; c < ch; ++c) {
                std::size_t oi = (seam + i) * ch + c;
                double mixed = out.samples[oi] * (1.0 - w) + track.samples[i * ch + c] * w;
                out.samples[oi] = static_cast<std::int16_t>(
                    std::lround(std::clamp(mixed, -32768.0, 32767.0)));
            }
        }
        for (std::size_t i = overlap; i < track_frames; ++i)
            for (int c = 0; c < ch; ++c)
                out.samples.push_back(track.samples[i * ch + c]);
        if (overlap == 0) break; // degenerate one-sample track
    }
    out.samples.resize(needed_frames * ch);
    return out;
}

// ---------------------------------------------------------------------------
// Full render

RenderResult render_video(const Timeline& timeline, const RenderConfig& cfg,
                          StyleTransform& style, FrameSource& source,
                          const fs::path& out_dir) {
    RenderResult result;
    result.frames_dir = out_dir / "frames";
    fs::create_directories(result.frames_dir);

    const int count =
        static_cast<int>(std::lround(timeline.total_duration * cfg.frame_rate));
    result.frame_count = count;

    Compositor compositor(timeline, cfg, source);

    std::atomic<int> next_frame{0};
    std::mutex warn_mutex;
    std::exception_ptr first_error;

    auto worker = [&]() {
        for (;;) {
            int i = next_frame.fetch_add(1);
            if (i >= count) return;
            try {
                double t = i / cfg.frame_rate;
                Frame composed = compositor.at(t);
                Frame styled;
                try {
                    styled = style.apply(composed);
                } catch (const std::exception&) {
                    try {
                        styled = style.apply(composed); // one retry
                    } catch (const std::exception& e) {
                        styled = composed;
                        std::lock_guard<std::mutex> lock(warn_mutex);
                        result.warnings.push_back(
                            "style adapter failed on frame " + std::to_string(i) + " (" +
                            e.what() + "); rendered unstyled");
                    }
                }
                char name[32];
                std::snprintf(name, sizeof(name), "frame_%06d.ppm", i);
                write_ppm(result.frames_dir / name, styled);
            } catch (...) {
                std::lock_guard<std::mutex> lock(warn_mutex);
                if (!first_error) first_error = std::current_exception();
                next_frame.store(count);
                return;
            }
        }
    };

    int n_threads = cfg.threads > 0
                        ? cfg.threads
                        : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, std::max(1, count));
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);

    // Audio: untouched by the style stage.
    AudioBuffer track = read_wav(timeline.music.path);
    AudioBuffer mixed = render_audio(track, timeline.total_duration);
    write_wav(result.frames_dir / "audio.wav", mixed);

    {
        std::ofstream meta(result.frames_dir / "meta", std::ios::trunc);
        char buf[128];
        std::snprintf(buf, sizeof(buf), "fps=%.6f\n", cfg.frame_rate);
        meta << buf;
        meta << "width=" << cfg.width << "\n";
        meta << "height=" << cfg.height << "\n";
        std::snprintf(buf, sizeof(buf), "duration=%.6f\n", timeline.total_duration);
        meta << buf;
        meta << "frames=" << count << "\n";
    }

    if (cfg.output == OutputKind::ContainerFile) {
        if (cfg.transcode_cmd.empty()) {
            result.warnings.push_back(
                "no transcoder configured; kept the frame directory output");
        } else {
            std::string cmd = cfg.transcode_cmd;
            auto replace_all = [&cmd](const std::string& from, const std::string& to) {
                for (std::size_t pos = 0; (pos = cmd.find(from, pos)) != std::string::npos;
                     pos += to.size())
                    cmd.replace(pos, from.size(), to);
            };
            char fps[32];
            std::snprintf(fps, sizeof(fps), "%g", cfg.frame_rate);
            replace_all("{frames}", result.frames_dir.string());
            replace_all("{audio}", (result.frames_dir / "audio.wav").string());
            replace_all("{fps}", fps);
            replace_all("{out}", cfg.container_path.string());
            int rc = std::system(cmd.c_str());
            if (rc != 0) {
                result.warnings.push_back("transcoder failed (" + std::to_string(rc) +
                                          "); kept the frame directory output");
            } else {
                result.container_path = cfg.container_path;
            }
        }
    }
    return result;
}

} // namespace director
