#include "director/frame.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace director {

void Frame::fill(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    for (std::size_t i = 0; i + 2 < pixels.size(); i += 3) {
        pixels[i] = r;
        pixels[i + 1] = g;
        pixels[i + 2] = b;
    }
}

Frame make_solid(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    Frame f(width, height);
    f.fill(r, g, b);
    return f;
}

Frame resize_bilinear(const Frame& src, int width, int height) {
    assert(!src.empty() && width > 0 && height > 0);
    if (width == src.width && height == src.height) return src;

    Frame dst(width, height);
    const double sx = static_cast<double>(src.width) / width;
    const double sy = static_cast<double>(src.height) / height;

    for (int y = 0; y < height; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(fy));
        double wy = fy - y0;
        int y1 = std::min(y0 + 1, src.height - 1);
        y0 = std::clamp(y0, 0, src.height - 1);
        for (int x = 0; x < width; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(fx));
            double wx = fx - x0;
            int x1 = std::min(x0 + 1, src.width - 1);
            x0 = std::clamp(x0, 0, src.width - 1);

            const std::uint8_t* p00 = src.at(x0, y0);
            const std::uint8_t* p10 = src.at(x1, y0);
            const std::uint8_t* p01 = src.at(x0, y1);
            const std::uint8_t* p11 = src.at(x1, y1);
            std::uint8_t* out = dst.at(x, y);
            for (int c = 0; c < 3; ++c) {
                double top = p00[c] * (1.0 - wx) + p10[c] * wx;
                double bot = p01[c] * (1.0 - wx) + p11[c] * wx;
                double v = top * (1.0 - wy) + bot * wy;
                out[c] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
            }
        }
    }
    return dst;
}

Frame crop(const Frame& src, int x, int y, int w, int h) {
    assert(x >= 0 && y >= 0 && x + w <= src.width && y + h <= src.height);
    Frame dst(w, h);
    for (int row = 0; row < h; ++row) {
        const std::uint8_t* s = src.at(x, y + row);
        std::uint8_t* d = dst.at(0, row);
        std::copy(s, s + static_cast<std::size_t>(w) * 3, d);
    }
    return dst;
}

Frame blend(const Frame& a, const Frame& b, double alpha) {
    assert(a.width == b.width && a.height == b.height);
    Frame out(a.width, a.height);
    const double beta = 1.0 - alpha;
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
        double v = a.pixels[i] * beta + b.pixels[i] * alpha;
        out.pixels[i] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
    }
    return out;
}

} // namespace director
