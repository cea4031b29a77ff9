#pragma once

#include <cstdint>
#include <vector>

namespace director {

// Row-major 8-bit RGB raster.
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels; // size = width * height * 3

    Frame() = default;
    Frame(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}

    bool empty() const { return width <= 0 || height <= 0; }

    std::uint8_t* at(int x, int y) {
        return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
    const std::uint8_t* at(int x, int y) const {
        return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }

    void fill(std::uint8_t r, std::uint8_t g, std::uint8_t b);

    bool operator==(const Frame& other) const = default;
};

// ITU-R 601 luma.
inline double luma601(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    return 0.299 * r + 0.587 * g + 0.114 * b;
}

Frame make_solid(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b);

// Bilinear resampling (half-pixel centers, clamped at the borders).
Frame resize_bilinear(const Frame& src, int width, int height);

// Copies the rect [x, x+w) x [y, y+h), which must lie inside src.
Frame crop(const Frame& src, int x, int y, int w, int h);

// Alpha blend: round(a*(1-alpha) + b*alpha) per channel.
Frame blend(const Frame& a, const Frame& b, double alpha);

} // namespace director
