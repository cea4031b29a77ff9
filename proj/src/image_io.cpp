#include "director/image_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>

#include "director/common.hpp"

namespace director {

namespace {

struct PnmHeader {
    int magic = 0; // 5 or 6
    int width = 0;
    int height = 0;
    int maxval = 0;
};

int next_pnm_int(std::istream& in, const std::filesystem::path& path) {
    // Skips whitespace and '#' comments between header fields.
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    if (c == EOF || !std::isdigit(c))
        throw Error("malformed PNM header: " + path.string());
    int value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        c = in.get();
    }
    return value;
}

PnmHeader read_header(std::istream& in, const std::filesystem::path& path) {
    char p = 0, n = 0;
    in.get(p);
    in.get(n);
    if (p != 'P' || (n != '5' && n != '6'))
        throw Error("not a binary PPM/PGM file: " + path.string());
    PnmHeader h;
    h.magic = n - '0';
    h.width = next_pnm_int(in, path);
    h.height = next_pnm_int(in, path);
    h.maxval = next_pnm_int(in, path);
    if (h.width <= 0 || h.height <= 0)
        throw Error("invalid PNM dimensions: " + path.string());
    if (h.maxval != 255)
        throw Error("unsupported PNM maxval (expected 255): " + path.string());
    return h;
}

} // namespace

Frame read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open image: " + path.string());
    PnmHeader h = read_header(in, path);

    Frame frame(h.width, h.height);
    std::size_t n = static_cast<std::size_t>(h.width) * h.height;
    if (h.magic == 6) {
        in.read(reinterpret_cast<char*>(frame.pixels.data()),
                static_cast<std::streamsize>(n * 3));
        if (static_cast<std::size_t>(in.gcount()) != n * 3)
            throw Error("truncated image payload: " + path.string());
    } else {
        std::vector<std::uint8_t> gray(n);
        in.read(reinterpret_cast<char*>(gray.data()), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n)
            throw Error("truncated image payload: " + path.string());
        for (std::size_t i = 0; i < n; ++i) {
            frame.pixels[i * 3] = gray[i];
            frame.pixels[i * 3 + 1] = gray[i];
            frame.pixels[i * 3 + 2] = gray[i];
        }
    }
    return frame;
}

void write_ppm(const std::filesystem::path& path, const Frame& frame) {
    if (frame.empty()) throw Error("refusing to write empty frame: " + path.string());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write image: " + path.string());
    out << "P6\n" << frame.width << " " << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.pixels.data()),
              static_cast<std::streamsize>(frame.pixels.size()));
    if (!out) throw Error("short write: " + path.string());
}

std::pair<int, int> read_ppm_dimensions(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open image: " + path.string());
    PnmHeader h = read_header(in, path);
    return {h.width, h.height};
}

} // namespace director
