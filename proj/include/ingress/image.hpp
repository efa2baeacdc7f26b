#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace ingress {

// Integer pixel location.
struct Pt {
    int x = 0;
    int y = 0;
};

inline bool operator==(Pt a, Pt b) { return a.x == b.x && a.y == b.y; }
inline bool operator!=(Pt a, Pt b) { return !(a == b); }

// Real-valued point: subpixel image coordinates or window-plane coordinates.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// 8-bit single-channel raster, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h) {
        if (w < 1 || h < 1) throw std::invalid_argument("GrayImage: dimensions must be >= 1");
        data.assign(static_cast<std::size_t>(w) * h, fill);
    }

    std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

/// 8-bit interleaved RGB raster, row-major.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // r,g,b per pixel

    RgbImage() = default;
    RgbImage(int w, int h, std::uint8_t r = 0, std::uint8_t g = 0, std::uint8_t b = 0)
        : width(w), height(h) {
        if (w < 1 || h < 1) throw std::invalid_argument("RgbImage: dimensions must be >= 1");
        data.resize(static_cast<std::size_t>(w) * h * 3);
        for (std::size_t i = 0; i < data.size(); i += 3) {
            data[i] = r;
            data[i + 1] = g;
            data[i + 2] = b;
        }
    }

    std::uint8_t* px(int x, int y) { return &data[(static_cast<std::size_t>(y) * width + x) * 3]; }
    const std::uint8_t* px(int x, int y) const {
        return &data[(static_cast<std::size_t>(y) * width + x) * 3];
    }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

/// Binary mask with image dimensions; 0 = background, 255 = set.
struct EdgeMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    EdgeMap() = default;
    EdgeMap(int w, int h) : width(w), height(h) {
        if (w < 1 || h < 1) throw std::invalid_argument("EdgeMap: dimensions must be >= 1");
        data.assign(static_cast<std::size_t>(w) * h, 0);
    }

    void set(int x, int y) { data[static_cast<std::size_t>(y) * width + x] = 255; }
    void clear(int x, int y) { data[static_cast<std::size_t>(y) * width + x] = 0; }
    bool test(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x] != 0; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

    std::size_t count() const {
        std::size_t n = 0;
        for (std::uint8_t v : data) n += (v != 0);
        return n;
    }
};

}  // namespace ingress
