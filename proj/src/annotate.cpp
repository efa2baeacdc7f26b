#include "ingress/annotate.hpp"

#include <cmath>
#include <cstdlib>

namespace ingress {
namespace {

void put(RgbImage& img, int x, int y, const Color& c) {
    if (!img.in_bounds(x, y)) return;
    std::uint8_t* p = img.px(x, y);
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
}

}  // namespace

void draw_line(RgbImage& img, Vec2 a, Vec2 b, const Color& color) {
    int x0 = static_cast<int>(std::lround(a.x));
    int y0 = static_cast<int>(std::lround(a.y));
    const int x1 = static_cast<int>(std::lround(b.x));
    const int y1 = static_cast<int>(std::lround(b.y));
    const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
        put(img, x0, y0, color);
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

void draw_dot(RgbImage& img, Vec2 center, int radius, const Color& color) {
    const int cx = static_cast<int>(std::lround(center.x));
    const int cy = static_cast<int>(std::lround(center.y));
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) put(img, cx + dx, cy + dy, color);
}

void annotate_detection(RgbImage& img, const WindowCandidate& candidate) {
    const Color green{0, 255, 0};
    const Color yellow{255, 255, 0};
    for (int i = 0; i < 4; ++i)
        draw_line(img, candidate.corners[i], candidate.corners[(i + 1) % 4], green);
    draw_dot(img, candidate.centroid, 3, yellow);
}

}  // namespace ingress
