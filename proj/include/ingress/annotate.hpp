#pragma once

#include "ingress/detect.hpp"
#include "ingress/image.hpp"
#include "ingress/simworld.hpp"

namespace ingress {

void draw_line(RgbImage& img, Vec2 a, Vec2 b, const Color& color);
void draw_dot(RgbImage& img, Vec2 center, int radius, const Color& color);

/// Detection overlay: green quadrilateral through the corners, yellow dot at
/// the centroid.
void annotate_detection(RgbImage& img, const WindowCandidate& candidate);

}  // namespace ingress
