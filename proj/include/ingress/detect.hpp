#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "ingress/image.hpp"

namespace ingress {

// Window detection pipeline: Hough line filtering, contour extraction,
// polygon approximation, geometric candidate constraints, and histogram
// based false-positive rejection.

struct LineSegment {
    Vec2 p0;
    Vec2 p1;
};

/// Closed 8-connected boundary of one connected component.
struct Contour {
    std::vector<Pt> points;
};

struct Polygon {
    std::vector<Vec2> vertices;
};

/// L1-normalized 8x8x8 RGB histogram. `empty` marks the all-zero histogram
/// of a region with no interior pixels.
struct Histogram {
    static constexpr int kBinsPerChannel = 8;
    static constexpr int kTotalBins = 512;
    std::array<double, kTotalBins> bins{};
    bool empty = false;

    static int bin_index(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        return (r / 32) * 64 + (g / 32) * 8 + (b / 32);
    }
};

/// Accepted quadrilateral candidate. Corners are ordered clockwise in image
/// coordinates starting from the corner minimizing x+y (top-left).
struct WindowCandidate {
    std::array<Vec2, 4> corners;
    Vec2 centroid;
    double area = 0.0;          // px^2
    double aspect_ratio = 0.0;  // bounding box width / height
    double hull_ratio = 0.0;    // polygon area / convex hull area
    double min_corner_angle_deg = 0.0;
    double max_corner_angle_deg = 0.0;
    double hist_distance = 0.0;  // Bhattacharyya distance to the reference
};

struct HoughParams {
    double rho_res = 1.0;                 // px
    double theta_res = M_PI / 180.0;      // rad
    int votes = 30;                       // accumulator threshold
    double min_line_length = 30.0;        // px
    double max_line_gap = 10.0;           // px
};

struct DetectParams {
    double canny_low = 50.0;
    double canny_high = 150.0;
    int blur_kernel = 5;
    double blur_sigma = 1.4;
    int pyramid_depth = 1;
    HoughParams hough;
    int dilation_radius = 1;
    double approx_epsilon_frac = 0.02;  // fraction of contour perimeter
    double area_min = 0.0;              // px^2; see defaults_for()
    double area_max = 0.0;
    double aspect_min = 0.33;
    double aspect_max = 3.0;
    double hull_ratio_min = 0.9;
    double angle_tolerance_deg = 25.0;
    double bhattacharyya_threshold = 0.3;
    bool use_histogram_filter = true;
    std::uint64_t seed = 1;  // Hough sampling PRNG seed

    /// Defaults with the area window tied to the frame: [0.5%, 60%] of
    /// the frame area.
    static DetectParams defaults_for(int frame_width, int frame_height);

    void validate() const;  // throws std::invalid_argument on bad ranges
};

/// Progressive probabilistic Hough transform. Edge pixels are drawn in
/// random order (seeded, hence deterministic); once a pixel's best (r,theta)
/// bin reaches the votes threshold the line direction is walked both ways
/// gathering pixels with gaps <= max_line_gap. Segments shorter than
/// min_line_length are discarded; all walked pixels are removed from the
/// pool either way.
std::vector<LineSegment> hough_lines_p(const EdgeMap& map, const HoughParams& params,
                                       std::uint64_t seed);

/// Bresenham rasterization of segments at the given thickness (px).
EdgeMap rasterize_segments(const std::vector<LineSegment>& segments, int width, int height,
                           int thickness);

/// External boundaries of 8-connected components via Moore-neighbor tracing
/// with Jacob's stopping criterion. One contour per component; interior
/// holes are ignored, and components with fewer than 3 boundary pixels are
/// dropped.
std::vector<Contour> find_contours(const EdgeMap& map);

/// Ramer-Douglas-Peucker applied to a closed contour: the contour is split
/// at its two mutually farthest points and each arc simplified so that every
/// contour point lies within epsilon of the polygon.
Polygon approx_polygon(const Contour& contour, double epsilon);

/// Shoelace area (absolute value).
double polygon_area(const Polygon& poly);

/// Convex hull via Andrew's monotone chain (collinear points dropped).
Polygon convex_hull(const Polygon& poly);

/// Applies the five geometric window constraints: four corners, area range,
/// bounding-box aspect ratio, convexity via hull-area ratio, and all corner
/// angles near 90 degrees. Survivors get ordered corners and a centroid;
/// hist_distance is left at 0 for detect_window to fill in.
std::vector<WindowCandidate> filter_candidates(const std::vector<Polygon>& polys,
                                               const DetectParams& params);

/// 8x8x8 RGB histogram over the pixels strictly inside the quadrilateral.
/// Throws std::runtime_error when the region contains no pixel centers.
Histogram region_histogram(const RgbImage& img, const std::array<Vec2, 4>& corners);

/// d = sqrt(1 - sum_i sqrt(p_i q_i)), clamped to [0,1]. Inputs must be
/// L1-normalized; empty or un-normalized histograms are rejected.
double bhattacharyya_distance(const Histogram& p, const Histogram& q);

/// Full pipeline: gray -> blur -> pyramid round(s) -> equalize -> canny ->
/// hough -> rasterize -> dilate -> contours -> polygons -> constraints ->
/// histogram scoring against `reference`. Returns the surviving candidate
/// with minimum histogram distance (ties broken by larger area), or nullopt.
/// With use_histogram_filter off, distances are still computed but selection
/// falls back to largest area with no threshold.
std::optional<WindowCandidate> detect_window(const RgbImage& frame, const Histogram& reference,
                                             const DetectParams& params);

}  // namespace ingress
