#include "ingress/detect.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "ingress/imaging.hpp"

namespace ingress {
namespace {

inline double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    if (len2 == 0.0) return dist(p, a);
    double t = ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

double cross3(Vec2 o, Vec2 a, Vec2 b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Monotone chain over (point, contour index) pairs; strictly convex output.
std::vector<int> hull_indices(const std::vector<Pt>& pts) {
    const int n = static_cast<int>(pts.size());
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return pts[a].x != pts[b].x ? pts[a].x < pts[b].x : pts[a].y < pts[b].y;
    });
    order.erase(std::unique(order.begin(), order.end(),
                            [&](int a, int b) { return pts[a] == pts[b]; }),
                order.end());
    const int m = static_cast<int>(order.size());
    if (m <= 2) return order;

    auto cr = [&](int o, int a, int b) {
        return static_cast<double>(pts[a].x - pts[o].x) * (pts[b].y - pts[o].y) -
               static_cast<double>(pts[a].y - pts[o].y) * (pts[b].x - pts[o].x);
    };
    std::vector<int> hull(2 * m);
    int k = 0;
    for (int ii = 0; ii < m; ++ii) {
        const int i = order[ii];
        while (k >= 2 && cr(hull[k - 2], hull[k - 1], i) <= 0) --k;
        hull[k++] = i;
    }
    const int lower = k + 1;
    for (int ii = m - 2; ii >= 0; --ii) {
        const int i = order[ii];
        while (k >= lower && cr(hull[k - 2], hull[k - 1], i) <= 0) --k;
        hull[k++] = i;
    }
    hull.resize(k - 1);
    return hull;
}

struct FittedLine {
    Vec2 point;
    Vec2 dir;  // unit
    bool ok = false;
};

// Subpixel edge along one quad side: for each integer position along the
// side's major axis, locate the edge in the cross-track intensity profile of
// the smoothed (pre-equalization) grayscale at the gradient-magnitude peak
// with parabolic interpolation, then fit the samples by total least squares.
// The smoothing kernel is symmetric, so the peak is an unbiased estimate of
// the rendered edge position; profiles with no clear gradient response are
// skipped, and thin support falls back to the original side.
FittedLine fit_side_line(const GrayImage& smooth, Vec2 a, Vec2 b, double band) {
    FittedLine out;
    const double len = dist(a, b);
    if (len < 10.0) return out;
    const bool horizontal = std::fabs(b.x - a.x) >= std::fabs(b.y - a.y);
    Vec2 p0 = a, p1 = b;
    if ((horizontal && p1.x < p0.x) || (!horizontal && p1.y < p0.y)) std::swap(p0, p1);

    const int r = static_cast<int>(band);
    std::vector<Vec2> samples;

    auto profile_centroid = [&](auto value_at, int center, int limit) -> double {
        // Strongest cross-track gradient response, refined by parabolic
        // interpolation over the three central magnitudes.
        const int lo = std::max(1, center - r);
        const int hi = std::min(limit - 2, center + r);
        if (hi - lo < 4) return -1.0;
        int best = -1;
        double best_mag = 10.0;  // require a clear edge response
        for (int s = lo; s <= hi; ++s) {
            const double mag = std::fabs(value_at(s + 1) - value_at(s - 1));
            if (mag > best_mag) {
                best_mag = mag;
                best = s;
            }
        }
        if (best <= lo || best >= hi) return -1.0;
        const double m_prev = std::fabs(value_at(best) - value_at(best - 2));
        const double m_next = std::fabs(value_at(best + 2) - value_at(best));
        const double denom = m_prev - 2.0 * best_mag + m_next;
        double delta = 0.0;
        if (std::fabs(denom) > 1e-9) delta = std::clamp(0.5 * (m_prev - m_next) / denom, -0.6, 0.6);
        return best + delta;
    };

    if (horizontal) {
        const int x0 = static_cast<int>(std::ceil(p0.x + 0.12 * (p1.x - p0.x)));
        const int x1 = static_cast<int>(std::floor(p1.x - 0.12 * (p1.x - p0.x)));
        for (int x = std::max(0, x0); x <= std::min(smooth.width - 1, x1); ++x) {
            const double base =
                p0.y + (p1.y - p0.y) * (x - p0.x) / std::max(1e-9, p1.x - p0.x);
            const double sub = profile_centroid(
                [&](int s) { return static_cast<double>(smooth.at(x, s)); },
                static_cast<int>(std::lround(base)), smooth.height);
            if (sub >= 0.0) samples.push_back({static_cast<double>(x), sub});
        }
    } else {
        const int y0 = static_cast<int>(std::ceil(p0.y + 0.12 * (p1.y - p0.y)));
        const int y1 = static_cast<int>(std::floor(p1.y - 0.12 * (p1.y - p0.y)));
        for (int y = std::max(0, y0); y <= std::min(smooth.height - 1, y1); ++y) {
            const double base =
                p0.x + (p1.x - p0.x) * (y - p0.y) / std::max(1e-9, p1.y - p0.y);
            const double sub = profile_centroid(
                [&](int s) { return static_cast<double>(smooth.at(s, y)); },
                static_cast<int>(std::lround(base)), smooth.width);
            if (sub >= 0.0) samples.push_back({sub, static_cast<double>(y)});
        }
    }
    if (samples.size() < 8) return out;

    double sx = 0, sy = 0;
    for (const Vec2& p : samples) {
        sx += p.x;
        sy += p.y;
    }
    const double mx = sx / samples.size(), my = sy / samples.size();
    double sxx = 0, sxy = 0, syy = 0;
    for (const Vec2& p : samples) {
        sxx += (p.x - mx) * (p.x - mx);
        sxy += (p.x - mx) * (p.y - my);
        syy += (p.y - my) * (p.y - my);
    }
    const double theta = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    out.point = {mx, my};
    out.dir = {std::cos(theta), std::sin(theta)};
    out.ok = true;
    return out;
}

Vec2 intersect_lines(const FittedLine& l1, const FittedLine& l2, Vec2 fallback) {
    if (!l1.ok || !l2.ok) return fallback;
    const double cross = l1.dir.x * l2.dir.y - l1.dir.y * l2.dir.x;
    if (std::fabs(cross) < 1e-6) return fallback;
    const double s =
        ((l2.point.x - l1.point.x) * l2.dir.y - (l2.point.y - l1.point.y) * l2.dir.x) / cross;
    const Vec2 p{l1.point.x + s * l1.dir.x, l1.point.y + s * l1.dir.y};
    if (dist(p, fallback) > 15.0) return fallback;
    return p;
}

void rdp_recurse(const std::vector<Pt>& pts, int first, int last, double eps,
                 std::vector<char>& keep) {
    if (last - first < 2) return;
    const Vec2 a{static_cast<double>(pts[first].x), static_cast<double>(pts[first].y)};
    const Vec2 b{static_cast<double>(pts[last].x), static_cast<double>(pts[last].y)};
    double dmax = -1.0;
    int imax = -1;
    for (int i = first + 1; i < last; ++i) {
        const Vec2 p{static_cast<double>(pts[i].x), static_cast<double>(pts[i].y)};
        const double d = point_segment_distance(p, a, b);
        if (d > dmax) {
            dmax = d;
            imax = i;
        }
    }
    if (dmax > eps) {
        keep[imax] = 1;
        rdp_recurse(pts, first, imax, eps, keep);
        rdp_recurse(pts, imax, last, eps, keep);
    }
}

std::vector<Pt> rdp_open(const std::vector<Pt>& arc, double eps) {
    std::vector<char> keep(arc.size(), 0);
    keep.front() = 1;
    keep.back() = 1;
    rdp_recurse(arc, 0, static_cast<int>(arc.size()) - 1, eps, keep);
    std::vector<Pt> out;
    for (std::size_t i = 0; i < arc.size(); ++i)
        if (keep[i]) out.push_back(arc[i]);
    return out;
}

}  // namespace

DetectParams DetectParams::defaults_for(int frame_width, int frame_height) {
    DetectParams p;
    const double frame_area = static_cast<double>(frame_width) * frame_height;
    p.area_min = 0.005 * frame_area;
    p.area_max = 0.60 * frame_area;
    return p;
}

void DetectParams::validate() const {
    auto bad = [](const std::string& msg) { throw std::invalid_argument("DetectParams: " + msg); };
    if (!(canny_low >= 0.0) || !(canny_low < canny_high)) bad("need 0 <= canny_low < canny_high");
    if (blur_kernel < 3 || blur_kernel % 2 == 0) bad("blur_kernel must be odd and >= 3");
    if (!(blur_sigma > 0.0)) bad("blur_sigma must be positive");
    if (pyramid_depth < 0) bad("pyramid_depth must be >= 0");
    if (!(hough.rho_res > 0.0)) bad("hough rho_res must be positive");
    if (!(hough.theta_res > 0.0)) bad("hough theta_res must be positive");
    if (hough.votes < 1) bad("hough votes must be >= 1");
    if (!(hough.min_line_length > 0.0)) bad("hough min_line_length must be positive");
    if (!(hough.max_line_gap >= 0.0)) bad("hough max_line_gap must be >= 0");
    if (dilation_radius < 1) bad("dilation_radius must be >= 1");
    if (!(approx_epsilon_frac > 0.0)) bad("approx_epsilon_frac must be positive");
    if (!(area_min > 0.0) || !(area_min < area_max)) bad("need 0 < area_min < area_max");
    if (!(aspect_min > 0.0) || !(aspect_min < aspect_max)) bad("need 0 < aspect_min < aspect_max");
    if (!(hull_ratio_min > 0.0)) bad("hull_ratio_min must be positive");
    if (!(angle_tolerance_deg > 0.0)) bad("angle_tolerance_deg must be positive");
    if (!(bhattacharyya_threshold > 0.0)) bad("bhattacharyya_threshold must be positive");
}

std::vector<LineSegment> hough_lines_p(const EdgeMap& map, const HoughParams& params,
                                       std::uint64_t seed) {
    const int w = map.width, h = map.height;

    std::vector<Pt> points;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (map.test(x, y)) points.push_back({x, y});
    if (points.empty()) return {};

    const int numangle = std::max(1, static_cast<int>(std::lround(M_PI / params.theta_res)));
    const int half_rho = static_cast<int>(std::lround((w + h) / params.rho_res));
    const int numrho = 2 * half_rho + 1;
    std::vector<double> cos_t(numangle), sin_t(numangle);
    for (int n = 0; n < numangle; ++n) {
        cos_t[n] = std::cos(n * params.theta_res);
        sin_t[n] = std::sin(n * params.theta_res);
    }

    std::vector<int> accum(static_cast<std::size_t>(numangle) * numrho, 0);
    std::vector<std::uint8_t> mask(map.data);  // nonzero = unclaimed edge pixel
    std::vector<std::uint8_t> voted(mask.size(), 0);
    std::mt19937_64 rng(seed);
    std::vector<LineSegment> segments;

    auto rho_bin = [&](int n, int x, int y) {
        return static_cast<int>(std::lround((x * cos_t[n] + y * sin_t[n]) / params.rho_res)) +
               half_rho;
    };

    while (!points.empty()) {
        const std::size_t pick = rng() % points.size();
        const Pt p = points[pick];
        points[pick] = points.back();
        points.pop_back();

        const std::size_t pidx = static_cast<std::size_t>(p.y) * w + p.x;
        if (!mask[pidx]) continue;  // already claimed by an earlier line

        voted[pidx] = 1;
        int best_val = 0, best_n = 0;
        for (int n = 0; n < numangle; ++n) {
            const int v = ++accum[static_cast<std::size_t>(n) * numrho + rho_bin(n, p.x, p.y)];
            if (v > best_val) {
                best_val = v;
                best_n = n;
            }
        }
        if (best_val < params.votes) continue;

        // Walk the line direction in both senses with two pixels of
        // cross-track tolerance, steering gently toward accepted pixels.
        // The vote threshold often fires on a bin one step off the true
        // angle; without the follower behavior that fragments long edges and
        // leaves unclosable corner gaps. The narrow window cannot jump to
        // parallel structures and the walk cannot turn a corner, so segments
        // still end within a couple of pixels of the true endpoints.
        const double dx0 = -sin_t[best_n], dy0 = cos_t[best_n];
        double sx, sy;
        const bool x_major = std::fabs(dx0) >= std::fabs(dy0);
        if (x_major) {
            sx = dx0 > 0 ? 1.0 : -1.0;
            sy = dy0 / std::fabs(dx0);
        } else {
            sy = dy0 > 0 ? 1.0 : -1.0;
            sx = dx0 / std::fabs(dy0);
        }

        std::vector<Pt> claimed{p};
        Pt line_end[2] = {p, p};
        for (int k = 0; k < 2; ++k) {
            const double dirx = k == 0 ? sx : -sx;
            const double diry = k == 0 ? sy : -sy;
            double fx = p.x, fy = p.y;
            int gap = 0;
            for (;;) {
                fx += dirx;
                fy += diry;
                const int xi = static_cast<int>(std::lround(fx));
                const int yi = static_cast<int>(std::lround(fy));
                if (xi < 0 || xi >= w || yi < 0 || yi >= h) break;
                bool found = false;
                Pt hit{xi, yi};
                const int cdx = x_major ? 0 : 1, cdy = x_major ? 1 : 0;
                for (int off : {0, -1, 1, -2, 2}) {
                    const int cx = xi + off * cdx, cy = yi + off * cdy;
                    if (cx >= 0 && cx < w && cy >= 0 && cy < h &&
                        mask[static_cast<std::size_t>(cy) * w + cx]) {
                        hit = {cx, cy};
                        found = true;
                        break;
                    }
                }
                if (found) {
                    line_end[k] = hit;
                    claimed.push_back(hit);
                    gap = 0;
                    if (x_major)
                        fy += 0.35 * (hit.y - fy);
                    else
                        fx += 0.35 * (hit.x - fx);
                } else if (++gap > params.max_line_gap) {
                    break;
                }
            }
        }

        const double length = std::hypot(line_end[0].x - line_end[1].x,
                                         line_end[0].y - line_end[1].y);
        const bool good = length >= params.min_line_length;

        // Claim the walked pixels; retract claimed pixels' votes so the
        // accumulator keeps matching the unclaimed pool.
        for (const Pt& q : claimed) {
            const std::size_t idx = static_cast<std::size_t>(q.y) * w + q.x;
            if (!mask[idx]) continue;
            mask[idx] = 0;
            if (voted[idx]) {
                voted[idx] = 0;
                for (int n = 0; n < numangle; ++n)
                    --accum[static_cast<std::size_t>(n) * numrho + rho_bin(n, q.x, q.y)];
            }
        }

        if (good) {
            segments.push_back({{static_cast<double>(line_end[1].x),
                                 static_cast<double>(line_end[1].y)},
                                {static_cast<double>(line_end[0].x),
                                 static_cast<double>(line_end[0].y)}});
        }
    }
    return segments;
}

EdgeMap rasterize_segments(const std::vector<LineSegment>& segments, int width, int height,
                           int thickness) {
    if (thickness < 1) throw std::invalid_argument("rasterize_segments: thickness must be >= 1");
    EdgeMap out(width, height);
    const int lo = -(thickness - 1) / 2;
    const int hi = thickness / 2;

    auto stamp = [&](int x, int y) {
        for (int dy = lo; dy <= hi; ++dy)
            for (int dx = lo; dx <= hi; ++dx)
                if (out.in_bounds(x + dx, y + dy)) out.set(x + dx, y + dy);
    };

    for (const LineSegment& s : segments) {
        int x0 = static_cast<int>(std::lround(s.p0.x));
        int y0 = static_cast<int>(std::lround(s.p0.y));
        const int x1 = static_cast<int>(std::lround(s.p1.x));
        const int y1 = static_cast<int>(std::lround(s.p1.y));
        const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
        const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
        int err = dx + dy;
        for (;;) {
            stamp(x0, y0);
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
    return out;
}

std::vector<Contour> find_contours(const EdgeMap& map) {
    const int w = map.width, h = map.height;
    // Clockwise Moore neighborhood in image coordinates (y grows downward),
    // starting at W.
    static const int kDx[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
    static const int kDy[8] = {0, -1, -1, -1, 0, 1, 1, 1};

    std::vector<std::uint8_t> labeled(static_cast<std::size_t>(w) * h, 0);
    std::vector<Contour> contours;
    std::vector<Pt> fill_stack;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * w + x;
            if (!map.data[idx] || labeled[idx]) continue;

            // (x,y) is the scan-order first pixel of a new component, so its
            // west neighbor is guaranteed background.
            const Pt start{x, y};
            const Pt start_back{x - 1, y};
            std::vector<Pt> trace{start};
            Pt p = start, back = start_back;
            const std::size_t guard = 4 * map.data.size() + 16;
            for (std::size_t it = 0; it < guard; ++it) {
                int bidx = 0;
                for (int d = 0; d < 8; ++d)
                    if (p.x + kDx[d] == back.x && p.y + kDy[d] == back.y) {
                        bidx = d;
                        break;
                    }
                bool moved = false;
                for (int k = 1; k <= 8; ++k) {
                    const int d = (bidx + k) % 8;
                    const int nx = p.x + kDx[d], ny = p.y + kDy[d];
                    if (nx >= 0 && nx < w && ny >= 0 && ny < h &&
                        map.data[static_cast<std::size_t>(ny) * w + nx]) {
                        const int prev = (d + 7) % 8;
                        back = {p.x + kDx[prev], p.y + kDy[prev]};
                        p = {nx, ny};
                        moved = true;
                        break;
                    }
                }
                if (!moved) break;  // isolated pixel
                // Jacob's criterion: stop on re-entering the start pixel from
                // the same backtrack as the initial state.
                if (p == start && back == start_back) break;
                trace.push_back(p);
            }

            // Claim the whole 8-connected component so holes and interior
            // pixels never seed another trace.
            fill_stack.assign(1, start);
            labeled[idx] = 1;
            while (!fill_stack.empty()) {
                const Pt q = fill_stack.back();
                fill_stack.pop_back();
                for (int d = 0; d < 8; ++d) {
                    const int nx = q.x + kDx[d], ny = q.y + kDy[d];
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
                    if (map.data[nidx] && !labeled[nidx]) {
                        labeled[nidx] = 1;
                        fill_stack.push_back({nx, ny});
                    }
                }
            }

            if (trace.size() >= 3) contours.push_back({std::move(trace)});
        }
    }
    return contours;
}

Polygon approx_polygon(const Contour& contour, double epsilon) {
    if (contour.points.size() < 3)
        throw std::invalid_argument("approx_polygon: contour needs at least 3 points");
    if (!(epsilon > 0.0)) throw std::invalid_argument("approx_polygon: epsilon must be positive");

    const std::vector<Pt>& pts = contour.points;
    const int n = static_cast<int>(pts.size());

    // Split the closed contour at its two mutually farthest points (diameter
    // endpoints found on the convex hull).
    const std::vector<int> hull = hull_indices(pts);
    int ia = 0, ib = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        for (std::size_t j = i + 1; j < hull.size(); ++j) {
            const Pt a = pts[hull[i]], b = pts[hull[j]];
            const double d = static_cast<double>(a.x - b.x) * (a.x - b.x) +
                             static_cast<double>(a.y - b.y) * (a.y - b.y);
            if (d > best) {
                best = d;
                ia = hull[i];
                ib = hull[j];
            }
        }
    }
    if (ia > ib) std::swap(ia, ib);
    if (ia == ib) {  // all points coincide; nothing to simplify
        return Polygon{{Vec2{static_cast<double>(pts[0].x), static_cast<double>(pts[0].y)}}};
    }

    std::vector<Pt> arc1(pts.begin() + ia, pts.begin() + ib + 1);
    std::vector<Pt> arc2;
    for (int i = ib; i != ia; i = (i + 1) % n) arc2.push_back(pts[i]);
    arc2.push_back(pts[ia]);

    const std::vector<Pt> r1 = rdp_open(arc1, epsilon);
    const std::vector<Pt> r2 = rdp_open(arc2, epsilon);

    Polygon poly;
    for (std::size_t i = 0; i + 1 < r1.size(); ++i)
        poly.vertices.push_back({static_cast<double>(r1[i].x), static_cast<double>(r1[i].y)});
    for (std::size_t i = 0; i + 1 < r2.size(); ++i)
        poly.vertices.push_back({static_cast<double>(r2[i].x), static_cast<double>(r2[i].y)});
    return poly;
}

double polygon_area(const Polygon& poly) {
    const std::size_t n = poly.vertices.size();
    if (n < 3) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = poly.vertices[i];
        const Vec2 b = poly.vertices[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    return std::fabs(acc) / 2.0;
}

Polygon convex_hull(const Polygon& poly) {
    std::vector<Vec2> pts = poly.vertices;
    std::sort(pts.begin(), pts.end(),
              [](Vec2 a, Vec2 b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    const int m = static_cast<int>(pts.size());
    if (m <= 2) return Polygon{pts};

    std::vector<Vec2> hull(2 * m);
    int k = 0;
    for (int i = 0; i < m; ++i) {
        while (k >= 2 && cross3(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    const int lower = k + 1;
    for (int i = m - 2; i >= 0; --i) {
        while (k >= lower && cross3(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return Polygon{hull};
}

std::vector<WindowCandidate> filter_candidates(const std::vector<Polygon>& polys,
                                               const DetectParams& params) {
    std::vector<WindowCandidate> out;
    for (const Polygon& poly : polys) {
        if (poly.vertices.size() != 4) continue;

        const double area = polygon_area(poly);
        if (area < params.area_min || area > params.area_max) continue;

        double minx = poly.vertices[0].x, maxx = minx;
        double miny = poly.vertices[0].y, maxy = miny;
        for (const Vec2& v : poly.vertices) {
            minx = std::min(minx, v.x);
            maxx = std::max(maxx, v.x);
            miny = std::min(miny, v.y);
            maxy = std::max(maxy, v.y);
        }
        if (maxy - miny <= 0.0) continue;
        const double aspect = (maxx - minx) / (maxy - miny);
        if (aspect < params.aspect_min || aspect > params.aspect_max) continue;

        const double hull_area = polygon_area(convex_hull(poly));
        if (hull_area <= 0.0) continue;
        const double hull_ratio = area / hull_area;
        if (hull_ratio < params.hull_ratio_min) continue;

        double min_angle = 360.0, max_angle = 0.0;
        bool angles_ok = true;
        for (int i = 0; i < 4; ++i) {
            const Vec2 v = poly.vertices[i];
            const Vec2 prev = poly.vertices[(i + 3) % 4];
            const Vec2 next = poly.vertices[(i + 1) % 4];
            const double ux = prev.x - v.x, uy = prev.y - v.y;
            const double wx = next.x - v.x, wy = next.y - v.y;
            const double nu = std::hypot(ux, uy), nw = std::hypot(wx, wy);
            if (nu == 0.0 || nw == 0.0) {
                angles_ok = false;
                break;
            }
            const double cosang = std::clamp((ux * wx + uy * wy) / (nu * nw), -1.0, 1.0);
            const double ang = std::acos(cosang) * 180.0 / M_PI;
            min_angle = std::min(min_angle, ang);
            max_angle = std::max(max_angle, ang);
            if (std::fabs(ang - 90.0) > params.angle_tolerance_deg) {
                angles_ok = false;
                break;
            }
        }
        if (!angles_ok) continue;

        WindowCandidate cand;
        Vec2 c{0.0, 0.0};
        for (const Vec2& v : poly.vertices) {
            c.x += v.x / 4.0;
            c.y += v.y / 4.0;
        }
        std::array<Vec2, 4> corners{poly.vertices[0], poly.vertices[1], poly.vertices[2],
                                    poly.vertices[3]};
        // Ascending atan2 around the centroid is clockwise on screen with
        // y pointing down.
        std::sort(corners.begin(), corners.end(), [&](Vec2 a, Vec2 b) {
            return std::atan2(a.y - c.y, a.x - c.x) < std::atan2(b.y - c.y, b.x - c.x);
        });
        int first = 0;
        for (int i = 1; i < 4; ++i) {
            const double si = corners[i].x + corners[i].y;
            const double sf = corners[first].x + corners[first].y;
            if (si < sf || (si == sf && corners[i].y < corners[first].y)) first = i;
        }
        std::rotate(corners.begin(), corners.begin() + first, corners.end());

        cand.corners = corners;
        cand.centroid = c;
        cand.area = area;
        cand.aspect_ratio = aspect;
        cand.hull_ratio = hull_ratio;
        cand.min_corner_angle_deg = min_angle;
        cand.max_corner_angle_deg = max_angle;
        cand.hist_distance = 0.0;
        out.push_back(cand);
    }
    return out;
}

Histogram region_histogram(const RgbImage& img, const std::array<Vec2, 4>& corners) {
    Histogram hist;
    std::size_t count = 0;

    double miny = corners[0].y, maxy = miny;
    for (const Vec2& v : corners) {
        miny = std::min(miny, v.y);
        maxy = std::max(maxy, v.y);
    }
    const int y0 = std::max(0, static_cast<int>(std::floor(miny)));
    const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(maxy)));

    for (int y = y0; y <= y1; ++y) {
        const double cy = y + 0.5;
        double xs[4];
        int nx = 0;
        for (int e = 0; e < 4; ++e) {
            const Vec2 a = corners[e];
            const Vec2 b = corners[(e + 1) % 4];
            if ((a.y <= cy) != (b.y <= cy)) {
                const double t = (cy - a.y) / (b.y - a.y);
                xs[nx++] = a.x + t * (b.x - a.x);
            }
        }
        std::sort(xs, xs + nx);
        for (int k = 0; k + 1 < nx; k += 2) {
            const int xa = std::max(0, static_cast<int>(std::ceil(xs[k] - 0.5 + 1e-9)));
            const int xb = std::min(img.width - 1,
                                    static_cast<int>(std::floor(xs[k + 1] - 0.5 - 1e-9)));
            for (int x = xa; x <= xb; ++x) {
                const std::uint8_t* p = img.px(x, y);
                hist.bins[Histogram::bin_index(p[0], p[1], p[2])] += 1.0;
                ++count;
            }
        }
    }

    if (count == 0) throw std::runtime_error("region_histogram: degenerate region (no interior)");
    for (double& b : hist.bins) b /= static_cast<double>(count);
    return hist;
}

double bhattacharyya_distance(const Histogram& p, const Histogram& q) {
    auto check = [](const Histogram& h) {
        if (h.empty) throw std::invalid_argument("bhattacharyya_distance: empty histogram");
        double sum = 0.0;
        for (double b : h.bins) {
            if (b < 0.0) throw std::invalid_argument("bhattacharyya_distance: negative bin");
            sum += b;
        }
        if (std::fabs(sum - 1.0) > 1e-6)
            throw std::invalid_argument("bhattacharyya_distance: histogram not L1-normalized");
    };
    check(p);
    check(q);

    double bc = 0.0;
    for (int i = 0; i < Histogram::kTotalBins; ++i) bc += std::sqrt(p.bins[i] * q.bins[i]);
    return std::sqrt(std::clamp(1.0 - bc, 0.0, 1.0));
}

std::optional<WindowCandidate> detect_window(const RgbImage& frame, const Histogram& reference,
                                             const DetectParams& params) {
    params.validate();

    GrayImage smooth = gaussian_blur(rgb_to_gray(frame), params.blur_kernel, params.blur_sigma);
    for (int i = 0; i < params.pyramid_depth; ++i) smooth = pyr_down(smooth);
    for (int i = 0; i < params.pyramid_depth; ++i) smooth = pyr_up(smooth);
    if (smooth.width != frame.width || smooth.height != frame.height) {
        GrayImage cropped(frame.width, frame.height);
        for (int y = 0; y < frame.height; ++y)
            for (int x = 0; x < frame.width; ++x) cropped.at(x, y) = smooth.at(x, y);
        smooth = std::move(cropped);
    }
    const GrayImage equalized = equalize_histogram(smooth);

    const EdgeMap edges = canny(equalized, params.canny_low, params.canny_high);
    const std::vector<LineSegment> segments = hough_lines_p(edges, params.hough, params.seed);
    const EdgeMap lines = rasterize_segments(segments, frame.width, frame.height, 1);
    const EdgeMap dilated = dilate(lines, params.dilation_radius);

    std::vector<Polygon> polys;
    for (const Contour& c : find_contours(dilated)) {
        double perim = 0.0;
        for (std::size_t i = 0; i < c.points.size(); ++i) {
            const Pt a = c.points[i];
            const Pt b = c.points[(i + 1) % c.points.size()];
            perim += std::hypot(a.x - b.x, a.y - b.y);
        }
        if (perim <= 0.0) continue;
        Polygon poly = approx_polygon(c, params.approx_epsilon_frac * perim);
        if (poly.vertices.size() >= 3) polys.push_back(std::move(poly));
    }

    std::vector<WindowCandidate> cands = filter_candidates(polys, params);

    // The traced corners are quantized to the dilated band's outer boundary,
    // displaced outward from the true opening. Recover subpixel corners by
    // locating each side's edge in the smoothed grayscale and intersecting
    // the four fitted lines.
    const double band = params.dilation_radius + 7.0;
    std::vector<WindowCandidate> refined_cands;
    for (const WindowCandidate& cand : cands) {
        FittedLine sides[4];
        for (int i = 0; i < 4; ++i)
            sides[i] = fit_side_line(smooth, cand.corners[i], cand.corners[(i + 1) % 4], band);
        Polygon quad;
        for (int i = 0; i < 4; ++i)
            quad.vertices.push_back(intersect_lines(sides[(i + 3) % 4], sides[i], cand.corners[i]));
        // Re-apply the geometric constraints to the refined quadrilateral so
        // every returned candidate satisfies them as configured.
        std::vector<WindowCandidate> rechecked = filter_candidates({quad}, params);
        if (!rechecked.empty()) refined_cands.push_back(rechecked.front());
    }
    cands = std::move(refined_cands);

    // Candidate corners still sit a couple of pixels outside the true
    // opening (bright-side canny localization). Score the histogram on an
    // interior inset by the band offset so border pixels do not contaminate
    // the comparison.
    const double inset = params.dilation_radius + 2.0;

    std::optional<WindowCandidate> best;
    for (WindowCandidate& cand : cands) {
        std::array<Vec2, 4> region = cand.corners;
        for (int i = 0; i < 4; ++i) {
            const Vec2 c = cand.corners[i];
            const Vec2 prev = cand.corners[(i + 3) % 4];
            const Vec2 next = cand.corners[(i + 1) % 4];
            const double lp = std::hypot(prev.x - c.x, prev.y - c.y);
            const double ln = std::hypot(next.x - c.x, next.y - c.y);
            if (lp > 0.0) {
                region[i].x += inset * (prev.x - c.x) / lp;
                region[i].y += inset * (prev.y - c.y) / lp;
            }
            if (ln > 0.0) {
                region[i].x += inset * (next.x - c.x) / ln;
                region[i].y += inset * (next.y - c.y) / ln;
            }
        }
        try {
            const Histogram hist = region_histogram(frame, region);
            cand.hist_distance = bhattacharyya_distance(hist, reference);
        } catch (const std::exception&) {
            if (params.use_histogram_filter) continue;
            cand.hist_distance = 1.0;
        }
        if (params.use_histogram_filter) {
            if (cand.hist_distance > params.bhattacharyya_threshold) continue;
            if (!best || cand.hist_distance < best->hist_distance ||
                (cand.hist_distance == best->hist_distance && cand.area > best->area)) {
                best = cand;
            }
        } else {
            if (!best || cand.area > best->area) best = cand;
        }
    }
    return best;
}

}  // namespace ingress
