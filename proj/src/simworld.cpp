#include "ingress/simworld.hpp"

#include <cmath>
#include <stdexcept>

namespace ingress {
namespace {

constexpr double kPlaneEps = 1e-9;

// splitmix64: counter-based generator for per-pixel noise.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline double uniform01(std::uint64_t x) {
    return (static_cast<double>(x >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

// One standard normal draw keyed by (seed, index).
inline double gauss(std::uint64_t seed, std::uint64_t index) {
    const double u1 = uniform01(splitmix64(seed ^ splitmix64(index)));
    const double u2 = uniform01(splitmix64(seed ^ splitmix64(index ^ 0x5851f42d4c957f2dULL)));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline std::uint8_t add_noise(std::uint8_t v, double sigma, std::uint64_t seed,
                              std::uint64_t index) {
    if (sigma <= 0.0) return v;
    const double noisy = v + sigma * gauss(seed, index);
    return static_cast<std::uint8_t>(std::clamp(std::lround(noisy), 0L, 255L));
}

bool inside_rect(const Eigen::Vector2d& uv, const Eigen::Vector2d& center, double w, double h) {
    return std::fabs(uv.x() - center.x()) <= w / 2.0 && std::fabs(uv.y() - center.y()) <= h / 2.0;
}

}  // namespace

Eigen::Vector3d WorldModel::plane_x() const {
    const Eigen::Vector3d down(0.0, 0.0, 1.0);
    return wall_normal.cross(down).normalized();
}

Eigen::Vector3d WorldModel::plane_y() const { return plane_x().cross(wall_normal).normalized(); }

Eigen::Vector3d WorldModel::on_plane(const Eigen::Vector2d& uv) const {
    return window_center + uv.x() * plane_x() + uv.y() * plane_y();
}

void WorldModel::validate() const {
    auto bad = [](const std::string& msg) { throw std::invalid_argument("WorldModel: " + msg); };
    if (std::fabs(wall_normal.norm() - 1.0) > 1e-6) bad("wall_normal must be unit length");
    if (wall_normal.cross(Eigen::Vector3d(0.0, 0.0, 1.0)).norm() < 1e-6)
        bad("wall must be vertical (normal not parallel to the down axis)");
    if (std::fabs((window_center - wall_point).dot(wall_normal)) > 1e-9)
        bad("window_center must lie on the wall plane");
    if (!(window_width > 0.0) || !(window_height > 0.0))
        bad("window dimensions must be positive");
    if (noise_sigma < 0.0) bad("noise_sigma must be >= 0");

    auto overlap = [](const Eigen::Vector2d& ca, double wa, double ha, const Eigen::Vector2d& cb,
                      double wb, double hb) {
        return std::fabs(ca.x() - cb.x()) < (wa + wb) / 2.0 &&
               std::fabs(ca.y() - cb.y()) < (ha + hb) / 2.0;
    };
    for (std::size_t i = 0; i < decoys.size(); ++i) {
        const Decoy& d = decoys[i];
        if (!(d.width > 0.0) || !(d.height > 0.0)) bad("decoy dimensions must be positive");
        if (overlap(d.offset, d.width, d.height, Eigen::Vector2d::Zero(), window_width,
                    window_height))
            bad("decoy overlaps the window");
        for (std::size_t j = i + 1; j < decoys.size(); ++j)
            if (overlap(d.offset, d.width, d.height, decoys[j].offset, decoys[j].width,
                        decoys[j].height))
                bad("decoys overlap each other");
    }
}

CameraPose camera_pose(const UavState& uav) {
    const double c = std::cos(uav.yaw), s = std::sin(uav.yaw);
    const Eigen::Vector3d forward(c, s, 0.0);
    const Eigen::Vector3d right(-s, c, 0.0);
    const Eigen::Vector3d down(0.0, 0.0, 1.0);

    CameraPose pose;
    pose.rotation.row(0) = right;
    pose.rotation.row(1) = down;
    pose.rotation.row(2) = forward;
    pose.translation = -pose.rotation * uav.position;
    return pose;
}

RgbImage render(const WorldModel& world, const UavState& uav, const CameraIntrinsics& k,
                int width, int height, std::uint64_t seed) {
    world.validate();
    k.validate();

    const double side = (uav.position - world.wall_point).dot(world.wall_normal);
    if (std::fabs(side) < kPlaneEps)
        throw std::invalid_argument("render: camera lies on the wall plane");

    const double c = std::cos(uav.yaw), s = std::sin(uav.yaw);
    const Eigen::Vector3d forward(c, s, 0.0);
    const Eigen::Vector3d right(-s, c, 0.0);
    const Eigen::Vector3d down(0.0, 0.0, 1.0);

    const Eigen::Vector3d px_axis = world.plane_x();
    const Eigen::Vector3d py_axis = world.plane_y();
    const double plane_offset = (world.wall_point - uav.position).dot(world.wall_normal);

    // Color of the ray through image point (ix, iy), subpixel coordinates.
    auto shade = [&](double ix, double iy) -> Color {
        const double rx = (ix - k.cx) / k.fx;
        const double ry = (iy - k.cy) / k.fy;
        const Eigen::Vector3d dir = rx * right + ry * down + forward;
        const double denom = dir.dot(world.wall_normal);
        if (std::fabs(denom) <= kPlaneEps) return world.background_color;
        const double t = plane_offset / denom;
        if (t <= 0.0) return world.background_color;
        const Eigen::Vector3d hit = uav.position + t * dir;
        const Eigen::Vector2d uv((hit - world.window_center).dot(px_axis),
                                 (hit - world.window_center).dot(py_axis));
        if (inside_rect(uv, Eigen::Vector2d::Zero(), world.window_width, world.window_height))
            return world.interior_color;
        for (const WorldModel::Decoy& d : world.decoys)
            if (inside_rect(uv, d.offset, d.width, d.height)) return d.color;
        return world.wall_color;
    };

    RgbImage img(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            // A camera pixel integrates over its footprint. Probe the center
            // and corners; supersample 4x4 only where a region boundary
            // crosses the pixel, so edges carry their subpixel position in
            // the boundary pixel's intensity.
            const Color center = shade(x + 0.5, y + 0.5);
            bool uniform = true;
            for (int cyi = 0; cyi <= 1 && uniform; ++cyi)
                for (int cxi = 0; cxi <= 1 && uniform; ++cxi)
                    uniform = shade(x + 0.02 + 0.96 * cxi, y + 0.02 + 0.96 * cyi) == center;

            Color color = center;
            if (!uniform) {
                double acc[3] = {0.0, 0.0, 0.0};
                for (int sy = 0; sy < 8; ++sy) {
                    for (int sx = 0; sx < 8; ++sx) {
                        const Color sub = shade(x + (sx + 0.5) / 8.0, y + (sy + 0.5) / 8.0);
                        acc[0] += sub[0];
                        acc[1] += sub[1];
                        acc[2] += sub[2];
                    }
                }
                for (int ch = 0; ch < 3; ++ch)
                    color[ch] = static_cast<std::uint8_t>(std::lround(acc[ch] / 64.0));
            }

            std::uint8_t* p = img.px(x, y);
            const std::uint64_t base =
                (static_cast<std::uint64_t>(y) * width + static_cast<std::uint64_t>(x)) * 3;
            p[0] = add_noise(color[0], world.noise_sigma, seed, base);
            p[1] = add_noise(color[1], world.noise_sigma, seed, base + 1);
            p[2] = add_noise(color[2], world.noise_sigma, seed, base + 2);
        }
    }
    return img;
}

UavState step(const UavState& uav, const NavCommand& cmd, const CommandLimits& limits) {
    const double eps = 1e-12;
    if (std::fabs(cmd.forward) > limits.forward + eps ||
        std::fabs(cmd.lateral) > limits.lateral + eps ||
        std::fabs(cmd.vertical) > limits.vertical + eps ||
        std::fabs(cmd.yaw) > limits.yaw + eps)
        throw std::invalid_argument("step: command exceeds per-step limits");

    UavState next;
    next.yaw = wrap_angle(uav.yaw + cmd.yaw);
    const double c = std::cos(next.yaw), s = std::sin(next.yaw);
    next.position = uav.position + Eigen::Vector3d(cmd.forward * c - cmd.lateral * s,
                                                   cmd.forward * s + cmd.lateral * c,
                                                   cmd.vertical);
    return next;
}

GroundTruth ground_truth(const WorldModel& world, const UavState& uav,
                         const CameraIntrinsics& k) {
    GroundTruth gt;

    const Eigen::Vector3d inward = -world.wall_normal;
    const double headon_yaw = std::atan2(inward.y(), inward.x());
    gt.relative_yaw = -wrap_angle(uav.yaw - headon_yaw);

    const double hw = world.window_width / 2.0, hh = world.window_height / 2.0;
    const std::array<Eigen::Vector2d, 4> plane_corners = {
        Eigen::Vector2d(-hw, -hh), Eigen::Vector2d(hw, -hh), Eigen::Vector2d(hw, hh),
        Eigen::Vector2d(-hw, hh)};
    const CameraPose cam = camera_pose(uav);
    gt.corners_valid = true;
    for (int i = 0; i < 4; ++i) {
        try {
            const Eigen::Vector2d px = project_point(k, cam, world.on_plane(plane_corners[i]));
            gt.corner_px[i] = {px.x(), px.y()};
        } catch (const std::exception&) {
            gt.corners_valid = false;
            break;
        }
    }

    const double side = (uav.position - world.wall_point).dot(world.wall_normal);
    if (side < kPlaneEps) {  // on or past the plane
        const Eigen::Vector2d uv((uav.position - world.window_center).dot(world.plane_x()),
                                 (uav.position - world.window_center).dot(world.plane_y()));
        gt.crossed_inside = inside_rect(uv, Eigen::Vector2d::Zero(), world.window_width,
                                        world.window_height);
    }
    return gt;
}

}  // namespace ingress
