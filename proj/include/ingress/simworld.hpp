#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ingress/image.hpp"
#include "ingress/pose.hpp"

namespace ingress {

// Synthetic test world: a single wall plane carrying a window opening and
// optional decoy rectangles, rendered through a pinhole camera by per-pixel
// ray casting, plus a kinematic vehicle model. World coordinates are
// NED-style: x forward (toward the wall in the default scene), y right,
// z down; yaw is measured about +z, zero along +x.

using Color = std::array<std::uint8_t, 3>;

struct WorldModel {
    Eigen::Vector3d wall_point{10.0, 0.0, 0.0};   // any point on the wall plane
    Eigen::Vector3d wall_normal{-1.0, 0.0, 0.0};  // unit, toward the approach side
    Eigen::Vector3d window_center{10.0, 0.0, -1.5};
    double window_width = 1.0;
    double window_height = 0.8;
    Color wall_color{205, 205, 205};
    Color interior_color{25, 25, 25};
    Color background_color{90, 110, 140};

    /// Decoy rectangle on the wall, placed in plane coordinates (right/down
    /// as seen from the approach side) relative to the window center.
    struct Decoy {
        Eigen::Vector2d offset{0.0, 0.0};
        double width = 0.0;
        double height = 0.0;
        Color color{128, 128, 128};
    };
    std::vector<Decoy> decoys;

    double noise_sigma = 0.0;  // per-channel Gaussian pixel noise

    /// Right/down unit axes of the wall plane as seen from the approach side.
    Eigen::Vector3d plane_x() const;
    Eigen::Vector3d plane_y() const;

    /// World position of a point given in plane coordinates relative to the
    /// window center.
    Eigen::Vector3d on_plane(const Eigen::Vector2d& uv) const;

    void validate() const;  // throws std::invalid_argument
};

struct UavState {
    Eigen::Vector3d position{0.0, 0.0, 0.0};
    double yaw = 0.0;  // rad, in (-pi, pi]
};

/// One control step in the vehicle body frame.
struct NavCommand {
    double forward = 0.0;
    double lateral = 0.0;   // positive right
    double vertical = 0.0;  // positive down
    double yaw = 0.0;       // rad
};

/// Per-step magnitude bounds enforced by step().
struct CommandLimits {
    double forward = 0.0;
    double lateral = 0.0;
    double vertical = 0.0;
    double yaw = 0.0;
};

inline double wrap_angle(double a) {
    a = std::fmod(a + M_PI, 2.0 * M_PI);
    if (a < 0.0) a += 2.0 * M_PI;
    a -= M_PI;
    return a == -M_PI ? M_PI : a;
}

/// World-to-camera pose for the forward-facing camera at this state
/// (CV axes: X right, Y down, Z forward).
CameraPose camera_pose(const UavState& uav);

/// Ray-cast render: pixel rays are intersected with the wall plane and
/// shaded by which region they hit. Pixels crossed by a region boundary are
/// supersampled so the boundary position is carried in their intensity, as
/// a real integrating pixel would. Noise, when enabled, is drawn from a
/// per-pixel counter-based generator keyed on `seed`, so results are
/// deterministic. Throws if the camera sits on the wall plane.
RgbImage render(const WorldModel& world, const UavState& uav, const CameraIntrinsics& k,
                int width, int height, std::uint64_t seed);

/// Kinematic step: yaw is updated first, then the body-frame translation is
/// rotated into the world frame by the new yaw. Commands exceeding `limits`
/// are rejected with std::invalid_argument.
UavState step(const UavState& uav, const NavCommand& cmd, const CommandLimits& limits);

struct GroundTruth {
    double relative_yaw = 0.0;  // signed; matches the pose module's psi convention
    std::array<Vec2, 4> corner_px{};
    bool corners_valid = false;  // false when a corner falls behind the camera
    bool crossed_inside = false;
};

/// Oracle quantities: the signed relative yaw between the camera axis and
/// the inward wall normal, the projected true window corners, and whether
/// the vehicle has crossed the plane inside the window rectangle.
GroundTruth ground_truth(const WorldModel& world, const UavState& uav,
                         const CameraIntrinsics& k);

}  // namespace ingress
