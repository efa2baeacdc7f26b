#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "ingress/detect.hpp"

namespace ingress {

// Homography estimation from plane/pixel correspondences and decomposition
// into the camera pose relative to the window plane.
//
// Conventions used throughout:
//  - Camera (CV) frame: X right, Y down, Z forward along the optical axis.
//  - Window plane frame: X right along the top edge as seen head-on, Y down,
//    Z into the wall; origin at the window center, so the plane is Z = 0.
//  - Euler angles follow the yaw-pitch-roll composition
//    R = Rz(psi) * Ry(phi) * Rx(theta), whose extraction formulas are
//      theta = atan2(r32, r33)
//      phi   = atan2(-r31, sqrt(r32^2 + r33^2))
//      psi   = atan2(r21, r11).
//  - For navigation the relative rotation is re-expressed in body axes
//    (X forward, Y right, Z down) so that a pure vehicle yaw offset lands in
//    psi; see window_pose().

struct CameraIntrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;

    Eigen::Matrix3d matrix() const {
        Eigen::Matrix3d k;
        k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
        return k;
    }
    void validate() const;
};

/// 3x3 homography, stored normalized: h33 = 1 when h33 != 0, otherwise unit
/// Frobenius norm (the map is only defined up to scale).
struct Homography {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();

    static Homography from_matrix(const Eigen::Matrix3d& h);
};

struct CameraPose {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();
};

/// theta = roll, phi = pitch, psi = yaw, radians.
struct EulerAngles {
    double theta = 0.0;
    double phi = 0.0;
    double psi = 0.0;
};

/// Physical window rectangle; corners live on the plane Z = 0.
struct WindowGeometry {
    double width = 0.0;
    double height = 0.0;

    /// TL, TR, BR, BL in plane coordinates, matching the detector's corner
    /// ordering convention.
    std::array<Eigen::Vector2d, 4> plane_corners() const {
        const double hw = width / 2.0, hh = height / 2.0;
        return {Eigen::Vector2d(-hw, -hh), Eigen::Vector2d(hw, -hh), Eigen::Vector2d(hw, hh),
                Eigen::Vector2d(-hw, hh)};
    }
    void validate() const;
};

/// Normalized DLT: Hartley-normalize both point sets, solve the stacked
/// 2n x 9 system by smallest singular vector, denormalize. Requires >= 4
/// correspondences with no 3 world points collinear; degenerate
/// configurations raise std::runtime_error.
Homography estimate_homography(const std::vector<Eigen::Vector2d>& world_pts,
                               const std::vector<Eigen::Vector2d>& image_pts);

/// Recover [R|t] from a planar homography: M = K^-1 H, lambda = 1/|m1| with
/// sign chosen so t_z > 0, r3 = r1 x r2, then re-orthonormalize by SVD.
CameraPose decompose_homography(const Homography& h, const CameraIntrinsics& k);

/// Extraction formulas above; at gimbal lock (|phi| = pi/2) theta is set to 0
/// and the free angle folded into psi. Non-orthonormal input is rejected.
EulerAngles euler_from_rotation(const Eigen::Matrix3d& r);

/// R = Rz(psi) * Ry(phi) * Rx(theta).
Eigen::Matrix3d rotation_from_euler(const EulerAngles& angles);

/// Pinhole projection x = K (R X + t) dehomogenized; points with
/// non-positive depth raise std::runtime_error.
Eigen::Vector2d project_point(const CameraIntrinsics& k, const CameraPose& pose,
                              const Eigen::Vector3d& world_pt);

/// Re-expresses a plane-to-camera rotation (CV axes) in body axes
/// (X forward, Y right, Z down) on both sides. A pure vehicle yaw offset
/// then appears as the Euler psi of the result.
Eigen::Matrix3d cv_to_body_rotation(const Eigen::Matrix3d& r_cv);

struct WindowPoseResult {
    CameraPose pose;           // plane -> camera, CV axes
    EulerAngles angles;        // extracted from the body-axes rotation
    double max_reproj_px = 0;  // homography residual over the 4 corners
};

/// estimate_homography from the metric window corners to the detected pixel
/// corners, decompose, and extract the navigation angles. The candidate's
/// corners must follow the detector's ordering convention; feeding them in a
/// different cyclic order shows up as a large roll/residual in the result.
WindowPoseResult window_pose(const WindowCandidate& candidate, const WindowGeometry& geometry,
                             const CameraIntrinsics& k);

}  // namespace ingress
