#include "ingress/pose.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ingress/config.hpp"
#include "ingress/simworld.hpp"

namespace ingress {
namespace {

constexpr double kDeg = M_PI / 180.0;

const CameraIntrinsics kTestCam{500.0, 500.0, 320.0, 240.0};

// Planar homography from a plane-to-camera pose: H = K [r1 r2 t].
Eigen::Matrix3d planar_homography(const CameraIntrinsics& k, const Eigen::Matrix3d& r,
                                  const Eigen::Vector3d& t) {
    Eigen::Matrix3d cols;
    cols.col(0) = r.col(0);
    cols.col(1) = r.col(1);
    cols.col(2) = t;
    return k.matrix() * cols;
}

std::vector<Eigen::Vector2d> unit_square() {
    return {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
}

TEST(EstimateHomography, IdentityOnFixedPoints) {
    const auto pts = unit_square();
    const Homography h = estimate_homography(pts, pts);
    EXPECT_LT((h.m - Eigen::Matrix3d::Identity()).norm(), 1e-9);
}

TEST(EstimateHomography, PureTranslation) {
    const auto world = unit_square();
    std::vector<Eigen::Vector2d> image;
    for (const auto& p : world) image.push_back(p + Eigen::Vector2d(10, 5));
    const Homography h = estimate_homography(world, image);
    Eigen::Matrix3d expect;
    expect << 1, 0, 10, 0, 1, 5, 0, 0, 1;
    EXPECT_LT((h.m - expect).norm(), 1e-9);
}

TEST(EstimateHomography, ForwardModelReprojection) {
    // Project the corners of a 1 x 0.8 window through a known K[R|t] and
    // verify the estimated homography reproduces the projections.
    const WindowGeometry geom{1.0, 0.8};
    const EulerAngles angles{5 * kDeg, -8 * kDeg, 17 * kDeg};
    const Eigen::Matrix3d r = rotation_from_euler(angles);
    const Eigen::Vector3d t(0.2, -0.1, 5.0);
    const CameraPose pose{r, t};

    std::vector<Eigen::Vector2d> world, image;
    for (const auto& c : geom.plane_corners()) {
        world.push_back(c);
        image.push_back(project_point(kTestCam, pose, {c.x(), c.y(), 0.0}));
    }
    const Homography h = estimate_homography(world, image);
    for (std::size_t i = 0; i < world.size(); ++i) {
        const Eigen::Vector3d m = h.m * world[i].homogeneous();
        EXPECT_NEAR(m.x() / m.z(), image[i].x(), 1e-6);
        EXPECT_NEAR(m.y() / m.z(), image[i].y(), 1e-6);
    }
}

TEST(EstimateHomography, NoisyOverdeterminedFitStaysTight) {
    // 3x3 grid with +-0.25 px uniform noise: least-squares reprojection must
    // stay under 0.5 px.
    const EulerAngles angles{0, 10 * kDeg, -20 * kDeg};
    const CameraPose pose{rotation_from_euler(angles), {0.1, 0.05, 6.0}};
    std::vector<Eigen::Vector2d> world, image;
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> noise(-0.25, 0.25);
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) {
            const Eigen::Vector2d w(0.5 * i, 0.4 * j);
            world.push_back(w);
            Eigen::Vector2d px = project_point(kTestCam, pose, {w.x(), w.y(), 0.0});
            image.push_back(px + Eigen::Vector2d(noise(rng), noise(rng)));
        }
    const Homography h = estimate_homography(world, image);
    for (std::size_t i = 0; i < world.size(); ++i) {
        const Eigen::Vector3d m = h.m * world[i].homogeneous();
        const Eigen::Vector2d px(m.x() / m.z(), m.y() / m.z());
        EXPECT_LT((px - image[i]).norm(), 0.5);
    }
}

TEST(EstimateHomography, CollinearWorldPointsRejected) {
    const std::vector<Eigen::Vector2d> world{{0, 0}, {1, 1}, {2, 2}, {0, 1}};
    const std::vector<Eigen::Vector2d> image{{0, 0}, {1, 1}, {2, 2}, {0, 1}};
    EXPECT_THROW(estimate_homography(world, image), std::runtime_error);
}

TEST(EstimateHomography, TooFewPointsRejected) {
    const std::vector<Eigen::Vector2d> three{{0, 0}, {1, 0}, {0, 1}};
    EXPECT_THROW(estimate_homography(three, three), std::invalid_argument);
}

TEST(DecomposeHomography, RecoversIdentityPose) {
    const Eigen::Vector3d t(0, 0, 5);
    const Homography h =
        Homography::from_matrix(planar_homography(kTestCam, Eigen::Matrix3d::Identity(), t));
    const CameraPose pose = decompose_homography(h, kTestCam);
    EXPECT_LT((pose.rotation - Eigen::Matrix3d::Identity()).norm(), 1e-9);
    EXPECT_LT((pose.translation - t).norm(), 1e-9);
}

TEST(DecomposeHomography, ScaleInvariant) {
    const EulerAngles angles{3 * kDeg, -12 * kDeg, 25 * kDeg};
    const Eigen::Matrix3d r = rotation_from_euler(angles);
    const Eigen::Vector3d t(0.4, -0.2, 7.0);
    const Eigen::Matrix3d hm = planar_homography(kTestCam, r, t);

    const CameraPose a = decompose_homography(Homography::from_matrix(hm), kTestCam);
    const CameraPose b = decompose_homography(Homography::from_matrix(2.0 * hm), kTestCam);
    EXPECT_LT((a.rotation - b.rotation).norm(), 1e-12);
    EXPECT_LT((a.translation - b.translation).norm(), 1e-12);
}

TEST(DecomposeHomography, RecoversBodyYaw) {
    // Pose constructed from a 20 degree body-frame relative yaw with
    // t = (0.3, 0, 4); the extracted psi must match to 1e-6 rad.
    const Eigen::Matrix3d p = (Eigen::Matrix3d() << 0, 0, 1, 1, 0, 0, 0, 1, 0).finished();
    const Eigen::Matrix3d r_body = rotation_from_euler({0, 0, 20 * kDeg});
    const Eigen::Matrix3d r_cv = p.transpose() * r_body * p;
    const Eigen::Vector3d t(0.3, 0.0, 4.0);

    const Homography h = Homography::from_matrix(planar_homography(kTestCam, r_cv, t));
    const CameraPose pose = decompose_homography(h, kTestCam);
    const EulerAngles angles = euler_from_rotation(cv_to_body_rotation(pose.rotation));
    EXPECT_NEAR(angles.psi, 20 * kDeg, 1e-6);
    EXPECT_LT((pose.translation - t).norm(), 1e-6);
}

TEST(DecomposeHomography, RandomizedPosesRoundTrip) {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> yaw(-60 * kDeg, 60 * kDeg);
    std::uniform_real_distribution<double> tilt(-30 * kDeg, 30 * kDeg);
    std::uniform_real_distribution<double> depth(2.0, 20.0);
    std::uniform_real_distribution<double> lateral(-0.3, 0.3);
    for (int i = 0; i < 100; ++i) {
        const Eigen::Matrix3d r = rotation_from_euler({tilt(rng), tilt(rng), yaw(rng)});
        const double z = depth(rng);
        const Eigen::Vector3d t(lateral(rng) * z, lateral(rng) * z, z);
        const CameraPose pose =
            decompose_homography(Homography::from_matrix(planar_homography(kTestCam, r, t)),
                                 kTestCam);
        EXPECT_LT((pose.rotation - r).norm(), 1e-6);
        EXPECT_LT((pose.translation - t).norm() / t.norm(), 1e-6);
    }
}

TEST(DecomposeHomography, DegenerateFirstColumnRejected) {
    Eigen::Matrix3d bad = Eigen::Matrix3d::Zero();
    bad(0, 2) = 320;
    bad(1, 2) = 240;
    bad(2, 2) = 1;
    Homography h;
    h.m = bad;
    EXPECT_THROW(decompose_homography(h, kTestCam), std::runtime_error);
}

TEST(Euler, IdentityGivesZeros) {
    const EulerAngles e = euler_from_rotation(Eigen::Matrix3d::Identity());
    EXPECT_DOUBLE_EQ(e.theta, 0.0);
    EXPECT_DOUBLE_EQ(e.phi, 0.0);
    EXPECT_DOUBLE_EQ(e.psi, 0.0);
}

TEST(Euler, PureYawRotation) {
    const EulerAngles e = euler_from_rotation(rotation_from_euler({0, 0, 30 * kDeg}));
    EXPECT_NEAR(e.theta, 0.0, 1e-12);
    EXPECT_NEAR(e.phi, 0.0, 1e-12);
    EXPECT_NEAR(e.psi, 30 * kDeg, 1e-12);
}

TEST(Euler, GimbalLockConvention) {
    // Pure pitch of 90 degrees: theta forced to 0, phi = +90, psi = 0.
    const EulerAngles e = euler_from_rotation(rotation_from_euler({0, 90 * kDeg, 0}));
    EXPECT_NEAR(e.phi, 90 * kDeg, 1e-9);
    EXPECT_DOUBLE_EQ(e.theta, 0.0);
    EXPECT_NEAR(e.psi, 0.0, 1e-9);
}

TEST(Euler, HandExpandedProductMatches) {
    // Direct trig evaluation of Rz(psi) Ry(phi) Rx(theta) entry by entry.
    const double th = 10 * kDeg, ph = 20 * kDeg, ps = 30 * kDeg;
    const double ct = std::cos(th), st = std::sin(th);
    const double cp = std::cos(ph), sp = std::sin(ph);
    const double cs = std::cos(ps), ss = std::sin(ps);
    Eigen::Matrix3d expect;
    expect << cs * cp, cs * sp * st - ss * ct, cs * sp * ct + ss * st,
              ss * cp, ss * sp * st + cs * ct, ss * sp * ct - cs * st,
              -sp, cp * st, cp * ct;
    EXPECT_LT((rotation_from_euler({th, ph, ps}) - expect).norm(), 1e-12);
}

TEST(Euler, RoundTripAwayFromGimbalLock) {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> angle(-M_PI + 1e-6, M_PI);
    std::uniform_real_distribution<double> pitch(-88 * kDeg, 88 * kDeg);
    for (int i = 0; i < 1000; ++i) {
        const EulerAngles in{angle(rng), pitch(rng), angle(rng)};
        const EulerAngles out = euler_from_rotation(rotation_from_euler(in));
        EXPECT_NEAR(out.theta, in.theta, 1e-9);
        EXPECT_NEAR(out.phi, in.phi, 1e-9);
        EXPECT_NEAR(out.psi, in.psi, 1e-9);
    }
}

TEST(Euler, NonOrthonormalRejected) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m(0, 0) = 1.001;
    EXPECT_THROW(euler_from_rotation(m), std::invalid_argument);
    EXPECT_THROW(euler_from_rotation(-Eigen::Matrix3d::Identity()), std::invalid_argument);
}

TEST(ProjectPoint, OpticalAxisHitsPrincipalPoint) {
    const CameraPose pose;  // identity
    const Eigen::Vector2d px = project_point(kTestCam, pose, {0, 0, 7.0});
    EXPECT_DOUBLE_EQ(px.x(), kTestCam.cx);
    EXPECT_DOUBLE_EQ(px.y(), kTestCam.cy);
}

TEST(ProjectPoint, KnownOffsetPoint) {
    CameraIntrinsics cam{500, 500, 320, 320};
    const Eigen::Vector2d px = project_point(cam, CameraPose{}, {1, 0, 5});
    EXPECT_DOUBLE_EQ(px.x(), 420.0);
    EXPECT_DOUBLE_EQ(px.y(), 320.0);
}

TEST(ProjectPoint, BehindCameraRejected) {
    EXPECT_THROW(project_point(kTestCam, CameraPose{}, {0, 0, -1}), std::runtime_error);
}

// window_pose against the synthetic world's ground truth.
class WindowPoseTest : public ::testing::Test {
 protected:
    RunConfig cfg = default_config();
    Histogram reference = cfg.reference_histogram();

    std::optional<WindowCandidate> detect_at(double yaw_deg) {
        UavState state;
        state.position = {4.0, 0.0, -1.5};
        state.yaw = yaw_deg * kDeg;
        const RgbImage frame =
            render(cfg.world, state, cfg.camera, cfg.frame_width, cfg.frame_height, 21);
        return detect_window(frame, reference, cfg.detect);
    }
};

TEST_F(WindowPoseTest, HeadOnYawNearZero) {
    const auto det = detect_at(0.0);
    ASSERT_TRUE(det.has_value());
    const WindowPoseResult wp = window_pose(*det, cfg.geometry, cfg.camera);
    EXPECT_NEAR(wp.angles.psi, 0.0, 2 * kDeg);
}

TEST_F(WindowPoseTest, YawedCameraRecovered) {
    // ground-truth relative yaw is +15 degrees when the vehicle yaw is -15.
    const auto det = detect_at(-15.0);
    ASSERT_TRUE(det.has_value());
    const WindowPoseResult wp = window_pose(*det, cfg.geometry, cfg.camera);
    EXPECT_NEAR(wp.angles.psi, 15 * kDeg, 2 * kDeg);
}

TEST_F(WindowPoseTest, WrongCyclicOrderSurfacesAnomaly) {
    auto det = detect_at(0.0);
    ASSERT_TRUE(det.has_value());
    WindowCandidate rotated = *det;
    std::rotate(rotated.corners.begin(), rotated.corners.begin() + 1, rotated.corners.end());
    const WindowPoseResult wp = window_pose(rotated, cfg.geometry, cfg.camera);
    // A cyclic shift is an in-plane quarter turn: the roll blows up.
    EXPECT_GT(std::fabs(wp.angles.theta), 30 * kDeg);
}

}  // namespace
}  // namespace ingress
