#include "ingress/pose.hpp"

#include <cmath>
#include <stdexcept>

namespace ingress {
namespace {

// Cyclic permutation taking CV camera axes (right, down, forward) to body
// axes (forward, right, down). Applied as a similarity transform on both
// sides of the relative rotation.
Eigen::Matrix3d body_permutation() {
    Eigen::Matrix3d p;
    p << 0, 0, 1, 1, 0, 0, 0, 1, 0;
    return p;
}

// Similarity transform that scales/translates points so their centroid is
// the origin and the mean distance from it is sqrt(2).
Eigen::Matrix3d hartley_normalization(const std::vector<Eigen::Vector2d>& pts) {
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (const auto& p : pts) centroid += p;
    centroid /= static_cast<double>(pts.size());

    double mean_dist = 0.0;
    for (const auto& p : pts) mean_dist += (p - centroid).norm();
    mean_dist /= static_cast<double>(pts.size());
    const double scale = mean_dist > 1e-12 ? std::sqrt(2.0) / mean_dist : 1.0;

    Eigen::Matrix3d t;
    t << scale, 0.0, -scale * centroid.x(), 0.0, scale, -scale * centroid.y(), 0.0, 0.0, 1.0;
    return t;
}

bool three_collinear(const std::vector<Eigen::Vector2d>& pts) {
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                const Eigen::Vector2d a = pts[j] - pts[i];
                const Eigen::Vector2d b = pts[k] - pts[i];
                const double cross = a.x() * b.y() - a.y() * b.x();
                const double scale = a.norm() * b.norm();
                if (scale < 1e-18 || std::fabs(cross) < 1e-10 * scale) return true;
            }
    return false;
}

}  // namespace

void CameraIntrinsics::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0))
        throw std::invalid_argument("CameraIntrinsics: fx and fy must be positive");
    if (!std::isfinite(cx) || !std::isfinite(cy))
        throw std::invalid_argument("CameraIntrinsics: principal point must be finite");
}

void WindowGeometry::validate() const {
    if (!(width > 0.0) || !(height > 0.0))
        throw std::invalid_argument("WindowGeometry: width and height must be positive");
}

Homography Homography::from_matrix(const Eigen::Matrix3d& h) {
    Homography out;
    const double h33 = h(2, 2);
    if (std::fabs(h33) > 1e-12) {
        out.m = h / h33;
    } else {
        const double norm = h.norm();
        if (norm < 1e-15) throw std::runtime_error("Homography: zero matrix");
        out.m = h / norm;
    }
    return out;
}

Homography estimate_homography(const std::vector<Eigen::Vector2d>& world_pts,
                               const std::vector<Eigen::Vector2d>& image_pts) {
    const std::size_t n = world_pts.size();
    if (n < 4 || image_pts.size() != n)
        throw std::invalid_argument("estimate_homography: need >= 4 matched correspondences");
    // With exactly four correspondences any collinear triple is degenerate;
    // larger sets (grids) may contain collinear triples and are guarded by
    // the rank check below instead.
    if (n == 4 && three_collinear(world_pts))
        throw std::runtime_error("estimate_homography: degenerate configuration (collinear)");

    const Eigen::Matrix3d tw = hartley_normalization(world_pts);
    const Eigen::Matrix3d ti = hartley_normalization(image_pts);

    Eigen::MatrixXd a(2 * n, 9);
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d w = tw * world_pts[i].homogeneous();
        const Eigen::Vector3d p = ti * image_pts[i].homogeneous();
        const double X = w.x() / w.z(), Y = w.y() / w.z();
        const double x = p.x() / p.z(), y = p.y() / p.z();
        a.row(2 * i) << -X, -Y, -1, 0, 0, 0, x * X, x * Y, x;
        a.row(2 * i + 1) << 0, 0, 0, -X, -Y, -1, y * X, y * Y, y;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    if (sv(0) < 1e-15 || sv(7) / sv(0) < 1e-10)
        throw std::runtime_error("estimate_homography: rank-deficient system");

    const Eigen::VectorXd h = svd.matrixV().col(8);
    Eigen::Matrix3d hn;
    hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);

    return Homography::from_matrix(ti.inverse() * hn * tw);
}

CameraPose decompose_homography(const Homography& h, const CameraIntrinsics& k) {
    k.validate();
    const Eigen::Matrix3d m = k.matrix().inverse() * h.m;
    const Eigen::Vector3d m1 = m.col(0), m2 = m.col(1), m3 = m.col(2);

    const double n1 = m1.norm();
    if (n1 < 1e-12 * m.norm())
        throw std::runtime_error("decompose_homography: degenerate homography (|m1| ~ 0)");

    double lambda = 1.0 / n1;
    if (lambda * m3.z() < 0.0) lambda = -lambda;  // keep the plane in front of the camera

    Eigen::Matrix3d r0;
    r0.col(0) = lambda * m1;
    r0.col(1) = lambda * m2;
    r0.col(2) = r0.col(0).cross(r0.col(1));

    Eigen::JacobiSVD<Eigen::Matrix3d> svd(r0, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
        Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
        flip(2, 2) = -1.0;
        r = svd.matrixU() * flip * svd.matrixV().transpose();
    }

    CameraPose pose;
    pose.rotation = r;
    pose.translation = lambda * m3;
    return pose;
}

EulerAngles euler_from_rotation(const Eigen::Matrix3d& r) {
    const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity()).norm();
    const double det = r.determinant();
    if (ortho > 1e-9 || std::fabs(det - 1.0) > 1e-9)
        throw std::invalid_argument("euler_from_rotation: input is not a rotation matrix");

    EulerAngles e;
    const double cos_phi = std::hypot(r(2, 1), r(2, 2));
    if (cos_phi < 1e-9) {
        // Gimbal lock: roll and yaw are coupled; fix theta = 0 and fold the
        // free angle into psi.
        e.theta = 0.0;
        e.phi = r(2, 0) <= 0.0 ? M_PI / 2.0 : -M_PI / 2.0;
        e.psi = std::atan2(-r(0, 1), r(1, 1));
    } else {
        e.theta = std::atan2(r(2, 1), r(2, 2));
        e.phi = std::atan2(-r(2, 0), cos_phi);
        e.psi = std::atan2(r(1, 0), r(0, 0));
    }
    return e;
}

Eigen::Matrix3d rotation_from_euler(const EulerAngles& angles) {
    const double ct = std::cos(angles.theta), st = std::sin(angles.theta);
    const double cp = std::cos(angles.phi), sp = std::sin(angles.phi);
    const double cs = std::cos(angles.psi), ss = std::sin(angles.psi);

    Eigen::Matrix3d rx, ry, rz;
    rx << 1, 0, 0, 0, ct, -st, 0, st, ct;
    ry << cp, 0, sp, 0, 1, 0, -sp, 0, cp;
    rz << cs, -ss, 0, ss, cs, 0, 0, 0, 1;
    return rz * ry * rx;
}

Eigen::Vector2d project_point(const CameraIntrinsics& k, const CameraPose& pose,
                              const Eigen::Vector3d& world_pt) {
    const Eigen::Vector3d cam = pose.rotation * world_pt + pose.translation;
    if (!(cam.z() > 0.0))
        throw std::runtime_error("project_point: point has non-positive depth");
    return {k.fx * cam.x() / cam.z() + k.cx, k.fy * cam.y() / cam.z() + k.cy};
}

Eigen::Matrix3d cv_to_body_rotation(const Eigen::Matrix3d& r_cv) {
    const Eigen::Matrix3d p = body_permutation();
    return p * r_cv * p.transpose();
}

WindowPoseResult window_pose(const WindowCandidate& candidate, const WindowGeometry& geometry,
                             const CameraIntrinsics& k) {
    geometry.validate();
    const std::array<Eigen::Vector2d, 4> plane = geometry.plane_corners();

    std::vector<Eigen::Vector2d> world_pts, image_pts;
    for (int i = 0; i < 4; ++i) {
        world_pts.push_back(plane[i]);
        image_pts.emplace_back(candidate.corners[i].x, candidate.corners[i].y);
    }

    const Homography h = estimate_homography(world_pts, image_pts);

    WindowPoseResult result;
    result.pose = decompose_homography(h, k);
    result.angles = euler_from_rotation(cv_to_body_rotation(result.pose.rotation));

    for (int i = 0; i < 4; ++i) {
        const Eigen::Vector3d mapped = h.m * world_pts[i].homogeneous();
        const Eigen::Vector2d px(mapped.x() / mapped.z(), mapped.y() / mapped.z());
        result.max_reproj_px = std::max(result.max_reproj_px, (px - image_pts[i]).norm());
    }
    return result;
}

}  // namespace ingress
