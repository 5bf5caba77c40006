#pragma once

#include <array>
#include <string>
#include <vector>

#include "ddgs/core.hpp"

namespace ddgs {

// Rigid world-to-camera transform: x_cam = R(q) * x_world + t.
struct Pose {
    Quat rotation = Quat::identity();
    Vec3 translation{0, 0, 0};  // mm

    Pose() = default;
    Pose(const Quat& q, const Vec3& t) : rotation(q.normalized()), translation(t) {}

    Mat3 rotation_matrix() const { return rotation.to_matrix(); }
    Vec3 camera_center() const {
        // c solves R c + t = 0
        return rotation_matrix().transposed() * (-translation);
    }
    Vec3 to_camera(const Vec3& p_world) const { return rotation_matrix() * p_world + translation; }
};

struct Intrinsics {
    double focal_px = 1.0;
    int width = 1, height = 1;
    Vec2 principal{0.5, 0.5};  // pixels, continuous coordinates

    void validate() const {
        if (focal_px <= 0) throw std::invalid_argument("focal_px must be > 0");
        if (width < 1 || height < 1) throw std::invalid_argument("image dims must be >= 1");
    }
};

struct CameraView {
    Pose pose;
    Intrinsics intrinsics;
};

constexpr double kZNear = 1.0;        // mm; points at or behind are culled
constexpr double kEpsLowpass = 0.3;  // px^2 screen-space dilation floor

struct Projection {
    Vec2 mu_hat;   // pixels
    double depth;  // camera-frame z, mm
};

// Perspective projection of a world point. Throws if depth <= z_near.
Projection project_point(const CameraView& view, const Vec3& mu);

// First-order (Jacobian) projection of a world covariance to the image
// plane, dilated by the low-pass floor.
Mat2 project_covariance(const CameraView& view, const Vec3& mu, const Mat3& sigma);

// World-frame spherical angles of the unit direction from the camera center
// to mu: theta = arccos(d_z) in [0,pi], phi = atan2(d_y, d_x).
std::pair<double, double> ray_angles(const CameraView& view, const Vec3& mu);

// Left-composed exp-map update: delta = (rotvec rad, translation mm).
Pose perturb_pose(const Pose& base, const std::array<double, 6>& delta);

// Camera on a circle of radius `source_dist` around `center` in the world
// z = center.z plane at azimuth `angle_rad`, looking at `center`, detector
// up along world +z.
Pose arc_pose(const Vec3& center, double source_dist, double angle_rad);

// Structured-text views file (list of pose + intrinsics records).
void save_views(const std::vector<CameraView>& views, const std::string& path);
std::vector<CameraView> load_views(const std::string& path);

}  // namespace ddgs
