#include "ddgs/geometry.hpp"

#include <fstream>

#include <json.hpp>

namespace ddgs {

using nlohmann::json;

Projection project_point(const CameraView& view, const Vec3& mu) {
    Vec3 p = view.pose.to_camera(mu);
    if (p.z <= kZNear) throw std::domain_error("behind camera");
    const Intrinsics& in = view.intrinsics;
    Vec2 mu_hat = in.principal + in.focal_px * Vec2{p.x / p.z, p.y / p.z};
    return {mu_hat, p.z};
}

Mat2 project_covariance(const CameraView& view, const Vec3& mu, const Mat3& sigma) {
    Vec3 p = view.pose.to_camera(mu);
    if (p.z <= kZNear) throw std::domain_error("behind camera");
    double f = view.intrinsics.focal_px;
    double iz = 1.0 / p.z;
    double iz2 = iz * iz;
    // 2x3 perspective Jacobian at p, rows J0, J1
    Vec3 j0{f * iz, 0.0, -f * p.x * iz2};
    Vec3 j1{0.0, f * iz, -f * p.y * iz2};
    Mat3 r = view.pose.rotation_matrix();
    Vec3 m0 = r.transposed() * j0;  // rows of M = J R
    Vec3 m1 = r.transposed() * j1;
    Vec3 sm0 = sigma * m0;
    Vec3 sm1 = sigma * m1;
    Mat2 out{m0.dot(sm0) + kEpsLowpass, m0.dot(sm1),
             m1.dot(sm0), m1.dot(sm1) + kEpsLowpass};
    // enforce exact symmetry against rounding
    double off = 0.5 * (out.m01 + out.m10);
    out.m01 = off;
    out.m10 = off;
    return out;
}

std::pair<double, double> ray_angles(const CameraView& view, const Vec3& mu) {
    Vec3 d = mu - view.pose.camera_center();
    double n = d.norm();
    if (n == 0.0) throw std::invalid_argument("zero-length view direction");
    d = d * (1.0 / n);
    double theta = std::acos(std::max(-1.0, std::min(1.0, d.z)));
    double phi = std::atan2(d.y, d.x);
    return {theta, phi};
}

Pose perturb_pose(const Pose& base, const std::array<double, 6>& delta) {
    Quat dq = Quat::from_rotvec({delta[0], delta[1], delta[2]});
    Vec3 dt{delta[3], delta[4], delta[5]};
    Pose out;
    out.rotation = (dq * base.rotation).normalized();
    out.translation = dq.to_matrix() * base.translation + dt;
    return out;
}

Pose arc_pose(const Vec3& center, double source_dist, double angle_rad) {
    Vec3 source = center + source_dist * Vec3{std::cos(angle_rad), std::sin(angle_rad), 0.0};
    Vec3 fwd = (center - source).normalized();      // camera +z
    Vec3 up_world{0, 0, 1};
    Vec3 right = fwd.cross(up_world).normalized();  // camera +x
    Vec3 down = fwd.cross(right);                   // camera +y
    Mat3 r;
    r.a = {right.x, right.y, right.z, down.x, down.y, down.z, fwd.x, fwd.y, fwd.z};
    // rotation matrix -> quaternion (Shepperd's method, w branch is enough
    // here since the arc keeps trace > -1)
    double tr = r.trace();
    Quat q;
    if (tr > 0) {
        double s = std::sqrt(tr + 1.0) * 2.0;
        q = {0.25 * s, (r(2, 1) - r(1, 2)) / s, (r(0, 2) - r(2, 0)) / s, (r(1, 0) - r(0, 1)) / s};
    } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
        double s = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2)) * 2.0;
        q = {(r(2, 1) - r(1, 2)) / s, 0.25 * s, (r(0, 1) + r(1, 0)) / s, (r(0, 2) + r(2, 0)) / s};
    } else if (r(1, 1) > r(2, 2)) {
        double s = std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2)) * 2.0;
        q = {(r(0, 2) - r(2, 0)) / s, (r(0, 1) + r(1, 0)) / s, 0.25 * s, (r(1, 2) + r(2, 1)) / s};
    } else {
        double s = std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1)) * 2.0;
        q = {(r(1, 0) - r(0, 1)) / s, (r(0, 2) + r(2, 0)) / s, (r(1, 2) + r(2, 1)) / s, 0.25 * s};
    }
    Pose pose;
    pose.rotation = q.normalized();
    pose.translation = -(pose.rotation_matrix() * source);
    return pose;
}

void save_views(const std::vector<CameraView>& views, const std::string& path) {
    json arr = json::array();
    for (const auto& v : views) {
        json j;
        j["quat_wxyz"] = {v.pose.rotation.w, v.pose.rotation.x, v.pose.rotation.y, v.pose.rotation.z};
        j["translation_mm"] = {v.pose.translation.x, v.pose.translation.y, v.pose.translation.z};
        j["focal_px"] = v.intrinsics.focal_px;
        j["width"] = v.intrinsics.width;
        j["height"] = v.intrinsics.height;
        j["principal_px"] = {v.intrinsics.principal.x, v.intrinsics.principal.y};
        arr.push_back(j);
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write views file: " + path);
    f << json{{"views", arr}}.dump(2) << "\n";
}

std::vector<CameraView> load_views(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("missing views file: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("ill-formed views file: " + std::string(e.what()));
    }
    std::vector<CameraView> out;
    for (const auto& vj : j.at("views")) {
        CameraView v;
        auto q = vj.at("quat_wxyz");
        v.pose.rotation = Quat{q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                               q[3].get<double>()}.normalized();
        auto t = vj.at("translation_mm");
        v.pose.translation = {t[0].get<double>(), t[1].get<double>(), t[2].get<double>()};
        v.intrinsics.focal_px = vj.at("focal_px").get<double>();
        v.intrinsics.width = vj.at("width").get<int>();
        v.intrinsics.height = vj.at("height").get<int>();
        auto p = vj.at("principal_px");
        v.intrinsics.principal = {p[0].get<double>(), p[1].get<double>()};
        v.intrinsics.validate();
        out.push_back(v);
    }
    return out;
}

}  // namespace ddgs
