#include "ddgs/drrcast.hpp"

#include <algorithm>
#include <limits>

#include "ddgs/rng.hpp"

namespace ddgs {

double siddon_integral(const AttenuationVolume& v, const Vec3& src, const Vec3& dst) {
    Vec3 dir = dst - src;
    double seg_len = dir.norm();
    if (seg_len == 0.0) throw std::invalid_argument("siddon_integral: src == dst");

    // Clip [0,1] segment parameter range against the volume box.
    Vec3 bmin = v.bbox_min();
    Vec3 bmax = v.bbox_max();
    double t0 = 0.0, t1 = 1.0;
    for (int a = 0; a < 3; ++a) {
        double d = dir[a];
        double s = src[a];
        if (d == 0.0) {
            if (s < bmin[a] || s > bmax[a]) return 0.0;
            continue;
        }
        double ta = (bmin[a] - s) / d;
        double tb = (bmax[a] - s) / d;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    if (t0 >= t1) return 0.0;

    // Voxel of a point at parameter t (midpoint of the current span keeps the
    // index decision away from boundary roundoff).
    auto voxel_of = [&](double t) {
        Vec3 p = src + t * dir;
        int i[3];
        for (int a = 0; a < 3; ++a) {
            double fa = (p[a] - bmin[a]) / v.spacing[a];
            i[a] = std::clamp(static_cast<int>(std::floor(fa)), 0, v.dims[a] - 1);
        }
        return std::array<int, 3>{i[0], i[1], i[2]};
    };

    // Next boundary-crossing parameter per axis.
    std::array<double, 3> t_next;
    std::array<double, 3> dt;
    std::array<int, 3> step;
    auto vox = voxel_of(0.5 * (t0 + t1) < t1 ? t0 + 1e-12 * (t1 - t0) : t0);
    vox = voxel_of(t0 + 1e-9 * (t1 - t0));
    for (int a = 0; a < 3; ++a) {
        double d = dir[a];
        if (d == 0.0) {
            t_next[a] = std::numeric_limits<double>::infinity();
            dt[a] = std::numeric_limits<double>::infinity();
            step[a] = 0;
            continue;
        }
        step[a] = d > 0 ? 1 : -1;
        dt[a] = v.spacing[a] / std::abs(d);
        double boundary = bmin[a] + (vox[a] + (d > 0 ? 1 : 0)) * v.spacing[a];
        t_next[a] = (boundary - src[a]) / d;
    }

    double integral = 0.0;
    double t_cur = t0;
    while (t_cur < t1) {
        int axis = 0;
        if (t_next[1] < t_next[axis]) axis = 1;
        if (t_next[2] < t_next[axis]) axis = 2;
        double t_stop = std::min(t_next[axis], t1);
        double chord = (t_stop - t_cur) * seg_len;
        if (chord > 0.0) integral += v.at(vox[0], vox[1], vox[2]) * chord;
        t_cur = t_stop;
        if (t_next[axis] >= t1) break;
        vox[axis] += step[axis];
        if (vox[axis] < 0 || vox[axis] >= v.dims[axis]) break;
        t_next[axis] += dt[axis];
    }
    return integral * v.mu_scale;
}

TargetImageSet render_targets(const AttenuationVolume& v, const std::vector<CameraView>& views,
                              const std::optional<AnisoPerturbSpec>& perturb) {
    if (views.empty()) throw std::invalid_argument("render_targets: empty view list");
    if (perturb && (perturb->epsilon < 0.0 || perturb->epsilon > 0.1))
        throw std::invalid_argument("aniso epsilon must be in [0, 0.1]");

    TargetImageSet out;
    out.views = views;
    out.images.reserve(views.size());
    std::vector<std::vector<Vec3>> ray_dirs(views.size());

    for (size_t vi = 0; vi < views.size(); ++vi) {
        const CameraView& view = views[vi];
        view.intrinsics.validate();
        const Intrinsics& in = view.intrinsics;
        RenderedImage img(in.width, in.height);
        ray_dirs[vi].resize(img.size());
        Vec3 src = view.pose.camera_center();
        Mat3 rt = view.pose.rotation_matrix().transposed();
        double reach = (v.world_center() - src).norm() + v.diagonal();

#pragma omp parallel for schedule(static)
        for (int py = 0; py < in.height; ++py) {
            for (int px = 0; px < in.width; ++px) {
                Vec3 dir_cam{(px + 0.5 - in.principal.x) / in.focal_px,
                             (py + 0.5 - in.principal.y) / in.focal_px, 1.0};
                Vec3 dir = (rt * dir_cam).normalized();
                ray_dirs[vi][static_cast<size_t>(py) * in.width + px] = dir;
                img.at(px, py) = siddon_integral(v, src, src + reach * dir);
            }
        }
        out.images.push_back(std::move(img));
    }

    double max_raw = 0.0;
    for (const auto& img : out.images)
        for (double p : img.pixels) {
            if (!std::isfinite(p)) throw std::runtime_error("non-finite line integral");
            max_raw = std::max(max_raw, p);
        }
    out.norm_offset = 0.0;
    out.norm_scale = max_raw > 0.0 ? 1.0 / max_raw : 1.0;

    for (size_t vi = 0; vi < out.images.size(); ++vi) {
        auto& img = out.images[vi];
        for (size_t i = 0; i < img.pixels.size(); ++i) {
            double p = img.pixels[i] * out.norm_scale + out.norm_offset;
            if (perturb && perturb->epsilon > 0.0) {
                double g = ray_dirs[vi][i].dot(perturb->coeffs);
                p *= 1.0 + perturb->epsilon * g;
            }
            img.pixels[i] = clamp01(p);
        }
    }
    return out;
}

ProtocolViews make_protocol_views(const AttenuationVolume& v, const ViewProtocol& proto) {
    if (proto.n_train < 1) throw std::invalid_argument("need at least one training view");
    if (proto.range_lo_deg >= proto.range_hi_deg)
        throw std::invalid_argument("angular range must be increasing");

    double diag = v.diagonal();
    double source_dist = proto.source_dist > 0 ? proto.source_dist : 1.6 * diag;
    double focal = proto.focal_px > 0 ? proto.focal_px
                                      : 0.85 * proto.width * source_dist / diag;
    Intrinsics in;
    in.focal_px = focal;
    in.width = proto.width;
    in.height = proto.height;
    in.principal = {0.5 * proto.width, 0.5 * proto.height};
    in.validate();

    Vec3 center = v.world_center();
    double lo = proto.range_lo_deg * kPi / 180.0;
    double hi = proto.range_hi_deg * kPi / 180.0;

    ProtocolViews out;
    for (int i = 0; i < proto.n_train; ++i) {
        double a = proto.n_train == 1 ? 0.5 * (lo + hi)
                                      : lo + (hi - lo) * i / (proto.n_train - 1);
        out.train.push_back({arc_pose(center, source_dist, a), in});
    }
    Rng rng(proto.seed);
    for (int i = 0; i < proto.n_test; ++i)
        out.test.push_back({arc_pose(center, source_dist, rng.uniform(lo, hi)), in});
    return out;
}

}  // namespace ddgs
