#include <algorithm>

#include "ddgs/sh.hpp"
#include "ddgs/splat.hpp"

namespace ddgs {

namespace {

// Pixel-level partials accumulated per (tile, Gaussian) pair, then reduced
// in canonical pair order so gradients are bit-reproducible.
struct PairGrad {
    double g_c = 0.0;      // d/d radiosity
    double g_alpha = 0.0;  // d/d alpha (post-sigmoid)
    Vec2 g_mu;             // d/d mu_hat
    double g_a00 = 0.0, g_a01 = 0.0, g_a11 = 0.0;  // d/d conic entries
};

struct ReplayEntry {
    double sigma;
    double expv;
    double transmit;  // before this contribution
    bool clamped;
};

}  // namespace

RenderGradients render_backward(const GaussianSet& iso, const GaussianSet& dir,
                                const RadiosityModel& model, const CameraView& view,
                                const RenderContext& ctx, const std::vector<double>& dL_dpixels,
                                bool want_pose_grad) {
    splat_detail::check_inputs(iso, dir, model, view);
    const Intrinsics& in = view.intrinsics;
    if (ctx.width != in.width || ctx.height != in.height ||
        ctx.raw_pixels.size() != static_cast<size_t>(in.width) * in.height)
        throw std::invalid_argument("mismatched forward intermediates");
    if (dL_dpixels.size() != ctx.raw_pixels.size())
        throw std::invalid_argument("dL_dpixels shape mismatch");
    for (const SplatPoint& sp : ctx.points) {
        size_t n = sp.from_dir ? dir.size() : iso.size();
        if (sp.set_index >= n) throw std::invalid_argument("mismatched forward intermediates");
    }

    RenderGradients out;
    out.iso.resize(iso.size(), model.k);
    out.dir.resize(dir.size(), model.k);
    out.b_iso.assign(model.k, 0.0);
    out.B_dir.assign(static_cast<size_t>(model.k_L()) * model.k, 0.0);
    out.has_pose = want_pose_grad;

    const uint32_t n_tiles = static_cast<uint32_t>(ctx.tiles_x) * ctx.tiles_y;
    std::vector<PairGrad> pair_grads(ctx.pair_point.size());

#pragma omp parallel for schedule(dynamic)
    for (uint32_t tile = 0; tile < n_tiles; ++tile) {
        auto [begin, end] = ctx.tile_ranges[tile];
        if (begin == end) continue;
        int tx = static_cast<int>(tile) % ctx.tiles_x;
        int ty = static_cast<int>(tile) / ctx.tiles_x;
        int px1 = std::min((tx + 1) * kTileSize, in.width);
        int py1 = std::min((ty + 1) * kTileSize, in.height);
        std::vector<ReplayEntry> replay;
        replay.reserve(end - begin);
        for (int py = ty * kTileSize; py < py1; ++py) {
            for (int px = tx * kTileSize; px < px1; ++px) {
                size_t idx = static_cast<size_t>(py) * in.width + px;
                // clamped pixels pass no gradient
                double dLdC = ctx.raw_pixels[idx] > 1.0 ? 0.0 : dL_dpixels[idx];
                if (dLdC == 0.0) continue;
                uint32_t count = ctx.pixel_count[idx];
                if (count == 0) continue;
                Vec2 pix{px + 0.5, py + 0.5};

                // replay the forward traversal
                replay.clear();
                double transmit = 1.0;
                for (uint32_t j = 0; j < count; ++j) {
                    const SplatPoint& sp = ctx.points[ctx.pair_point[begin + j]];
                    Vec2 d = pix - sp.mu_hat;
                    double power = -0.5 * (sp.conic.m00 * d.x * d.x + sp.conic.m11 * d.y * d.y) -
                                   sp.conic.m01 * d.x * d.y;
                    double expv = std::exp(power);
                    double sigma = sp.alpha * expv;
                    bool clamped = sigma > kSigmaClamp;
                    if (clamped) sigma = kSigmaClamp;
                    replay.push_back({sigma, expv, transmit, clamped});
                    transmit *= 1.0 - sigma;
                }

                // back-to-front: suffix holds the contribution behind entry j
                double suffix = 0.0;
                for (int j = static_cast<int>(count) - 1; j >= 0; --j) {
                    const ReplayEntry& e = replay[j];
                    const SplatPoint& sp = ctx.points[ctx.pair_point[begin + j]];
                    PairGrad& pg = pair_grads[begin + j];
                    double c = sp.radiosity;
                    pg.g_c += dLdC * e.sigma * e.transmit;
                    double g_sigma = dLdC * (c * e.transmit - suffix / (1.0 - e.sigma));
                    suffix += c * e.sigma * e.transmit;
                    if (e.clamped) continue;
                    pg.g_alpha += g_sigma * e.expv;
                    double g_power = g_sigma * e.sigma;
                    Vec2 d = pix - sp.mu_hat;
                    Vec2 ad = sp.conic * d;
                    pg.g_mu += g_power * ad;
                    pg.g_a00 += g_power * (-0.5 * d.x * d.x);
                    pg.g_a01 += g_power * (-d.x * d.y);
                    pg.g_a11 += g_power * (-0.5 * d.y * d.y);
                }
            }
        }
    }

    // Canonical reduction: pair order is (tile, depth, index).
    std::vector<PairGrad> acc(ctx.points.size());
    for (size_t p = 0; p < ctx.pair_point.size(); ++p) {
        const PairGrad& pg = pair_grads[p];
        PairGrad& a = acc[ctx.pair_point[p]];
        a.g_c += pg.g_c;
        a.g_alpha += pg.g_alpha;
        a.g_mu += pg.g_mu;
        a.g_a00 += pg.g_a00;
        a.g_a01 += pg.g_a01;
        a.g_a11 += pg.g_a11;
    }

    const Mat3 r = view.pose.rotation_matrix();
    const Vec3 cam_center = view.pose.camera_center();
    const double f = in.focal_px;
    Mat3 pose_r_grad = Mat3::zero();
    Vec3 pose_t_grad{0, 0, 0};
    Vec3 pose_o_grad{0, 0, 0};

    for (size_t pi = 0; pi < ctx.points.size(); ++pi) {
        const SplatPoint& sp = ctx.points[pi];
        const PairGrad& a = acc[pi];
        const GaussianSet& set = sp.from_dir ? dir : iso;
        SetGradients& sg = sp.from_dir ? out.dir : out.iso;
        size_t i = sp.set_index;

        sg.screen_grad_norm[i] = a.g_mu.norm();

        double alpha = sp.alpha;
        sg.opacity_logits[i] += a.g_alpha * alpha * (1.0 - alpha);

        // radiosity chain
        double c = sp.radiosity;
        double dlogit = a.g_c * c * (1.0 - c);
        const double* feat = set.feature(i);
        Vec3 mu_grad{0, 0, 0};
        if (!sp.from_dir) {
            for (int kk = 0; kk < model.k; ++kk) {
                sg.features[i * model.k + kk] += dlogit * model.b_iso[kk];
                out.b_iso[kk] += dlogit * feat[kk];
            }
        } else {
            Vec3 dvec = set.positions[i] - cam_center;
            double dist = dvec.norm();
            Vec3 dn = dvec * (1.0 / dist);
            double y[15];
            Vec3 gy[15];
            eval_sh_basis_grad_dir(dn, model.L, y, gy);
            Vec3 g_dn{0, 0, 0};
            for (int row = 0; row < model.k_L(); ++row) {
                const double* brow = model.B_dir.data() + static_cast<size_t>(row) * model.k;
                double bf = 0.0;
                for (int kk = 0; kk < model.k; ++kk) {
                    bf += brow[kk] * feat[kk];
                    sg.features[i * model.k + kk] += dlogit * y[row] * brow[kk];
                    out.B_dir[static_cast<size_t>(row) * model.k + kk] += dlogit * y[row] * feat[kk];
                }
                g_dn += (dlogit * bf) * gy[row];
            }
            // project onto the sphere tangent, then through the normalization
            Vec3 g_dvec = (g_dn - dn * dn.dot(g_dn)) * (1.0 / dist);
            mu_grad += g_dvec;
            pose_o_grad -= g_dvec;
        }

        // conic -> projected covariance
        Mat2 ga{a.g_a00, 0.5 * a.g_a01, 0.5 * a.g_a01, a.g_a11};
        Mat2 gs = (sp.conic * ga * sp.conic) * -1.0;

        // rebuild the projection chain
        const Vec3& p = sp.p_cam;
        double iz = 1.0 / p.z;
        Vec3 j0{f * iz, 0.0, -f * p.x * iz * iz};
        Vec3 j1{0.0, f * iz, -f * p.y * iz * iz};
        Vec3 m0 = r.transposed() * j0;
        Vec3 m1 = r.transposed() * j1;
        Mat3 sigma3 = covariance_from(set.log_scales[i], set.rotations[i]);
        Vec3 sm0 = sigma3 * m0;
        Vec3 sm1 = sigma3 * m1;

        Vec3 g_m0 = 2.0 * (gs.m00 * sm0 + gs.m01 * sm1);
        Vec3 g_m1 = 2.0 * (gs.m11 * sm1 + gs.m01 * sm0);
        Mat3 g_sigma3 = Mat3::outer(m0, m0) * gs.m00 + Mat3::outer(m1, m1) * gs.m11 +
                        (Mat3::outer(m0, m1) + Mat3::outer(m1, m0)) * gs.m01;
        Vec3 g_j0 = r * g_m0;
        Vec3 g_j1 = r * g_m1;

        Vec3 g_pc = a.g_mu.x * j0 + a.g_mu.y * j1;
        double fz2 = f * iz * iz;
        g_pc.x += g_j0.z * (-fz2);
        g_pc.y += g_j1.z * (-fz2);
        g_pc.z += g_j0.x * (-fz2) + g_j0.z * (2.0 * f * p.x * iz * iz * iz) + g_j1.y * (-fz2) +
                  g_j1.z * (2.0 * f * p.y * iz * iz * iz);

        mu_grad += r.transposed() * g_pc;
        sg.positions[i] += mu_grad;

        if (want_pose_grad) {
            pose_r_grad = pose_r_grad + Mat3::outer(j0, g_m0) + Mat3::outer(j1, g_m1) +
                          Mat3::outer(g_pc, set.positions[i]);
            pose_t_grad += g_pc;
        }

        // 3D covariance -> (log scales, rotation)
        Quat q = set.rotations[i].normalized();
        Mat3 rq = q.to_matrix();
        Vec3 d2{std::exp(2.0 * set.log_scales[i].x), std::exp(2.0 * set.log_scales[i].y),
                std::exp(2.0 * set.log_scales[i].z)};
        Mat3 g_rq = g_sigma3 * rq * Mat3::diag(d2) * 2.0;
        Mat3 inner = rq.transposed() * g_sigma3 * rq;
        sg.log_scales[i] += Vec3{inner(0, 0) * 2.0 * d2.x, inner(1, 1) * 2.0 * d2.y,
                                 inner(2, 2) * 2.0 * d2.z};
        auto qg = quat_rotation_backward(q, g_rq);
        for (int kq = 0; kq < 4; ++kq) sg.rotations[i][kq] += qg[kq];
    }

    if (want_pose_grad) {
        Mat3 w = pose_r_grad * r.transposed();
        out.pose[0] = w(2, 1) - w(1, 2);
        out.pose[1] = w(0, 2) - w(2, 0);
        out.pose[2] = w(1, 0) - w(0, 1);
        Vec3 tw = view.pose.translation.cross(pose_t_grad);
        out.pose[0] += tw.x;
        out.pose[1] += tw.y;
        out.pose[2] += tw.z;
        Vec3 td = pose_t_grad - r * pose_o_grad;
        out.pose[3] = td.x;
        out.pose[4] = td.y;
        out.pose[5] = td.z;
    }
    return out;
}

}  // namespace ddgs
