#include <algorithm>

#include "ddgs/sh.hpp"
#include "ddgs/splat.hpp"

namespace ddgs {

namespace splat_detail {

void check_inputs(const GaussianSet& iso, const GaussianSet& dir, const RadiosityModel& model,
                  const CameraView& view) {
    if (iso.kind != SetKind::Isotropic || dir.kind != SetKind::Directional)
        throw std::invalid_argument("render expects (isotropic, directional) sets");
    if (iso.feature_dim != model.k || dir.feature_dim != model.k)
        throw std::invalid_argument("inconsistent feature dimension k");
    model.validate();
    if (view.intrinsics.width < 1 || view.intrinsics.height < 1)
        throw std::invalid_argument("zero-sized image");
    view.intrinsics.validate();
}

std::vector<SplatPoint> project_points(const GaussianSet& iso, const GaussianSet& dir,
                                       const RadiosityModel& model, const CameraView& view,
                                       int tiles_x, int tiles_y) {
    const Mat3 r = view.pose.rotation_matrix();
    const Vec3 cam_center = view.pose.camera_center();
    const Intrinsics& in = view.intrinsics;
    const double f = in.focal_px;

    std::vector<SplatPoint> points;
    points.reserve(iso.size() + dir.size());

    auto process_set = [&](const GaussianSet& set, bool from_dir) {
        for (size_t i = 0; i < set.size(); ++i) {
            Vec3 p = r * set.positions[i] + view.pose.translation;
            if (p.z <= kZNear) continue;  // cull behind the near plane

            SplatPoint sp;
            sp.set_index = static_cast<uint32_t>(i);
            sp.from_dir = from_dir;
            sp.p_cam = p;
            sp.depth = p.z;
            double iz = 1.0 / p.z;
            sp.mu_hat = in.principal + f * Vec2{p.x * iz, p.y * iz};

            Mat3 sigma = covariance_from(set.log_scales[i], set.rotations[i]);
            Vec3 j0{f * iz, 0.0, -f * p.x * iz * iz};
            Vec3 j1{0.0, f * iz, -f * p.y * iz * iz};
            Vec3 m0 = r.transposed() * j0;
            Vec3 m1 = r.transposed() * j1;
            Vec3 sm0 = sigma * m0;
            Vec3 sm1 = sigma * m1;
            double off = m0.dot(sm1);
            sp.cov2d = Mat2{m0.dot(sm0) + kEpsLowpass, off, off, m1.dot(sm1) + kEpsLowpass};
            sp.conic = sp.cov2d.inverse();
            sp.alpha = set.opacity(i);

            if (from_dir) {
                Vec3 dvec = set.positions[i] - cam_center;
                Vec3 dn = dvec.normalized();
                double y[15];
                eval_sh_basis_dir(dn, model.L, y);
                double logit = 0.0;
                const double* feat = set.feature(i);
                for (int row = 0; row < model.k_L(); ++row) {
                    double bf = 0.0;
                    const double* brow = model.B_dir.data() + static_cast<size_t>(row) * model.k;
                    for (int c = 0; c < model.k; ++c) bf += brow[c] * feat[c];
                    logit += y[row] * bf;
                }
                sp.radiosity = sigmoid(logit);
            } else {
                sp.radiosity = radiosity_iso(set.feature(i), model);
            }

            double radius = kFootprintSigmas * std::sqrt(sp.cov2d.max_eigenvalue_sym());
            int x0 = static_cast<int>(std::floor((sp.mu_hat.x - radius) / kTileSize));
            int x1 = static_cast<int>(std::floor((sp.mu_hat.x + radius) / kTileSize)) + 1;
            int y0 = static_cast<int>(std::floor((sp.mu_hat.y - radius) / kTileSize));
            int y1 = static_cast<int>(std::floor((sp.mu_hat.y + radius) / kTileSize)) + 1;
            sp.tx0 = std::max(0, std::min(x0, tiles_x));
            sp.tx1 = std::max(0, std::min(x1, tiles_x));
            sp.ty0 = std::max(0, std::min(y0, tiles_y));
            sp.ty1 = std::max(0, std::min(y1, tiles_y));
            if (sp.tx0 >= sp.tx1 || sp.ty0 >= sp.ty1) continue;  // off-screen

            points.push_back(sp);
        }
    };
    process_set(iso, false);
    process_set(dir, true);
    return points;
}

}  // namespace splat_detail

namespace {

struct TilePair {
    uint32_t tile;
    double depth;
    uint32_t point;
};

}  // namespace

RenderResult render(const GaussianSet& iso, const GaussianSet& dir, const RadiosityModel& model,
                    const CameraView& view) {
    splat_detail::check_inputs(iso, dir, model, view);
    const Intrinsics& in = view.intrinsics;

    RenderResult out;
    RenderContext& ctx = out.ctx;
    ctx.width = in.width;
    ctx.height = in.height;
    ctx.tiles_x = (in.width + kTileSize - 1) / kTileSize;
    ctx.tiles_y = (in.height + kTileSize - 1) / kTileSize;
    ctx.points = splat_detail::project_points(iso, dir, model, view, ctx.tiles_x, ctx.tiles_y);

    // Bin into tiles and sort by (tile, depth); ties broken by the merged
    // index so the order is a deterministic function of the sorted scene.
    std::vector<TilePair> pairs;
    for (uint32_t pi = 0; pi < ctx.points.size(); ++pi) {
        const SplatPoint& sp = ctx.points[pi];
        for (int ty = sp.ty0; ty < sp.ty1; ++ty)
            for (int tx = sp.tx0; tx < sp.tx1; ++tx)
                pairs.push_back({static_cast<uint32_t>(ty * ctx.tiles_x + tx), sp.depth, pi});
    }
    std::sort(pairs.begin(), pairs.end(), [](const TilePair& a, const TilePair& b) {
        if (a.tile != b.tile) return a.tile < b.tile;
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.point < b.point;
    });

    const uint32_t n_tiles = static_cast<uint32_t>(ctx.tiles_x) * ctx.tiles_y;
    ctx.pair_point.resize(pairs.size());
    ctx.tile_ranges.assign(n_tiles, {0, 0});
    for (size_t i = 0; i < pairs.size(); ++i) ctx.pair_point[i] = pairs[i].point;
    for (size_t i = 0; i < pairs.size(); ++i) {
        uint32_t t = pairs[i].tile;
        if (i == 0 || pairs[i - 1].tile != t) ctx.tile_ranges[t][0] = static_cast<uint32_t>(i);
        ctx.tile_ranges[t][1] = static_cast<uint32_t>(i + 1);
    }

    size_t n_px = static_cast<size_t>(in.width) * in.height;
    ctx.pixel_count.assign(n_px, 0);
    ctx.raw_pixels.assign(n_px, 0.0);

#pragma omp parallel for schedule(dynamic)
    for (uint32_t tile = 0; tile < n_tiles; ++tile) {
        auto [begin, end] = ctx.tile_ranges[tile];
        if (begin == end) continue;
        int tx = static_cast<int>(tile) % ctx.tiles_x;
        int ty = static_cast<int>(tile) / ctx.tiles_x;
        int px1 = std::min((tx + 1) * kTileSize, in.width);
        int py1 = std::min((ty + 1) * kTileSize, in.height);
        for (int py = ty * kTileSize; py < py1; ++py) {
            for (int px = tx * kTileSize; px < px1; ++px) {
                Vec2 pix{px + 0.5, py + 0.5};
                double transmit = 1.0;
                double value = 0.0;
                uint32_t count = 0;
                for (uint32_t pi = begin; pi < end; ++pi) {
                    const SplatPoint& sp = ctx.points[ctx.pair_point[pi]];
                    Vec2 d = pix - sp.mu_hat;
                    double power = -0.5 * (sp.conic.m00 * d.x * d.x + sp.conic.m11 * d.y * d.y) -
                                   sp.conic.m01 * d.x * d.y;
                    double sigma = sp.alpha * std::exp(power);
                    if (sigma > kSigmaClamp) sigma = kSigmaClamp;
                    value += sp.radiosity * sigma * transmit;
                    transmit *= 1.0 - sigma;
                    ++count;
                    if (transmit < kTransmitCutoff) break;
                }
                size_t idx = static_cast<size_t>(py) * in.width + px;
                ctx.raw_pixels[idx] = value;
                ctx.pixel_count[idx] = count;
            }
        }
    }

    out.image = RenderedImage(in.width, in.height);
    for (size_t i = 0; i < n_px; ++i) out.image.pixels[i] = clamp01(ctx.raw_pixels[i]);
    return out;
}

RenderedImage render_set_solo(const GaussianSet& set, const RadiosityModel& model,
                              const CameraView& view) {
    GaussianSet empty;
    empty.feature_dim = model.k;
    if (set.kind == SetKind::Isotropic) {
        empty.kind = SetKind::Directional;
        return render(set, empty, model, view).image;
    }
    empty.kind = SetKind::Isotropic;
    return render(empty, set, model, view).image;
}

}  // namespace ddgs
