#include <algorithm>
#include <numeric>

#include "ddgs/splat.hpp"

namespace ddgs {

// Naive per-pixel compositor. Walks every projected Gaussian in global depth
// order, applying the same tile-rectangle inclusion test as the tiled kernel
// so both paths make identical truncation decisions and produce bit-identical
// images.
RenderedImage render_reference(const GaussianSet& iso, const GaussianSet& dir,
                               const RadiosityModel& model, const CameraView& view) {
    splat_detail::check_inputs(iso, dir, model, view);
    const Intrinsics& in = view.intrinsics;
    int tiles_x = (in.width + kTileSize - 1) / kTileSize;
    int tiles_y = (in.height + kTileSize - 1) / kTileSize;
    std::vector<SplatPoint> points =
        splat_detail::project_points(iso, dir, model, view, tiles_x, tiles_y);

    std::vector<uint32_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        if (points[a].depth != points[b].depth) return points[a].depth < points[b].depth;
        return a < b;
    });

    RenderedImage img(in.width, in.height);
    for (int py = 0; py < in.height; ++py) {
        int ty = py / kTileSize;
        for (int px = 0; px < in.width; ++px) {
            int tx = px / kTileSize;
            Vec2 pix{px + 0.5, py + 0.5};
            double transmit = 1.0;
            double value = 0.0;
            for (uint32_t oi : order) {
                const SplatPoint& sp = points[oi];
                if (tx < sp.tx0 || tx >= sp.tx1 || ty < sp.ty0 || ty >= sp.ty1) continue;
                Vec2 d = pix - sp.mu_hat;
                double power = -0.5 * (sp.conic.m00 * d.x * d.x + sp.conic.m11 * d.y * d.y) -
                               sp.conic.m01 * d.x * d.y;
                double sigma = sp.alpha * std::exp(power);
                if (sigma > kSigmaClamp) sigma = kSigmaClamp;
                value += sp.radiosity * sigma * transmit;
                transmit *= 1.0 - sigma;
                if (transmit < kTransmitCutoff) break;
            }
            img.at(px, py) = clamp01(value);
        }
    }
    return img;
}

}  // namespace ddgs
