#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ddgs/geometry.hpp"
#include "ddgs/gsmodel.hpp"
#include "ddgs/image.hpp"

namespace ddgs {

// Rasterizer configuration. The forward composites both Gaussian sets
// jointly, front to back, per pixel:
//   C(p) = sum_j c_j sigma_j prod_{l<j} (1 - sigma_l),
//   sigma = min(alpha * exp(-0.5 d^T Sigma_hat^-1 d), kSigmaClamp),
// terminating once accumulated transmittance drops below kTransmitCutoff.
constexpr int kTileSize = 16;
constexpr double kTransmitCutoff = 1e-4;
constexpr double kSigmaClamp = 0.99;
constexpr double kFootprintSigmas = 3.0;

// Per-Gaussian projected state kept from the forward pass.
struct SplatPoint {
    uint32_t set_index = 0;  // index within the source set
    bool from_dir = false;
    Vec2 mu_hat;
    double depth = 0.0;
    Mat2 cov2d;   // projected covariance (with low-pass floor)
    Mat2 conic;   // its inverse
    double alpha = 0.0;
    double radiosity = 0.0;
    Vec3 p_cam;   // camera-frame position
    int tx0 = 0, tx1 = 0, ty0 = 0, ty1 = 0;  // tile rectangle, half-open
};

struct RenderContext {
    int width = 0, height = 0;
    int tiles_x = 0, tiles_y = 0;
    std::vector<SplatPoint> points;                     // culled, merged order
    std::vector<uint32_t> pair_point;                   // depth-sorted per tile
    std::vector<std::array<uint32_t, 2>> tile_ranges;   // [begin,end) into pair_point
    std::vector<uint32_t> pixel_count;                  // contributions composited
    std::vector<double> raw_pixels;                     // pre-clamp values
};

struct RenderResult {
    RenderedImage image;
    RenderContext ctx;
};

struct SetGradients {
    std::vector<Vec3> positions;
    std::vector<std::array<double, 4>> rotations;
    std::vector<Vec3> log_scales;
    std::vector<double> opacity_logits;
    std::vector<double> features;          // N*k
    std::vector<double> screen_grad_norm;  // ||dL/dmu_hat|| per Gaussian

    void resize(size_t n, int k) {
        positions.assign(n, Vec3{});
        rotations.assign(n, {0, 0, 0, 0});
        log_scales.assign(n, Vec3{});
        opacity_logits.assign(n, 0.0);
        features.assign(n * k, 0.0);
        screen_grad_norm.assign(n, 0.0);
    }
};

struct RenderGradients {
    SetGradients iso, dir;
    std::vector<double> b_iso;
    std::vector<double> B_dir;
    bool has_pose = false;
    std::array<double, 6> pose{};  // (rotvec, translation) at the identity delta
};

// Joint forward render of both sets. Tiles are processed in parallel;
// output is independent of the schedule.
RenderResult render(const GaussianSet& iso, const GaussianSet& dir, const RadiosityModel& model,
                    const CameraView& view);

// Reverse-mode gradients of the composited image under the forward's
// truncation decisions. Inputs must match the forward call that produced ctx.
RenderGradients render_backward(const GaussianSet& iso, const GaussianSet& dir,
                                const RadiosityModel& model, const CameraView& view,
                                const RenderContext& ctx, const std::vector<double>& dL_dpixels,
                                bool want_pose_grad);

// Diagnostic single-set render (not a simulation output).
RenderedImage render_set_solo(const GaussianSet& set, const RadiosityModel& model,
                              const CameraView& view);

// Serial per-pixel reference with identical semantics to the tiled kernel;
// kept for testing and benchmarking.
RenderedImage render_reference(const GaussianSet& iso, const GaussianSet& dir,
                               const RadiosityModel& model, const CameraView& view);

// Shared between the tiled and reference paths.
namespace splat_detail {

// Builds the culled, projected point list in merged (iso then dir) order.
std::vector<SplatPoint> project_points(const GaussianSet& iso, const GaussianSet& dir,
                                       const RadiosityModel& model, const CameraView& view,
                                       int tiles_x, int tiles_y);

void check_inputs(const GaussianSet& iso, const GaussianSet& dir, const RadiosityModel& model,
                  const CameraView& view);

}  // namespace splat_detail

}  // namespace ddgs
