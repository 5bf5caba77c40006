#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddgs/geometry.hpp"
#include "ddgs/image.hpp"
#include "ddgs/volume.hpp"

namespace ddgs {

// Synthetic direction-dependent modulation applied to the normalized
// targets: pixel *= 1 + epsilon * (ray_dir . coeffs), a degree-1 spherical
// signal the directional branch can represent exactly.
struct AnisoPerturbSpec {
    double epsilon = 0.0;
    Vec3 coeffs{0.36, 0.48, 0.8};  // unit by construction
};

struct TargetImageSet {
    std::vector<CameraView> views;
    std::vector<RenderedImage> images;
    double norm_offset = 0.0;
    double norm_scale = 1.0;  // applied to raw line integrals
};

// Exact attenuation line integral of density * mu_scale over [src, dst]
// via parametric voxel-boundary traversal.
double siddon_integral(const AttenuationVolume& v, const Vec3& src, const Vec3& dst);

// Normalized-line-integral DRR per view; pixels are embarrassingly parallel.
TargetImageSet render_targets(const AttenuationVolume& v, const std::vector<CameraView>& views,
                              const std::optional<AnisoPerturbSpec>& perturb = std::nullopt);

// View protocol: evenly spaced training azimuths over [lo, hi] degrees and
// seeded-random test azimuths, cameras on an arc looking at the volume center.
struct ViewProtocol {
    int n_train = 50;
    int n_test = 0;
    double range_lo_deg = -90.0;
    double range_hi_deg = 90.0;
    uint64_t seed = 0;
    int width = 128, height = 128;
    double source_dist = 0.0;  // mm; 0 = auto (1.6 x volume diagonal)
    double focal_px = 0.0;     // 0 = auto (volume sphere fills ~85% half-width)
};

struct ProtocolViews {
    std::vector<CameraView> train;
    std::vector<CameraView> test;
};

ProtocolViews make_protocol_views(const AttenuationVolume& v, const ViewProtocol& proto);

}  // namespace ddgs
