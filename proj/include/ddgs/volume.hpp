#pragma once

#include <array>
#include <string>
#include <vector>

#include "ddgs/core.hpp"

namespace ddgs {

// Dense scalar grid in Hounsfield units. Voxel (i,j,k) is stored at
// values[i + nx*j + nx*ny*k] (x fastest) and its center sits at
// origin + (i*sx, j*sy, k*sz) in world mm.
struct CtVolume {
    std::array<int, 3> dims{0, 0, 0};
    Vec3 spacing{1, 1, 1};   // mm per voxel
    Vec3 origin{0, 0, 0};    // world mm of voxel (0,0,0) center
    std::vector<double> values;  // HU

    size_t voxel_count() const {
        return static_cast<size_t>(dims[0]) * dims[1] * dims[2];
    }
    size_t index(int i, int j, int k) const {
        return static_cast<size_t>(i) + static_cast<size_t>(dims[0]) * (j + static_cast<size_t>(dims[1]) * k);
    }
    double at(int i, int j, int k) const { return values[index(i, j, k)]; }
    Vec3 voxel_center(int i, int j, int k) const {
        return {origin.x + i * spacing.x, origin.y + j * spacing.y, origin.z + k * spacing.z};
    }
    // World-space bounding box of the voxel grid (voxel extents, not centers).
    Vec3 bbox_min() const { return origin - 0.5 * spacing; }
    Vec3 bbox_max() const {
        return {origin.x + (dims[0] - 0.5) * spacing.x,
                origin.y + (dims[1] - 0.5) * spacing.y,
                origin.z + (dims[2] - 0.5) * spacing.z};
    }

    void validate() const;
};

// Normalized radiodensity: density in [0,1]; attenuation coefficient at a
// point is density * mu_scale (per mm).
struct AttenuationVolume {
    std::array<int, 3> dims{0, 0, 0};
    Vec3 spacing{1, 1, 1};
    Vec3 origin{0, 0, 0};
    std::vector<double> density;
    double mu_scale = 0.02;  // mm^-1 at density 1

    size_t voxel_count() const {
        return static_cast<size_t>(dims[0]) * dims[1] * dims[2];
    }
    size_t index(int i, int j, int k) const {
        return static_cast<size_t>(i) + static_cast<size_t>(dims[0]) * (j + static_cast<size_t>(dims[1]) * k);
    }
    double at(int i, int j, int k) const { return density[index(i, j, k)]; }
    Vec3 voxel_center(int i, int j, int k) const {
        return {origin.x + i * spacing.x, origin.y + j * spacing.y, origin.z + k * spacing.z};
    }
    Vec3 bbox_min() const { return origin - 0.5 * spacing; }
    Vec3 bbox_max() const {
        return {origin.x + (dims[0] - 0.5) * spacing.x,
                origin.y + (dims[1] - 0.5) * spacing.y,
                origin.z + (dims[2] - 0.5) * spacing.z};
    }
    Vec3 world_center() const { return 0.5 * (bbox_min() + bbox_max()); }
    double diagonal() const { return (bbox_max() - bbox_min()).norm(); }
};

struct PhantomPrimitive {
    enum class Kind { Sphere, Box, Ellipsoid };
    Kind kind = Kind::Sphere;
    Vec3 center{0, 0, 0};     // mm
    Vec3 extent{1, 1, 1};     // sphere: x = radius; box: half sizes; ellipsoid: radii
    double hu = 0.0;

    bool contains(const Vec3& p) const;
};

struct PhantomSpec {
    std::array<int, 3> dims{32, 32, 32};
    Vec3 spacing{1, 1, 1};
    bool has_origin = false;  // default: grid centered on the world origin
    Vec3 origin{0, 0, 0};
    double background_hu = -1000.0;
    std::vector<PhantomPrimitive> primitives;
};

// Raw little-endian volume file + JSON sidecar. `path` may name either the
// .raw file or the .json sidecar; the other is found by swapping extensions.
CtVolume load_volume(const std::string& path);
void save_volume(const CtVolume& v, const std::string& path, const std::string& dtype = "f32");

PhantomSpec load_phantom_spec(const std::string& path);
CtVolume make_phantom(const PhantomSpec& spec);

constexpr double kDefaultHuLo = -1000.0;
constexpr double kDefaultHuHi = 2000.0;
constexpr double kDefaultMuScale = 0.02;

AttenuationVolume hu_to_density(const CtVolume& v, double hu_lo = kDefaultHuLo,
                                double hu_hi = kDefaultHuHi, double mu_scale = kDefaultMuScale);

}  // namespace ddgs
