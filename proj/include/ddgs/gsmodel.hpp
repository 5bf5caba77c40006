#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "ddgs/core.hpp"
#include "ddgs/rng.hpp"

namespace ddgs {

enum class SetKind { Isotropic, Directional };

// Array-of-records cloud of 3D Gaussians. All arrays share the leading
// dimension; features are stored row-major N x k.
struct GaussianSet {
    std::vector<Vec3> positions;          // mm
    std::vector<Quat> rotations;          // unit
    std::vector<Vec3> log_scales;         // log mm
    std::vector<double> opacity_logits;   // sigmoid -> alpha
    std::vector<double> features;         // N*k
    int feature_dim = 0;
    SetKind kind = SetKind::Isotropic;

    size_t size() const { return positions.size(); }
    const double* feature(size_t i) const { return features.data() + i * feature_dim; }
    double* feature(size_t i) { return features.data() + i * feature_dim; }
    double opacity(size_t i) const { return sigmoid(opacity_logits[i]); }

    void validate() const;
    void append_default(const Vec3& pos, double scale_mm, double init_alpha);
    void remove_indices(const std::vector<size_t>& sorted_remove);
};

// Shared radiosity parameters: isotropic basis vector plus anisotropic
// basis matrix contracted against the no-constant-term SH basis.
struct RadiosityModel {
    std::vector<double> b_iso;  // k
    std::vector<double> B_dir;  // k_L x k, row-major
    int L = 1;
    int k = 8;

    int k_L() const { return L * (L + 2); }
    void validate() const;

    static RadiosityModel init(int L, int k, uint64_t seed, double init_std = 0.01);
};

double radiosity_iso(const double* f, const RadiosityModel& model);
double radiosity_dir(const double* f, double theta, double phi, const RadiosityModel& model);

// Sigma = R diag(exp(2 s)) R^T.
Mat3 covariance_from(const Vec3& log_scale, const Quat& rotation);

// d(vec R)/dq contracted with an upstream gradient on R, for a unit
// quaternion; includes the projection through renormalization so the result
// matches finite differences on the raw components.
std::array<double, 4> quat_rotation_backward(const Quat& q, const Mat3& dL_dR);

constexpr double kInitialAlpha = 0.1;

struct Checkpoint {
    GaussianSet iso;
    GaussianSet dir;
    RadiosityModel model;
};

void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace ddgs
