#pragma once

#include <vector>

#include "ddgs/core.hpp"

namespace ddgs {

// Real orthonormal spherical harmonics of degrees 1..L (no degree-0 term),
// z-pole convention, evaluated on unit directions. Within a degree the
// functions are ordered m = -l..l.
constexpr int kMaxShDegree = 3;

inline int sh_basis_size(int L) { return L * (L + 2); }

// Values at a unit direction; `out` must hold sh_basis_size(L) doubles.
void eval_sh_basis_dir(const Vec3& d, int L, double* out);

// Values plus Cartesian gradients of the polynomial extension. The caller
// projects gradients onto the sphere tangent when chaining through a
// normalized direction.
void eval_sh_basis_grad_dir(const Vec3& d, int L, double* out, Vec3* grad);

// Spherical-angle entry point: theta = polar angle from +z, phi = azimuth.
std::vector<double> eval_sh_basis(double theta, double phi, int L);

inline Vec3 direction_from_angles(double theta, double phi) {
    double s = std::sin(theta);
    return {s * std::cos(phi), s * std::sin(phi), std::cos(theta)};
}

}  // namespace ddgs
