#include "ddgs/sh.hpp"

namespace ddgs {

namespace {

// sqrt(3/(4 pi)) etc., orthonormal real SH constants
constexpr double kC1 = 0.4886025119029199;
constexpr double kC2a = 1.0925484305920792;
constexpr double kC2b = 0.31539156525252005;
constexpr double kC2c = 0.5462742152960396;
constexpr double kC3a = 0.5900435899266435;
constexpr double kC3b = 2.890611442640554;
constexpr double kC3c = 0.4570457994644658;
constexpr double kC3d = 0.3731763325901154;
constexpr double kC3e = 1.445305721320277;

void check_degree(int L) {
    if (L < 1) throw std::invalid_argument("SH degree L must be >= 1");
    if (L > kMaxShDegree) throw std::invalid_argument("SH degree above 3 is not supported");
}

}  // namespace

void eval_sh_basis_dir(const Vec3& d, int L, double* out) {
    check_degree(L);
    double x = d.x, y = d.y, z = d.z;
    out[0] = kC1 * y;
    out[1] = kC1 * z;
    out[2] = kC1 * x;
    if (L < 2) return;
    out[3] = kC2a * x * y;
    out[4] = kC2a * y * z;
    out[5] = kC2b * (3.0 * z * z - 1.0);
    out[6] = kC2a * x * z;
    out[7] = kC2c * (x * x - y * y);
    if (L < 3) return;
    out[8] = kC3a * y * (3.0 * x * x - y * y);
    out[9] = kC3b * x * y * z;
    out[10] = kC3c * y * (5.0 * z * z - 1.0);
    out[11] = kC3d * z * (5.0 * z * z - 3.0);
    out[12] = kC3c * x * (5.0 * z * z - 1.0);
    out[13] = kC3e * z * (x * x - y * y);
    out[14] = kC3a * x * (x * x - 3.0 * y * y);
}

void eval_sh_basis_grad_dir(const Vec3& d, int L, double* out, Vec3* grad) {
    eval_sh_basis_dir(d, L, out);
    double x = d.x, y = d.y, z = d.z;
    grad[0] = {0, kC1, 0};
    grad[1] = {0, 0, kC1};
    grad[2] = {kC1, 0, 0};
    if (L < 2) return;
    grad[3] = {kC2a * y, kC2a * x, 0};
    grad[4] = {0, kC2a * z, kC2a * y};
    grad[5] = {0, 0, kC2b * 6.0 * z};
    grad[6] = {kC2a * z, 0, kC2a * x};
    grad[7] = {kC2c * 2.0 * x, -kC2c * 2.0 * y, 0};
    if (L < 3) return;
    grad[8] = {kC3a * 6.0 * x * y, kC3a * (3.0 * x * x - 3.0 * y * y), 0};
    grad[9] = {kC3b * y * z, kC3b * x * z, kC3b * x * y};
    grad[10] = {0, kC3c * (5.0 * z * z - 1.0), kC3c * 10.0 * y * z};
    grad[11] = {0, 0, kC3d * (15.0 * z * z - 3.0)};
    grad[12] = {kC3c * (5.0 * z * z - 1.0), 0, kC3c * 10.0 * x * z};
    grad[13] = {kC3e * 2.0 * x * z, -kC3e * 2.0 * y * z, kC3e * (x * x - y * y)};
    grad[14] = {kC3a * (3.0 * x * x - 3.0 * y * y), -kC3a * 6.0 * x * y, 0};
}

std::vector<double> eval_sh_basis(double theta, double phi, int L) {
    check_degree(L);
    std::vector<double> out(sh_basis_size(L));
    eval_sh_basis_dir(direction_from_angles(theta, phi), L, out.data());
    return out;
}

}  // namespace ddgs
