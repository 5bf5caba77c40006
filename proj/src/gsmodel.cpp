#include "ddgs/gsmodel.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "ddgs/sh.hpp"

namespace ddgs {

using nlohmann::json;

void GaussianSet::validate() const {
    size_t n = positions.size();
    if (rotations.size() != n || log_scales.size() != n || opacity_logits.size() != n)
        throw std::invalid_argument("gaussian set arrays must share leading dimension");
    if (feature_dim < 1) throw std::invalid_argument("feature dimension must be >= 1");
    if (features.size() != n * static_cast<size_t>(feature_dim))
        throw std::invalid_argument("feature array size mismatch");
    for (const Quat& q : rotations)
        if (std::abs(q.norm() - 1.0) > 1e-9)
            throw std::invalid_argument("rotations must be unit quaternions");
}

void GaussianSet::append_default(const Vec3& pos, double scale_mm, double init_alpha) {
    positions.push_back(pos);
    rotations.push_back(Quat::identity());
    double ls = std::log(std::max(scale_mm, 1e-7));
    log_scales.push_back({ls, ls, ls});
    double a = std::min(std::max(init_alpha, 1e-6), 1.0 - 1e-6);
    opacity_logits.push_back(std::log(a / (1.0 - a)));
    features.insert(features.end(), feature_dim, 0.0);
}

void GaussianSet::remove_indices(const std::vector<size_t>& sorted_remove) {
    if (sorted_remove.empty()) return;
    size_t n = size();
    size_t w = 0, r_it = 0;
    for (size_t i = 0; i < n; ++i) {
        if (r_it < sorted_remove.size() && sorted_remove[r_it] == i) {
            ++r_it;
            continue;
        }
        if (w != i) {
            positions[w] = positions[i];
            rotations[w] = rotations[i];
            log_scales[w] = log_scales[i];
            opacity_logits[w] = opacity_logits[i];
            std::memmove(features.data() + w * feature_dim, features.data() + i * feature_dim,
                         sizeof(double) * feature_dim);
        }
        ++w;
    }
    positions.resize(w);
    rotations.resize(w);
    log_scales.resize(w);
    opacity_logits.resize(w);
    features.resize(w * feature_dim);
}

void RadiosityModel::validate() const {
    if (L < 1) throw std::invalid_argument("L must be >= 1");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (b_iso.size() != static_cast<size_t>(k)) throw std::invalid_argument("b_iso size mismatch");
    if (B_dir.size() != static_cast<size_t>(k_L()) * k)
        throw std::invalid_argument("B_dir size mismatch");
    if (!all_finite(b_iso) || !all_finite(B_dir))
        throw std::invalid_argument("radiosity parameters must be finite");
}

RadiosityModel RadiosityModel::init(int L, int k, uint64_t seed, double init_std) {
    RadiosityModel m;
    m.L = L;
    m.k = k;
    Rng rng(seed);
    m.b_iso.resize(k);
    for (double& v : m.b_iso) v = rng.normal(0.0, init_std);
    m.B_dir.resize(static_cast<size_t>(m.k_L()) * k);
    for (double& v : m.B_dir) v = rng.normal(0.0, init_std);
    m.validate();
    return m;
}

double radiosity_iso(const double* f, const RadiosityModel& model) {
    double dot = 0.0;
    for (int i = 0; i < model.k; ++i) dot += model.b_iso[i] * f[i];
    return sigmoid(dot);
}

double radiosity_dir(const double* f, double theta, double phi, const RadiosityModel& model) {
    std::vector<double> y = eval_sh_basis(theta, phi, model.L);
    // logit = y . (B f)
    double logit = 0.0;
    for (int r = 0; r < model.k_L(); ++r) {
        double bf = 0.0;
        const double* row = model.B_dir.data() + static_cast<size_t>(r) * model.k;
        for (int c = 0; c < model.k; ++c) bf += row[c] * f[c];
        logit += y[r] * bf;
    }
    return sigmoid(logit);
}

Mat3 covariance_from(const Vec3& log_scale, const Quat& rotation) {
    Mat3 r = rotation.normalized().to_matrix();
    Vec3 d{std::exp(2.0 * log_scale.x), std::exp(2.0 * log_scale.y), std::exp(2.0 * log_scale.z)};
    Mat3 rd = r * Mat3::diag(d);
    return rd * r.transposed();
}

std::array<double, 4> quat_rotation_backward(const Quat& qn, const Mat3& g) {
    double w = qn.w, x = qn.x, y = qn.y, z = qn.z;
    // contractions of dR/dq for a unit quaternion
    std::array<double, 4> dq{};
    dq[0] = 2.0 * (-z * g(0, 1) + y * g(0, 2) + z * g(1, 0) - x * g(1, 2) - y * g(2, 0) + x * g(2, 1));
    dq[1] = 2.0 * (y * g(0, 1) + z * g(0, 2) + y * g(1, 0) - 2.0 * x * g(1, 1) - w * g(1, 2) +
                   z * g(2, 0) + w * g(2, 1) - 2.0 * x * g(2, 2));
    dq[2] = 2.0 * (-2.0 * y * g(0, 0) + x * g(0, 1) + w * g(0, 2) + x * g(1, 0) + z * g(1, 2) -
                   w * g(2, 0) + z * g(2, 1) - 2.0 * y * g(2, 2));
    dq[3] = 2.0 * (-2.0 * z * g(0, 0) - w * g(0, 1) + x * g(0, 2) + w * g(1, 0) - 2.0 * z * g(1, 1) +
                   y * g(1, 2) + x * g(2, 0) + y * g(2, 1));
    // project through renormalization: dq <- (I - q q^T) dq
    double dot = w * dq[0] + x * dq[1] + y * dq[2] + z * dq[3];
    dq[0] -= w * dot;
    dq[1] -= x * dot;
    dq[2] -= y * dot;
    dq[3] -= z * dot;
    return dq;
}

namespace {

constexpr char kMagic[8] = {'D', 'D', 'G', 'S', 'C', 'K', '1', '\n'};

void write_block_f32(std::ofstream& f, const double* src, size_t n) {
    std::vector<float> buf(n);
    for (size_t i = 0; i < n; ++i) buf[i] = static_cast<float>(src[i]);
    f.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(n * 4));
}

void read_block_f32(std::ifstream& f, double* dst, size_t n) {
    std::vector<float> buf(n);
    f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * 4));
    if (!f) throw std::runtime_error("checkpoint truncated");
    for (size_t i = 0; i < n; ++i) dst[i] = buf[i];
}

// Blocks per set, in declared order: positions, rotations, log_scales,
// opacity_logits, features.
void write_set(std::ofstream& f, const GaussianSet& s) {
    size_t n = s.size();
    std::vector<double> tmp;
    tmp.reserve(n * 4);
    for (const Vec3& p : s.positions) { tmp.push_back(p.x); tmp.push_back(p.y); tmp.push_back(p.z); }
    write_block_f32(f, tmp.data(), tmp.size());
    tmp.clear();
    for (const Quat& q : s.rotations) { tmp.push_back(q.w); tmp.push_back(q.x); tmp.push_back(q.y); tmp.push_back(q.z); }
    write_block_f32(f, tmp.data(), tmp.size());
    tmp.clear();
    for (const Vec3& v : s.log_scales) { tmp.push_back(v.x); tmp.push_back(v.y); tmp.push_back(v.z); }
    write_block_f32(f, tmp.data(), tmp.size());
    write_block_f32(f, s.opacity_logits.data(), n);
    write_block_f32(f, s.features.data(), s.features.size());
}

void read_set(std::ifstream& f, GaussianSet& s, size_t n, int k, SetKind kind) {
    s.kind = kind;
    s.feature_dim = k;
    std::vector<double> tmp(n * 4);
    read_block_f32(f, tmp.data(), n * 3);
    s.positions.resize(n);
    for (size_t i = 0; i < n; ++i) s.positions[i] = {tmp[3 * i], tmp[3 * i + 1], tmp[3 * i + 2]};
    read_block_f32(f, tmp.data(), n * 4);
    s.rotations.resize(n);
    for (size_t i = 0; i < n; ++i)
        s.rotations[i] = Quat{tmp[4 * i], tmp[4 * i + 1], tmp[4 * i + 2], tmp[4 * i + 3]}.normalized();
    read_block_f32(f, tmp.data(), n * 3);
    s.log_scales.resize(n);
    for (size_t i = 0; i < n; ++i) s.log_scales[i] = {tmp[3 * i], tmp[3 * i + 1], tmp[3 * i + 2]};
    s.opacity_logits.resize(n);
    read_block_f32(f, s.opacity_logits.data(), n);
    s.features.resize(n * k);
    read_block_f32(f, s.features.data(), s.features.size());
}

}  // namespace

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
    ck.iso.validate();
    ck.dir.validate();
    ck.model.validate();
    if (ck.iso.kind != SetKind::Isotropic || ck.dir.kind != SetKind::Directional)
        throw std::invalid_argument("checkpoint sets must be (isotropic, directional)");
    if (ck.iso.feature_dim != ck.model.k || ck.dir.feature_dim != ck.model.k)
        throw std::invalid_argument("feature dimension mismatch with radiosity model");

    json header;
    header["L"] = ck.model.L;
    header["k"] = ck.model.k;
    header["N_iso"] = ck.iso.size();
    header["N_dir"] = ck.dir.size();
    header["b_iso"] = ck.model.b_iso;
    header["B_dir"] = ck.model.B_dir;
    std::string hs = header.dump();

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write checkpoint: " + path);
    f.write(kMagic, 8);
    uint64_t len = hs.size();
    f.write(reinterpret_cast<const char*>(&len), 8);
    f.write(hs.data(), static_cast<std::streamsize>(hs.size()));
    write_set(f, ck.iso);
    write_set(f, ck.dir);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("missing checkpoint: " + path);
    char magic[8];
    f.read(magic, 8);
    if (!f || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("not a checkpoint file: " + path);
    uint64_t len = 0;
    f.read(reinterpret_cast<char*>(&len), 8);
    std::string hs(len, '\0');
    f.read(hs.data(), static_cast<std::streamsize>(len));
    if (!f) throw std::runtime_error("checkpoint truncated");
    json header = json::parse(hs);

    Checkpoint ck;
    ck.model.L = header.at("L").get<int>();
    ck.model.k = header.at("k").get<int>();
    ck.model.b_iso = header.at("b_iso").get<std::vector<double>>();
    ck.model.B_dir = header.at("B_dir").get<std::vector<double>>();
    ck.model.validate();
    size_t n_iso = header.at("N_iso").get<size_t>();
    size_t n_dir = header.at("N_dir").get<size_t>();
    read_set(f, ck.iso, n_iso, ck.model.k, SetKind::Isotropic);
    read_set(f, ck.dir, n_dir, ck.model.k, SetKind::Directional);
    ck.iso.validate();
    ck.dir.validate();
    return ck;
}

}  // namespace ddgs
