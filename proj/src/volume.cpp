#include "ddgs/volume.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace ddgs {

using nlohmann::json;
namespace fs = std::filesystem;

void CtVolume::validate() const {
    for (int d : dims)
        if (d < 1) throw std::invalid_argument("dims must be >= 1");
    if (spacing.x <= 0 || spacing.y <= 0 || spacing.z <= 0)
        throw std::invalid_argument("spacing must be > 0");
    if (values.size() != voxel_count())
        throw std::invalid_argument("element count mismatch");
    if (!all_finite(values)) throw std::invalid_argument("volume values must be finite");
}

namespace {

std::pair<fs::path, fs::path> volume_paths(const std::string& path) {
    fs::path p(path);
    if (p.extension() == ".json") return {fs::path(p).replace_extension(".raw"), p};
    if (p.extension() == ".raw") return {p, fs::path(p).replace_extension(".json")};
    // Extensionless stem: append both.
    return {fs::path(path + ".raw"), fs::path(path + ".json")};
}

Vec3 vec3_from_json(const json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_array() || j[field].size() != 3)
        throw std::invalid_argument(std::string("sidecar field '") + field + "' must be a 3-array");
    return {j[field][0].get<double>(), j[field][1].get<double>(), j[field][2].get<double>()};
}

}  // namespace

CtVolume load_volume(const std::string& path) {
    auto [raw_path, json_path] = volume_paths(path);
    std::ifstream js(json_path);
    if (!js) throw std::runtime_error("missing sidecar: " + json_path.string());
    json j;
    try {
        js >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("ill-formed sidecar " + json_path.string() + ": " + e.what());
    }

    CtVolume v;
    if (!j.contains("dims") || !j["dims"].is_array() || j["dims"].size() != 3)
        throw std::invalid_argument("sidecar field 'dims' must be a 3-array");
    for (int a = 0; a < 3; ++a) v.dims[a] = j["dims"][a].get<int>();
    for (int d : v.dims)
        if (d < 1) throw std::invalid_argument("dims must be >= 1");
    v.spacing = vec3_from_json(j, "spacing_mm");
    v.origin = vec3_from_json(j, "origin_mm");
    std::string dtype = j.value("dtype", "f32");
    if (dtype != "f32" && dtype != "i16")
        throw std::invalid_argument("dtype must be 'f32' or 'i16'");

    std::ifstream rf(raw_path, std::ios::binary);
    if (!rf) throw std::runtime_error("missing raw file: " + raw_path.string());
    rf.seekg(0, std::ios::end);
    size_t bytes = static_cast<size_t>(rf.tellg());
    rf.seekg(0);
    size_t elem_size = dtype == "f32" ? 4 : 2;
    size_t n = v.voxel_count();
    if (bytes != n * elem_size) throw std::runtime_error("element count mismatch");

    v.values.resize(n);
    if (dtype == "f32") {
        std::vector<float> buf(n);
        rf.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes));
        for (size_t i = 0; i < n; ++i) v.values[i] = buf[i];
    } else {
        std::vector<int16_t> buf(n);
        rf.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes));
        for (size_t i = 0; i < n; ++i) v.values[i] = buf[i];
    }
    v.validate();
    return v;
}

void save_volume(const CtVolume& v, const std::string& path, const std::string& dtype) {
    v.validate();
    if (dtype != "f32" && dtype != "i16")
        throw std::invalid_argument("dtype must be 'f32' or 'i16'");
    auto [raw_path, json_path] = volume_paths(path);

    json j;
    j["dims"] = v.dims;
    j["spacing_mm"] = {v.spacing.x, v.spacing.y, v.spacing.z};
    j["origin_mm"] = {v.origin.x, v.origin.y, v.origin.z};
    j["dtype"] = dtype;
    std::ofstream js(json_path);
    if (!js) throw std::runtime_error("cannot write sidecar: " + json_path.string());
    js << j.dump(2) << "\n";

    std::ofstream rf(raw_path, std::ios::binary);
    if (!rf) throw std::runtime_error("cannot write raw file: " + raw_path.string());
    size_t n = v.voxel_count();
    if (dtype == "f32") {
        std::vector<float> buf(n);
        for (size_t i = 0; i < n; ++i) buf[i] = static_cast<float>(v.values[i]);
        rf.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(n * 4));
    } else {
        std::vector<int16_t> buf(n);
        for (size_t i = 0; i < n; ++i) buf[i] = static_cast<int16_t>(std::lrint(v.values[i]));
        rf.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(n * 2));
    }
}

bool PhantomPrimitive::contains(const Vec3& p) const {
    Vec3 d = p - center;
    switch (kind) {
        case Kind::Sphere:
            return d.norm() <= extent.x;
        case Kind::Box:
            return std::abs(d.x) <= extent.x && std::abs(d.y) <= extent.y && std::abs(d.z) <= extent.z;
        case Kind::Ellipsoid: {
            double q = (d.x / extent.x) * (d.x / extent.x) + (d.y / extent.y) * (d.y / extent.y) +
                       (d.z / extent.z) * (d.z / extent.z);
            return q <= 1.0;
        }
    }
    return false;
}

PhantomSpec load_phantom_spec(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("missing phantom spec: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("ill-formed phantom spec: " + std::string(e.what()));
    }
    PhantomSpec s;
    if (j.contains("dims")) {
        for (int a = 0; a < 3; ++a) s.dims[a] = j["dims"][a].get<int>();
    }
    if (j.contains("spacing_mm")) s.spacing = vec3_from_json(j, "spacing_mm");
    if (j.contains("origin_mm")) {
        s.origin = vec3_from_json(j, "origin_mm");
        s.has_origin = true;
    }
    s.background_hu = j.value("background_hu", -1000.0);
    for (const auto& pj : j.value("primitives", json::array())) {
        PhantomPrimitive p;
        std::string kind = pj.value("type", "sphere");
        if (kind == "sphere") {
            p.kind = PhantomPrimitive::Kind::Sphere;
            p.extent.x = pj.at("radius_mm").get<double>();
        } else if (kind == "box") {
            p.kind = PhantomPrimitive::Kind::Box;
            auto h = pj.at("half_size_mm");
            p.extent = {h[0].get<double>(), h[1].get<double>(), h[2].get<double>()};
        } else if (kind == "ellipsoid") {
            p.kind = PhantomPrimitive::Kind::Ellipsoid;
            auto r = pj.at("radii_mm");
            p.extent = {r[0].get<double>(), r[1].get<double>(), r[2].get<double>()};
        } else {
            throw std::invalid_argument("unknown primitive type: " + kind);
        }
        auto c = pj.at("center_mm");
        p.center = {c[0].get<double>(), c[1].get<double>(), c[2].get<double>()};
        p.hu = pj.at("hu").get<double>();
        s.primitives.push_back(p);
    }
    return s;
}

CtVolume make_phantom(const PhantomSpec& spec) {
    CtVolume v;
    v.dims = spec.dims;
    for (int d : v.dims)
        if (d < 1) throw std::invalid_argument("dims must be >= 1");
    v.spacing = spec.spacing;
    if (spec.has_origin) {
        v.origin = spec.origin;
    } else {
        v.origin = {-0.5 * (spec.dims[0] - 1) * spec.spacing.x,
                    -0.5 * (spec.dims[1] - 1) * spec.spacing.y,
                    -0.5 * (spec.dims[2] - 1) * spec.spacing.z};
    }
    v.values.assign(v.voxel_count(), spec.background_hu);
    for (int k = 0; k < v.dims[2]; ++k)
        for (int j = 0; j < v.dims[1]; ++j)
            for (int i = 0; i < v.dims[0]; ++i) {
                Vec3 c = v.voxel_center(i, j, k);
                // last primitive containing the center wins
                for (const auto& p : spec.primitives)
                    if (p.contains(c)) v.values[v.index(i, j, k)] = p.hu;
            }
    return v;
}

AttenuationVolume hu_to_density(const CtVolume& v, double hu_lo, double hu_hi, double mu_scale) {
    if (hu_lo >= hu_hi) throw std::invalid_argument("hu_lo must be < hu_hi");
    if (mu_scale <= 0) throw std::invalid_argument("mu_scale must be > 0");
    v.validate();
    AttenuationVolume a;
    a.dims = v.dims;
    a.spacing = v.spacing;
    a.origin = v.origin;
    a.mu_scale = mu_scale;
    a.density.resize(v.values.size());
    double inv = 1.0 / (hu_hi - hu_lo);
    for (size_t i = 0; i < v.values.size(); ++i)
        a.density[i] = clamp01((v.values[i] - hu_lo) * inv);
    return a;
}

}  // namespace ddgs
