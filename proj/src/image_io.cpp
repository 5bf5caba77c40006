#include "ddgs/image.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>
#include <zlib.h>

namespace ddgs {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void put_be32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void write_chunk(std::ofstream& f, const char type[4], const std::vector<uint8_t>& data) {
    std::vector<uint8_t> hdr;
    put_be32(hdr, static_cast<uint32_t>(data.size()));
    f.write(reinterpret_cast<const char*>(hdr.data()), 4);
    f.write(type, 4);
    if (!data.empty()) f.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(type), 4);
    if (!data.empty()) crc = crc32(crc, data.data(), static_cast<uInt>(data.size()));
    std::vector<uint8_t> crcb;
    put_be32(crcb, static_cast<uint32_t>(crc));
    f.write(reinterpret_cast<const char*>(crcb.data()), 4);
}

std::pair<fs::path, fs::path> image_paths(const std::string& path) {
    fs::path p(path);
    if (p.extension() == ".json") return {fs::path(p).replace_extension(".raw"), p};
    if (p.extension() == ".raw") return {p, fs::path(p).replace_extension(".json")};
    return {fs::path(path + ".raw"), fs::path(path + ".json")};
}

}  // namespace

void write_png16(const RenderedImage& img, const std::string& path) {
    if (img.width < 1 || img.height < 1) throw std::invalid_argument("zero-sized image");
    size_t row_bytes = static_cast<size_t>(img.width) * 2 + 1;
    std::vector<uint8_t> raster(row_bytes * img.height);
    for (int y = 0; y < img.height; ++y) {
        uint8_t* row = raster.data() + row_bytes * y;
        row[0] = 0;  // filter: none
        for (int x = 0; x < img.width; ++x) {
            double v = clamp01(img.at(x, y));
            auto u = static_cast<uint16_t>(std::lrint(v * 65535.0));
            row[1 + 2 * x] = static_cast<uint8_t>(u >> 8);
            row[2 + 2 * x] = static_cast<uint8_t>(u & 0xff);
        }
    }

    uLongf comp_bound = compressBound(static_cast<uLong>(raster.size()));
    std::vector<uint8_t> comp(comp_bound);
    if (compress2(comp.data(), &comp_bound, raster.data(), static_cast<uLong>(raster.size()), 6) != Z_OK)
        throw std::runtime_error("zlib compression failed");
    comp.resize(comp_bound);

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write png: " + path);
    static const uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    f.write(reinterpret_cast<const char*>(sig), 8);

    std::vector<uint8_t> ihdr;
    put_be32(ihdr, static_cast<uint32_t>(img.width));
    put_be32(ihdr, static_cast<uint32_t>(img.height));
    ihdr.push_back(16);  // bit depth
    ihdr.push_back(0);   // grayscale
    ihdr.push_back(0);   // compression
    ihdr.push_back(0);   // filter
    ihdr.push_back(0);   // no interlace
    write_chunk(f, "IHDR", ihdr);
    write_chunk(f, "IDAT", comp);
    write_chunk(f, "IEND", {});
}

void write_image_raw(const RenderedImage& img, const std::string& path) {
    if (img.width < 1 || img.height < 1) throw std::invalid_argument("zero-sized image");
    auto [raw_path, json_path] = image_paths(path);
    json j;
    j["width"] = img.width;
    j["height"] = img.height;
    j["dtype"] = "f32";
    std::ofstream js(json_path);
    if (!js) throw std::runtime_error("cannot write image sidecar: " + json_path.string());
    js << j.dump(2) << "\n";

    std::vector<float> buf(img.size());
    for (size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(img.pixels[i]);
    std::ofstream rf(raw_path, std::ios::binary);
    if (!rf) throw std::runtime_error("cannot write image raw: " + raw_path.string());
    rf.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 4));
}

RenderedImage read_image_raw(const std::string& path) {
    auto [raw_path, json_path] = image_paths(path);
    std::ifstream js(json_path);
    if (!js) throw std::runtime_error("missing image sidecar: " + json_path.string());
    json j;
    js >> j;
    RenderedImage img(j.at("width").get<int>(), j.at("height").get<int>());
    std::ifstream rf(raw_path, std::ios::binary);
    if (!rf) throw std::runtime_error("missing image raw: " + raw_path.string());
    std::vector<float> buf(img.size());
    rf.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 4));
    if (!rf) throw std::runtime_error("image raw truncated: " + raw_path.string());
    for (size_t i = 0; i < buf.size(); ++i) img.pixels[i] = buf[i];
    return img;
}

}  // namespace ddgs
