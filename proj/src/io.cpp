// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#include <procam/error.h>
#include <procam/io.h>
#include <procam/mesh.h>

#include <png.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>

namespace procam {

namespace {

static_assert(std::endian::native == std::endian::little, "PFM codec assumes a little-endian host");

void write_pfm_raw(const std::filesystem::path &path, int w, int h, int channels, const std::vector<double> &data) {
    if (channels != 1 && channels != 3) throw IoError("PFM supports 1 or 3 channels");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << (channels == 3 ? "PF" : "Pf") << "\n" << w << " " << h << "\n-1.0\n";
    std::vector<float> row(static_cast<size_t>(w) * channels);
    for (int y = h - 1; y >= 0; --y) {
        for (size_t i = 0; i < row.size(); ++i) row[i] = static_cast<float>(data[static_cast<size_t>(y) * row.size() + i]);
        out.write(reinterpret_cast<const char *>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
    if (!out) throw IoError("write failed: " + path.string());
}

struct RawPfm {
    int width = 0, height = 0, channels = 0;
    std::vector<double> data;
};

RawPfm read_pfm_raw(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string magic;
    RawPfm r;
    double scale = 0.0;
    in >> magic >> r.width >> r.height >> scale;
    if (!in || (magic != "PF" && magic != "Pf") || r.width <= 0 || r.height <= 0 || scale == 0.0)
        throw ParseError(path.string() + ": bad PFM header");
    in.get();  // single whitespace after the scale
    r.channels = magic == "PF" ? 3 : 1;
    bool swap = scale > 0.0;  // big-endian data
    size_t row_len = static_cast<size_t>(r.width) * r.channels;
    r.data.resize(row_len * r.height);
    std::vector<uint32_t> row(row_len);
    for (int y = r.height - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char *>(row.data()), static_cast<std::streamsize>(row_len * 4));
        if (!in) throw ParseError(path.string() + ": truncated PFM data");
        for (size_t i = 0; i < row_len; ++i) {
            uint32_t bits = swap ? __builtin_bswap32(row[i]) : row[i];
            r.data[static_cast<size_t>(y) * row_len + i] = std::bit_cast<float>(bits);
        }
    }
    return r;
}

}  // namespace

template <typename Space>
void write_pfm(const std::filesystem::path &path, const Image<Space> &image) {
    write_pfm_raw(path, image.width(), image.height(), image.channels(), image.storage());
}
template void write_pfm<LinearSpace>(const std::filesystem::path &, const LinearImage &);
template void write_pfm<DisplaySpace>(const std::filesystem::path &, const SrgbImage &);

LinearImage read_pfm(const std::filesystem::path &path) {
    RawPfm r = read_pfm_raw(path);
    LinearImage img(r.width, r.height, r.channels);
    img.storage() = std::move(r.data);
    return img;
}

void write_texture_pfm(const std::filesystem::path &path, const Texture &texture) {
    write_pfm_raw(path, texture.width(), texture.height(), texture.channels(), texture.values());
}

Texture read_texture_pfm(const std::filesystem::path &path) {
    RawPfm r = read_pfm_raw(path);
    Texture t(r.width, r.height, r.channels);
    t.values() = std::move(r.data);
    return t;
}

void write_png(const std::filesystem::path &path, const SrgbImage &image) {
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(image.width());
    png.height = static_cast<png_uint_32>(image.height());
    png.format = PNG_FORMAT_RGB;
    std::vector<uint8_t> bytes(image.pixel_count() * 3);
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x) {
            Vec3 c = image.rgb(x, y);
            for (int k = 0; k < 3; ++k) {
                double v = std::isfinite(c[k]) ? std::clamp(c[k], 0.0, 1.0) : 0.0;
                bytes[(static_cast<size_t>(y) * image.width() + x) * 3 + k] =
                    static_cast<uint8_t>(std::lround(v * 255.0));
            }
        }
    if (!png_image_write_to_file(&png, path.string().c_str(), 0, bytes.data(), 0, nullptr))
        throw IoError("cannot write " + path.string() + ": " + png.message);
}

SrgbImage read_png(const std::filesystem::path &path) {
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, path.string().c_str()))
        throw IoError("cannot read " + path.string() + ": " + png.message);
    png.format = PNG_FORMAT_RGB;
    std::vector<uint8_t> bytes(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, bytes.data(), 0, nullptr))
        throw ParseError(path.string() + ": " + png.message);
    SrgbImage img(static_cast<int>(png.width), static_cast<int>(png.height), 3);
    for (size_t i = 0; i < bytes.size(); ++i) img.storage()[i] = bytes[i] / 255.0;
    return img;
}

TriangleMesh read_obj(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<Vec3> v, vn;
    std::vector<Vec2> vt;
    TriangleMesh mesh;
    std::map<std::tuple<long, long, long>, uint32_t> remap;
    bool any_normal = false, missing_normal = false;
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string &what) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + what);
    };
    auto resolve = [&](long idx, size_t count) -> long {
        long r = idx < 0 ? static_cast<long>(count) + idx : idx - 1;
        if (r < 0 || r >= static_cast<long>(count)) fail("index " + std::to_string(idx) + " out of range");
        return r;
    };
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ls >> p.x >> p.y >> p.z)) fail("bad vertex");
            v.push_back(p);
        } else if (tag == "vn") {
            Vec3 n;
            if (!(ls >> n.x >> n.y >> n.z)) fail("bad normal");
            vn.push_back(n);
        } else if (tag == "vt") {
            Vec2 t;
            if (!(ls >> t.x >> t.y)) fail("bad texture coordinate");
            vt.push_back(t);
        } else if (tag == "f") {
            std::vector<uint32_t> face;
            std::string tok;
            while (ls >> tok) {
                long iv = 0, it = 0, in_ = 0;
                size_t s1 = tok.find('/');
                try {
                    iv = std::stol(tok.substr(0, s1));
                    if (s1 != std::string::npos) {
                        size_t s2 = tok.find('/', s1 + 1);
                        std::string a = tok.substr(s1 + 1, s2 == std::string::npos ? std::string::npos : s2 - s1 - 1);
                        if (!a.empty()) it = std::stol(a);
                        if (s2 != std::string::npos && s2 + 1 < tok.size()) in_ = std::stol(tok.substr(s2 + 1));
                    }
                } catch (const std::exception &) {
                    fail("bad face token '" + tok + "'");
                }
                long rv = resolve(iv, v.size());
                long rt = it ? resolve(it, vt.size()) : -1;
                long rn = in_ ? resolve(in_, vn.size()) : -1;
                auto key = std::make_tuple(rv, rt, rn);
                auto found = remap.find(key);
                if (found == remap.end()) {
                    auto id = static_cast<uint32_t>(mesh.positions.size());
                    mesh.positions.push_back(v[rv]);
                    mesh.uvs.push_back(rt >= 0 ? vt[rt] : Vec2{});
                    mesh.normals.push_back(rn >= 0 ? normalize(vn[rn]) : Vec3{});
                    (rn >= 0 ? any_normal : missing_normal) = true;
                    found = remap.emplace(key, id).first;
                }
                face.push_back(found->second);
            }
            if (face.size() < 3) fail("face with fewer than 3 vertices");
            for (size_t i = 1; i + 1 < face.size(); ++i) mesh.triangles.push_back({face[0], face[i], face[i + 1]});
        }
    }
    if (mesh.triangles.empty()) throw ParseError(path.string() + ": no faces");
    if (missing_normal || !any_normal) mesh.compute_vertex_normals();
    mesh.validate();
    return mesh;
}

void write_obj(const std::filesystem::path &path, const TriangleMesh &mesh) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out.precision(17);
    for (const auto &p : mesh.positions) out << "v " << p.x << " " << p.y << " " << p.z << "\n";
    for (const auto &t : mesh.uvs) out << "vt " << t.x << " " << t.y << "\n";
    for (const auto &n : mesh.normals) out << "vn " << n.x << " " << n.y << " " << n.z << "\n";
    for (const auto &tri : mesh.triangles) {
        out << "f";
        for (uint32_t i : tri) out << " " << i + 1 << "/" << i + 1 << "/" << i + 1;
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path.string());
}

void write_ply(const std::filesystem::path &path, const std::vector<Vec3> &points) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "ply\nformat ascii 1.0\nelement vertex " << points.size()
        << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
    out.precision(17);
    for (const auto &p : points) out << p.x << " " << p.y << " " << p.z << "\n";
}

}  // namespace procam
