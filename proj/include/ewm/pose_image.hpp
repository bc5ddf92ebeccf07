#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ewm/trajectory.hpp"

namespace ewm {

using Mat3 = std::array<std::array<double, 3>, 3>;

inline std::array<double, 3> mat_mul(const Mat3& m, const std::array<double, 3>& v) {
    return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

inline Mat3 mat_mul(const Mat3& a, const Mat3& b) {
    Mat3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
    return r;
}

// R = Rz(yaw) * Ry(pitch) * Rx(roll). The composition order matters when
// interfacing with other tools; this library uses yaw-pitch-roll throughout.
inline Mat3 rpy_to_rotation(double roll, double pitch, double yaw) {
    double cr = std::cos(roll), sr = std::sin(roll);
    double cp = std::cos(pitch), sp = std::sin(pitch);
    double cy = std::cos(yaw), sy = std::sin(yaw);
    Mat3 rx{{{1, 0, 0}, {0, cr, -sr}, {0, sr, cr}}};
    Mat3 ry{{{cp, 0, sp}, {0, 1, 0}, {-sp, 0, cp}}};
    Mat3 rz{{{cy, -sy, 0}, {sy, cy, 0}, {0, 0, 1}}};
    return mat_mul(rz, mat_mul(ry, rx));
}

// Pinhole camera with world->camera extrinsics.
struct CameraModel {
    double fx = 1.0, fy = 1.0;
    double cx = 0.0, cy = 0.0;
    Mat3 extrinsic_rotation{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    std::array<double, 3> extrinsic_translation{0.0, 0.0, 0.0};
};

inline void validate(const CameraModel& cam) {
    if (!(cam.fx > 0.0) || !(cam.fy > 0.0))
        throw std::invalid_argument("CameraModel: focal lengths must be > 0");
    // R^T R = I within 1e-9
    const Mat3& r = cam.extrinsic_rotation;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double dot = 0.0;
            for (int k = 0; k < 3; ++k) dot += r[k][i] * r[k][j];
            double expect = (i == j) ? 1.0 : 0.0;
            if (std::abs(dot - expect) > 1e-9)
                throw std::invalid_argument("CameraModel: extrinsic rotation not orthonormal");
        }
    }
}

struct Pixel {
    double u = 0.0, v = 0.0;
};

// u = fx * x_cam / z_cam + cx, v = fy * y_cam / z_cam + cy. Throws when the
// point has non-positive camera-frame depth.
inline Pixel project_point(const CameraModel& cam, const std::array<double, 3>& p_world) {
    auto p_cam = mat_mul(cam.extrinsic_rotation, p_world);
    for (int c = 0; c < 3; ++c) p_cam[c] += cam.extrinsic_translation[c];
    if (!(p_cam[2] > 0.0)) throw std::domain_error("project_point: behind camera");
    return {cam.fx * p_cam[0] / p_cam[2] + cam.cx, cam.fy * p_cam[1] / p_cam[2] + cam.cy};
}

// Row-major RGB image, 3 bytes per pixel.
struct PoseImage {
    int width = 0, height = 0;
    std::vector<std::uint8_t> pixels;

    static PoseImage black(int w, int h) {
        if (w <= 0 || h <= 0) throw std::invalid_argument("PoseImage: dimensions must be > 0");
        PoseImage img;
        img.width = w;
        img.height = h;
        img.pixels.assign(std::size_t(w) * h * 3, 0);
        return img;
    }

    void set(int x, int y, std::array<std::uint8_t, 3> rgb) {
        if (x < 0 || y < 0 || x >= width || y >= height) return;  // clip
        std::size_t off = (std::size_t(y) * width + x) * 3;
        pixels[off] = rgb[0];
        pixels[off + 1] = rgb[1];
        pixels[off + 2] = rgb[2];
    }
};

namespace detail {

using Rgb = std::array<std::uint8_t, 3>;

inline void draw_line(PoseImage& img, int x0, int y0, int x1, int y1, Rgb color) {
    int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        img.set(x0, y0, color);
        if (x0 == x1 && y0 == y1) break;
        int e2 = 2 * err;
        if (e2 >= dy) { err += dy; x0 += sx; }
        if (e2 <= dx) { err += dx; y0 += sy; }
    }
}

inline void fill_span(PoseImage& img, int xa, int xb, int y, Rgb color) {
    for (int x = std::min(xa, xb); x <= std::max(xa, xb); ++x) img.set(x, y, color);
}

// Midpoint circle, filled by horizontal spans between mirrored points.
inline void draw_filled_circle(PoseImage& img, int cx, int cy, int radius, Rgb color) {
    int x = radius, y = 0;
    int err = 1 - radius;
    while (x >= y) {
        fill_span(img, cx - x, cx + x, cy + y, color);
        fill_span(img, cx - x, cx + x, cy - y, color);
        fill_span(img, cx - y, cx + y, cy + x, color);
        fill_span(img, cx - y, cx + y, cy - x, color);
        ++y;
        if (err < 0) {
            err += 2 * y + 1;
        } else {
            --x;
            err += 2 * (y - x) + 1;
        }
    }
}

inline Rgb axis_color(Rgb base, int axis) {
    Rgb pure = axis == 0 ? Rgb{255, 0, 0} : axis == 1 ? Rgb{0, 255, 0} : Rgb{0, 0, 255};
    return {std::uint8_t((base[0] + pure[0]) / 2), std::uint8_t((base[1] + pure[1]) / 2),
            std::uint8_t((base[2] + pure[2]) / 2)};
}

}  // namespace detail

struct RenderOptions {
    double axis_scale = 0.05;  // meters
    int circle_radius = 6;     // pixels
};

inline constexpr detail::Rgb kLeftArmColor{230, 60, 60};
inline constexpr detail::Rgb kRightArmColor{60, 60, 230};

// Rasterizes both end-effector poses into a camera-aligned conditioning
// image on a black canvas. Per arm, drawn in this order:
//   1. openness circle at the EEF pixel, filled with I = round(64 + 191*o)
//      in the arm's dominant channel (secondary channels at I/4),
//   2. three axis segments from the EEF pixel toward the projections of
//      p + axis_scale * R * e_i, colored per axis within the arm family,
//   3. a 3x3 position marker in the arm base color.
// Left arm first, then right. Anything behind the camera or off-image is
// clipped, never an error.
inline PoseImage render_pose_image(const CameraModel& cam, const Pose& left, const Pose& right,
                                   int width, int height, const RenderOptions& opts = {}) {
    validate(cam);
    PoseImage img = PoseImage::black(width, height);

    auto try_project = [&](const std::array<double, 3>& p) -> std::optional<Pixel> {
        try {
            return project_point(cam, p);
        } catch (const std::domain_error&) {
            return std::nullopt;
        }
    };

    auto draw_arm = [&](const Pose& pose, detail::Rgb base) {
        auto center = try_project(pose.position);
        if (!center) return;  // whole arm clipped
        int px = int(std::lround(center->u));
        int py = int(std::lround(center->v));

        int intensity = int(std::lround(64.0 + 191.0 * pose.openness));
        detail::Rgb circle;
        if (base[0] >= base[2])  // red family
            circle = {std::uint8_t(intensity), std::uint8_t(intensity / 4),
                      std::uint8_t(intensity / 4)};
        else
            circle = {std::uint8_t(intensity / 4), std::uint8_t(intensity / 4),
                      std::uint8_t(intensity)};
        detail::draw_filled_circle(img, px, py, opts.circle_radius, circle);

        Mat3 rot = rpy_to_rotation(pose.orientation[0], pose.orientation[1], pose.orientation[2]);
        for (int axis = 0; axis < 3; ++axis) {
            std::array<double, 3> tip = pose.position;
            for (int c = 0; c < 3; ++c) tip[c] += opts.axis_scale * rot[c][axis];
            auto tip_px = try_project(tip);
            if (!tip_px) continue;  // this axis points behind the camera
            detail::draw_line(img, px, py, int(std::lround(tip_px->u)),
                              int(std::lround(tip_px->v)), detail::axis_color(base, axis));
        }

        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) img.set(px + dx, py + dy, base);
    };

    draw_arm(left, kLeftArmColor);
    draw_arm(right, kRightArmColor);
    return img;
}

// Binary PPM (P6, maxval 255).
inline void write_ppm(const PoseImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              std::streamsize(img.pixels.size()));
}

inline PoseImage read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P6" || maxval != 255 || w <= 0 || h <= 0)
        throw std::runtime_error(path + ": not a P6/255 PPM");
    in.get();  // single whitespace after maxval
    PoseImage img = PoseImage::black(w, h);
    if (!in.read(reinterpret_cast<char*>(img.pixels.data()), std::streamsize(img.pixels.size())))
        throw std::runtime_error(path + ": truncated PPM payload");
    return img;
}

// Opaque numeric array used for the latent-fusion step; shapes must agree.
struct LatentGrid {
    std::vector<std::size_t> dims;
    std::vector<double> data;
};

inline LatentGrid fuse_latents(const LatentGrid& a, const LatentGrid& b) {
    if (a.dims != b.dims || a.data.size() != b.data.size())
        throw std::invalid_argument("fuse_latents: shape mismatch");
    LatentGrid out;
    out.dims = a.dims;
    out.data.resize(a.data.size());
    for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] + b.data[i];
    return out;
}

}  // namespace ewm
