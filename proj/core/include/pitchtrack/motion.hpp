#pragma once

#include <span>
#include <vector>

#include "pitchtrack/box.hpp"

namespace pitchtrack {

enum class WarpKind { translation, euclidean };

/// Rigid image warp: p' = R(theta) * (p - center) + center + (tx, ty).
///
/// Sign convention: a warp estimated by ecc_align maps coordinates of the
/// *image* back onto coordinates of the *template*. If the image is the
/// template shifted by (+3, +2), the estimated warp is the translation
/// (-3, -2). Translation warps always have theta = 0.
struct Warp {
    WarpKind kind = WarpKind::translation;
    double tx = 0.0;
    double ty = 0.0;
    double theta = 0.0;
    double cx = 0.0;  ///< rotation center (euclidean only)
    double cy = 0.0;

    static Warp identity(WarpKind kind = WarpKind::translation) { return Warp{kind}; }
    static Warp translation(double tx, double ty) { return Warp{WarpKind::translation, tx, ty}; }
    static Warp euclidean(double theta, double tx, double ty, double cx, double cy) {
        return Warp{WarpKind::euclidean, tx, ty, theta, cx, cy};
    }

    void apply(double x, double y, double& out_x, double& out_y) const;
    Warp inverse() const;
    /// Same motion expressed in a coordinate frame scaled by `s` (e.g. from a
    /// downsampled background to full-resolution pixels).
    Warp scaled(double s) const;
    bool is_finite() const;
};

bool operator==(const Warp& a, const Warp& b);

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;  ///< row-major, values in [0, 1]

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    /// Bilinear sample; caller guarantees 0 <= x <= width-1, 0 <= y <= height-1.
    double sample(double x, double y) const;
    friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

/// Last box moved by the displacement between the last two centers; size kept.
/// A single box predicts itself. Throws std::invalid_argument on empty history.
BoundingBox cva_predict(std::span<const BoundingBox> history);

/// Box center mapped through the warp, width and height preserved.
BoundingBox cmc_apply(const Warp& warp, const BoundingBox& box);

struct EccOptions {
    int max_iter = 50;
    double tol = 1e-5;
};

struct EccResult {
    Warp warp;
    double rho = 0.0;           ///< correlation coefficient at `warp`
    double initial_rho = 0.0;   ///< correlation coefficient at the identity
    int iterations = 0;
    bool converged = false;
};

/// Enhanced correlation coefficient maximization (forward-additive
/// Gauss-Newton on the ECC objective, bilinear sampling). Starts from the
/// identity; stops when rho improves by less than `tol` or after `max_iter`
/// updates. Samples that fall outside the image are excluded. If rho drops on
/// two consecutive updates, the best warp seen is returned with
/// converged = false.
///
/// Throws std::invalid_argument("degenerate template") for a constant
/// template, or when the images differ in size or are smaller than 16x16.
EccResult ecc_align(const GrayImage& tmpl, const GrayImage& image, WarpKind kind,
                    const EccOptions& options = {});

/// Correlation coefficient between the template and the image sampled through
/// `warp` (which maps image coordinates onto template coordinates).
double ecc_correlation(const GrayImage& tmpl, const GrayImage& image, const Warp& warp);

}  // namespace pitchtrack
