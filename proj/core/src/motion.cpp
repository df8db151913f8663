#include "pitchtrack/motion.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pitchtrack {

void Warp::apply(double x, double y, double& out_x, double& out_y) const {
    if (kind == WarpKind::translation) {
        out_x = x + tx;
        out_y = y + ty;
        return;
    }
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double dx = x - cx;
    const double dy = y - cy;
    out_x = c * dx - s * dy + cx + tx;
    out_y = s * dx + c * dy + cy + ty;
}

Warp Warp::inverse() const {
    if (kind == WarpKind::translation) return translation(-tx, -ty);
    // p = R(-theta) (p' - c - t) + c
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double itx = -(c * tx + s * ty);
    const double ity = -(-s * tx + c * ty);
    return euclidean(-theta, itx, ity, cx, cy);
}

Warp Warp::scaled(double s) const {
    Warp out = *this;
    out.tx *= s;
    out.ty *= s;
    out.cx *= s;
    out.cy *= s;
    return out;
}

bool Warp::is_finite() const {
    return std::isfinite(tx) && std::isfinite(ty) && std::isfinite(theta) && std::isfinite(cx) &&
           std::isfinite(cy);
}

bool operator==(const Warp& a, const Warp& b) {
    return a.kind == b.kind && a.tx == b.tx && a.ty == b.ty && a.theta == b.theta && a.cx == b.cx && a.cy == b.cy;
}

double GrayImage::sample(double x, double y) const {
    int x0 = std::min(static_cast<int>(std::floor(x)), width - 2);
    int y0 = std::min(static_cast<int>(std::floor(y)), height - 2);
    x0 = std::max(x0, 0);
    y0 = std::max(y0, 0);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = at(x0, y0) * (1.0 - fx) + at(x0 + 1, y0) * fx;
    const double bot = at(x0, y0 + 1) * (1.0 - fx) + at(x0 + 1, y0 + 1) * fx;
    return top * (1.0 - fy) + bot * fy;
}

BoundingBox cva_predict(std::span<const BoundingBox> history) {
    if (history.empty()) throw std::invalid_argument("cva_predict needs at least one box");
    const BoundingBox& last = history.back();
    if (history.size() == 1) return last;
    const BoundingBox& prev = history[history.size() - 2];
    return last.translated(last.center_x() - prev.center_x(), last.center_y() - prev.center_y());
}

BoundingBox cmc_apply(const Warp& warp, const BoundingBox& box) {
    double cx = 0.0;
    double cy = 0.0;
    warp.apply(box.center_x(), box.center_y(), cx, cy);
    return BoundingBox::from_center(cx, cy, box.w, box.h);
}

namespace {

void check_inputs(const GrayImage& tmpl, const GrayImage& image) {
    if (tmpl.width != image.width || tmpl.height != image.height) {
        throw std::invalid_argument("ecc_align: template and image sizes differ");
    }
    if (tmpl.width < 16 || tmpl.height < 16) {
        throw std::invalid_argument("ecc_align: images must be at least 16x16");
    }
    if (tmpl.pixels.size() != static_cast<std::size_t>(tmpl.width) * tmpl.height ||
        image.pixels.size() != tmpl.pixels.size()) {
        throw std::invalid_argument("ecc_align: pixel buffer size mismatch");
    }
}

struct Gradients {
    GrayImage gx;
    GrayImage gy;
};

Gradients gradients(const GrayImage& img) {
    Gradients g{GrayImage(img.width, img.height), GrayImage(img.width, img.height)};
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const int xl = std::max(x - 1, 0);
            const int xr = std::min(x + 1, img.width - 1);
            const int yt = std::max(y - 1, 0);
            const int yb = std::min(y + 1, img.height - 1);
            g.gx.at(x, y) = (img.at(xr, y) - img.at(xl, y)) / (xr - xl);
            g.gy.at(x, y) = (img.at(x, yb) - img.at(x, yt)) / (yb - yt);
        }
    }
    return g;
}

// Template-to-image warp parameters: translation (tx, ty) or euclidean
// (theta, tx, ty) about the template center.
struct Samples {
    std::vector<double> t;    // zero-mean template values
    std::vector<double> iw;   // zero-mean warped image values
    std::vector<double> jac;  // row-major count x nparams
    double rho = -1.0;
};

Samples collect(const GrayImage& tmpl, const GrayImage& image, const Gradients* grad,
                const Warp& to_image, int nparams) {
    Samples s;
    const double limit_x = image.width - 1;
    const double limit_y = image.height - 1;
    const double c = std::cos(to_image.theta);
    const double sn = std::sin(to_image.theta);
    for (int y = 0; y < tmpl.height; ++y) {
        for (int x = 0; x < tmpl.width; ++x) {
            double u = 0.0;
            double v = 0.0;
            to_image.apply(x, y, u, v);
            if (!(u >= 0.0 && u <= limit_x && v >= 0.0 && v <= limit_y)) continue;
            s.t.push_back(tmpl.at(x, y));
            s.iw.push_back(image.sample(u, v));
            if (grad == nullptr) continue;
            const double gx = grad->gx.sample(u, v);
            const double gy = grad->gy.sample(u, v);
            if (nparams == 3) {
                const double dx = x - to_image.cx;
                const double dy = y - to_image.cy;
                const double du = -sn * dx - c * dy;
                const double dv = c * dx - sn * dy;
                s.jac.push_back(gx * du + gy * dv);
            }
            s.jac.push_back(gx);
            s.jac.push_back(gy);
        }
    }
    const std::size_t n = s.t.size();
    if (n < 8) return s;
    double mt = 0.0;
    double mi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mt += s.t[i];
        mi += s.iw[i];
    }
    mt /= static_cast<double>(n);
    mi /= static_cast<double>(n);
    double tt = 0.0;
    double ii = 0.0;
    double ti = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s.t[i] -= mt;
        s.iw[i] -= mi;
        tt += s.t[i] * s.t[i];
        ii += s.iw[i] * s.iw[i];
        ti += s.t[i] * s.iw[i];
    }
    s.rho = (tt > 0.0 && ii > 0.0) ? ti / std::sqrt(tt * ii) : -1.0;
    return s;
}

Warp initial_warp(const GrayImage& tmpl, WarpKind kind) {
    if (kind == WarpKind::translation) return Warp::identity();
    return Warp::euclidean(0.0, 0.0, 0.0, 0.5 * (tmpl.width - 1), 0.5 * (tmpl.height - 1));
}

}  // namespace

double ecc_correlation(const GrayImage& tmpl, const GrayImage& image, const Warp& warp) {
    check_inputs(tmpl, image);
    return collect(tmpl, image, nullptr, warp.inverse(), 0).rho;
}

EccResult ecc_align(const GrayImage& tmpl, const GrayImage& image, WarpKind kind,
                    const EccOptions& options) {
    check_inputs(tmpl, image);
    {
        const auto [lo, hi] = std::minmax_element(tmpl.pixels.begin(), tmpl.pixels.end());
        if (!(*hi - *lo > 1e-12)) throw std::invalid_argument("degenerate template");
    }

    const int nparams = kind == WarpKind::translation ? 2 : 3;
    const Gradients grad = gradients(image);

    Warp to_image = initial_warp(tmpl, kind);
    Warp best = to_image;
    double best_rho = -std::numeric_limits<double>::infinity();
    double prev_rho = 0.0;
    int drops = 0;

    EccResult result;
    for (int iter = 0;; ++iter) {
        const Samples s = collect(tmpl, image, &grad, to_image, nparams);
        const double rho = s.rho;
        if (iter == 0) result.initial_rho = rho;
        if (rho > best_rho) {
            best_rho = rho;
            best = to_image;
        }
        if (iter > 0) {
            if (std::abs(rho - prev_rho) < options.tol) {
                result.converged = true;
                break;
            }
            drops = rho < prev_rho ? drops + 1 : 0;
            if (drops >= 2) break;
        }
        if (iter >= options.max_iter || s.t.size() < 8 || rho <= -1.0) break;

        const auto n = static_cast<Eigen::Index>(s.t.size());
        const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
            jac(s.jac.data(), n, nparams);
        const Eigen::Map<const Eigen::VectorXd> t(s.t.data(), n);
        const Eigen::Map<const Eigen::VectorXd> iw(s.iw.data(), n);

        const Eigen::MatrixXd hessian = jac.transpose() * jac;
        const auto solver = hessian.ldlt();
        if (solver.info() != Eigen::Success || !solver.isPositive()) break;
        const Eigen::VectorXd proj_i = jac.transpose() * iw;
        const Eigen::VectorXd proj_t = jac.transpose() * t;
        const Eigen::VectorXd hinv_proj_i = solver.solve(proj_i);

        const double lambda_num = iw.squaredNorm() - proj_i.dot(hinv_proj_i);
        const double lambda_den = t.dot(iw) - proj_t.dot(hinv_proj_i);
        if (!(lambda_den > 0.0)) break;
        const double lambda = lambda_num / lambda_den;

        const Eigen::VectorXd error = lambda * t - iw;
        const Eigen::VectorXd delta = solver.solve(jac.transpose() * error);
        if (!delta.allFinite()) break;

        if (nparams == 3) {
            to_image.theta += delta(0);
            to_image.tx += delta(1);
            to_image.ty += delta(2);
        } else {
            to_image.tx += delta(0);
            to_image.ty += delta(1);
        }
        ++result.iterations;
        prev_rho = rho;
    }

    result.warp = best.inverse();
    result.rho = best_rho;
    return result;
}

}  // namespace pitchtrack
