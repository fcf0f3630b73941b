// Copyright (c) 2026 The socdist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "socdist/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "socdist/errors.hpp"

namespace socdist {

namespace {

constexpr double kDetEpsilon = 1e-12;
constexpr double kDepthEpsilon = 1e-12;
// Relative to the squared extent of the quad.
constexpr double kCollinearEpsilon = 1e-9;

bool finite(const Point2D& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

void require_valid(const BoundingBox& box)
{
    if (!box.valid()) {
        throw InvalidGeometry("degenerate bounding box (" + std::to_string(box.x1) + ", " +
                              std::to_string(box.y1) + ", " + std::to_string(box.x2) + ", " +
                              std::to_string(box.y2) + ")");
    }
}

using Mat3 = Homography::Matrix;

Mat3 multiply(const Mat3& a, const Mat3& b)
{
    Mat3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
    return r;
}

double det3(const Mat3& m)
{
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// Similarity that moves the corner centroid to the origin and scales the mean
// distance from it to roughly sqrt(2). Conditions the DLT system. The scale is
// a power of two so conditioning and its inverse introduce no rounding.
struct Conditioner {
    double tx = 0.0, ty = 0.0, s = 1.0;

    explicit Conditioner(const CalibrationQuad& q)
    {
        for (const auto& c : q.corners) {
            tx += c.x;
            ty += c.y;
        }
        tx /= 4.0;
        ty /= 4.0;
        double mean = 0.0;
        for (const auto& c : q.corners) mean += std::hypot(c.x - tx, c.y - ty);
        mean /= 4.0;
        s = std::exp2(std::round(std::log2(std::sqrt(2.0) / mean)));
    }

    Point2D apply(const Point2D& p) const { return {(p.x - tx) * s, (p.y - ty) * s}; }
    Mat3 forward() const { return {{{s, 0, -s * tx}, {0, s, -s * ty}, {0, 0, 1}}}; }
    Mat3 backward() const { return {{{1 / s, 0, tx}, {0, 1 / s, ty}, {0, 0, 1}}}; }
};

// Solves a x = b in place by Gaussian elimination with partial pivoting.
std::array<double, 8> solve8(std::array<std::array<double, 8>, 8> a, std::array<double, 8> b)
{
    constexpr int n = 8;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) <= kDetEpsilon)
            throw DegenerateCalibration("calibration system is singular");
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (int r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::array<double, 8> x{};
    for (int r = n - 1; r >= 0; --r) {
        double acc = b[r];
        for (int c = r + 1; c < n; ++c) acc -= a[r][c] * x[c];
        x[r] = acc / a[r][r];
    }
    return x;
}

}  // namespace

bool BoundingBox::valid() const noexcept
{
    return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2) &&
           x1 < x2 && y1 < y2;
}

std::string_view to_string(AnchorMode mode) noexcept
{
    return mode == AnchorMode::Centroid ? "centroid" : "bottom";
}

AnchorMode parse_anchor_mode(std::string_view text)
{
    if (text == "centroid") return AnchorMode::Centroid;
    if (text == "bottom" || text == "bottom_center") return AnchorMode::BottomCenter;
    throw ConfigError("anchor_mode", "anchor mode must be 'centroid' or 'bottom', got '" +
                                         std::string(text) + "'");
}

void CalibrationQuad::validate() const
{
    double extent = 0.0;
    for (const auto& c : corners) {
        if (!finite(c)) throw DegenerateCalibration("calibration corner is not finite");
        for (const auto& d : corners) extent = std::max(extent, euclidean_distance(c, d));
    }
    const double tol = kCollinearEpsilon * extent * extent;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (euclidean_distance(corners[i], corners[j]) <= std::sqrt(tol))
                throw DegenerateCalibration("calibration corners " + std::to_string(i) + " and " +
                                            std::to_string(j) + " coincide");
    for (int i = 0; i < 4; ++i) {
        // The three corners other than i.
        const auto& a = corners[(i + 1) % 4];
        const auto& b = corners[(i + 2) % 4];
        const auto& c = corners[(i + 3) % 4];
        const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
        if (std::abs(cross) <= tol)
            throw DegenerateCalibration("three calibration corners are collinear");
    }
}

CalibrationQuad CalibrationQuad::square(double side)
{
    if (!(side > 0.0) || !std::isfinite(side))
        throw InvalidGeometry("bird's-eye side must be positive");
    return {{{{0.0, 0.0}, {side, 0.0}, {side, side}, {0.0, side}}}};
}

Homography::Homography() noexcept : m_{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}} {}

Homography::Homography(const Matrix& m) : m_(m)
{
    const double w = m_[2][2];
    if (!std::isfinite(w) || std::abs(w) <= kDetEpsilon)
        throw DegenerateCalibration("homography cannot be normalized (m22 = 0)");
    for (auto& row : m_)
        for (auto& v : row) {
            v /= w;
            if (!std::isfinite(v)) throw DegenerateCalibration("homography is not finite");
        }
    m_[2][2] = 1.0;
    if (std::abs(det3(m_)) <= kDetEpsilon)
        throw DegenerateCalibration("homography is singular");
}

Homography Homography::scale(double sx, double sy)
{
    return Homography(Matrix{{{sx, 0, 0}, {0, sy, 0}, {0, 0, 1}}});
}

double Homography::determinant() const noexcept { return det3(m_); }

Homography Homography::inverse() const
{
    const auto& m = m_;
    const double det = det3(m);
    Matrix adj{};
    adj[0][0] = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    adj[0][1] = m[0][2] * m[2][1] - m[0][1] * m[2][2];
    adj[0][2] = m[0][1] * m[1][2] - m[0][2] * m[1][1];
    adj[1][0] = m[1][2] * m[2][0] - m[1][0] * m[2][2];
    adj[1][1] = m[0][0] * m[2][2] - m[0][2] * m[2][0];
    adj[1][2] = m[0][2] * m[1][0] - m[0][0] * m[1][2];
    adj[2][0] = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    adj[2][1] = m[0][1] * m[2][0] - m[0][0] * m[2][1];
    adj[2][2] = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    for (auto& row : adj)
        for (auto& v : row) v /= det;
    return Homography(adj);
}

Point2D centroid(const BoundingBox& box)
{
    require_valid(box);
    return {(box.x1 + box.x2) / 2.0, (box.y1 + box.y2) / 2.0};
}

Point2D anchor_point(const BoundingBox& box, AnchorMode mode)
{
    const Point2D c = centroid(box);
    return mode == AnchorMode::Centroid ? c : Point2D{c.x, box.y2};
}

BoundingBox convert_back(const CenterBox& cb)
{
    if (!(cb.w > 0.0) || !(cb.h > 0.0) || !std::isfinite(cb.w) || !std::isfinite(cb.h) ||
        !std::isfinite(cb.cx) || !std::isfinite(cb.cy))
        throw InvalidGeometry("center box needs finite center and positive extent");
    return {cb.cx - cb.w / 2.0, cb.cy - cb.h / 2.0, cb.cx + cb.w / 2.0, cb.cy + cb.h / 2.0};
}

double euclidean_distance(const Point2D& a, const Point2D& b) noexcept
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

Homography estimate_homography(const CalibrationQuad& src, const CalibrationQuad& dst)
{
    src.validate();
    dst.validate();

    const Conditioner cs(src);
    const Conditioner cd(dst);

    // Unknowns h00 h01 h02 h10 h11 h12 h20 h21, with h22 fixed to 1.
    std::array<std::array<double, 8>, 8> a{};
    std::array<double, 8> b{};
    for (int i = 0; i < 4; ++i) {
        const Point2D p = cs.apply(src.corners[i]);
        const Point2D q = cd.apply(dst.corners[i]);
        a[2 * i] = {p.x, p.y, 1, 0, 0, 0, -q.x * p.x, -q.x * p.y};
        b[2 * i] = q.x;
        a[2 * i + 1] = {0, 0, 0, p.x, p.y, 1, -q.y * p.x, -q.y * p.y};
        b[2 * i + 1] = q.y;
    }
    const auto h = solve8(a, b);
    const Mat3 conditioned{{{h[0], h[1], h[2]}, {h[3], h[4], h[5]}, {h[6], h[7], 1.0}}};
    return Homography(multiply(cd.backward(), multiply(conditioned, cs.forward())));
}

Homography birdseye_homography(const CalibrationQuad& cal, double side)
{
    return estimate_homography(cal, CalibrationQuad::square(side));
}

Point2D project_point(const Homography& h, const Point2D& p)
{
    const auto& m = h.matrix();
    const double w = m[2][0] * p.x + m[2][1] * p.y + m[2][2];
    if (!(std::abs(w) > kDepthEpsilon)) throw PointAtInfinity("point projects to infinity");
    return {(m[0][0] * p.x + m[0][1] * p.y + m[0][2]) / w,
            (m[1][0] * p.x + m[1][1] * p.y + m[1][2]) / w};
}

}  // namespace socdist
