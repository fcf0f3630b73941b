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

/**
 * @file geometry.hpp
 * @brief Planar kernels: box anchors, box re-parameterization, distances,
 * four-point homography estimation and bird's-eye projection.
 *
 * Everything here is a pure function over values and may be called
 * concurrently. All lengths are pixels.
 */

#pragma once

#include <array>
#include <string_view>

namespace socdist {

struct Point2D {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2D&, const Point2D&) = default;
};

/// Axis-aligned box in corner form. Valid iff x1 < x2 and y1 < y2.
struct BoundingBox {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;

    double width() const noexcept { return x2 - x1; }
    double height() const noexcept { return y2 - y1; }
    double area() const noexcept { return width() * height(); }
    bool valid() const noexcept;

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Box in center form (cx, cy, w, h), the layout detector heads emit.
struct CenterBox {
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;
};

enum class AnchorMode { Centroid, BottomCenter };

std::string_view to_string(AnchorMode mode) noexcept;
/// Accepts "centroid" and "bottom" (also "bottom_center").
AnchorMode parse_anchor_mode(std::string_view text);

/// Ground-region corners in the fixed order top-left, top-right,
/// bottom-right, bottom-left.
struct CalibrationQuad {
    std::array<Point2D, 4> corners{};

    /// Throws DegenerateCalibration if two corners coincide or any three
    /// are collinear.
    void validate() const;

    /// Axis-aligned side x side square anchored at the origin.
    static CalibrationQuad square(double side);

    friend bool operator==(const CalibrationQuad&, const CalibrationQuad&) = default;
};

/// 3x3 projective map, row-major, normalized so m[2][2] == 1.
class Homography {
public:
    using Matrix = std::array<std::array<double, 3>, 3>;

    Homography() noexcept;
    /// Normalizes by m[2][2]; throws DegenerateCalibration if that entry
    /// vanishes or the normalized determinant is within 1e-12 of zero.
    explicit Homography(const Matrix& m);

    static Homography identity() noexcept { return Homography{}; }
    static Homography scale(double sx, double sy);

    const Matrix& matrix() const noexcept { return m_; }
    double operator()(int row, int col) const noexcept { return m_[row][col]; }
    double determinant() const noexcept;

    Homography inverse() const;

private:
    Matrix m_;
};

Point2D centroid(const BoundingBox& box);
Point2D anchor_point(const BoundingBox& box, AnchorMode mode);
BoundingBox convert_back(const CenterBox& cb);
double euclidean_distance(const Point2D& a, const Point2D& b) noexcept;

/// Exact four-correspondence DLT. Each src corner lands on its dst corner.
Homography estimate_homography(const CalibrationQuad& src, const CalibrationQuad& dst);

inline constexpr double kDefaultBirdseyeSide = 448.0;

/// Maps the calibration quad onto the side x side bird's-eye square.
Homography birdseye_homography(const CalibrationQuad& cal, double side = kDefaultBirdseyeSide);

/// Throws PointAtInfinity when the projected depth is within 1e-12 of zero.
Point2D project_point(const Homography& h, const Point2D& p);

}  // namespace socdist
