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

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "socdist/detection.hpp"
#include "socdist/geometry.hpp"

namespace socdist::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir()
    {
        static std::atomic<int> counter{0};
        const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
        path_ = std::filesystem::temp_directory_path() /
                ("socdist-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::string read_text(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::vector<std::string> read_lines(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline BoundingBox random_box(Rng& rng, double extent = 200.0, double max_side = 60.0)
{
    const double x = uniform(rng, 0, extent), y = uniform(rng, 0, extent);
    return {x, y, x + uniform(rng, 1.0, max_side), y + uniform(rng, 1.0, max_side)};
}

inline Point2D random_point(Rng& rng, double extent)
{
    return {uniform(rng, 0, extent), uniform(rng, 0, extent)};
}

/// Smallest |cross| over the four corner triples, relative to extent^2.
inline double min_relative_triangle(const CalibrationQuad& q)
{
    double extent = 0.0;
    for (const auto& a : q.corners)
        for (const auto& b : q.corners) extent = std::max(extent, std::hypot(a.x - b.x, a.y - b.y));
    double best = 1e300;
    for (int i = 0; i < 4; ++i) {
        const auto& a = q.corners[(i + 1) % 4];
        const auto& b = q.corners[(i + 2) % 4];
        const auto& c = q.corners[(i + 3) % 4];
        best = std::min(best, std::abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)));
    }
    return best / (extent * extent);
}

/// Convex quad in TL, TR, BR, BL order resembling a camera's view of a
/// ground patch: a jittered trapezoid inside [0, 1920] x [0, 1080].
inline CalibrationQuad random_camera_quad(Rng& rng)
{
    while (true) {
        const double top_y = uniform(rng, 50, 500), bottom_y = uniform(rng, top_y + 150, 1050);
        const double mid = uniform(rng, 500, 1400);
        const double top_half = uniform(rng, 80, 450), bottom_half = uniform(rng, top_half, 900);
        CalibrationQuad q{{{{mid - top_half + uniform(rng, -40, 40), top_y + uniform(rng, -30, 30)},
                            {mid + top_half + uniform(rng, -40, 40), top_y + uniform(rng, -30, 30)},
                            {mid + bottom_half + uniform(rng, -60, 60), bottom_y + uniform(rng, -30, 30)},
                            {mid - bottom_half + uniform(rng, -60, 60), bottom_y + uniform(rng, -30, 30)}}}};
        if (min_relative_triangle(q) > 0.02) return q;
    }
}

/// Any four points with every triple well away from collinear.
inline CalibrationQuad random_general_quad(Rng& rng, double extent = 1000.0)
{
    while (true) {
        CalibrationQuad q;
        for (auto& c : q.corners) c = random_point(rng, extent);
        if (min_relative_triangle(q) > 0.02) return q;
    }
}

/// Point strictly inside a convex quad (random convex combination).
inline Point2D random_interior(Rng& rng, const CalibrationQuad& q)
{
    double w[4], sum = 0.0;
    for (double& v : w) sum += (v = uniform(rng, 0.05, 1.0));
    Point2D p{0, 0};
    for (int i = 0; i < 4; ++i) {
        p.x += w[i] / sum * q.corners[i].x;
        p.y += w[i] / sum * q.corners[i].y;
    }
    return p;
}

}  // namespace socdist::testing
