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

#include "socdist/render.hpp"

#include <cmath>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "socdist/errors.hpp"

namespace socdist {

namespace {

constexpr int kFont = cv::FONT_HERSHEY_SIMPLEX;
constexpr double kFontScale = 0.6;
constexpr int kFontThickness = 1;
constexpr int kBannerPad = 6;

cv::Point pixel(double x, double y)
{
    return {static_cast<int>(std::lround(x)), static_cast<int>(std::lround(y))};
}

}  // namespace

std::string banner_text(const FrameReport& report)
{
    return "Violations: " + std::to_string(report.violation_count);
}

cv::Rect banner_region(const cv::Size& image, const FrameReport& report)
{
    int baseline = 0;
    const cv::Size text = cv::getTextSize(banner_text(report), kFont, kFontScale, kFontThickness, &baseline);
    const cv::Rect full(0, 0, text.width + 2 * kBannerPad, text.height + baseline + 2 * kBannerPad);
    return full & cv::Rect(0, 0, image.width, image.height);
}

cv::Mat render_annotations(const cv::Mat& frame, const FrameReport& report)
{
    cv::Mat out;
    if (frame.channels() == 1)
        cv::cvtColor(frame, out, cv::COLOR_GRAY2BGR);
    else if (frame.channels() == 4)
        cv::cvtColor(frame, out, cv::COLOR_BGRA2BGR);
    else
        out = frame.clone();

    // Red on top where boxes overlap.
    for (const auto color : {StatusColor::Green, StatusColor::Red}) {
        for (const auto& status : report.statuses) {
            if (status.color != color) continue;
            if (status.index >= report.boxes.size())
                throw InvalidGeometry("status index " + std::to_string(status.index) +
                                      " has no bounding box");
            const auto& b = report.boxes[status.index];
            cv::rectangle(out, pixel(b.x1, b.y1), pixel(b.x2, b.y2),
                          color == StatusColor::Red ? kRed : kGreen, kBoxStroke, cv::LINE_8);
        }
    }

    const cv::Rect banner = banner_region(out.size(), report);
    if (banner.area() > 0) {
        out(banner).setTo(cv::Scalar(0, 0, 0));
        int baseline = 0;
        const cv::Size text =
            cv::getTextSize(banner_text(report), kFont, kFontScale, kFontThickness, &baseline);
        cv::putText(out, banner_text(report), {kBannerPad, kBannerPad + text.height}, kFont, kFontScale,
                    cv::Scalar(255, 255, 255), kFontThickness, cv::LINE_8);
    }
    return out;
}

cv::Mat load_frame_image(const std::filesystem::path& path)
{
    cv::Mat img = cv::imread(path.string(), cv::IMREAD_COLOR);
    if (img.empty()) throw IoError("cannot decode image '" + path.string() + "'");
    return img;
}

void save_frame_image(const std::filesystem::path& path, const cv::Mat& image)
{
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), image);
    } catch (const cv::Exception& e) {
        throw IoError("cannot write image '" + path.string() + "': " + e.what());
    }
    if (!ok) throw IoError("cannot write image '" + path.string() + "'");
}

}  // namespace socdist
