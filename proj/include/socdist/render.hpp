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

#include <filesystem>
#include <string>

#include <opencv2/core.hpp>

#include "socdist/violation.hpp"

namespace socdist {

inline constexpr int kBoxStroke = 3;

// BGR
inline const cv::Scalar kRed{0, 0, 255};
inline const cv::Scalar kGreen{0, 255, 0};

std::string banner_text(const FrameReport& report);

/// Area covered by the count banner, clipped to the image.
cv::Rect banner_region(const cv::Size& image, const FrameReport& report);

/// Copy of `frame` with every person box stroked red or green and the
/// violation-count banner in the top-left corner. Output depends only on the
/// inputs.
cv::Mat render_annotations(const cv::Mat& frame, const FrameReport& report);

/// Throws IoError when the file cannot be decoded.
cv::Mat load_frame_image(const std::filesystem::path& path);
void save_frame_image(const std::filesystem::path& path, const cv::Mat& image);

}  // namespace socdist
