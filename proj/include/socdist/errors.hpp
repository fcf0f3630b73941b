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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace socdist {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Degenerate box, non-positive extent, non-finite coordinate.
class InvalidGeometry : public Error {
public:
    using Error::Error;
};

/// Calibration quad (or the linear system built from it) is singular.
class DegenerateCalibration : public Error {
public:
    using Error::Error;
};

/// Projected homogeneous depth vanished.
class PointAtInfinity : public Error {
public:
    using Error::Error;
};

/// A record file failed to parse. Carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Frame indices in a stream were not strictly ascending.
class StreamOrderError : public ParseError {
public:
    using ParseError::ParseError;
};

/// Invalid or inconsistent configuration. `field` names the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// A metric has no defined value (e.g. AP with zero ground truths).
class UndefinedMetric : public Error {
public:
    using Error::Error;
};

/// Prediction and ground-truth frames do not line up.
class AlignmentError : public Error {
public:
    using Error::Error;
};

/// Store contract violations: bad range, invalid event, torn header.
class StoreError : public Error {
public:
    using Error::Error;
};

}  // namespace socdist
