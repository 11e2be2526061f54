// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace hgs {

// Temporal variance collapsed below the usable floor; the Gaussian should
// have been classified static or pruned before reaching the slicer.
struct DegenerateTemporalError : std::runtime_error {
    explicit DegenerateTemporalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateRotationError : std::runtime_error {
    explicit DegenerateRotationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IntegrityError : std::runtime_error {
    explicit IntegrityError(const std::string& msg) : std::runtime_error(msg) {}
};

struct UnsupportedVersionError : std::runtime_error {
    explicit UnsupportedVersionError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericAbort : std::runtime_error {
    explicit NumericAbort(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hgs
