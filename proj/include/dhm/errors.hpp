#pragma once

#include <stdexcept>
#include <string>

namespace dhm {

/// Base class for all toolkit errors.
struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input text/JSON (bad column count, bad schema, ...).
/// CLI maps this family to exit code 2.
struct parse_error : error {
    explicit parse_error(const std::string& what, long line = -1)
        : error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_number(line) {}
    long line_number;
};

/// Inconsistent or unusable configuration (missing file, conflicting keys).
/// CLI maps this family to exit code 2.
struct config_error : error {
    using error::error;
};

/// Violated physical/model precondition (non-positive length, posture size
/// mismatch, capacity out of range, ...). CLI maps this family to exit code 3.
struct model_error : error {
    using error::error;
};

}  // namespace dhm
