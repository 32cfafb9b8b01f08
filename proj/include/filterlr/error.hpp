#pragma once

#include <stdexcept>
#include <string>

namespace filterlr {

/// Bad input: malformed files, violated preconditions, inconsistent shapes.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Failure while running an otherwise valid request (I/O, numerical breakdown).
class RuntimeError : public std::runtime_error {
public:
    explicit RuntimeError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace filterlr
