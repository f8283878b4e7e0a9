#pragma once

#include <stdexcept>
#include <string>

namespace drgt {

// Invalid user input: malformed spec files, bad dimensions, out-of-range
// parameters. The CLI maps this to exit code 2.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Mismatched dimensions between objects that must agree.
struct DimensionError : InputError {
    explicit DimensionError(const std::string& msg) : InputError(msg) {}
};

// A polyhedron turned out to be empty where a nonempty one was required.
struct EmptySetError : std::runtime_error {
    explicit EmptySetError(const std::string& msg) : std::runtime_error(msg) {}
};

// Internal inconsistency (should not happen on valid inputs). Exit code 4.
struct InternalError : std::logic_error {
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace drgt
