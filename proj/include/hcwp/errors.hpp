#pragma once

#include <stdexcept>
#include <string>

namespace hcwp {

/// Raised when a (set, k, i) combination has no reduction implemented.
/// The message names the missing piece.
class UnsupportedParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised by critical-λ search when both ends of the bracket have the same count.
class NoTransition : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a tree enumeration would exceed the configured vertex cap.
class TreeCapExceeded : public std::length_error {
public:
    using std::length_error::length_error;
};

}  // namespace hcwp
