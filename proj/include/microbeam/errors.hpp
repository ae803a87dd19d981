#pragma once

#include <stdexcept>
#include <string>

namespace microbeam {

// Value outside the documented domain of an operation (bad angle, bad count, ...).
struct domain_error : std::invalid_argument {
    explicit domain_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Structurally inconsistent inputs (dimension mismatch, non-divisible reshape, ...).
struct dimension_error : std::invalid_argument {
    explicit dimension_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Malformed or contradictory configuration.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem / serialization failures.
struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A computed result violated an internal invariant.
struct internal_error : std::logic_error {
    explicit internal_error(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace microbeam
