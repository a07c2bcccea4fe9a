#pragma once

#include <stdexcept>
#include <string>

namespace cpmri {

/// File missing, unreadable, or carries a malformed header/payload.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

/// Mask tuning could not reach the requested acceleration.
class infeasible_mask_error : public std::runtime_error {
public:
    explicit infeasible_mask_error(const std::string& what) : std::runtime_error(what) {}
};

/// Training produced a non-finite loss.
class divergence_error : public std::runtime_error {
public:
    explicit divergence_error(const std::string& what) : std::runtime_error(what) {}
};

/// Structurally invalid parameter set (step sizes, counts, splits).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Operation on an object whose lifecycle state forbids it (e.g. backward
/// through a tape that never recorded a forward pass).
class invalid_state_error : public std::logic_error {
public:
    explicit invalid_state_error(const std::string& what) : std::logic_error(what) {}
};

} // namespace cpmri
