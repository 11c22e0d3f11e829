#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rsmhp {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A vector or list had the wrong size. `field` names the offending argument
/// and `index` its position (time step, trajectory, ...).
class DimensionError : public Error
{
public:
    DimensionError(std::string field, std::size_t index, std::size_t expected, std::size_t actual);

    const std::string& field() const noexcept { return field_; }
    std::size_t index() const noexcept { return index_; }
    std::size_t expected() const noexcept { return expected_; }
    std::size_t actual() const noexcept { return actual_; }

private:
    std::string field_;
    std::size_t index_;
    std::size_t expected_;
    std::size_t actual_;
};

/// A request would create more trajectories than the configured cap allows.
class CapacityError : public Error
{
public:
    using Error::Error;
};

/// Invalid argument or configuration value.
class ConfigError : public Error
{
public:
    ConfigError(std::string field, const std::string& message);

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Numerical failure (singular matrix, non-finite value).
class NumericalError : public Error
{
public:
    using Error::Error;
};

} // namespace rsmhp
