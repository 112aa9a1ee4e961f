#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fusedcs {

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error
{
public:
    using Error::Error;
};

class InvalidPartition : public Error
{
public:
    using Error::Error;
};

class InvalidLayout : public Error
{
public:
    using Error::Error;
};

// A configuration value failed validation. `field()` names the offending key.
class ValidationError : public Error
{
public:
    ValidationError(std::string field, const std::string& what)
        : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)), message_(what)
    {}

    const std::string& field() const noexcept { return field_; }
    // The description without the field prefix.
    const std::string& message() const noexcept { return message_; }

private:
    std::string field_;
    std::string message_;
};

// An ADMM iterate became non-finite, or the x-update system could not be factorized.
class SolverError : public Error
{
public:
    SolverError(const std::string& what, std::size_t iteration)
        : Error(what + " (iteration " + std::to_string(iteration) + ")"), iteration_(iteration)
    {}

    std::size_t iteration() const noexcept { return iteration_; }

    // Same failure with `context` (e.g. the variant name) prepended to the message.
    SolverError with_context(const std::string& context) const
    {
        return SolverError(context + ": " + what(), iteration_, Raw{});
    }

private:
    struct Raw {};
    SolverError(const std::string& message, std::size_t iteration, Raw) : Error(message), iteration_(iteration) {}

    std::size_t iteration_;
};

class IoError : public Error
{
public:
    using Error::Error;
};

} // namespace fusedcs
