#pragma once

#include <stdexcept>
#include <string>

namespace geowalk {

/// Invalid argument to a sampler, builder or solver.
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input that is valid in type but geometrically unusable (e.g. all points collinear).
class DegenerateInputError : public std::runtime_error {
public:
    explicit DegenerateInputError(const std::string& what) : std::runtime_error(what) {}
};

/// A postcondition that the theory guarantees failed to hold.
class InvariantViolation : public std::logic_error {
public:
    explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
};

/// Malformed input file (missing column, bad number, schema mismatch).
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace geowalk
