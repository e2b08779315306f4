#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace schw {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Wrong dimension, order, or index (e.g. mixing jets of different size,
// requesting the multi-dimensional Schwarzian at n = 1).
struct DimensionError : Error {
    using Error::Error;
};

// Point outside the domain of a map or operation (Moebius hyperplane,
// non-positive Jacobian for a density pullback, log of a non-positive jet).
struct DomainError : Error {
    using Error::Error;
};

// The map is not a local diffeomorphism where requested (singular linear
// part, Newton inversion failure).
struct SingularError : DomainError {
    using DomainError::DomainError;
};

// Malformed input data (asymmetric connection entries, bad scenario files,
// base-point mismatches).
struct DataError : Error {
    using Error::Error;
};

// Expression syntax error; `pos` is the 0-based offset into the source text.
struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t pos_)
        : Error(msg + " at position " + std::to_string(pos_)), pos(pos_) {}
    std::size_t pos;
};

}  // namespace schw
