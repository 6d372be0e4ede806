#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgalign {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A ConceptId outside [0, node_count).
class InvalidHandle : public Error {
public:
    using Error::Error;
};

/// Binary index is truncated, corrupted or of another format version.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Input violates an operation precondition (empty fields, bad sizes, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Text could not be parsed. offset is the byte position of the failure.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Embedding or generation backend failed (network, protocol, shape).
class ProviderError : public Error {
public:
    using Error::Error;
};

}  // namespace kgalign
