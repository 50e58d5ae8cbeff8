#pragma once

#include <stdexcept>
#include <string>

namespace mcf {

/// Base class for all library failures that carry domain meaning.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// |H| vanished where a functional divides by it.
class MinimalPointError : public Error {
public:
    using Error::Error;
};

/// Singular metric or rank-deficient Jacobian at some node.
class DegenerateGeometryError : public Error {
public:
    DegenerateGeometryError(const std::string& what, long node)
        : Error(what), node_(node) {}
    long node() const noexcept { return node_; }

private:
    long node_;
};

/// Corrupt or inconsistent input files.
class DataError : public Error {
public:
    using Error::Error;
};

}  // namespace mcf
