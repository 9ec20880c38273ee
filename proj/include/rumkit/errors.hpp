#pragma once

#include <stdexcept>
#include <string>

namespace rumkit {

/// Bad input data: violated invariants, degenerate geometry, schema errors.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A requested spectral object does not exist or was not found within the
/// search budget ("not in spectrum", "m_max exhausted", full-spectrum refusals).
class SpectrumError : public std::runtime_error {
public:
    explicit SpectrumError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem / serialization failures.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace rumkit
