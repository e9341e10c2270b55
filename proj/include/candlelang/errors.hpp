#pragma once

#include <stdexcept>
#include <string>

namespace candlelang {

/// Malformed or inconsistent input data (CSV rows, JSON artifacts).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace candlelang
