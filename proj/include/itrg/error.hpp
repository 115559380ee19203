#pragma once

#include <stdexcept>
#include <string>

namespace itrg {

/// Base class for all library errors. The CLI maps the three subclasses to
/// distinct exit codes (config = 2, data = 3, backend = 4).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad run configuration: invalid parameters, label mismatches, missing paths.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Malformed or inconsistent input data: corpus records, datasets, indexes,
/// trace files, lookups of unknown ids.
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(what) {}
};

/// Completion or embedding backend failure: transport errors after retries,
/// refusals, empty or malformed responses.
class BackendError : public Error {
public:
    explicit BackendError(const std::string& what) : Error(what) {}
};

} // namespace itrg
