#pragma once

#include <stdexcept>
#include <string>

namespace pisco {

// Error taxonomy mirrors the CLI exit codes: config -> 2, data -> 3,
// assumption violation -> 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct DataError : Error {
    using Error::Error;
};

// Raised when a run requires lambda_p > 0 (probabilistic mixing contraction)
// and the configured topology/probability cannot provide it.
struct AssumptionError : Error {
    using Error::Error;
};

// Distinct data-error flavors so callers can tell a malformed file from a
// well-formed file with bad content.
struct ParseError : DataError {
    using DataError::DataError;
};

struct StochasticityError : DataError {
    using DataError::DataError;
};

struct PatternError : DataError {
    using DataError::DataError;
};

}  // namespace pisco
