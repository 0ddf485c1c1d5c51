#pragma once

#include <stdexcept>
#include <string>

namespace did {

/// Base class for every failure raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad arguments or violated preconditions (caller bug).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed input data; message names the offending location.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Filesystem or other I/O failure.
class IoError : public Error {
public:
    using Error::Error;
};

// --- provider ---

/// Network-level failure (connect, timeout, reset). Retryable.
class TransportError : public Error {
public:
    using Error::Error;
};

/// Non-2xx HTTP status from a provider. Retryable for 429/5xx.
class HttpStatusError : public Error {
public:
    HttpStatusError(int status, const std::string& msg)
        : Error(msg), status_(status) {}
    int status() const { return status_; }

private:
    int status_;
};

/// Credential rejected (401/403) or missing. Never retried.
class AuthError : public Error {
public:
    using Error::Error;
};

/// Retry budget exhausted without a successful response.
class RetriesExhaustedError : public Error {
public:
    using Error::Error;
};

/// Provider answered 2xx but the body does not match the dialect.
class MalformedPayloadError : public Error {
public:
    using Error::Error;
};

/// Replay-only client saw a request with no recorded transcript.
class ReplayMissError : public Error {
public:
    using Error::Error;
};

// --- hypothesis ---

/// Every hypothesis assigned zero mass to the evidence.
class DegenerateEvidenceError : public Error {
public:
    using Error::Error;
};

/// A loss became non-finite during the refinement loop.
class NumericFailureError : public Error {
public:
    NumericFailureError(int iteration, const std::string& msg)
        : Error(msg), iteration_(iteration) {}
    int iteration() const { return iteration_; }

private:
    int iteration_;
};

}  // namespace did
