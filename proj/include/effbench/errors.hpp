#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace effbench {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed document (manifest, job, record, results line).
class ParseError : public Error {
public:
    using Error::Error;
};

struct Violation {
    std::string code;     // machine-readable, e.g. "empty_level@level1"
    std::string message;  // human-readable
};

// One or more invariant violations. Carries every violation found.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Violation> violations)
        : Error(summarize(violations)), violations_(std::move(violations)) {}

    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    static std::string summarize(const std::vector<Violation>& vs) {
        std::string out = "validation failed:";
        for (const auto& v : vs) out += "\n  [" + v.code + "] " + v.message;
        return out;
    }

    std::vector<Violation> violations_;
};

// Bad numeric parameter (k > n, empty input, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Bad harness configuration (alpha <= 1, repeats < 1, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Data that is well-formed but unusable, e.g. an uncalibrated manifest.
class DataError : public Error {
public:
    using Error::Error;
};

// Test-case generator failed or produced unusable output.
class GeneratorError : public Error {
public:
    using Error::Error;
};

// The reference solution misbehaved while being measured.
class AuthoringError : public Error {
public:
    using Error::Error;
};

// The runner broke the protocol (crash, malformed output, missing records).
// Distinct from a candidate failing inside a well-behaved runner.
class ProtocolError : public Error {
public:
    using Error::Error;
};

// Unrecoverable supervision failure, e.g. a worker that survives SIGKILL.
class HarnessError : public Error {
public:
    using Error::Error;
};

}  // namespace effbench
