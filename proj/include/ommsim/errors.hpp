#pragma once

#include <stdexcept>
#include <string>

namespace ommsim {

// Base class for all simulator errors.
class SimError : public std::runtime_error {
public:
    explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input text (XML/JSON scanning failures).
class ParseError : public SimError {
public:
    explicit ParseError(const std::string& what) : SimError(what) {}
};

// Structurally well-formed input that violates the expected schema
// (missing attributes, references to undeclared nodes).
class SchemaError : public SimError {
public:
    explicit SchemaError(const std::string& what) : SimError(what) {}
};

// Semantically invalid data (non-positive weights, obstacle on an endpoint).
class ValidationError : public SimError {
public:
    explicit ValidationError(const std::string& what) : SimError(what) {}
};

// Query for an id that does not exist.
class LookupError : public SimError {
public:
    explicit LookupError(const std::string& what) : SimError(what) {}
};

// Infeasible arguments to a generator or aggregator.
class ParameterError : public SimError {
public:
    explicit ParameterError(const std::string& what) : SimError(what) {}
};

// Seeded generation failed to satisfy its postcondition within bounded retries.
class GenerationError : public SimError {
public:
    explicit GenerationError(const std::string& what) : SimError(what) {}
};

// Attempt to compare results from mismatched scenarios.
class ComparisonError : public SimError {
public:
    explicit ComparisonError(const std::string& what) : SimError(what) {}
};

// Filesystem failures, kept distinct so the CLI can map them to exit code 2.
class IoError : public SimError {
public:
    explicit IoError(const std::string& what) : SimError(what) {}
};

} // namespace ommsim
