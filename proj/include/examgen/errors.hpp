#pragma once

#include <stdexcept>
#include <string>

namespace examgen {

// Error taxonomy used across the engine. The CLI maps EngineError (bad
// input, bad config, bad file) to exit code 1 and anything else to 2.
class EngineError : public std::runtime_error {
public:
    explicit EngineError(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public EngineError {
public:
    ParseError(const std::string& file, long line, const std::string& msg)
        : EngineError(file + ":" + std::to_string(line) + ": " + msg) {}
};

class DomainError : public EngineError {
public:
    explicit DomainError(const std::string& msg) : EngineError(msg) {}
};

class ReferenceError : public EngineError {
public:
    explicit ReferenceError(const std::string& msg) : EngineError(msg) {}
};

class ConfigError : public EngineError {
public:
    explicit ConfigError(const std::string& msg) : EngineError(msg) {}
};

class IoError : public EngineError {
public:
    explicit IoError(const std::string& msg) : EngineError(msg) {}
};

// A question that was never attempted has no defined difficulty label.
class UndefinedLabelError : public EngineError {
public:
    explicit UndefinedLabelError(const std::string& msg) : EngineError(msg) {}
};

class TrainingDivergedError : public EngineError {
public:
    explicit TrainingDivergedError(const std::string& msg) : EngineError(msg) {}
};

// Raised when an action subspace has no question left that is not already
// in the paper; the caller switches to another subspace.
class EmptyActionError : public EngineError {
public:
    explicit EmptyActionError(const std::string& msg) : EngineError(msg) {}
};

// Broken internal invariant; maps to exit code 2.
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace examgen
