#pragma once

#include <stdexcept>
#include <string>

namespace mfp {

enum class ErrorCode {
    InvalidArgument,
    Parse,
    Validation,
    NonpositivePrice,
    HorizonOutOfRange,
    StepSizeTooLarge,
    FixedPointDivergence,
    RegimeMismatch,
    BranchCrossing,
    DegenerateSample,
    WindowTooLarge,
    NotOscillatory,
    NoRoot,
    Io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Thrown by integrators; carries the index of the step that failed.
class StepError : public Error {
public:
    StepError(ErrorCode code, long long step, const std::string& what)
        : Error(code, what), step_(step) {}
    long long step() const noexcept { return step_; }

private:
    long long step_;
};

class ParseError : public Error {
public:
    ParseError(int line, const std::string& what)
        : Error(ErrorCode::Parse, "line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& constraint)
        : Error(ErrorCode::Validation, field + ": " + constraint), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace mfp
