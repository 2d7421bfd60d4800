#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace linest {

enum class ErrorCode {
    InvalidInput,
    SingularMatrix,
    InvalidConfig,
    Io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& message)
        : Error(ErrorCode::InvalidInput, message) {}
};

/// Raised when a matrix that must be inverted is not positive definite, or is
/// too badly conditioned to be distinguished from a singular one.
class SingularMatrix : public Error {
public:
    SingularMatrix(std::string matrix_name, double condition, const std::string& hint = {})
        : Error(ErrorCode::SingularMatrix, format(matrix_name, condition, hint)),
          matrix_name_(std::move(matrix_name)),
          condition_(condition) {}

    const std::string& matrix_name() const noexcept { return matrix_name_; }
    /// Condition estimate at failure; +inf when the factorization broke down.
    double condition() const noexcept { return condition_; }

private:
    static std::string format(const std::string& name, double condition, const std::string& hint) {
        std::string msg = "singular matrix: " + name + " (condition estimate " +
                          std::to_string(condition) + ")";
        if (!hint.empty()) msg += "; " + hint;
        return msg;
    }

    std::string matrix_name_;
    double condition_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> issues)
        : Error(ErrorCode::InvalidConfig, join(issues)), issues_(std::move(issues)) {}

    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues) {
        std::string out;
        for (const auto& issue : issues) {
            if (!out.empty()) out += '\n';
            out += issue;
        }
        return out;
    }

    std::vector<std::string> issues_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error(ErrorCode::Io, message) {}
};

}  // namespace linest
