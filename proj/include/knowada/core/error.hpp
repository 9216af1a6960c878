#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace knowada {

enum class ErrorKind {
    validation,         // bad input, config or arguments
    parse,              // malformed record line
    io,                 // filesystem failure
    contract,           // violated precondition/postcondition
    structured_output,  // backend text could not be parsed into the expected shape
    transport,          // endpoint unreachable after retries
    status,             // endpoint answered with a non-success status
    unscripted,         // mock backend has no response for the request key
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::string raw = {})
        : std::runtime_error(message), kind_(kind), raw_(std::move(raw)) {}

    ErrorKind kind() const noexcept { return kind_; }

    // Raw backend text for structured-output errors, body excerpt for status errors.
    const std::string& raw() const noexcept { return raw_; }

    bool is_backend_error() const noexcept {
        return kind_ == ErrorKind::transport || kind_ == ErrorKind::status ||
               kind_ == ErrorKind::unscripted;
    }

private:
    ErrorKind kind_;
    std::string raw_;
};

// Process exit codes shared by every CLI entry point.
namespace exit_code {
inline constexpr int success = 0;
inline constexpr int validation = 1;
inline constexpr int backend = 2;
inline constexpr int partial = 3;
}  // namespace exit_code

int exit_code_for(const Error& error) noexcept;

}  // namespace knowada
