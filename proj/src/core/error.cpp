#include "knowada/core/error.hpp"

namespace knowada {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::validation: return "validation";
        case ErrorKind::parse: return "parse";
        case ErrorKind::io: return "io";
        case ErrorKind::contract: return "contract";
        case ErrorKind::structured_output: return "structured_output";
        case ErrorKind::transport: return "transport";
        case ErrorKind::status: return "status";
        case ErrorKind::unscripted: return "unscripted";
    }
    return "unknown";
}

int exit_code_for(const Error& error) noexcept {
    return error.is_backend_error() ? exit_code::backend : exit_code::validation;
}

}  // namespace knowada
