#pragma once

#include <stdexcept>
#include <string>

namespace logstamp {

// Shared error taxonomy. The CLI maps kinds to exit codes:
// I/O and file-format problems exit 1, parameter/validation problems exit 2.
enum class ErrorKind {
    Input,        // missing/unreadable input
    Schema,       // input file lacks a required column
    EmptyDataset, // file has no usable rows
    Format,       // bad magic / unsupported version in a model or store file
    Corruption,   // checksum mismatch, truncated payload
    Parameter,    // out-of-range configuration value
    Consistency,  // mismatched lengths / ids between paired inputs
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    int exit_code() const noexcept {
        switch (kind_) {
        case ErrorKind::Parameter:
        case ErrorKind::Consistency:
            return 2;
        default:
            return 1;
        }
    }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void throw_error(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace logstamp
