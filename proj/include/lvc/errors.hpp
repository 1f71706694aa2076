#pragma once

#include <stdexcept>
#include <string>

namespace lvc {

// Error categories. The CLI maps each category onto a process exit code.
enum class ErrorKind {
    config,     // bad configuration or usage
    data,       // malformed or inconsistent input data
    numeric,    // non-finite values during training
    dimension,  // tensor shape mismatch
    contract,   // violated precondition
    domain,     // argument outside its mathematical domain
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    // 1 usage/config, 2 data, 3 numeric (internal contract violations count as numeric).
    int exit_code() const noexcept {
        switch (kind_) {
            case ErrorKind::config:
                return 1;
            case ErrorKind::data:
                return 2;
            default:
                return 3;
        }
    }

private:
    ErrorKind kind_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(ErrorKind::config, w) {}
};
struct DataError : Error {
    explicit DataError(const std::string& w) : Error(ErrorKind::data, w) {}
};
// Parse errors are data errors carrying a line number in the message.
struct ParseError : DataError {
    ParseError(const std::string& source, std::size_t line, const std::string& w)
        : DataError(source + ":" + std::to_string(line) + ": " + w), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};
struct NumericError : Error {
    explicit NumericError(const std::string& w) : Error(ErrorKind::numeric, w) {}
};
struct DimensionError : Error {
    explicit DimensionError(const std::string& w) : Error(ErrorKind::dimension, w) {}
};
struct ContractError : Error {
    explicit ContractError(const std::string& w) : Error(ErrorKind::contract, w) {}
};
struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error(ErrorKind::domain, w) {}
};

}  // namespace lvc
